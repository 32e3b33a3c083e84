#include "clustermap/neuron_model.hpp"

#include <cmath>

#include "clustermap/error.hpp"

namespace clustermap {

namespace {

// x / (1 - exp(-x/10)) and its derivative. The quotient has a removable
// singularity at x = 0; inside a tiny band use the Taylor expansion
// 10 + x/2 + x^2/120.
struct Linoid {
	double value;
	double slope;
};

Linoid linoid(double x)
{
	const double e = std::exp(-x / 10.0);
	const double denom = 1.0 - e;
	if (std::abs(denom) < 1e-7) {
		return {10.0 + x / 2.0 + x * x / 120.0, 0.5 + x / 60.0};
	}
	return {x / denom, (denom - x * e / 10.0) / (denom * denom)};
}

// Logistic 1 / (1 + exp((V - half) / k)) and d/dV.
struct Sigmoid {
	double value;
	double slope;
};

Sigmoid falling_sigmoid(double v, double half, double k)
{
	const double s = 1.0 / (1.0 + std::exp((v - half) / k));
	return {s, -s * (1.0 - s) / k};
}

// ---- Hodgkin-Huxley ----------------------------------------------------

struct HHRates {
	double am, bm, ah, bh, an, bn;
	double dam, dbm, dah, dbh, dan, dbn;
};

HHRates hh_rates(double v)
{
	HHRates r{};
	const Linoid lm = linoid(v + 40.0);
	r.am = 0.1 * lm.value;
	r.dam = 0.1 * lm.slope;
	r.bm = 4.0 * std::exp(-(v + 65.0) / 18.0);
	r.dbm = -r.bm / 18.0;

	r.ah = 0.07 * std::exp(-(v + 65.0) / 20.0);
	r.dah = -r.ah / 20.0;
	const Sigmoid sh = falling_sigmoid(v, -35.0, -10.0);
	r.bh = sh.value;
	r.dbh = sh.slope;

	const Linoid ln = linoid(v + 55.0);
	r.an = 0.01 * ln.value;
	r.dan = 0.01 * ln.slope;
	r.bn = 0.125 * std::exp(-(v + 65.0) / 80.0);
	r.dbn = -r.bn / 80.0;
	return r;
}

State hh_rhs(const HodgkinHuxleyParams& p, const State& x, double u)
{
	const double v = x[0], m = x[1], h = x[2], n = x[3];
	const HHRates r = hh_rates(v);
	const double m3 = m * m * m;
	const double n4 = n * n * n * n;
	State dx(4);
	dx[0] = (p.I_b - p.g_Na * h * (v - p.V_Na) * m3 - p.g_K * (v - p.V_K) * n4
	         - p.g_L * (v - p.V_L) + u) / p.c;
	dx[1] = r.am * (1.0 - m) - r.bm * m;
	dx[2] = r.ah * (1.0 - h) - r.bh * h;
	dx[3] = r.an * (1.0 - n) - r.bn * n;
	return dx;
}

Matrix hh_jacobian(const HodgkinHuxleyParams& p, const State& x)
{
	const double v = x[0], m = x[1], h = x[2], n = x[3];
	const HHRates r = hh_rates(v);
	Matrix j = Matrix::Zero(4, 4);
	j(0, 0) = -(p.g_Na * m * m * m * h + p.g_K * n * n * n * n + p.g_L) / p.c;
	j(0, 1) = -3.0 * p.g_Na * m * m * h * (v - p.V_Na) / p.c;
	j(0, 2) = -p.g_Na * m * m * m * (v - p.V_Na) / p.c;
	j(0, 3) = -4.0 * p.g_K * n * n * n * (v - p.V_K) / p.c;

	j(1, 0) = r.dam * (1.0 - m) - r.dbm * m;
	j(1, 1) = -(r.am + r.bm);
	j(2, 0) = r.dah * (1.0 - h) - r.dbh * h;
	j(2, 2) = -(r.ah + r.bh);
	j(3, 0) = r.dan * (1.0 - n) - r.dbn * n;
	j(3, 3) = -(r.an + r.bn);
	return j;
}

// ---- Thalamic ----------------------------------------------------------

struct ThalamicGates {
	Sigmoid h_inf, r_inf, m_inf, p_inf;
	double tau_h, dtau_h;
	double tau_r, dtau_r;
};

ThalamicGates thalamic_gates(double v)
{
	ThalamicGates g{};
	g.h_inf = falling_sigmoid(v, -41.0, 4.0);
	g.r_inf = falling_sigmoid(v, -84.0, 4.0);
	g.m_inf = falling_sigmoid(v, -37.0, -7.0);
	g.p_inf = falling_sigmoid(v, -60.0, -6.2);

	const double alpha = 0.128 * std::exp(-(v + 46.0) / 18.0);
	const double dalpha = -alpha / 18.0;
	const Sigmoid sb = falling_sigmoid(v, -23.0, -5.0);
	const double beta = 4.0 * sb.value;
	const double dbeta = 4.0 * sb.slope;
	g.tau_h = 1.0 / (alpha + beta);
	g.dtau_h = -(dalpha + dbeta) * g.tau_h * g.tau_h;

	const double er = std::exp(-(v + 25.0) / 10.5);
	g.tau_r = 28.0 + er;
	g.dtau_r = -er / 10.5;
	return g;
}

State thalamic_rhs(const ThalamicParams& p, const State& x, double u)
{
	const double v = x[0], h = x[1], r = x[2];
	const ThalamicGates g = thalamic_gates(v);
	const double m_inf = g.m_inf.value;
	const double p_inf = g.p_inf.value;
	const double k_gate = 0.75 * (1.0 - h);

	const double i_l = p.g_L * (v - p.e_L);
	const double i_na = p.g_Na * m_inf * m_inf * m_inf * h * (v - p.e_Na);
	const double i_k = p.g_K * std::pow(k_gate, 4) * (v - p.e_K);
	const double i_t = p.g_T * p_inf * p_inf * r * (v - p.e_T);

	State dx(3);
	dx[0] = (-i_l - i_na - i_k - i_t + p.I_b + u) / p.C_m;
	dx[1] = (g.h_inf.value - h) / g.tau_h;
	dx[2] = (g.r_inf.value - r) / g.tau_r;
	return dx;
}

Matrix thalamic_jacobian(const ThalamicParams& p, const State& x)
{
	const double v = x[0], h = x[1], r = x[2];
	const ThalamicGates g = thalamic_gates(v);
	const double mi = g.m_inf.value, dmi = g.m_inf.slope;
	const double pi = g.p_inf.value, dpi = g.p_inf.slope;
	const double k_gate = 0.75 * (1.0 - h);
	const double k4 = std::pow(k_gate, 4);

	Matrix j = Matrix::Zero(3, 3);
	const double di_dv = p.g_L
		+ p.g_Na * h * (3.0 * mi * mi * dmi * (v - p.e_Na) + mi * mi * mi)
		+ p.g_K * k4
		+ p.g_T * r * (2.0 * pi * dpi * (v - p.e_T) + pi * pi);
	j(0, 0) = -di_dv / p.C_m;
	j(0, 1) = -(p.g_Na * mi * mi * mi * (v - p.e_Na)
	            - 3.0 * p.g_K * k_gate * k_gate * k_gate * (v - p.e_K)) / p.C_m;
	j(0, 2) = -p.g_T * pi * pi * (v - p.e_T) / p.C_m;

	j(1, 0) = g.h_inf.slope / g.tau_h - (g.h_inf.value - h) * g.dtau_h / (g.tau_h * g.tau_h);
	j(1, 1) = -1.0 / g.tau_h;
	j(2, 0) = g.r_inf.slope / g.tau_r - (g.r_inf.value - r) * g.dtau_r / (g.tau_r * g.tau_r);
	j(2, 2) = -1.0 / g.tau_r;
	return j;
}

template <typename Params>
double* param_slot(Params& p, std::string_view key);

template <>
double* param_slot(HodgkinHuxleyParams& p, std::string_view key)
{
	if (key == "I_b")  return &p.I_b;
	if (key == "g_Na") return &p.g_Na;
	if (key == "g_K")  return &p.g_K;
	if (key == "g_L")  return &p.g_L;
	if (key == "V_Na") return &p.V_Na;
	if (key == "V_K")  return &p.V_K;
	if (key == "V_L")  return &p.V_L;
	if (key == "c")    return &p.c;
	return nullptr;
}

template <>
double* param_slot(ThalamicParams& p, std::string_view key)
{
	if (key == "C_m")  return &p.C_m;
	if (key == "g_L")  return &p.g_L;
	if (key == "e_L")  return &p.e_L;
	if (key == "g_Na") return &p.g_Na;
	if (key == "e_Na") return &p.e_Na;
	if (key == "g_K")  return &p.g_K;
	if (key == "e_K")  return &p.e_K;
	if (key == "g_T")  return &p.g_T;
	if (key == "e_T")  return &p.e_T;
	if (key == "I_b")  return &p.I_b;
	return nullptr;
}

} // namespace

ModelKind parse_model_kind(std::string_view name)
{
	if (name == "hh" || name == "HodgkinHuxley" || name == "hodgkin-huxley")
		return ModelKind::HodgkinHuxley;
	if (name == "thalamic" || name == "Thalamic")
		return ModelKind::Thalamic;
	throw InvalidInput("unknown neuron model '" + std::string(name) + "'");
}

std::string_view to_string(ModelKind kind)
{
	return kind == ModelKind::HodgkinHuxley ? "hh" : "thalamic";
}

NeuronModel::NeuronModel(ModelKind kind)
{
	if (kind == ModelKind::HodgkinHuxley)
		params_ = HodgkinHuxleyParams{};
	else
		params_ = ThalamicParams{};
}

NeuronModel::NeuronModel(HodgkinHuxleyParams params) : params_(params) {}
NeuronModel::NeuronModel(ThalamicParams params) : params_(params) {}

ModelKind NeuronModel::kind() const
{
	return std::holds_alternative<HodgkinHuxleyParams>(params_) ? ModelKind::HodgkinHuxley
	                                                            : ModelKind::Thalamic;
}

int NeuronModel::state_dim() const
{
	return kind() == ModelKind::HodgkinHuxley ? 4 : 3;
}

double NeuronModel::capacitance() const
{
	return std::visit([](const auto& p) {
		if constexpr (std::is_same_v<std::decay_t<decltype(p)>, HodgkinHuxleyParams>)
			return p.c;
		else
			return p.C_m;
	}, params_);
}

std::map<std::string, double> NeuronModel::params() const
{
	if (const auto* p = std::get_if<HodgkinHuxleyParams>(&params_)) {
		return {{"I_b", p->I_b}, {"g_Na", p->g_Na}, {"g_K", p->g_K}, {"g_L", p->g_L},
		        {"V_Na", p->V_Na}, {"V_K", p->V_K}, {"V_L", p->V_L}, {"c", p->c}};
	}
	const auto& p = std::get<ThalamicParams>(params_);
	return {{"C_m", p.C_m}, {"g_L", p.g_L}, {"e_L", p.e_L}, {"g_Na", p.g_Na},
	        {"e_Na", p.e_Na}, {"g_K", p.g_K}, {"e_K", p.e_K}, {"g_T", p.g_T},
	        {"e_T", p.e_T}, {"I_b", p.I_b}};
}

void NeuronModel::set_param(std::string_view key, double value)
{
	double* slot = std::visit([&](auto& p) { return param_slot(p, key); }, params_);
	if (!slot)
		throw InvalidInput("model '" + std::string(name()) + "' has no parameter '" + std::string(key) + "'");
	*slot = value;
}

State NeuronModel::initial_state() const
{
	const double v = -65.0;
	if (kind() == ModelKind::HodgkinHuxley) {
		const HHRates r = hh_rates(v);
		State x(4);
		x << v, r.am / (r.am + r.bm), r.ah / (r.ah + r.bh), r.an / (r.an + r.bn);
		return x;
	}
	const ThalamicGates g = thalamic_gates(v);
	State x(3);
	x << v, g.h_inf.value, g.r_inf.value;
	return x;
}

void NeuronModel::check_dim(const State& x) const
{
	if (x.size() != state_dim()) {
		throw InvalidInput("state has dimension " + std::to_string(x.size()) + ", model '"
		                   + std::string(name()) + "' expects " + std::to_string(state_dim()));
	}
}

State NeuronModel::eval_rhs(const State& x, double input_current) const
{
	check_dim(x);
	if (const auto* p = std::get_if<HodgkinHuxleyParams>(&params_))
		return hh_rhs(*p, x, input_current);
	return thalamic_rhs(std::get<ThalamicParams>(params_), x, input_current);
}

Matrix NeuronModel::eval_jacobian(const State& x) const
{
	check_dim(x);
	if (const auto* p = std::get_if<HodgkinHuxleyParams>(&params_))
		return hh_jacobian(*p, x);
	return thalamic_jacobian(std::get<ThalamicParams>(params_), x);
}

} // namespace clustermap
