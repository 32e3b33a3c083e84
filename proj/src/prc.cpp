#include "clustermap/prc.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

#include "clustermap/angle.hpp"
#include "clustermap/error.hpp"

namespace clustermap {

namespace {

// Backward propagation of the adjoint along the tabulated cycle. In reversed
// time s = -t the equation reads dZ/ds = J^T Z, and the fine samples supply
// the RK4 midpoints.
class AdjointPropagator {
public:
	explicit AdjointPropagator(const PeriodicOrbit& orbit)
		: n_(orbit.sample_count()), h_(orbit.period / static_cast<double>(orbit.sample_count()))
	{
		jt_.reserve(orbit.fine_samples.size());
		for (const State& x : orbit.fine_samples)
			jt_.push_back(orbit.model.eval_jacobian(x).transpose());
	}

	// Z at sample i -> Z at sample i - 1.
	State step_back(std::size_t i, const State& z) const
	{
		const Matrix& j0 = jt_[2 * i];
		const Matrix& jm = jt_[2 * i - 1];
		const Matrix& j1 = jt_[2 * i - 2];
		const State k1 = j0 * z;
		const State k2 = jm * (z + 0.5 * h_ * k1);
		const State k3 = jm * (z + 0.5 * h_ * k2);
		const State k4 = j1 * (z + h_ * k3);
		return z + (h_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
	}

	// One full period backward; optionally record Z at every sample.
	State period_back(State z, std::vector<State>* table = nullptr) const
	{
		if (table)
			table->assign(n_, State());
		for (std::size_t i = n_; i > 0; --i) {
			z = step_back(i, z);
			if (table)
				(*table)[i - 1] = z;
		}
		return z;
	}

	Matrix monodromy(int dim) const
	{
		Matrix m(dim, dim);
		for (int j = 0; j < dim; ++j)
			m.col(j) = period_back(State::Unit(dim, j));
		return m;
	}

private:
	std::size_t n_;
	double h_;
	std::vector<Matrix> jt_;
};

} // namespace

AdjointSolution solve_adjoint(const PeriodicOrbit& orbit, const AdjointOptions& options)
{
	const int dim = orbit.model.state_dim();
	const AdjointPropagator prop(orbit);

	// Seed with the eigenvector of the backward monodromy whose multiplier is
	// closest to 1; the remaining modes contract at the orbit's Floquet rates.
	State z = State::Unit(dim, orbit.model.voltage_index());
	{
		Eigen::EigenSolver<Matrix> eig(prop.monodromy(dim));
		if (eig.info() == Eigen::Success) {
			int best = -1;
			double best_gap = std::numeric_limits<double>::infinity();
			for (int k = 0; k < dim; ++k) {
				const double gap = std::abs(eig.eigenvalues()[k] - std::complex<double>(1.0, 0.0));
				if (gap < best_gap) {
					best_gap = gap;
					best = k;
				}
			}
			State v = eig.eigenvectors().col(best).real();
			if (v.norm() > 0.0 && v.allFinite())
				z = v;
		}
	}
	z.normalize();

	AdjointSolution sol;
	bool converged = false;
	for (int p = 1; p <= options.max_periods; ++p) {
		State next = prop.period_back(z);
		if (!next.allFinite())
			break;
		next.normalize();
		if (next.dot(z) < 0.0)
			next = -next;
		const double change = (next - z).norm();
		z = next;
		sol.periods = p;
		if (change < options.tolerance) {
			converged = true;
			break;
		}
	}
	if (!converged) {
		throw NumericalFailure(FailureKind::AdjointDivergence,
			"adjoint did not settle to a periodic solution within "
			+ std::to_string(options.max_periods) + " periods");
	}

	prop.period_back(z, &sol.gradient);

	const std::size_t n = orbit.sample_count();
	std::vector<double> dots(n);
	double mean = 0.0;
	for (std::size_t k = 0; k < n; ++k) {
		dots[k] = sol.gradient[k].dot(orbit.model.eval_rhs(orbit.samples[k]));
		mean += dots[k];
	}
	mean /= static_cast<double>(n);
	if (!(std::abs(mean) > 0.0))
		throw NumericalFailure(FailureKind::AdjointDivergence, "adjoint is orthogonal to the flow");
	const double scale = orbit.omega / mean;
	for (std::size_t k = 0; k < n; ++k) {
		sol.gradient[k] *= scale;
		const double r = std::abs(dots[k] * scale - orbit.omega) / orbit.omega;
		sol.max_normalization_residual = std::max(sol.max_normalization_residual, r);
	}
	return sol;
}

PhaseResponseCurve compute_prc_adjoint(const PeriodicOrbit& orbit, const AdjointOptions& options)
{
	const AdjointSolution sol = solve_adjoint(orbit, options);
	const int vi = orbit.model.voltage_index();
	const double cm = orbit.model.capacitance();
	std::vector<double> zv(sol.gradient.size());
	for (std::size_t k = 0; k < zv.size(); ++k)
		zv[k] = sol.gradient[k][vi] / cm;

	int order = options.order;
	if (order <= 0)
		order = FourierSeries::choose_order(zv, options.tail_tolerance, options.min_order, options.max_order);
	return PhaseResponseCurve{orbit.omega, FourierSeries::fit(zv, order)};
}

PhaseResponseCurve compute_prc_adjoint(const PeriodicOrbit& orbit, int order)
{
	if (order < 1)
		throw InvalidInput("PRC Fourier order must be at least 1");
	AdjointOptions opts;
	opts.order = order;
	return compute_prc_adjoint(orbit, opts);
}

std::vector<double> direct_prc(const PeriodicOrbit& orbit, std::span<const double> phases, double impulse_area)
{
	const int vi = orbit.model.voltage_index();
	const double jump = impulse_area / orbit.model.capacitance();
	std::vector<double> out;
	out.reserve(phases.size());
	for (double theta : phases) {
		const State x = orbit.state_at_phase(theta);
		State kicked = x;
		kicked[vi] += jump;
		const double base = asymptotic_phase(orbit, x);
		const double moved = asymptotic_phase(orbit, kicked);
		out.push_back(wrap_signed(moved - base) / impulse_area);
	}
	return out;
}

void write_prc_csv(std::ostream& out, const PhaseResponseCurve& prc)
{
	write_fourier_csv(out, prc.omega, prc.series);
}

PhaseResponseCurve read_prc_csv(std::istream& in)
{
	PhaseResponseCurve prc;
	read_fourier_csv(in, prc.omega, prc.series);
	return prc;
}

} // namespace clustermap
