#include "clustermap/population.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <numeric>
#include <ostream>

#include "clustermap/angle.hpp"
#include "clustermap/error.hpp"
#include "clustermap/map_analysis.hpp"
#include "clustermap/ode.hpp"
#include "clustermap/parallel.hpp"

namespace clustermap {

namespace {

std::string fmt12(double v)
{
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.12g", v);
	return buf;
}

// A stretch of constant current; `record` marks a snapshot at its end.
struct Piece {
	double start;
	double end;
	double current;
	bool record;
};

std::vector<Piece> build_schedule(const PulseTrain& train, double t0, double t1, double record_dt,
                                  std::vector<double>& record_times)
{
	constexpr double eps = 1e-9;
	std::vector<Piece> raw;
	const auto segments = train.segments();
	const int cycles = static_cast<int>(std::ceil((t1 - eps) / train.period));
	for (int q = 0; q <= cycles; ++q) {
		const double base = q * train.period;
		for (const auto& seg : segments) {
			const double a = std::max(base + seg.start, t0);
			const double b = std::min(base + seg.end, t1);
			if (b - a > eps)
				raw.push_back({a, b, seg.current, false});
		}
	}
	if (!raw.empty()) {
		raw.front().start = t0;
		raw.back().end = t1;
	}

	record_times.clear();
	if (record_dt <= 0.0)
		return raw;

	record_times.push_back(t0);
	std::vector<Piece> out;
	long k = 1;
	auto next_time = [&] { return t0 + static_cast<double>(k) * record_dt; };
	for (const Piece& p : raw) {
		double cur = p.start;
		while (next_time() < p.end - eps) {
			const double t = next_time();
			if (t > cur + eps) {
				out.push_back({cur, t, p.current, true});
				cur = t;
			} else if (!out.empty()) {
				out.back().record = true;
			}
			record_times.push_back(t);
			++k;
		}
		const bool hits = std::abs(next_time() - p.end) <= eps;
		out.push_back({cur, p.end, p.current, hits});
		if (hits) {
			record_times.push_back(p.end);
			++k;
		}
	}
	return out;
}

} // namespace

DistributionKind parse_distribution_kind(const std::string& name)
{
	if (name == "uniform")
		return DistributionKind::Uniform;
	if (name == "vonmises" || name == "von_mises" || name == "von-mises")
		return DistributionKind::VonMises;
	throw InvalidInput("unknown distribution '" + name + "' (expected uniform or vonmises)");
}

std::string to_string(DistributionKind kind)
{
	return kind == DistributionKind::Uniform ? "uniform" : "vonmises";
}

double bessel_i0(double kappa)
{
	const double q = 0.25 * kappa * kappa;
	double term = 1.0;
	double sum = 1.0;
	for (int k = 1; k < 1000; ++k) {
		term *= q / (static_cast<double>(k) * k);
		sum += term;
		if (term < 1e-17 * sum)
			break;
	}
	return sum;
}

double von_mises_cdf(double x, double kappa)
{
	using std::numbers::pi;
	if (x <= -pi)
		return 0.0;
	if (x >= pi)
		return 1.0;
	if (kappa == 0.0)
		return (x + pi) / two_pi;
	const double norm = 1.0 / (two_pi * bessel_i0(kappa));
	auto density = [&](double t) { return std::exp(kappa * std::cos(t)) * norm; };
	using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
	return std::clamp(Quad::integrate(density, -pi, x, 15, 1e-13), 0.0, 1.0);
}

void InitialDistribution::validate() const
{
	if (count < 1)
		throw InvalidInput("population size must be at least 1");
	if (kind == DistributionKind::VonMises && !(kappa >= 0.0 && kappa <= 100.0))
		throw InvalidInput("von Mises kappa must lie in [0, 100]");
	if (!std::isfinite(center))
		throw InvalidInput("distribution center must be finite");
}

std::vector<double> InitialDistribution::phases() const
{
	validate();
	std::vector<double> out(count);
	if (kind == DistributionKind::Uniform) {
		for (int i = 0; i < count; ++i)
			out[i] = wrap_phase(center + two_pi * i / count);
		return out;
	}
	using std::numbers::pi;
	for (int i = 0; i < count; ++i) {
		const double p = (i + 0.5) / count;
		double lo = -pi, hi = pi;
		for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
			const double mid = 0.5 * (lo + hi);
			if (von_mises_cdf(mid, kappa) < p)
				lo = mid;
			else
				hi = mid;
		}
		out[i] = wrap_phase(center + 0.5 * (lo + hi));
	}
	return out;
}

PopulationTrace simulate_population(const PhaseResponseCurve& prc, const PulseTrain& train,
                                    const std::vector<double>& initial, int periods, double dt, int record_stride,
                                    unsigned jobs)
{
	train.validate();
	if (periods < 1)
		throw InvalidInput("population simulation needs at least one period");
	double finest = train.primary.width;
	if (train.secondary)
		finest = std::min(finest, train.secondary->width);
	if (!(dt > 0.0) || dt > finest / 10.0 + 1e-12)
		throw InvalidInput("time step " + fmt12(dt) + " ms does not resolve the pulse; use dt <= " +
		                   fmt12(finest / 10.0) + " ms (a tenth of the pulse width)");
	if (record_stride < 0)
		throw InvalidInput("record stride must be non-negative");

	const double s = train.primary.support();
	const double t0 = s;
	const double t1 = periods * train.period + s;
	PopulationTrace trace;
	trace.train = train;
	trace.record_stride = record_stride;
	trace.initial = initial;
	const std::vector<Piece> schedule = build_schedule(train, t0, t1, record_stride * dt, trace.times);

	const std::size_t n = initial.size();
	trace.snapshots.assign(trace.times.size(), std::vector<double>(n));
	trace.final_phases.resize(n);
	const double omega = prc.omega;

	parallel_for(n, jobs, [&](std::size_t i) {
		double theta = initial[i] + omega * s;
		std::size_t k = 0;
		if (!trace.times.empty())
			trace.snapshots[k++][i] = wrap_phase(theta);
		for (const Piece& p : schedule) {
			const double len = p.end - p.start;
			if (p.current == 0.0) {
				theta += omega * len;
			} else {
				const int steps = std::max(1, static_cast<int>(std::ceil(len / dt - 1e-9)));
				const double h = len / steps;
				const double u = p.current;
				auto rhs = [&](double, double th) { return omega + prc(th) * u; };
				for (int j = 0; j < steps; ++j)
					theta = rk4_step(rhs, 0.0, theta, h);
			}
			if (p.record && k < trace.times.size())
				trace.snapshots[k++][i] = wrap_phase(theta);
		}
		trace.final_phases[i] = wrap_phase(theta - omega * s);
	});
	return trace;
}

PopulationTrace simulate_population_by_map(const CircleMap& map, const std::vector<double>& initial, int n_iters)
{
	if (n_iters < 0)
		throw InvalidInput("map iteration count must be non-negative");
	PopulationTrace trace;
	trace.initial = initial;
	trace.record_stride = 1;
	std::vector<double> cur(initial.size());
	std::transform(initial.begin(), initial.end(), cur.begin(), wrap_phase);
	trace.times.push_back(0.0);
	trace.snapshots.push_back(cur);
	const double step = map.duration();
	for (int k = 1; k <= n_iters; ++k) {
		for (double& th : cur)
			th = map(th);
		trace.times.push_back(k * step);
		trace.snapshots.push_back(cur);
	}
	trace.final_phases = cur;
	return trace;
}

ClusterReport detect_clusters(const std::vector<double>& phases, double epsilon)
{
	if (!(epsilon > 0.0))
		throw InvalidInput("cluster epsilon must be positive");
	ClusterReport report;
	report.epsilon = epsilon;
	const int n = static_cast<int>(phases.size());
	if (n == 0)
		return report;

	std::vector<double> wrapped(n);
	std::transform(phases.begin(), phases.end(), wrapped.begin(), wrap_phase);
	std::vector<int> order(n);
	std::iota(order.begin(), order.end(), 0);
	std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return wrapped[a] < wrapped[b]; });

	std::vector<Cluster> chains;
	Cluster current;
	current.members.push_back(order[0]);
	for (int j = 1; j < n; ++j) {
		const double gap = wrapped[order[j]] - wrapped[order[j - 1]];
		if (gap > epsilon) {
			chains.push_back(std::move(current));
			current = Cluster{};
		} else {
			current.extent += gap;
		}
		current.members.push_back(order[j]);
	}
	chains.push_back(std::move(current));

	if (chains.size() > 1) {
		const double wrap_gap = wrapped[order[0]] + two_pi - wrapped[order[n - 1]];
		if (wrap_gap <= epsilon) {
			Cluster& first = chains.front();
			Cluster last = std::move(chains.back());
			chains.pop_back();
			last.extent += wrap_gap + first.extent;
			last.members.insert(last.members.end(), first.members.begin(), first.members.end());
			first = std::move(last);
		}
	}

	for (Cluster& c : chains) {
		double sx = 0.0, sy = 0.0;
		for (int i : c.members) {
			sx += std::cos(wrapped[i]);
			sy += std::sin(wrapped[i]);
		}
		c.representative = wrap_phase(std::atan2(sy, sx));
	}
	std::stable_sort(chains.begin(), chains.end(),
	                 [](const Cluster& a, const Cluster& b) { return a.representative < b.representative; });
	report.clusters = std::move(chains);
	return report;
}

std::optional<int> cluster_count(const ClusterReport& report)
{
	if (report.clusters.empty() || static_cast<int>(report.clusters.size()) > max_cluster_count)
		return std::nullopt;
	for (const Cluster& c : report.clusters)
		if (c.extent > report.epsilon)
			return std::nullopt;
	return static_cast<int>(report.clusters.size());
}

SweepEngine parse_sweep_engine(const std::string& name)
{
	if (name == "map")
		return SweepEngine::Map;
	if (name == "ode")
		return SweepEngine::Ode;
	throw InvalidInput("unknown sweep engine '" + name + "' (expected map or ode)");
}

std::string to_string(SweepEngine engine)
{
	return engine == SweepEngine::Map ? "map" : "ode";
}

ResponseSet make_response_set(const PhaseResponseCurve& prc, const TrainFamily& family,
                              const ResponseOptions& options)
{
	ResponseSet set;
	set.prc = prc;
	set.primary = std::make_shared<ResponseFunction>(compute_response_function(prc, family.primary, options));
	if (family.secondary) {
		const Pulse& p2 = *family.secondary;
		const Pulse& p1 = family.primary;
		if (p2.u_max == p1.u_max && p2.width == p1.width && p2.lambda == p1.lambda)
			set.secondary = set.primary;
		else
			set.secondary = std::make_shared<ResponseFunction>(compute_response_function(prc, p2, options));
	}
	return set;
}

CircleMap one_cycle_map(const ResponseSet& responses, const TrainFamily& family, double freq_hz)
{
	const PulseTrain train = family.at(freq_hz);
	const double omega = responses.prc.omega;
	if (train.alternating()) {
		if (!responses.secondary)
			throw InvalidInput("alternating train needs a secondary response function");
		return make_alternating(omega, train.period, *train.offset, responses.primary, responses.secondary);
	}
	return make_g(omega, train.period, responses.primary);
}

std::vector<SweepPoint> frequency_sweep(const ResponseSet& responses, const TrainFamily& family,
                                        const InitialDistribution& init, const std::vector<double>& freqs,
                                        const SweepOptions& options)
{
	if (freqs.empty())
		throw InvalidInput("frequency sweep needs at least one frequency");
	if (options.periods < 1)
		throw InvalidInput("sweep needs at least one period");
	const std::vector<double> initial = init.phases();
	std::vector<SweepPoint> out(freqs.size());

	parallel_for(freqs.size(), options.jobs, [&](std::size_t j) {
		SweepPoint& pt = out[j];
		pt.freq_hz = freqs[j];
		pt.initial = initial;
		try {
			const CircleMap map = one_cycle_map(responses, family, freqs[j]);
			if (options.engine == SweepEngine::Map) {
				pt.final_phases = simulate_population_by_map(map, initial, options.periods).final_phases;
			} else {
				const PulseTrain train = family.at(freqs[j]);
				pt.final_phases =
				    simulate_population(responses.prc, train, initial, options.periods, options.dt).final_phases;
			}
			pt.clusters = detect_clusters(pt.final_phases, options.epsilon);
			pt.simulated_count = cluster_count(pt.clusters);
			pt.predicted_count = predicted_cluster_count(enumerate_attractors(map, options.n_max));
		} catch (const std::exception& e) {
			pt.error = e.what();
		}
	});
	return out;
}

std::vector<SweepPoint> alternating_sweep(const ResponseSet& responses, const TrainFamily& family,
                                          const InitialDistribution& init, const std::vector<double>& freqs,
                                          SweepOptions options)
{
	if (!family.secondary)
		throw InvalidInput("alternating sweep needs a secondary pulse");
	return frequency_sweep(responses, family, init, freqs, options);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& sweep)
{
	out << "freq_hz,neuron_idx,theta_initial,theta_final\n";
	for (const SweepPoint& pt : sweep) {
		if (pt.error)
			continue;
		for (std::size_t i = 0; i < pt.final_phases.size(); ++i)
			out << fmt12(pt.freq_hz) << ',' << i << ',' << fmt12(pt.initial[i]) << ',' << fmt12(pt.final_phases[i])
			    << '\n';
	}
}

void write_clusters_csv(std::ostream& out, const std::vector<SweepPoint>& sweep)
{
	out << "freq_hz,cluster_idx,representative_theta,size\n";
	for (const SweepPoint& pt : sweep) {
		if (pt.error)
			continue;
		for (std::size_t c = 0; c < pt.clusters.clusters.size(); ++c)
			out << fmt12(pt.freq_hz) << ',' << c << ',' << fmt12(pt.clusters.clusters[c].representative) << ','
			    << pt.clusters.clusters[c].size() << '\n';
	}
}

void write_timeseries_csv(std::ostream& out, const PopulationTrace& trace)
{
	out << "t_ms,neuron_idx,theta\n";
	for (std::size_t k = 0; k < trace.times.size(); ++k)
		for (std::size_t i = 0; i < trace.snapshots[k].size(); ++i)
			out << fmt12(trace.times[k]) << ',' << i << ',' << fmt12(trace.snapshots[k][i]) << '\n';
}

} // namespace clustermap
