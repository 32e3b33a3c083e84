#include "clustermap/map_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "clustermap/angle.hpp"
#include "clustermap/error.hpp"
#include "clustermap/parallel.hpp"

namespace clustermap {

namespace {

constexpr double residual_tol = 1e-10;
constexpr double dedupe_tol = 1e-7;
constexpr double orbit_match_tol = 1e-6;
constexpr int max_orbit_period = 16;

std::string fmt12(double v)
{
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.12g", v);
	return buf;
}

// Root of r(theta) = lift(theta) - theta - level on [a, b], given that the
// end values ra, rb have opposite signs.
double bisect(const CircleMap& m, double level, double a, double b, double ra)
{
	double mid = 0.5 * (a + b);
	for (int it = 0; it < 200; ++it) {
		mid = 0.5 * (a + b);
		const double rm = m.lift(mid) - mid - level;
		if (std::abs(rm) < residual_tol || b - a < 1e-15)
			break;
		if ((rm < 0.0) == (ra < 0.0)) {
			a = mid;
			ra = rm;
		} else {
			b = mid;
		}
	}
	return mid;
}

FixedPoint make_fixed_point(const CircleMap& m, double theta, int n)
{
	double image = 0.0, slope = 0.0;
	m.lift_with_derivative(theta, image, slope);
	return {wrap_phase(theta), n, slope, classify_multiplier(slope)};
}

} // namespace

std::string to_string(Stability s)
{
	switch (s) {
	case Stability::Stable: return "stable";
	case Stability::Unstable: return "unstable";
	case Stability::Marginal: return "marginal";
	}
	return "marginal";
}

Stability classify_multiplier(double multiplier, double tol)
{
	const double a = std::abs(multiplier);
	if (a < 1.0 - tol)
		return Stability::Stable;
	if (a > 1.0 + tol)
		return Stability::Unstable;
	return Stability::Marginal;
}

std::vector<FixedPoint> find_fixed_points(const CircleMap& map, int n, int grid)
{
	if (grid < 512)
		throw InvalidInput("fixed-point grid needs at least 512 points");
	const CircleMap m = iterate(map, n);

	std::vector<double> theta(grid + 1), r(grid + 1);
	for (int j = 0; j < grid; ++j) {
		theta[j] = two_pi * j / grid;
		r[j] = m.lift(theta[j]) - theta[j];
	}
	theta[grid] = two_pi;
	r[grid] = r[0];  // degree one

	std::vector<double> roots;
	for (int j = 0; j < grid; ++j) {
		const double lo = std::min(r[j], r[j + 1]);
		const double hi = std::max(r[j], r[j + 1]);
		const auto k_lo = static_cast<long>(std::ceil(lo / two_pi));
		const auto k_hi = static_cast<long>(std::floor(hi / two_pi));
		for (long k = k_lo; k <= k_hi; ++k) {
			const double level = two_pi * static_cast<double>(k);
			const double ra = r[j] - level;
			const double rb = r[j + 1] - level;
			if (ra == 0.0)
				roots.push_back(theta[j]);
			else if (rb != 0.0 && (ra < 0.0) != (rb < 0.0))
				roots.push_back(bisect(m, level, theta[j], theta[j + 1], ra));
		}
	}

	std::vector<FixedPoint> out;
	for (double root : roots)
		out.push_back(make_fixed_point(m, root, n));
	std::sort(out.begin(), out.end(), [](const FixedPoint& a, const FixedPoint& b) { return a.theta < b.theta; });

	std::vector<FixedPoint> unique;
	for (const FixedPoint& p : out) {
		if (!unique.empty() && circular_distance(p.theta, unique.back().theta) < dedupe_tol)
			continue;
		unique.push_back(p);
	}
	if (unique.size() > 1 && circular_distance(unique.front().theta, unique.back().theta) < dedupe_tol)
		unique.pop_back();
	return unique;
}

std::vector<MapOrbit> enumerate_orbits(const CircleMap& map, int n_max)
{
	if (n_max < 1 || n_max > max_orbit_period)
		throw InvalidInput("orbit search needs 1 <= n_max <= 16");

	std::vector<double> assigned;
	auto is_assigned = [&](double theta) {
		return std::any_of(assigned.begin(), assigned.end(),
		                   [&](double a) { return circular_distance(a, theta) < orbit_match_tol; });
	};

	std::vector<MapOrbit> orbits;
	for (int n = 1; n <= n_max; ++n) {
		for (const FixedPoint& fp : find_fixed_points(map, n)) {
			if (is_assigned(fp.theta))
				continue;
			MapOrbit orbit;
			orbit.period = n;
			orbit.points.push_back(fp.theta);
			bool lower_period = false;
			for (int i = 1; i < n; ++i) {
				const double next = map(orbit.points.back());
				if (circular_distance(next, fp.theta) < orbit_match_tol) {
					lower_period = true;
					break;
				}
				orbit.points.push_back(next);
			}
			assigned.insert(assigned.end(), orbit.points.begin(), orbit.points.end());
			// a point that closes up early was missed at its own period;
			// it is recorded as assigned but not reported twice
			if (lower_period)
				continue;
			orbit.multiplier = fp.multiplier;
			orbit.stable = fp.stable();
			orbits.push_back(std::move(orbit));
		}
	}
	return orbits;
}

std::vector<MapOrbit> enumerate_attractors(const CircleMap& map, int n_max)
{
	std::vector<MapOrbit> all = enumerate_orbits(map, n_max);
	std::vector<MapOrbit> stable;
	for (MapOrbit& o : all)
		if (o.stable)
			stable.push_back(std::move(o));
	return stable;
}

std::optional<int> predicted_cluster_count(const std::vector<MapOrbit>& attractors)
{
	if (attractors.empty())
		return std::nullopt;
	int total = 0;
	for (const MapOrbit& o : attractors)
		total += o.period;
	return total;
}

bool BasinInterval::contains(double theta) const
{
	theta = wrap_phase(theta);
	if (theta < lo)
		theta += two_pi;
	return theta > lo && theta < hi;
}

const BasinInterval* BasinPartition::locate(double theta) const
{
	for (const BasinInterval& iv : intervals)
		if (iv.contains(theta))
			return &iv;
	return nullptr;
}

BasinPartition compute_basins(const CircleMap& map, int n)
{
	const std::vector<FixedPoint> points = find_fixed_points(map, n);
	BasinPartition basins;
	basins.iterate_n = n;
	std::vector<double> cuts;
	for (const FixedPoint& p : points) {
		if (p.stable())
			basins.stable.push_back(p);
		else
			cuts.push_back(p.theta);
	}
	if (basins.stable.empty() || cuts.empty())
		throw InvalidInput("basins need at least one stable and one unstable fixed point of the iterate");

	const CircleMap m = iterate(map, n);
	for (std::size_t i = 0; i < cuts.size(); ++i) {
		BasinInterval iv;
		iv.lo = cuts[i];
		iv.hi = i + 1 < cuts.size() ? cuts[i + 1] : cuts[0] + two_pi;
		double x = wrap_phase(0.5 * (iv.lo + iv.hi));
		for (int it = 0; it < 10000 && !iv.attractor; ++it) {
			for (const FixedPoint& s : basins.stable) {
				if (circular_distance(x, s.theta) < 1e-6) {
					iv.attractor = s;
					break;
				}
			}
			x = m(x);
		}
		basins.intervals.push_back(iv);
	}
	return basins;
}

int count_stable_alternating(double omega, double tau, const ResponsePtr& f, const ResponsePtr& f2, int n,
                             double fraction, int grid)
{
	const CircleMap G = make_alternating(omega, tau, fraction * tau, f, f2);
	const auto points = find_fixed_points(G, n, grid);
	return static_cast<int>(std::count_if(points.begin(), points.end(), [](const FixedPoint& p) { return p.stable(); }));
}

Tau2Scan scan_tau2_bifurcation(double omega, double tau, const ResponsePtr& f, const ResponsePtr& f2, int n,
                               double lo_fraction, double hi_fraction, const Tau2ScanOptions& options)
{
	if (!(lo_fraction > 0.0 && hi_fraction < 1.0 && lo_fraction < hi_fraction))
		throw InvalidInput("tau2 range must satisfy 0 < lo < hi < 1 (fractions of tau)");
	if (!(options.step > 0.0) || !(options.width > 0.0))
		throw InvalidInput("tau2 scan step and bracket width must be positive");

	const int intervals = std::max(1, static_cast<int>(std::ceil((hi_fraction - lo_fraction) / options.step - 1e-9)));
	Tau2Scan scan;
	scan.iterate_n = n;
	scan.tau = tau;
	scan.samples.resize(intervals + 1);
	auto count_at = [&](double frac) { return count_stable_alternating(omega, tau, f, f2, n, frac, options.grid); };

	parallel_for(scan.samples.size(), options.jobs, [&](std::size_t i) {
		const double frac = i == static_cast<std::size_t>(intervals)
		                        ? hi_fraction
		                        : lo_fraction + options.step * static_cast<double>(i);
		scan.samples[i] = {frac, count_at(frac)};
	});

	for (std::size_t i = 0; i + 1 < scan.samples.size(); ++i) {
		const Tau2Sample& a = scan.samples[i];
		const Tau2Sample& b = scan.samples[i + 1];
		if (a.stable_count == b.stable_count)
			continue;
		Tau2Event ev;
		ev.lo_fraction = a.fraction;
		ev.hi_fraction = b.fraction;
		ev.count_lo = a.stable_count;
		ev.count_hi = b.stable_count;
		while (ev.hi_fraction - ev.lo_fraction > options.width) {
			const double mid = 0.5 * (ev.lo_fraction + ev.hi_fraction);
			const int c = count_at(mid);
			if (c == ev.count_lo) {
				ev.lo_fraction = mid;
			} else {
				ev.hi_fraction = mid;
				ev.count_hi = c;
			}
		}

		const double rich = ev.count_lo >= ev.count_hi ? ev.lo_fraction : ev.hi_fraction;
		const CircleMap G = make_alternating(omega, tau, rich * tau, f, f2);
		const auto points = find_fixed_points(G, n, options.grid);
		double best = 1e300;
		for (const FixedPoint& s : points) {
			if (!s.stable())
				continue;
			for (const FixedPoint& u : points) {
				if (u.stable())
					continue;
				const double d = circular_distance(s.theta, u.theta);
				if (d < best) {
					best = d;
					ev.stable = s;
					ev.unstable = u;
				}
			}
		}
		scan.events.push_back(ev);
	}
	return scan;
}

void write_fixed_points_csv(std::ostream& out, double freq_hz, const std::vector<FixedPoint>& points, bool header)
{
	if (header)
		out << "freq_hz,iterate_n,theta_star,multiplier,stability\n";
	for (const FixedPoint& p : points)
		out << fmt12(freq_hz) << ',' << p.iterate_n << ',' << fmt12(p.theta) << ',' << fmt12(p.multiplier) << ','
		    << to_string(p.stability) << '\n';
}

void write_basins_csv(std::ostream& out, double freq_hz, const BasinPartition& basins, bool header)
{
	if (header)
		out << "freq_hz,lo,hi,attractor_theta\n";
	for (const BasinInterval& iv : basins.intervals) {
		out << fmt12(freq_hz) << ',' << fmt12(iv.lo) << ',' << fmt12(iv.hi) << ',';
		if (iv.attractor)
			out << fmt12(iv.attractor->theta);
		else
			out << "unresolved";
		out << '\n';
	}
}

void write_tau2_samples_csv(std::ostream& out, const Tau2Scan& scan)
{
	out << "tau2_fraction,stable_count\n";
	for (const Tau2Sample& s : scan.samples)
		out << fmt12(s.fraction) << ',' << s.stable_count << '\n';
}

void write_tau2_events_csv(std::ostream& out, const Tau2Scan& scan)
{
	out << "lo_fraction,hi_fraction,count_lo,count_hi,stable_theta,stable_multiplier,unstable_theta,"
	       "unstable_multiplier\n";
	auto opt = [](const std::optional<FixedPoint>& p, bool theta) {
		if (!p)
			return std::string("nan");
		return fmt12(theta ? p->theta : p->multiplier);
	};
	for (const Tau2Event& e : scan.events)
		out << fmt12(e.lo_fraction) << ',' << fmt12(e.hi_fraction) << ',' << e.count_lo << ',' << e.count_hi << ','
		    << opt(e.stable, true) << ',' << opt(e.stable, false) << ',' << opt(e.unstable, true) << ','
		    << opt(e.unstable, false) << '\n';
}

} // namespace clustermap
