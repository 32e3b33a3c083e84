#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "clustermap/circle_map.hpp"

namespace clustermap {

enum class Stability { Stable, Unstable, Marginal };

std::string to_string(Stability s);

inline constexpr double marginal_band = 1e-3;

Stability classify_multiplier(double multiplier, double tol = marginal_band);

struct FixedPoint {
	double theta = 0.0;  // [0, 2 pi)
	int iterate_n = 1;
	double multiplier = 0.0;
	Stability stability = Stability::Marginal;

	bool stable() const { return stability == Stability::Stable; }
};

// Fixed points of the n-th iterate of `map`, sorted by theta. Roots of
// lift(theta) - theta - 2 pi k are bracketed on a uniform grid (every
// integer level crossed inside a cell is bisected), refined to 1e-10 and
// deduplicated within 1e-7.
std::vector<FixedPoint> find_fixed_points(const CircleMap& map, int n, int grid = 2048);

struct MapOrbit {
	std::vector<double> points;  // forward orbit under the base map
	int period = 1;
	double multiplier = 0.0;  // derivative of the period-th iterate
	bool stable = false;
};

// Periodic orbits with minimal period 1..n_max (n_max <= 16), stable or not.
std::vector<MapOrbit> enumerate_orbits(const CircleMap& map, int n_max);

// Stable periodic orbits with minimal period 1..n_max.
std::vector<MapOrbit> enumerate_attractors(const CircleMap& map, int n_max = 10);

// Total number of stable periodic points, or nullopt if there are none.
std::optional<int> predicted_cluster_count(const std::vector<MapOrbit>& attractors);

struct BasinInterval {
	double lo = 0.0;
	double hi = 0.0;  // may exceed 2 pi for the interval crossing zero
	std::optional<FixedPoint> attractor;  // empty when unresolved

	double measure() const { return hi - lo; }
	bool contains(double theta) const;
};

struct BasinPartition {
	int iterate_n = 1;
	std::vector<FixedPoint> stable;
	std::vector<BasinInterval> intervals;

	// Interval holding theta, or nullptr for a boundary point.
	const BasinInterval* locate(double theta) const;
};

// Splits the circle at the unstable and marginal fixed points of the n-th
// iterate and labels each piece by iterating its midpoint. Throws
// InvalidInput when the iterate lacks a stable or an unstable point.
BasinPartition compute_basins(const CircleMap& map, int n);

struct Tau2ScanOptions {
	double step = 0.005;     // grid spacing in units of tau
	double width = 1e-4;     // final bracket width in units of tau
	int grid = 2048;
	unsigned jobs = 1;
};

struct Tau2Sample {
	double fraction = 0.0;  // tau2 / tau
	int stable_count = 0;
};

struct Tau2Event {
	double lo_fraction = 0.0;
	double hi_fraction = 0.0;
	int count_lo = 0;
	int count_hi = 0;
	// The closest stable/unstable pair on the side with more stable points.
	std::optional<FixedPoint> stable;
	std::optional<FixedPoint> unstable;

	double fraction() const { return 0.5 * (lo_fraction + hi_fraction); }
};

struct Tau2Scan {
	int iterate_n = 1;
	double tau = 0.0;
	std::vector<Tau2Sample> samples;
	std::vector<Tau2Event> events;
};

Tau2Scan scan_tau2_bifurcation(double omega, double tau, const ResponsePtr& f, const ResponsePtr& f2, int n,
                               double lo_fraction, double hi_fraction, const Tau2ScanOptions& options = {});

// Stable fixed points of G^(n) at one tau2 fraction.
int count_stable_alternating(double omega, double tau, const ResponsePtr& f, const ResponsePtr& f2, int n,
                             double fraction, int grid = 2048);

void write_fixed_points_csv(std::ostream& out, double freq_hz, const std::vector<FixedPoint>& points,
                            bool header = true);
void write_basins_csv(std::ostream& out, double freq_hz, const BasinPartition& basins, bool header = true);
// tau2_fraction,stable_count
void write_tau2_samples_csv(std::ostream& out, const Tau2Scan& scan);
// lo_fraction,hi_fraction,count_lo,count_hi,stable_theta,stable_multiplier,unstable_theta,unstable_multiplier
void write_tau2_events_csv(std::ostream& out, const Tau2Scan& scan);

} // namespace clustermap
