#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "clustermap/circle_map.hpp"
#include "clustermap/prc.hpp"
#include "clustermap/response.hpp"
#include "clustermap/stimulus.hpp"

namespace clustermap {

enum class DistributionKind { Uniform, VonMises };

DistributionKind parse_distribution_kind(const std::string& name);
std::string to_string(DistributionKind kind);

struct InitialDistribution {
	DistributionKind kind = DistributionKind::Uniform;
	double kappa = 0.0;   // von Mises concentration
	double center = 0.0;  // rad
	int count = 500;

	// Uniform: 2 pi i / N. Von Mises: quantiles at (i + 0.5) / N.
	std::vector<double> phases() const;
	void validate() const;
};

// Modified Bessel function I0 by its power series (kappa <= 100).
double bessel_i0(double kappa);
// Von Mises CDF on (center - pi, center + pi], measured from center - pi.
double von_mises_cdf(double x, double kappa);

struct PopulationTrace {
	std::vector<double> times;                   // ms
	std::vector<std::vector<double>> snapshots;  // snapshots[k][i], wrapped
	std::vector<double> initial;
	std::vector<double> final_phases;  // just after the last primary pulse
	std::optional<PulseTrain> train;
	int record_stride = 0;
};

// Integrates dtheta_i/dt = omega + Z(theta_i) u(t) with RK4. Initial phases
// are taken just after the pulse at t = 0, so integration starts at the end
// of that pulse's support s; the final phases are read at periods * tau + s
// and shifted back by omega * s to line up with the instantaneous-kick map.
// Steps never straddle a change of u(t) and pulse-free stretches advance
// exactly. record_stride > 0 records every record_stride * dt ms.
PopulationTrace simulate_population(const PhaseResponseCurve& prc, const PulseTrain& train,
                                    const std::vector<double>& initial, int periods, double dt = 0.01,
                                    int record_stride = 0, unsigned jobs = 1);

// Applies the one-cycle map n_iters times, recording after every iteration.
PopulationTrace simulate_population_by_map(const CircleMap& map, const std::vector<double>& initial, int n_iters);

struct Cluster {
	double representative = 0.0;  // circular mean
	std::vector<int> members;
	double extent = 0.0;  // arc spanned by the sorted members

	int size() const { return static_cast<int>(members.size()); }
};

struct ClusterReport {
	std::vector<Cluster> clusters;
	double epsilon = 0.05;
};

inline constexpr double default_cluster_epsilon = 0.05;
inline constexpr int max_cluster_count = 16;

// Sort, chain neighbours closer than epsilon, merge across 0 / 2 pi.
ClusterReport detect_clusters(const std::vector<double>& phases, double epsilon = default_cluster_epsilon);

// Number of clusters when every cluster is tighter than epsilon and there
// are at most 16 of them; nullopt means no clustering.
std::optional<int> cluster_count(const ClusterReport& report);

enum class SweepEngine { Ode, Map };

SweepEngine parse_sweep_engine(const std::string& name);
std::string to_string(SweepEngine engine);

struct SweepOptions {
	int periods = 40;
	double dt = 0.01;
	double epsilon = default_cluster_epsilon;
	SweepEngine engine = SweepEngine::Map;
	int n_max = 10;
	unsigned jobs = 1;
};

// Response functions for the pulses of a train family, computed once.
struct ResponseSet {
	PhaseResponseCurve prc;
	ResponsePtr primary;
	ResponsePtr secondary;  // null for identical trains
};

ResponseSet make_response_set(const PhaseResponseCurve& prc, const TrainFamily& family,
                              const ResponseOptions& options = {});

// g for identical trains, G = h1 o h2 for alternating ones.
CircleMap one_cycle_map(const ResponseSet& responses, const TrainFamily& family, double freq_hz);

struct SweepPoint {
	double freq_hz = 0.0;
	std::vector<double> initial;
	std::vector<double> final_phases;
	ClusterReport clusters;
	std::optional<int> simulated_count;
	std::optional<int> predicted_count;
	std::optional<std::string> error;

	bool agreement() const { return !error && simulated_count == predicted_count; }
};

std::vector<SweepPoint> frequency_sweep(const ResponseSet& responses, const TrainFamily& family,
                                        const InitialDistribution& init, const std::vector<double>& freqs,
                                        const SweepOptions& options = {});

// frequency_sweep for a two-pulse family, 80 periods unless overridden.
std::vector<SweepPoint> alternating_sweep(const ResponseSet& responses, const TrainFamily& family,
                                          const InitialDistribution& init, const std::vector<double>& freqs,
                                          SweepOptions options = {.periods = 80});

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& sweep);
void write_clusters_csv(std::ostream& out, const std::vector<SweepPoint>& sweep);
void write_timeseries_csv(std::ostream& out, const PopulationTrace& trace);

} // namespace clustermap
