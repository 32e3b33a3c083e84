#pragma once

#include <cstddef>
#include <vector>

#include "clustermap/neuron_model.hpp"

namespace clustermap {

struct OrbitOptions {
	double dt = 0.005;            // ms, fixed RK4 step for settling and spike timing
	double settle_time = 1000.0;  // ms of unstimulated transient discarded up front
	double expected_period = 50.0;  // ms, upper bound used to size the spike search window
	int samples = 4096;           // uniform phase samples stored along the orbit
	double isi_tolerance = 1e-6;  // ms, consecutive inter-spike intervals must agree this well
	int max_spikes = 2000;
};

// The stable spiking limit cycle of a model. Phase 0 is the peak of the
// action potential; samples[k] sits at phase 2 pi k / samples.size().
struct PeriodicOrbit {
	NeuronModel model;
	double period = 0.0;       // ms
	double omega = 0.0;        // rad/ms, 2 pi / period
	double v_threshold = 0.0;  // mV, (V_min + V_max) / 2 of the attractor; arms peak detection
	double dt = 0.0;           // step used for spike timing (and by asymptotic_phase)
	State spike_state;
	std::vector<State> samples;
	// 2 * samples.size() + 1 states at half-sample spacing, spanning one full
	// period; the last entry is the integrated image of spike_state.
	std::vector<State> fine_samples;

	std::size_t sample_count() const { return samples.size(); }
	double sample_phase(std::size_t k) const;
	// |x(T) - x(0)| for the tabulated cycle.
	double closure_error() const;
	// Point on the cycle at an arbitrary phase.
	State state_at_phase(double theta) const;
};

PeriodicOrbit find_periodic_orbit(const NeuronModel& model, const OrbitOptions& options = {});

struct PhaseOptions {
	int min_periods = 10;        // integrate at least this long before reading the phase
	double voltage_bound = 500.0;  // |V| beyond this means the trajectory escaped
};

// Asymptotic phase of an arbitrary state in the orbit's basin, read off the
// timing of a voltage peak after the transient has decayed.
double asymptotic_phase(const PeriodicOrbit& orbit, const State& state, const PhaseOptions& options = {});

// Integrates the unforced model for `duration` ms with the given step.
State flow(const NeuronModel& model, const State& x, double duration, double dt);

} // namespace clustermap
