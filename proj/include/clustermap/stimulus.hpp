#pragma once

#include <optional>
#include <vector>

namespace clustermap {

// Biphasic charge-balanced pulse: u_max for `width` ms, then
// u_min = -u_max / lambda for lambda * width ms.
struct Pulse {
	double u_max = 20.0;   // uA/cm^2
	double width = 0.5;    // ms
	double lambda = 3.0;

	double u_min() const { return -u_max / lambda; }
	double support() const { return (lambda + 1.0) * width; }
	// Current at offset s >= 0 from the pulse onset.
	double value_at(double s) const;
	Pulse scaled(double factor) const { return {u_max * factor, width, lambda}; }
	void validate() const;
};

// Pulses at 0, tau, 2 tau, ...; optionally a second pulse type at
// tau2, tau + tau2, ...
struct PulseTrain {
	Pulse primary;
	double period = 10.0;  // ms
	std::optional<Pulse> secondary;
	std::optional<double> offset;  // tau2, ms

	struct Segment {
		double start;
		double end;
		double current;
	};

	double frequency_hz() const { return 1000.0 / period; }
	bool alternating() const { return secondary.has_value(); }
	double eval(double t) const;
	// Piecewise-constant decomposition of one period [0, tau), in order.
	std::vector<Segment> segments() const;
	void validate() const;
};

PulseTrain make_train(const Pulse& primary, double period);
PulseTrain make_alternating_train(const Pulse& primary, const Pulse& secondary, double period, double offset);

// Defaults used throughout: 20 uA/cm^2 primary and 10 uA/cm^2 secondary
// pulses, both 0.5 ms wide with lambda = 3.
Pulse default_primary_pulse();
Pulse default_secondary_pulse();

// Frequency in Hz, 0 < freq <= 2000.
double period_from_frequency(double freq_hz);
PulseTrain identical_train(double freq_hz, const Pulse& pulse = default_primary_pulse());
PulseTrain alternating_train(double freq_hz, double tau2_fraction = 0.5,
                             const Pulse& primary = default_primary_pulse(),
                             const Pulse& secondary = default_secondary_pulse());

// Frequency -> train, so sweeps can rebuild the stimulus at each point.
struct TrainFamily {
	Pulse primary = default_primary_pulse();
	std::optional<Pulse> secondary;
	double tau2_fraction = 0.5;

	static TrainFamily identical(const Pulse& pulse = default_primary_pulse());
	static TrainFamily alternating(double tau2_fraction = 0.5,
	                               const Pulse& primary = default_primary_pulse(),
	                               const Pulse& secondary = default_secondary_pulse());
	PulseTrain at(double freq_hz) const;
};

} // namespace clustermap
