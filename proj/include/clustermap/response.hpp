#pragma once

#include <iosfwd>
#include <vector>

#include "clustermap/fourier.hpp"
#include "clustermap/prc.hpp"
#include "clustermap/stimulus.hpp"

namespace clustermap {

struct ResponseOptions {
	int grid = 1024;           // onset phases sampled on [0, 2 pi)
	double dt = 0.001;         // ms, RK4 step across the pulse
	int order = 0;             // 0 picks the order from the spectrum
	int min_order = 30;
	int max_order = 511;
	double tail_tolerance = 1e-10;
	unsigned jobs = 1;
};

// Net phase shift caused by one whole pulse delivered at phase theta,
// beyond the free rotation over the pulse support.
struct ResponseFunction {
	double omega = 0.0;
	Pulse pulse;
	FourierSeries series;

	double operator()(double theta) const { return series(theta); }
	double derivative(double theta) const { return series.derivative(theta); }
	void eval(double theta, double& value, double& slope) const { series.eval(theta, value, slope); }
};

// Phase at the end of the pulse support for a neuron at theta0 at pulse
// onset, integrating dtheta/dt = omega + Z(theta) u(t). Unwrapped.
double integrate_across_pulse(const PhaseResponseCurve& prc, const Pulse& pulse, double theta0, double dt);

// Raw shifts f(theta_j) on the uniform grid, before the Fourier fit.
std::vector<double> sample_response(const PhaseResponseCurve& prc, const Pulse& pulse, int grid, double dt,
                                    unsigned jobs = 1);

ResponseFunction compute_response_function(const PhaseResponseCurve& prc, const Pulse& pulse,
                                           const ResponseOptions& options = {});

void write_response_csv(std::ostream& out, const ResponseFunction& f);
ResponseFunction read_response_csv(std::istream& in, const Pulse& pulse);

} // namespace clustermap
