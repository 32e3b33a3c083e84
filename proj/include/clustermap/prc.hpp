#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "clustermap/fourier.hpp"
#include "clustermap/orbit.hpp"

namespace clustermap {

// Voltage-direction phase response curve: dtheta/dt = omega + Z(theta) u(t)
// for an injected current density u. With C_m = 1 this is dtheta/dV.
struct PhaseResponseCurve {
	double omega = 0.0;  // rad/ms
	FourierSeries series;

	double operator()(double theta) const { return series(theta); }
	double derivative(double theta) const { return series.derivative(theta); }
	int order() const { return series.order(); }
};

struct AdjointOptions {
	int order = 0;              // Fourier order; 0 picks it from the spectrum
	int min_order = 30;
	int max_order = 400;
	double tail_tolerance = 1e-14;  // discarded fraction of mean-square energy
	double tolerance = 1e-8;    // successive-period change of the normalized adjoint
	int max_periods = 50;
};

// Periodic solution of the adjoint equation dZ/dt = -J(gamma(t))^T Z,
// sampled at the orbit's phase grid and scaled so that Z . F = omega.
struct AdjointSolution {
	std::vector<State> gradient;  // full phase gradient at each orbit sample
	double max_normalization_residual = 0.0;  // max |Z.F - omega| / omega over the grid
	int periods = 0;              // backward periods integrated after seeding
};

AdjointSolution solve_adjoint(const PeriodicOrbit& orbit, const AdjointOptions& options = {});

// Voltage component of the adjoint (divided by C_m), as a Fourier series.
PhaseResponseCurve compute_prc_adjoint(const PeriodicOrbit& orbit, const AdjointOptions& options = {});
PhaseResponseCurve compute_prc_adjoint(const PeriodicOrbit& orbit, int order);

// Direct method on the full model: kick the voltage at each phase by an
// impulse of the given area (uA/cm^2 * ms) and measure the asymptotic phase
// shift per unit area.
std::vector<double> direct_prc(const PeriodicOrbit& orbit, std::span<const double> phases, double impulse_area);

void write_prc_csv(std::ostream& out, const PhaseResponseCurve& prc);
PhaseResponseCurve read_prc_csv(std::istream& in);

} // namespace clustermap
