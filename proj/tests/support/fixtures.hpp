#pragma once

// Reduced models shared by the test binaries. Each is computed on first use
// and kept for the rest of the process.

#include <memory>
#include <random>
#include <vector>

#include "clustermap/circle_map.hpp"
#include "clustermap/orbit.hpp"
#include "clustermap/prc.hpp"
#include "clustermap/response.hpp"
#include "clustermap/stimulus.hpp"

namespace fixtures {

using namespace clustermap;

struct Reduced {
	PeriodicOrbit orbit;
	PhaseResponseCurve prc;
};

inline const Reduced& hh()
{
	static const Reduced r = [] {
		PeriodicOrbit orbit = find_periodic_orbit(NeuronModel::hodgkin_huxley());
		PhaseResponseCurve prc = compute_prc_adjoint(orbit);
		return Reduced{std::move(orbit), std::move(prc)};
	}();
	return r;
}

inline const Reduced& thalamic()
{
	static const Reduced r = [] {
		PeriodicOrbit orbit = find_periodic_orbit(NeuronModel::thalamic());
		PhaseResponseCurve prc = compute_prc_adjoint(orbit);
		return Reduced{std::move(orbit), std::move(prc)};
	}();
	return r;
}

// 20 uA/cm^2 primary pulse response for HH.
inline ResponsePtr hh_f()
{
	static const ResponsePtr f =
	    std::make_shared<ResponseFunction>(compute_response_function(hh().prc, default_primary_pulse()));
	return f;
}

// 10 uA/cm^2 secondary pulse response for HH.
inline ResponsePtr hh_f2()
{
	static const ResponsePtr f =
	    std::make_shared<ResponseFunction>(compute_response_function(hh().prc, default_secondary_pulse()));
	return f;
}

inline ResponsePtr thalamic_f()
{
	static const ResponsePtr f =
	    std::make_shared<ResponseFunction>(compute_response_function(thalamic().prc, default_primary_pulse()));
	return f;
}

inline CircleMap hh_g(double freq_hz)
{
	return make_g(hh().prc.omega, 1000.0 / freq_hz, hh_f());
}

inline CircleMap hh_alternating(double freq_hz, double tau2_fraction)
{
	const double tau = 1000.0 / freq_hz;
	return make_alternating(hh().prc.omega, tau, tau2_fraction * tau, hh_f(), hh_f2());
}

// Response function given directly by its Fourier coefficients.
inline ResponsePtr series_response(double omega, double a0, std::vector<double> a, std::vector<double> b)
{
	auto f = std::make_shared<ResponseFunction>();
	f->omega = omega;
	f->series = FourierSeries(a0, std::move(a), std::move(b));
	return f;
}

inline std::vector<double> random_phases(int count, unsigned seed)
{
	std::mt19937 rng(seed);
	std::uniform_real_distribution<double> dist(0.0, 2.0 * 3.141592653589793);
	std::vector<double> out(count);
	for (double& x : out)
		x = dist(rng);
	return out;
}

} // namespace fixtures
