#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "clustermap/angle.hpp"
#include "clustermap/error.hpp"
#include "support/fixtures.hpp"

using namespace clustermap;

TEST_CASE("natural frequencies")
{
	CHECK(fixtures::hh().orbit.omega == doctest::Approx(0.429).epsilon(0.005 / 0.429));
	CHECK(fixtures::thalamic().orbit.omega == doctest::Approx(0.748).epsilon(0.005 / 0.748));
	CHECK(fixtures::hh().prc.omega == fixtures::hh().orbit.omega);
}

TEST_CASE("period is converged in the step size")
{
	OrbitOptions fine;
	fine.dt = 0.0025;
	const PeriodicOrbit half = find_periodic_orbit(NeuronModel::hodgkin_huxley(), fine);
	CHECK(std::abs(half.period - fixtures::hh().orbit.period) < 1e-6);
}

TEST_CASE("tabulated cycle closes and starts at the voltage peak")
{
	for (const auto* r : {&fixtures::hh(), &fixtures::thalamic()}) {
		const PeriodicOrbit& orbit = r->orbit;
		CHECK(orbit.closure_error() < 1e-4);
		CHECK(orbit.samples.size() == 4096);
		CHECK(orbit.fine_samples.size() == 2 * orbit.samples.size() + 1);
		double vmax = -1e9;
		for (const State& x : orbit.samples)
			vmax = std::max(vmax, x[0]);
		CHECK(orbit.samples.front()[0] == doctest::Approx(vmax).epsilon(1e-6));
		// V' = 0 at the peak
		CHECK(std::abs(orbit.model.eval_rhs(orbit.spike_state)[0]) < 1e-6);
	}
}

TEST_CASE("asymptotic phase of points on the cycle is their own phase")
{
	const PeriodicOrbit& orbit = fixtures::hh().orbit;
	for (double theta : {0.3, 1.7, 3.1, 4.4, 6.0}) {
		const double got = asymptotic_phase(orbit, orbit.state_at_phase(theta));
		CHECK(std::abs(wrap_signed(got - theta)) < 1e-3);
	}
}

TEST_CASE("asymptotic phase advances at omega along the flow")
{
	for (const fixtures::Reduced* r : {&fixtures::hh(), &fixtures::thalamic()}) {
		for (double delta : {0.7, 3.0, 9.0}) {
			const State x = flow(r->orbit.model, r->orbit.state_at_phase(1.0), delta, 0.005);
			CHECK(circular_distance(asymptotic_phase(r->orbit, x), 1.0 + r->orbit.omega * delta) < 0.01);
		}
	}
}

TEST_CASE("a 1 mV kick shifts the phase as the PRC predicts")
{
	for (const fixtures::Reduced* r : {&fixtures::hh(), &fixtures::thalamic()}) {
		for (double theta : {0.0, 2.0, 4.0}) {
			State x = r->orbit.state_at_phase(theta);
			x[0] += 1.0;
			const double shift = wrap_signed(asymptotic_phase(r->orbit, x) - theta);
			// Z is per unit current, so a voltage jump scales it by C_m
			const double linear = r->orbit.model.capacitance() * r->prc(theta);
			CHECK(std::abs(shift - linear) <= 0.1 * std::abs(linear));
		}
	}
}

TEST_CASE("adjoint normalization holds along the whole cycle")
{
	for (const auto* r : {&fixtures::hh(), &fixtures::thalamic()}) {
		const AdjointSolution sol = solve_adjoint(r->orbit);
		CHECK(sol.max_normalization_residual < 1e-6);
		CHECK(sol.gradient.size() == r->orbit.samples.size());
		for (std::size_t k = 0; k < sol.gradient.size(); k += 257) {
			const State f = r->orbit.model.eval_rhs(r->orbit.samples[k]);
			CHECK(sol.gradient[k].dot(f) == doctest::Approx(r->orbit.omega).epsilon(1e-6));
		}
	}
}

TEST_CASE("Fourier PRC holds between its fit nodes")
{
	for (const fixtures::Reduced* r : {&fixtures::hh(), &fixtures::thalamic()}) {
		// adjoint sampled on a grid four times finer than the one the series was fit on
		OrbitOptions opts;
		opts.samples = 4 * static_cast<int>(r->orbit.samples.size());
		const PeriodicOrbit fine = find_periodic_orbit(r->orbit.model, opts);
		const AdjointSolution sol = solve_adjoint(fine);
		double max_z = 0.0, max_err = 0.0;
		for (std::size_t k = 0; k < sol.gradient.size(); ++k) {
			const double z = sol.gradient[k][0] / fine.model.capacitance();
			max_z = std::max(max_z, std::abs(z));
			max_err = std::max(max_err, std::abs(r->prc(fine.sample_phase(k)) - z));
		}
		CHECK(max_err < 1e-6 * max_z);
		CHECK(r->prc.order() >= 30);
	}
}

TEST_CASE("direct method agrees with the adjoint PRC")
{
	for (const auto* r : {&fixtures::hh(), &fixtures::thalamic()}) {
		std::vector<double> phases;
		for (int k = 0; k < 16; ++k)
			phases.push_back(two_pi * (k + 0.5) / 16.0);
		const std::vector<double> direct = direct_prc(r->orbit, phases, 0.05);
		double max_z = 0.0;
		for (double t = 0; t < two_pi; t += 0.001)
			max_z = std::max(max_z, std::abs(r->prc(t)));
		for (std::size_t k = 0; k < phases.size(); ++k)
			CHECK(std::abs(direct[k] - r->prc(phases[k])) < 0.05 * max_z);
	}
}

TEST_CASE("HH PRC has the type II shape")
{
	const auto& prc = fixtures::hh().prc;
	double lo = 0, hi = 0;
	for (double t = 0; t < two_pi; t += 0.001) {
		lo = std::min(lo, prc(t));
		hi = std::max(hi, prc(t));
	}
	CHECK(lo < -0.01);
	CHECK(hi > 0.05);
}

TEST_CASE("explicit Fourier order")
{
	const PhaseResponseCurve p = compute_prc_adjoint(fixtures::hh().orbit, 20);
	CHECK(p.order() == 20);
}

TEST_CASE("PRC CSV round trip")
{
	std::stringstream io;
	write_prc_csv(io, fixtures::thalamic().prc);
	const PhaseResponseCurve back = read_prc_csv(io);
	CHECK(back.omega == fixtures::thalamic().prc.omega);
	CHECK(back.series == fixtures::thalamic().prc.series);
}

TEST_CASE("failures")
{
	NeuronModel quiet = NeuronModel::hodgkin_huxley();
	quiet.set_param("I_b", 0.0);
	try {
		find_periodic_orbit(quiet);
		FAIL("expected a failure");
	} catch (const NumericalFailure& e) {
		CHECK(e.kind() == FailureKind::NonOscillatory);
	}

	State escaped = fixtures::hh().orbit.spike_state;
	escaped[0] = 1e6;
	try {
		asymptotic_phase(fixtures::hh().orbit, escaped);
		FAIL("expected a failure");
	} catch (const NumericalFailure& e) {
		CHECK(e.kind() == FailureKind::OutsideBasin);
	}
}
