#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "clustermap/angle.hpp"
#include "clustermap/error.hpp"
#include "support/fixtures.hpp"

using namespace clustermap;

namespace {

// First-order phase shift: integral of Z(theta + omega t) u(t) over the
// pulse, by composite Simpson on each constant piece.
double linear_shift(const PhaseResponseCurve& prc, const Pulse& p, double theta)
{
	auto piece = [&](double t0, double t1, double u) {
		const int n = 2000;
		const double h = (t1 - t0) / n;
		double s = 0.0;
		for (int i = 0; i <= n; ++i) {
			const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
			s += w * prc(theta + prc.omega * (t0 + i * h));
		}
		return u * s * h / 3.0;
	};
	return piece(0.0, p.width, p.u_max) + piece(p.width, p.support(), p.u_min());
}

} // namespace

TEST_CASE("zero-amplitude pulse leaves the phase untouched")
{
	const Pulse off{0.0, 0.5, 3.0};
	const auto shift = sample_response(fixtures::hh().prc, off, 128, 0.001);
	for (double s : shift)
		CHECK(std::abs(s) < 1e-12);
}

TEST_CASE("weak pulses follow the linear response")
{
	const auto& prc = fixtures::hh().prc;
	const int grid = 128;
	// largest deviation from the linear shift, and the largest linear shift
	auto deviation = [&](double scale) {
		const Pulse weak = default_primary_pulse().scaled(scale);
		const auto shift = sample_response(prc, weak, grid, 0.001);
		double err = 0.0, peak = 0.0;
		for (int j = 0; j < grid; ++j) {
			const double lin = linear_shift(prc, weak, two_pi * j / grid);
			err = std::max(err, std::abs(shift[j] - lin));
			peak = std::max(peak, std::abs(lin));
		}
		return std::pair{err, peak};
	};
	const auto [err1, peak1] = deviation(0.01);
	const auto [err2, peak2] = deviation(0.005);
	CHECK(err1 <= 0.02 * peak1);
	CHECK(peak1 == doctest::Approx(2.0 * peak2).epsilon(1e-9));
	// the residual is second order in the amplitude
	CHECK(err1 / err2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("full-strength HH response has both signs and order-one size")
{
	const ResponseFunction& f = *fixtures::hh_f();
	double lo = 0, hi = 0;
	for (double t = 0; t < two_pi; t += 0.001) {
		lo = std::min(lo, f(t));
		hi = std::max(hi, f(t));
	}
	CHECK(lo < -0.1);
	CHECK(hi > 0.1);
	CHECK(std::max(-lo, hi) < 3.0);
	CHECK(std::max(-lo, hi) > 0.3);
	CHECK(f.omega == fixtures::hh().prc.omega);
}

TEST_CASE("Fourier fit of f reproduces the integrated samples")
{
	const auto& prc = fixtures::hh().prc;
	const ResponseOptions opts;
	const auto shift = sample_response(prc, default_primary_pulse(), opts.grid, opts.dt);
	const ResponseFunction& f = *fixtures::hh_f();
	double err = 0.0;
	for (int j = 0; j < opts.grid; ++j)
		err = std::max(err, std::abs(f(two_pi * j / opts.grid) - shift[j]));
	CHECK(err < 1e-3);
}

TEST_CASE("response computation is deterministic")
{
	ResponseOptions opts;
	opts.grid = 128;
	const auto a = compute_response_function(fixtures::thalamic().prc, default_secondary_pulse(), opts);
	const auto b = compute_response_function(fixtures::thalamic().prc, default_secondary_pulse(), opts);
	CHECK(a.series == b.series);
	opts.jobs = 3;
	const auto c = compute_response_function(fixtures::thalamic().prc, default_secondary_pulse(), opts);
	CHECK(a.series == c.series);
}

TEST_CASE("integrate_across_pulse is consistent with the sampled shift")
{
	const auto& prc = fixtures::hh().prc;
	const Pulse p = default_primary_pulse();
	const auto shift = sample_response(prc, p, 64, 0.001);
	const double theta0 = two_pi * 5 / 64;
	CHECK(integrate_across_pulse(prc, p, theta0, 0.001) - theta0 - prc.omega * p.support() ==
	      doctest::Approx(shift[5]).epsilon(1e-14));
}

TEST_CASE("input validation and CSV")
{
	CHECK_THROWS_AS(sample_response(fixtures::hh().prc, default_primary_pulse(), 32, 0.001), InvalidInput);
	CHECK_THROWS_AS(sample_response(fixtures::hh().prc, default_primary_pulse(), 64, 0.0), InvalidInput);

	std::stringstream io;
	write_response_csv(io, *fixtures::hh_f2());
	const ResponseFunction back = read_response_csv(io, default_secondary_pulse());
	CHECK(back.series == fixtures::hh_f2()->series);
	CHECK(back.omega == fixtures::hh_f2()->omega);
}
