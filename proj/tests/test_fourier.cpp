#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "clustermap/angle.hpp"
#include "clustermap/error.hpp"
#include "clustermap/fourier.hpp"

using namespace clustermap;

namespace {

double trig(double t) { return 0.5 + 1.25 * std::cos(t) - 0.75 * std::sin(3 * t) + 0.1 * std::cos(7 * t); }
double trig_slope(double t) { return -1.25 * std::sin(t) - 2.25 * std::cos(3 * t) - 0.7 * std::sin(7 * t); }

std::vector<double> sample(double (*fn)(double), int m)
{
	std::vector<double> s(m);
	for (int j = 0; j < m; ++j)
		s[j] = fn(two_pi * j / m);
	return s;
}

} // namespace

TEST_CASE("fit recovers a trigonometric polynomial exactly")
{
	const FourierSeries s = FourierSeries::fit(sample(trig, 64), 10);
	CHECK(s.order() == 10);
	CHECK(s.a0() == doctest::Approx(0.5).epsilon(1e-14));
	CHECK(s.a()[0] == doctest::Approx(1.25).epsilon(1e-14));
	CHECK(s.b()[2] == doctest::Approx(-0.75).epsilon(1e-14));
	CHECK(s.a()[6] == doctest::Approx(0.1).epsilon(1e-13));
	for (double t = -7.0; t < 14.0; t += 0.37) {
		CHECK(s(t) == doctest::Approx(trig(t)).epsilon(1e-12));
		CHECK(s.derivative(t) == doctest::Approx(trig_slope(t)).epsilon(1e-11));
		double v = 0, d = 0;
		s.eval(t, v, d);
		CHECK(v == doctest::Approx(s(t)).epsilon(1e-14));
		CHECK(d == doctest::Approx(s.derivative(t)).epsilon(1e-14));
	}
}

TEST_CASE("energy is Parseval's mean square")
{
	const FourierSeries s = FourierSeries::fit(sample(trig, 64), 10);
	const auto samples = sample(trig, 4096);
	double ms = 0.0;
	for (double x : samples)
		ms += x * x;
	ms /= samples.size();
	CHECK(s.energy() == doctest::Approx(ms).epsilon(1e-12));
	CHECK(s.scaled(2.0).energy() == doctest::Approx(4.0 * ms).epsilon(1e-12));
}

TEST_CASE("order selection stops once the tail is negligible")
{
	const auto samples = sample(trig, 256);
	CHECK(FourierSeries::choose_order(samples, 1e-14, 1, 100) == 7);
	CHECK(FourierSeries::choose_order(samples, 1e-14, 30, 100) == 30);
	CHECK(FourierSeries::choose_order(samples, 1e-14, 1, 5) == 5);
	// capped below the Nyquist order of the grid
	CHECK(FourierSeries::choose_order(samples, 0.0, 1, 1000) <= 127);
}

TEST_CASE("fit rejects orders the grid cannot resolve")
{
	const auto samples = sample(trig, 32);
	CHECK_THROWS_AS(FourierSeries::fit(samples, 16), InvalidInput);
	CHECK_NOTHROW(FourierSeries::fit(samples, 15));
}

TEST_CASE("CSV round trip is bit exact")
{
	std::vector<double> s(128);
	for (int j = 0; j < 128; ++j)
		s[j] = std::exp(std::sin(two_pi * j / 128)) / 3.0;
	const FourierSeries series = FourierSeries::fit(s, 40);
	std::stringstream io;
	write_fourier_csv(io, 0.1 + 0.2, series);
	double omega = 0;
	FourierSeries back;
	read_fourier_csv(io, omega, back);
	CHECK(omega == 0.1 + 0.2);
	CHECK(back == series);

	std::istringstream bad("omega=1\n0,1,0\n2,0,0\n");
	CHECK_THROWS(read_fourier_csv(bad, omega, back));
}

TEST_CASE("format_exact gives the shortest round-trip form")
{
	CHECK(format_exact(0.5) == "0.5");
	CHECK(std::stod(format_exact(0.1 + 0.2)) == 0.1 + 0.2);
}
