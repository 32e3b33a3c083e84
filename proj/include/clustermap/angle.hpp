#pragma once

#include <cmath>
#include <numbers>

namespace clustermap {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Reduce to [0, 2pi).
inline double wrap_phase(double theta)
{
	double r = std::fmod(theta, two_pi);
	if (r < 0.0)
		r += two_pi;
	// fmod of a tiny negative number can round up to exactly 2pi
	if (r >= two_pi)
		r = 0.0;
	return r;
}

// Reduce to (-pi, pi].
inline double wrap_signed(double delta)
{
	double r = std::remainder(delta, two_pi);
	if (r <= -std::numbers::pi)
		r += two_pi;
	return r;
}

// Shortest distance between two phases on the circle.
inline double circular_distance(double a, double b)
{
	return std::abs(wrap_signed(a - b));
}

} // namespace clustermap
