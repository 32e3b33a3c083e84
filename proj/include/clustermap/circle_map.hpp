#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "clustermap/response.hpp"

namespace clustermap {

enum class MapKind {
	Identical,    // g: one pulse per period
	HalfFirst,    // h1: rotate over tau - tau2, then primary kick
	HalfSecond,   // h2: rotate over tau2, then secondary kick
	Alternating,  // G = h1 o h2
	Composite,    // any other composition
};

// Degree-one circle map built from free rotation plus instantaneous kicks.
// One application of the base map runs its stages in order; each stage
// advances the phase by omega * duration and then adds f(phase).
// Immutable once constructed; response functions are shared.
class CircleMap {
public:
	struct Stage {
		double duration;  // ms of free rotation before the kick
		std::shared_ptr<const ResponseFunction> response;
	};

	static constexpr int max_iterate = 64;

	CircleMap(MapKind kind, double omega, double tau, std::optional<double> tau2, std::vector<Stage> stages,
	          int iterate_n = 1);

	MapKind kind() const { return kind_; }
	double omega() const { return omega_; }
	double tau() const { return tau_; }
	std::optional<double> tau2() const { return tau2_; }
	int iterate_n() const { return iterate_n_; }
	const std::vector<Stage>& stages() const { return stages_; }
	// Elapsed stimulation time covered by one application (all iterates).
	double duration() const;

	// Unreduced image on the real line; lift(theta + 2 pi) = lift(theta) + 2 pi.
	double lift(double theta) const;
	// Image reduced to [0, 2 pi).
	double operator()(double theta) const;
	// Chain-rule product of (1 + f') along the forward orbit.
	double derivative(double theta) const;
	void lift_with_derivative(double theta, double& image, double& slope) const;

	// The same map with iterate_n = 1.
	CircleMap base() const;

private:
	MapKind kind_;
	double omega_;
	double tau_;
	std::optional<double> tau2_;
	std::vector<Stage> stages_;
	int iterate_n_;
};

using ResponsePtr = std::shared_ptr<const ResponseFunction>;

// g(s) = s + omega tau + f(s + omega tau)
CircleMap make_g(double omega, double tau, ResponsePtr f);

// h2(s) = s + omega tau2 + f2(s + omega tau2)
// h1(s) = s + omega (tau - tau2) + f(s + omega (tau - tau2))
std::pair<CircleMap, CircleMap> make_half_maps(double omega, double tau, double tau2, ResponsePtr f, ResponsePtr f2);

// G = h1 o h2, the one-period map for an alternating train.
CircleMap make_alternating(double omega, double tau, double tau2, ResponsePtr f, ResponsePtr f2);

// outer o inner
CircleMap compose(const CircleMap& outer, const CircleMap& inner);

// n-fold composition, 1 <= n and total iterate count <= 64.
CircleMap iterate(const CircleMap& map, int n);

} // namespace clustermap
