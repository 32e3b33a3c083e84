#include "clustermap/circle_map.hpp"

#include <string>

#include "clustermap/angle.hpp"
#include "clustermap/error.hpp"

namespace clustermap {

CircleMap::CircleMap(MapKind kind, double omega, double tau, std::optional<double> tau2, std::vector<Stage> stages,
                     int iterate_n)
	: kind_(kind), omega_(omega), tau_(tau), tau2_(tau2), stages_(std::move(stages)), iterate_n_(iterate_n)
{
	if (stages_.empty())
		throw InvalidInput("circle map needs at least one stage");
	for (const Stage& s : stages_) {
		if (!s.response)
			throw InvalidInput("circle map stage is missing its response function");
		if (!(s.duration >= 0.0))
			throw InvalidInput("circle map stage duration must be non-negative");
	}
	if (iterate_n_ < 1 || iterate_n_ > max_iterate)
		throw InvalidInput("iterate count must be in [1, 64], got " + std::to_string(iterate_n_));
}

double CircleMap::duration() const
{
	double total = 0.0;
	for (const Stage& s : stages_)
		total += s.duration;
	return total * iterate_n_;
}

double CircleMap::lift(double theta) const
{
	for (int it = 0; it < iterate_n_; ++it) {
		for (const Stage& s : stages_) {
			theta += omega_ * s.duration;
			theta += (*s.response)(theta);
		}
	}
	return theta;
}

double CircleMap::operator()(double theta) const
{
	return wrap_phase(lift(theta));
}

void CircleMap::lift_with_derivative(double theta, double& image, double& slope) const
{
	double d = 1.0;
	for (int it = 0; it < iterate_n_; ++it) {
		for (const Stage& s : stages_) {
			theta += omega_ * s.duration;
			double f = 0.0, fp = 0.0;
			s.response->eval(theta, f, fp);
			theta += f;
			d *= 1.0 + fp;
		}
	}
	image = theta;
	slope = d;
}

double CircleMap::derivative(double theta) const
{
	double image = 0.0, slope = 0.0;
	lift_with_derivative(theta, image, slope);
	return slope;
}

CircleMap CircleMap::base() const
{
	return CircleMap(kind_, omega_, tau_, tau2_, stages_, 1);
}

CircleMap make_g(double omega, double tau, ResponsePtr f)
{
	if (!(tau > 0.0))
		throw InvalidInput("map period tau must be positive");
	return CircleMap(MapKind::Identical, omega, tau, std::nullopt, {{tau, std::move(f)}});
}

std::pair<CircleMap, CircleMap> make_half_maps(double omega, double tau, double tau2, ResponsePtr f, ResponsePtr f2)
{
	if (!(tau2 > 0.0 && tau2 < tau))
		throw InvalidInput("alternating offset must satisfy 0 < tau2 < tau");
	CircleMap h1(MapKind::HalfFirst, omega, tau, tau2, {{tau - tau2, std::move(f)}});
	CircleMap h2(MapKind::HalfSecond, omega, tau, tau2, {{tau2, std::move(f2)}});
	return {std::move(h1), std::move(h2)};
}

CircleMap make_alternating(double omega, double tau, double tau2, ResponsePtr f, ResponsePtr f2)
{
	auto [h1, h2] = make_half_maps(omega, tau, tau2, std::move(f), std::move(f2));
	CircleMap g = compose(h1, h2);
	return CircleMap(MapKind::Alternating, omega, tau, tau2, g.stages(), 1);
}

CircleMap compose(const CircleMap& outer, const CircleMap& inner)
{
	std::vector<CircleMap::Stage> stages;
	for (int i = 0; i < inner.iterate_n(); ++i)
		stages.insert(stages.end(), inner.stages().begin(), inner.stages().end());
	for (int i = 0; i < outer.iterate_n(); ++i)
		stages.insert(stages.end(), outer.stages().begin(), outer.stages().end());
	const double total = inner.duration() + outer.duration();
	return CircleMap(MapKind::Composite, inner.omega(), total, inner.tau2(), std::move(stages));
}

CircleMap iterate(const CircleMap& map, int n)
{
	if (n < 1 || n > CircleMap::max_iterate)
		throw InvalidInput("iterate count must be in [1, 64], got " + std::to_string(n));
	const long total = static_cast<long>(map.iterate_n()) * n;
	if (total > CircleMap::max_iterate)
		throw InvalidInput("iterate count " + std::to_string(total) + " exceeds 64");
	return CircleMap(map.kind(), map.omega(), map.tau(), map.tau2(), map.stages(), static_cast<int>(total));
}

} // namespace clustermap
