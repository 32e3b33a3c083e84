#include "clustermap/response.hpp"

#include <cmath>

#include "clustermap/angle.hpp"
#include "clustermap/error.hpp"
#include "clustermap/ode.hpp"
#include "clustermap/parallel.hpp"

namespace clustermap {

namespace {

// Integrates the phase equation over [0, duration] at constant current.
double integrate_segment(const PhaseResponseCurve& prc, double current, double duration, double dt, double theta)
{
	if (duration <= 0.0)
		return theta;
	if (current == 0.0)
		return theta + prc.omega * duration;
	const int n = std::max(1, static_cast<int>(std::ceil(duration / dt - 1e-9)));
	const double h = duration / n;
	auto rhs = [&](double, double th) { return prc.omega + prc(th) * current; };
	for (int i = 0; i < n; ++i)
		theta = rk4_step(rhs, 0.0, theta, h);
	return theta;
}

} // namespace

double integrate_across_pulse(const PhaseResponseCurve& prc, const Pulse& pulse, double theta0, double dt)
{
	double theta = integrate_segment(prc, pulse.u_max, pulse.width, dt, theta0);
	return integrate_segment(prc, pulse.u_min(), pulse.support() - pulse.width, dt, theta);
}

std::vector<double> sample_response(const PhaseResponseCurve& prc, const Pulse& pulse, int grid, double dt,
                                    unsigned jobs)
{
	if (grid < 64)
		throw InvalidInput("response grid needs at least 64 phases");
	if (!(dt > 0.0))
		throw InvalidInput("response integration step must be positive");
	pulse.validate();
	std::vector<double> shift(grid);
	const double free_rotation = prc.omega * pulse.support();
	parallel_for(shift.size(), jobs, [&](std::size_t j) {
		const double theta0 = two_pi * static_cast<double>(j) / static_cast<double>(grid);
		shift[j] = integrate_across_pulse(prc, pulse, theta0, dt) - theta0 - free_rotation;
	});
	return shift;
}

ResponseFunction compute_response_function(const PhaseResponseCurve& prc, const Pulse& pulse,
                                           const ResponseOptions& options)
{
	const std::vector<double> shift = sample_response(prc, pulse, options.grid, options.dt, options.jobs);
	int order = options.order;
	if (order <= 0)
		order = FourierSeries::choose_order(shift, options.tail_tolerance, options.min_order, options.max_order);
	return ResponseFunction{prc.omega, pulse, FourierSeries::fit(shift, order)};
}

void write_response_csv(std::ostream& out, const ResponseFunction& f)
{
	write_fourier_csv(out, f.omega, f.series);
}

ResponseFunction read_response_csv(std::istream& in, const Pulse& pulse)
{
	ResponseFunction f;
	f.pulse = pulse;
	read_fourier_csv(in, f.omega, f.series);
	return f;
}

} // namespace clustermap
