#include "clustermap/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "clustermap/angle.hpp"
#include "clustermap/error.hpp"
#include "clustermap/ode.hpp"

namespace clustermap {

namespace {

struct Stepper {
	const NeuronModel& model;

	State operator()(const State& x, double h) const
	{
		auto rhs = [this](double, const State& s) { return model.eval_rhs(s); };
		return rk4_step(rhs, 0.0, x, h);
	}

	double dv(const State& x) const { return model.eval_rhs(x)[model.voltage_index()]; }
};

bool finite_state(const State& x, double v_bound)
{
	return x.allFinite() && std::abs(x[0]) <= v_bound;
}

// Given x_prev with V' > 0 and a step of size h that ends with V' <= 0,
// locate the sub-step where V' vanishes. Bisection on the partial RK4 step.
std::pair<double, State> refine_peak(const Stepper& step, const State& x_prev, double h)
{
	double lo = 0.0, hi = h;
	for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
		const double mid = 0.5 * (lo + hi);
		if (step.dv(step(x_prev, mid)) > 0.0)
			lo = mid;
		else
			hi = mid;
	}
	const double s = 0.5 * (lo + hi);
	return {s, step(x_prev, s)};
}

// Steps forward and reports voltage peaks above a threshold. A peak only
// counts after an upward threshold crossing, so subthreshold wiggles are
// ignored.
class PeakTracker {
public:
	PeakTracker(const NeuronModel& model, State x, double dt, double threshold)
		: step_{model}, x_(std::move(x)), dt_(dt), threshold_(threshold),
		  armed_(false), dv_(step_.dv(x_))
	{}

	// Advances one step; returns the peak (time, state) if one occurred inside it.
	std::optional<std::pair<double, State>> advance()
	{
		State next = step_(x_, dt_);
		const double dv_next = step_.dv(next);
		std::optional<std::pair<double, State>> peak;
		if (x_[0] < threshold_ && next[0] >= threshold_)
			armed_ = true;
		if (armed_ && dv_ > 0.0 && dv_next <= 0.0 && next[0] >= threshold_) {
			auto [s, at] = refine_peak(step_, x_, dt_);
			peak.emplace(t_ + s, std::move(at));
			armed_ = false;
		}
		x_ = std::move(next);
		dv_ = dv_next;
		t_ += dt_;
		return peak;
	}

	double time() const { return t_; }
	const State& state() const { return x_; }

private:
	Stepper step_;
	State x_;
	double dt_;
	double threshold_;
	bool armed_;
	double dv_;
	double t_ = 0.0;
};

} // namespace

double PeriodicOrbit::sample_phase(std::size_t k) const
{
	return two_pi * static_cast<double>(k) / static_cast<double>(samples.size());
}

double PeriodicOrbit::closure_error() const
{
	return (fine_samples.back() - fine_samples.front()).norm();
}

State PeriodicOrbit::state_at_phase(double theta) const
{
	const double th = wrap_phase(theta);
	const std::size_t n = samples.size();
	std::size_t k = static_cast<std::size_t>(std::floor(th / two_pi * static_cast<double>(n)));
	k = std::min(k, n - 1);
	const double remaining = (th - sample_phase(k)) / omega;
	if (remaining <= 0.0)
		return samples[k];
	// at most one sample spacing; two RK4 steps are far below sample accuracy
	return flow(model, samples[k], remaining, 0.5 * remaining + 1e-300);
}

State flow(const NeuronModel& model, const State& x, double duration, double dt)
{
	if (duration <= 0.0)
		return x;
	const Stepper step{model};
	const int n = std::max(1, static_cast<int>(std::ceil(duration / dt - 1e-9)));
	const double h = duration / n;
	State y = x;
	for (int i = 0; i < n; ++i)
		y = step(y, h);
	return y;
}

PeriodicOrbit find_periodic_orbit(const NeuronModel& model, const OrbitOptions& options)
{
	if (!(options.dt > 0.0))
		throw InvalidInput("orbit dt must be positive");
	if (options.samples < 2048)
		throw InvalidInput("orbit needs at least 2048 phase samples");

	const Stepper step{model};
	State x = flow(model, model.initial_state(), options.settle_time, options.dt);
	if (!finite_state(x, 1e4))
		throw NumericalFailure(FailureKind::NonOscillatory, "trajectory diverged while settling");

	// Voltage range over a window long enough to hold several cycles.
	const int probe_steps = static_cast<int>(std::ceil(2.0 * options.expected_period / options.dt));
	double v_min = x[0], v_max = x[0];
	for (int i = 0; i < probe_steps; ++i) {
		x = step(x, options.dt);
		v_min = std::min(v_min, x[0]);
		v_max = std::max(v_max, x[0]);
	}
	if (!finite_state(x, 1e4) || v_max - v_min < 10.0) {
		throw NumericalFailure(FailureKind::NonOscillatory,
			"model '" + std::string(model.name()) + "' shows no spikes after settling");
	}
	const double threshold = 0.5 * (v_min + v_max);

	PeakTracker tracker(model, x, options.dt, threshold);
	const double search_window = 10.0 * options.expected_period;
	std::vector<double> peaks;
	State last_peak_state;
	std::optional<double> period;
	while (static_cast<int>(peaks.size()) < options.max_spikes) {
		if (tracker.time() > search_window + (peaks.empty() ? 0.0 : peaks.back()))
			break;
		auto peak = tracker.advance();
		if (!finite_state(tracker.state(), 1e4))
			break;
		if (!peak)
			continue;
		peaks.push_back(peak->first);
		last_peak_state = std::move(peak->second);
		const std::size_t m = peaks.size();
		if (m >= 3) {
			const double isi = peaks[m - 1] - peaks[m - 2];
			const double prev = peaks[m - 2] - peaks[m - 3];
			if (std::abs(isi - prev) < options.isi_tolerance) {
				period = isi;
				break;
			}
		}
	}
	if (!period) {
		throw NumericalFailure(FailureKind::NonOscillatory,
			"no converged spike train for model '" + std::string(model.name()) + "'");
	}

	PeriodicOrbit orbit{model, 0.0, 0.0, 0.0, 0.0, {}, {}, {}};
	orbit.period = *period;
	orbit.omega = two_pi / orbit.period;
	orbit.v_threshold = threshold;
	orbit.dt = options.dt;
	orbit.spike_state = last_peak_state;

	const std::size_t n = static_cast<std::size_t>(options.samples);
	const double h = orbit.period / static_cast<double>(2 * n);
	orbit.fine_samples.reserve(2 * n + 1);
	orbit.fine_samples.push_back(orbit.spike_state);
	State y = orbit.spike_state;
	for (std::size_t i = 0; i < 2 * n; ++i) {
		y = step(y, h);
		orbit.fine_samples.push_back(y);
	}
	orbit.samples.reserve(n);
	for (std::size_t k = 0; k < n; ++k)
		orbit.samples.push_back(orbit.fine_samples[2 * k]);
	return orbit;
}

double asymptotic_phase(const PeriodicOrbit& orbit, const State& state, const PhaseOptions& options)
{
	if (state.size() != orbit.model.state_dim())
		throw InvalidInput("state dimension does not match the orbit's model");

	const double settle = options.min_periods * orbit.period;
	PeakTracker tracker(orbit.model, state, orbit.dt, orbit.v_threshold);
	const double give_up = settle + 5.0 * orbit.period;
	while (tracker.time() < give_up) {
		auto peak = tracker.advance();
		if (!finite_state(tracker.state(), options.voltage_bound))
			throw NumericalFailure(FailureKind::OutsideBasin, "trajectory left the physiological range");
		if (peak && peak->first >= settle) {
			// the state reached phase 0 (mod 2 pi) at this time
			return wrap_phase(-orbit.omega * peak->first);
		}
	}
	throw NumericalFailure(FailureKind::OutsideBasin, "trajectory stopped spiking");
}

} // namespace clustermap
