#include "clustermap/stimulus.hpp"

#include <cmath>
#include <string>

#include "clustermap/error.hpp"

namespace clustermap {

double Pulse::value_at(double s) const
{
	if (s < 0.0)
		return 0.0;
	if (s <= width)
		return u_max;
	if (s <= support())
		return u_min();
	return 0.0;
}

void Pulse::validate() const
{
	if (!(width > 0.0) || !(lambda > 0.0) || !std::isfinite(u_max))
		throw InvalidInput("pulse needs width > 0, lambda > 0 and a finite amplitude");
}

double PulseTrain::eval(double t) const
{
	const double phase_time = std::fmod(t, period);
	const double first = primary.value_at(phase_time);
	if (first != 0.0 || !secondary)
		return first;
	return secondary->value_at(phase_time - *offset);
}

std::vector<PulseTrain::Segment> PulseTrain::segments() const
{
	std::vector<Segment> out;
	auto push = [&](double a, double b, double u) {
		if (b > a)
			out.push_back({a, b, u});
	};
	auto push_pulse = [&](double at, const Pulse& p) {
		push(at, at + p.width, p.u_max);
		push(at + p.width, at + p.support(), p.u_min());
	};
	push_pulse(0.0, primary);
	double cursor = primary.support();
	if (secondary) {
		push(cursor, *offset, 0.0);
		push_pulse(*offset, *secondary);
		cursor = *offset + secondary->support();
	}
	push(cursor, period, 0.0);
	return out;
}

void PulseTrain::validate() const
{
	primary.validate();
	if (!(period > 0.0))
		throw InvalidInput("pulse train period must be positive");
	if (primary.support() > period)
		throw InvalidInput("pulse support exceeds the train period");
	if (secondary.has_value() != offset.has_value())
		throw InvalidInput("secondary pulse and its offset go together");
	if (secondary) {
		secondary->validate();
		if (!(*offset > 0.0 && *offset < period))
			throw InvalidInput("secondary offset must lie strictly inside the period");
		if (primary.support() > *offset || *offset + secondary->support() > period)
			throw InvalidInput("primary and secondary pulses overlap");
	}
}

PulseTrain make_train(const Pulse& primary, double period)
{
	PulseTrain train{primary, period, std::nullopt, std::nullopt};
	train.validate();
	return train;
}

PulseTrain make_alternating_train(const Pulse& primary, const Pulse& secondary, double period, double offset)
{
	PulseTrain train{primary, period, secondary, offset};
	train.validate();
	return train;
}

Pulse default_primary_pulse() { return {20.0, 0.5, 3.0}; }
Pulse default_secondary_pulse() { return {10.0, 0.5, 3.0}; }

double period_from_frequency(double freq_hz)
{
	if (!(freq_hz > 0.0 && freq_hz <= 2000.0))
		throw InvalidInput("stimulation frequency must be in (0, 2000] Hz, got " + std::to_string(freq_hz));
	return 1000.0 / freq_hz;
}

PulseTrain identical_train(double freq_hz, const Pulse& pulse)
{
	return make_train(pulse, period_from_frequency(freq_hz));
}

PulseTrain alternating_train(double freq_hz, double tau2_fraction, const Pulse& primary, const Pulse& secondary)
{
	const double tau = period_from_frequency(freq_hz);
	return make_alternating_train(primary, secondary, tau, tau2_fraction * tau);
}

TrainFamily TrainFamily::identical(const Pulse& pulse)
{
	return {pulse, std::nullopt, 0.5};
}

TrainFamily TrainFamily::alternating(double tau2_fraction, const Pulse& primary, const Pulse& secondary)
{
	return {primary, secondary, tau2_fraction};
}

PulseTrain TrainFamily::at(double freq_hz) const
{
	if (secondary)
		return alternating_train(freq_hz, tau2_fraction, primary, *secondary);
	return identical_train(freq_hz, primary);
}

} // namespace clustermap
