#pragma once

#include <stdexcept>
#include <string>

namespace clustermap {

// Caller passed something outside an operation's contract (wrong state
// dimension, bad frequency, dt too coarse, ...).
class InvalidInput : public std::invalid_argument {
public:
	using std::invalid_argument::invalid_argument;
};

enum class FailureKind {
	NonOscillatory,
	AdjointDivergence,
	OutsideBasin,
};

inline const char* to_string(FailureKind kind)
{
	switch (kind) {
	case FailureKind::NonOscillatory:    return "non-oscillatory";
	case FailureKind::AdjointDivergence: return "adjoint divergence";
	case FailureKind::OutsideBasin:      return "outside basin";
	}
	return "unknown";
}

// A numerical stage could not produce a result for valid inputs.
class NumericalFailure : public std::runtime_error {
public:
	NumericalFailure(FailureKind kind, const std::string& what)
		: std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
	{}

	FailureKind kind() const noexcept { return kind_; }

private:
	FailureKind kind_;
};

} // namespace clustermap
