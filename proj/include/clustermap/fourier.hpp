#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace clustermap {

// Real 2pi-periodic trigonometric polynomial
//   s(theta) = a0 + sum_{k=1..K} a_k cos(k theta) + b_k sin(k theta).
class FourierSeries {
public:
	FourierSeries() = default;
	FourierSeries(double a0, std::vector<double> a, std::vector<double> b);

	// Discrete projection of samples taken at theta_j = 2 pi j / M onto
	// orders 0..order. Requires order < M / 2, so the projection is also
	// the least-squares fit.
	static FourierSeries fit(std::span<const double> samples, int order);

	// Smallest order >= min_order whose discarded tail carries less than
	// tail_tol of the total mean-square energy, capped at max_order (and
	// at M/2 - 1).
	static int choose_order(std::span<const double> samples, double tail_tol, int min_order, int max_order);

	int order() const { return static_cast<int>(a_.size()); }
	double a0() const { return a0_; }
	const std::vector<double>& a() const { return a_; }
	const std::vector<double>& b() const { return b_; }

	double operator()(double theta) const;
	double derivative(double theta) const;
	// Value and derivative in one sweep.
	void eval(double theta, double& value, double& slope) const;

	FourierSeries scaled(double factor) const;

	// Mean-square energy a0^2 + 1/2 sum(a_k^2 + b_k^2).
	double energy() const;

	bool operator==(const FourierSeries&) const = default;

private:
	double a0_ = 0.0;
	std::vector<double> a_;
	std::vector<double> b_;
};

// Text exchange format shared by PRCs and response functions:
//   omega=<value>
//   k,a_k,b_k        (one row per k = 0..K; b_0 is written as 0)
// Numbers use the shortest representation that parses back to the same
// double, so write -> read is bit exact.
void write_fourier_csv(std::ostream& out, double omega, const FourierSeries& series);
void read_fourier_csv(std::istream& in, double& omega, FourierSeries& series);

// Shortest round-trip decimal form of a double.
std::string format_exact(double value);

} // namespace clustermap
