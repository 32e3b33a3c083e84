#include "clustermap/fourier.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <system_error>

#include "clustermap/angle.hpp"
#include "clustermap/error.hpp"

namespace clustermap {

namespace {

// Full one-sided spectrum (a_k, b_k) for k = 0..kmax of uniformly sampled
// data, using an exact cos/sin table so results are reproducible.
void project(std::span<const double> x, int kmax, std::vector<double>& a, std::vector<double>& b)
{
	const std::size_t m = x.size();
	std::vector<double> cos_table(m), sin_table(m);
	for (std::size_t j = 0; j < m; ++j) {
		const double angle = two_pi * static_cast<double>(j) / static_cast<double>(m);
		cos_table[j] = std::cos(angle);
		sin_table[j] = std::sin(angle);
	}
	a.assign(kmax + 1, 0.0);
	b.assign(kmax + 1, 0.0);
	for (int k = 0; k <= kmax; ++k) {
		double sa = 0.0, sb = 0.0;
		std::size_t idx = 0;
		for (std::size_t j = 0; j < m; ++j) {
			sa += x[j] * cos_table[idx];
			sb += x[j] * sin_table[idx];
			idx += k;
			if (idx >= m)
				idx %= m;
		}
		const double scale = (k == 0 ? 1.0 : 2.0) / static_cast<double>(m);
		a[k] = sa * scale;
		b[k] = sb * scale;
	}
}

double parse_double(std::string_view text)
{
	while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
		text.remove_prefix(1);
	while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
		text.remove_suffix(1);
	double value = 0.0;
	const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec != std::errc{} || ptr != text.data() + text.size())
		throw InvalidInput("malformed number '" + std::string(text) + "'");
	return value;
}

} // namespace

FourierSeries::FourierSeries(double a0, std::vector<double> a, std::vector<double> b)
	: a0_(a0), a_(std::move(a)), b_(std::move(b))
{
	if (a_.size() != b_.size())
		throw InvalidInput("Fourier cosine and sine coefficient counts differ");
}

FourierSeries FourierSeries::fit(std::span<const double> samples, int order)
{
	const std::size_t m = samples.size();
	if (order < 0 || 2 * static_cast<std::size_t>(order) >= m)
		throw InvalidInput("Fourier order " + std::to_string(order) + " needs more than "
		                   + std::to_string(m) + " samples");
	std::vector<double> a, b;
	project(samples, order, a, b);
	const double a0 = a[0];
	a.erase(a.begin());
	b.erase(b.begin());
	return FourierSeries(a0, std::move(a), std::move(b));
}

int FourierSeries::choose_order(std::span<const double> samples, double tail_tol, int min_order, int max_order)
{
	const int cap = static_cast<int>(samples.size() / 2) - 1;
	if (cap < 1 || max_order < 1)
		throw InvalidInput("too few samples to fit a Fourier series");
	const int limit = std::min(max_order, cap);
	std::vector<double> a, b;
	project(samples, cap, a, b);

	// the tail is measured against every resolvable mode, not just those below max_order
	double total = a[0] * a[0];
	std::vector<double> band(cap + 1, 0.0);
	for (int k = 1; k <= cap; ++k) {
		band[k] = 0.5 * (a[k] * a[k] + b[k] * b[k]);
		total += band[k];
	}
	if (total == 0.0)
		return std::max(1, std::min(min_order, limit));

	double tail = 0.0;
	std::vector<double> tail_after(cap + 1, 0.0);
	for (int k = cap; k >= 1; --k) {
		tail_after[k] = tail;
		tail += band[k];
	}
	for (int k = std::max(1, min_order); k <= limit; ++k) {
		if (tail_after[k] < tail_tol * total)
			return k;
	}
	return limit;
}

void FourierSeries::eval(double theta, double& value, double& slope) const
{
	const double c1 = std::cos(theta);
	const double s1 = std::sin(theta);
	double ck = c1, sk = s1;
	double v = a0_, d = 0.0;
	const std::size_t n = a_.size();
	for (std::size_t i = 0; i < n; ++i) {
		const double k = static_cast<double>(i + 1);
		v += a_[i] * ck + b_[i] * sk;
		d += k * (b_[i] * ck - a_[i] * sk);
		const double next_c = ck * c1 - sk * s1;
		sk = sk * c1 + ck * s1;
		ck = next_c;
	}
	value = v;
	slope = d;
}

double FourierSeries::operator()(double theta) const
{
	const double c1 = std::cos(theta);
	const double s1 = std::sin(theta);
	double ck = c1, sk = s1;
	double v = a0_;
	const std::size_t n = a_.size();
	for (std::size_t i = 0; i < n; ++i) {
		v += a_[i] * ck + b_[i] * sk;
		const double next_c = ck * c1 - sk * s1;
		sk = sk * c1 + ck * s1;
		ck = next_c;
	}
	return v;
}

double FourierSeries::derivative(double theta) const
{
	double v = 0.0, d = 0.0;
	eval(theta, v, d);
	return d;
}

FourierSeries FourierSeries::scaled(double factor) const
{
	FourierSeries out = *this;
	out.a0_ *= factor;
	for (double& c : out.a_) c *= factor;
	for (double& c : out.b_) c *= factor;
	return out;
}

double FourierSeries::energy() const
{
	double e = a0_ * a0_;
	for (std::size_t i = 0; i < a_.size(); ++i)
		e += 0.5 * (a_[i] * a_[i] + b_[i] * b_[i]);
	return e;
}

std::string format_exact(double value)
{
	char buf[64];
	const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
	return std::string(buf, ptr);
}

void write_fourier_csv(std::ostream& out, double omega, const FourierSeries& series)
{
	out << "omega=" << format_exact(omega) << '\n';
	out << "0," << format_exact(series.a0()) << ",0\n";
	for (int k = 1; k <= series.order(); ++k) {
		out << k << ',' << format_exact(series.a()[k - 1]) << ','
		    << format_exact(series.b()[k - 1]) << '\n';
	}
}

void read_fourier_csv(std::istream& in, double& omega, FourierSeries& series)
{
	std::string line;
	if (!std::getline(in, line) || line.rfind("omega=", 0) != 0)
		throw InvalidInput("Fourier CSV must start with 'omega=<value>'");
	omega = parse_double(std::string_view(line).substr(6));

	double a0 = 0.0;
	std::vector<double> a, b;
	int expected = 0;
	while (std::getline(in, line)) {
		if (line.empty() || line == "\r")
			continue;
		const auto c1 = line.find(',');
		const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
		if (c1 == std::string::npos || c2 == std::string::npos)
			throw InvalidInput("Fourier CSV row needs 'k,a_k,b_k': " + line);
		const std::string_view view(line);
		const double k = parse_double(view.substr(0, c1));
		if (k != expected)
			throw InvalidInput("Fourier CSV rows must be ordered k = 0, 1, 2, ...");
		const double ak = parse_double(view.substr(c1 + 1, c2 - c1 - 1));
		const double bk = parse_double(view.substr(c2 + 1));
		if (expected == 0) {
			a0 = ak;
		} else {
			a.push_back(ak);
			b.push_back(bk);
		}
		++expected;
	}
	if (expected == 0)
		throw InvalidInput("Fourier CSV has no coefficient rows");
	series = FourierSeries(a0, std::move(a), std::move(b));
}

} // namespace clustermap
