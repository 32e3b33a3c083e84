#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "clustermap/error.hpp"

namespace clustermap::cli {

namespace {

std::string trim(const std::string& s)
{
	const auto first = s.find_first_not_of(" \t\r");
	if (first == std::string::npos)
		return {};
	const auto last = s.find_last_not_of(" \t\r");
	return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& s)
{
	double v = 0.0;
	const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
	if (res.ec != std::errc() || res.ptr != s.data() + s.size())
		throw InvalidInput("'" + key + "' needs a number, got '" + s + "'");
	return v;
}

bool is_number(const std::string& s)
{
	double v = 0.0;
	const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
	return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

const ConfigKey* find_key(const std::string& name)
{
	const auto& all = RunConfig::keys();
	auto it = std::find_if(all.begin(), all.end(), [&](const ConfigKey& k) { return k.name == name; });
	return it == all.end() ? nullptr : &*it;
}

} // namespace

const std::vector<ConfigKey>& RunConfig::keys()
{
	static const std::vector<ConfigKey> table = {
		{"model", "hh", "neuron model: hh or thalamic"},
		{"out", ".", "output directory"},
		{"jobs", "1", "worker threads for sweeps and sampling"},
		{"u_max", "20", "primary pulse amplitude, uA/cm^2"},
		{"width", "0.5", "primary pulse width p, ms"},
		{"lambda", "3", "primary pulse lambda (negative phase lasts lambda * p)"},
		{"alt", "false", "alternating train with a secondary pulse", true},
		{"u2_max", "10", "secondary pulse amplitude, uA/cm^2"},
		{"width2", "0.5", "secondary pulse width, ms"},
		{"lambda2", "3", "secondary pulse lambda"},
		{"tau2_frac", "0.5", "secondary pulse offset as a fraction of tau"},
		{"freq", "150", "stimulation frequency, Hz"},
		{"n", "2", "map iterate"},
		{"n_max", "10", "largest orbit period searched for attractors"},
		{"freq_min", "70", "sweep start, Hz"},
		{"freq_max", "300", "sweep end, Hz"},
		{"freq_step", "5", "sweep step, Hz"},
		{"dist", "uniform", "initial phases: uniform or vonmises"},
		{"kappa", "50", "von Mises concentration"},
		{"center", "0", "von Mises center, rad"},
		{"count", "500", "number of neurons"},
		{"periods", "auto", "stimulation periods (auto: 40 identical, 80 alternating)"},
		{"dt", "0.01", "population ODE step, ms"},
		{"epsilon", "0.05", "cluster detection gap, rad"},
		{"engine", "map", "sweep engine: map or ode"},
		{"record_stride", "50", "simulate: record every record_stride steps of dt"},
		{"tau2_min", "0.4", "bifurcation scan start, fraction of tau"},
		{"tau2_max", "0.6", "bifurcation scan end, fraction of tau"},
		{"tau2_step", "0.005", "bifurcation scan grid spacing, fraction of tau"},
		{"prc_samples", "4096", "orbit samples per period"},
		{"prc_order", "0", "PRC Fourier order (0: automatic)"},
		{"response_grid", "1024", "onset phases sampled for f"},
		{"response_order", "0", "response Fourier order (0: automatic)"},
		{"fp_grid", "2048", "fixed-point search grid"},
		{"graph_points", "1000", "rows in dense plotting tables"},
	};
	return table;
}

RunConfig::RunConfig()
{
	for (const ConfigKey& k : keys())
		values_[k.name] = k.fallback;
}

void RunConfig::load(std::istream& in, const std::string& source)
{
	std::string line;
	int lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		if (const auto hash = line.find('#'); hash != std::string::npos)
			line.erase(hash);
		line = trim(line);
		if (line.empty())
			continue;
		const auto eq = line.find('=');
		if (eq == std::string::npos)
			throw InvalidInput(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
		try {
			set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
		} catch (const InvalidInput& e) {
			throw InvalidInput(source + ":" + std::to_string(lineno) + ": " + e.what());
		}
	}
}

void RunConfig::load_file(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw InvalidInput("cannot open config file '" + path + "'");
	load(in, path);
}

void RunConfig::set(const std::string& key, const std::string& value)
{
	if (const auto dot = key.find('.'); dot != std::string::npos) {
		// validates the model name, the parameter and the number
		const ModelKind kind = parse_model_kind(key.substr(0, dot));
		NeuronModel m = kind == ModelKind::HodgkinHuxley ? NeuronModel::hodgkin_huxley() : NeuronModel::thalamic();
		const std::string param = key.substr(dot + 1);
		m.set_param(param, parse_double(key, value));
		overrides_[std::string(to_string(kind)) + "." + param] = value;
		return;
	}
	const ConfigKey* k = find_key(key);
	if (!k)
		throw InvalidInput("unknown config key '" + key + "'");
	const std::string previous = values_[key];
	values_[key] = value;
	try {
		// keys with a numeric default take numbers; "periods" also takes "auto"
		if (k->is_flag)
			flag(key);
		else if (key == "periods" && value != "auto")
			integer(key);
		else if (is_number(k->fallback))
			number(key);
	} catch (const InvalidInput&) {
		values_[key] = previous;
		throw;
	}
}

const std::string& RunConfig::text(const std::string& key) const
{
	auto it = values_.find(key);
	if (it == values_.end())
		throw InvalidInput("unknown config key '" + key + "'");
	return it->second;
}

double RunConfig::number(const std::string& key) const
{
	return parse_double(key, text(key));
}

int RunConfig::integer(const std::string& key) const
{
	const std::string& s = text(key);
	int v = 0;
	const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
	if (res.ec != std::errc() || res.ptr != s.data() + s.size())
		throw InvalidInput("'" + key + "' needs an integer, got '" + s + "'");
	return v;
}

bool RunConfig::flag(const std::string& key) const
{
	const std::string& s = text(key);
	if (s == "true" || s == "1" || s == "yes" || s == "on")
		return true;
	if (s == "false" || s == "0" || s == "no" || s == "off")
		return false;
	throw InvalidInput("'" + key + "' needs true or false, got '" + s + "'");
}

bool RunConfig::is_default(const std::string& key) const
{
	const ConfigKey* k = find_key(key);
	return k && text(key) == k->fallback;
}

NeuronModel RunConfig::model() const
{
	const ModelKind kind = parse_model_kind(text("model"));
	NeuronModel m = kind == ModelKind::HodgkinHuxley ? NeuronModel::hodgkin_huxley() : NeuronModel::thalamic();
	const std::string prefix = std::string(to_string(kind)) + ".";
	for (const auto& [key, value] : overrides_) {
		if (key.rfind(prefix, 0) == 0)
			m.set_param(key.substr(prefix.size()), parse_double(key, value));
	}
	return m;
}

void RunConfig::write(std::ostream& out) const
{
	for (const auto& [key, value] : values_)
		out << key << " = " << value << '\n';
	for (const auto& [key, value] : overrides_)
		out << key << " = " << value << '\n';
}

} // namespace clustermap::cli
