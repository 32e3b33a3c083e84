#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "clustermap/neuron_model.hpp"

namespace clustermap::cli {

struct ConfigKey {
	std::string name;
	std::string fallback;
	std::string help;
	bool is_flag = false;
};

// Flat key = value run configuration. Known keys carry defaults; model
// parameter overrides use "<model>.<param>" keys, e.g. "hh.I_b".
class RunConfig {
public:
	static const std::vector<ConfigKey>& keys();

	RunConfig();

	// One "key = value" per line, '#' starts a comment.
	void load(std::istream& in, const std::string& source);
	void load_file(const std::string& path);
	void set(const std::string& key, const std::string& value);

	const std::string& text(const std::string& key) const;
	double number(const std::string& key) const;
	int integer(const std::string& key) const;
	bool flag(const std::string& key) const;
	bool is_default(const std::string& key) const;

	// Model with the matching "<model>.<param>" overrides applied.
	NeuronModel model() const;

	// Effective configuration in the same text format, keys sorted.
	void write(std::ostream& out) const;

private:
	std::map<std::string, std::string> values_;
	std::map<std::string, std::string> overrides_;  // "<model>.<param>" keys
};

} // namespace clustermap::cli
