#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>

#include "run_config.hpp"

namespace clustermap::cli {

using Json = nlohmann::ordered_json;

// Raised when a pipeline stage hits a NumericalFailure; names the stage.
class StageFailure : public std::runtime_error {
public:
	StageFailure(std::string stage, const std::string& what)
		: std::runtime_error(what), stage_(std::move(stage)) {}
	const std::string& stage() const { return stage_; }

private:
	std::string stage_;
};

// Each command writes its files into cfg "out", writes summary.json and
// run_config.txt next to them and returns the summary.
Json cmd_prc(const RunConfig& cfg, std::ostream& log);
Json cmd_response(const RunConfig& cfg, std::ostream& log);
Json cmd_map(const RunConfig& cfg, std::ostream& log);
Json cmd_sweep(const RunConfig& cfg, std::ostream& log);
Json cmd_bifurcate(const RunConfig& cfg, std::ostream& log);
Json cmd_simulate(const RunConfig& cfg, std::ostream& log);

// Full command line entry point. Exit codes: 0 success, 2 invalid
// configuration, 3 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace clustermap::cli
