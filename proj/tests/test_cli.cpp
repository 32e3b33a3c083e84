#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "clustermap/error.hpp"
#include "commands.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using clustermap::cli::Json;
using clustermap::cli::RunConfig;

namespace {

// Fewer PRC samples keep the runs short. The response grid stays at its
// default: coarser grids alias f and add spurious fixed-point pairs.
const std::vector<std::string> fast = {"--prc-samples", "2048"};

struct Result {
	int code;
	std::string out;
	std::string err;
	fs::path dir;
};

fs::path scratch(const std::string& name)
{
	const fs::path dir = fs::temp_directory_path() / ("clustermap_cli_" + name);
	fs::remove_all(dir);
	fs::create_directories(dir);
	return dir;
}

Result run(const std::string& name, std::vector<std::string> args, bool with_out = true)
{
	Result r{0, {}, {}, scratch(name)};
	if (with_out) {
		args.push_back("--out");
		args.push_back(r.dir.string());
	}
	std::vector<const char*> argv{"clustermap"};
	for (const std::string& a : args)
		argv.push_back(a.c_str());
	std::ostringstream out, err;
	r.code = clustermap::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
	r.out = out.str();
	r.err = err.str();
	return r;
}

std::vector<std::string> with_fast(std::initializer_list<std::string> args)
{
	std::vector<std::string> v(args);
	v.insert(v.end(), fast.begin(), fast.end());
	return v;
}

Json summary(const Result& r)
{
	std::ifstream in(r.dir / "summary.json");
	REQUIRE(in);
	return Json::parse(in);
}

std::string slurp(const fs::path& p)
{
	std::ifstream in(p);
	std::stringstream s;
	s << in.rdbuf();
	return s.str();
}

double circ_dist(double a, double b)
{
	const double d = std::fmod(std::abs(a - b), 2.0 * M_PI);
	return std::min(d, 2.0 * M_PI - d);
}

} // namespace

TEST_CASE("config defaults, file parsing and precedence")
{
	RunConfig cfg;
	CHECK(cfg.text("model") == "hh");
	CHECK(cfg.number("u_max") == 20.0);
	CHECK(cfg.integer("count") == 500);
	CHECK(!cfg.flag("alt"));
	CHECK(cfg.is_default("freq"));

	std::istringstream in("# comment\nfreq = 185   # trailing\n\nmodel=thalamic\nthalamic.I_b = 5.5\n");
	cfg.load(in, "test.cfg");
	CHECK(cfg.number("freq") == 185.0);
	CHECK(!cfg.is_default("freq"));
	CHECK(cfg.model().name() == "thalamic");

	std::istringstream bad("freq 185\n");
	try {
		cfg.load(bad, "bad.cfg");
		FAIL("expected a parse error");
	} catch (const clustermap::InvalidInput& e) {
		CHECK(std::string(e.what()).find("bad.cfg:1") != std::string::npos);
	}
	CHECK_THROWS_AS(cfg.set("no_such_key", "1"), clustermap::InvalidInput);
	CHECK_THROWS_AS(cfg.set("hh.no_such_param", "1"), clustermap::InvalidInput);
	CHECK_THROWS_AS(cfg.set("freq", "12abc"), clustermap::InvalidInput);
	CHECK_THROWS_AS(cfg.set("alt", "maybe"), clustermap::InvalidInput);
	CHECK_THROWS_AS(cfg.set("periods", "many"), clustermap::InvalidInput);
	CHECK_NOTHROW(cfg.set("periods", "auto"));
	CHECK_NOTHROW(cfg.set("dist", "vonmises"));
	CHECK(cfg.number("freq") == 185.0);

	std::ostringstream written;
	cfg.write(written);
	RunConfig back;
	std::istringstream reread(written.str());
	back.load(reread, "written");
	std::ostringstream again;
	back.write(again);
	CHECK(again.str() == written.str());
}

TEST_CASE("prc reports both natural frequencies and is reproducible")
{
	const Result hh = run("prc_hh", with_fast({"prc"}));
	REQUIRE(hh.code == 0);
	const Json s = summary(hh);
	CHECK(s["omega"].get<double>() == doctest::Approx(0.429).epsilon(0.005 / 0.429));
	CHECK(fs::exists(hh.dir / "prc.csv"));
	CHECK(fs::exists(hh.dir / "prc_dense.csv"));
	CHECK(fs::exists(hh.dir / "run_config.txt"));

	const Result again = run("prc_hh_again", with_fast({"prc"}));
	REQUIRE(again.code == 0);
	CHECK(slurp(hh.dir / "prc.csv") == slurp(again.dir / "prc.csv"));

	const Result th = run("prc_th", with_fast({"prc", "--model", "thalamic"}));
	REQUIRE(th.code == 0);
	CHECK(summary(th)["omega"].get<double>() == doctest::Approx(0.748).epsilon(0.005 / 0.748));
}

TEST_CASE("config file and flags give the same run")
{
	const fs::path cfg_dir = scratch("cfg_file");
	const fs::path cfg = cfg_dir / "run.cfg";
	{
		std::ofstream f(cfg);
		f << "freq = 300\nn = 4\nprc_samples = 2048\n";
	}
	const Result a = run("map_cfg", {"map", "--config", cfg.string()});
	const Result b = run("map_flags", with_fast({"map", "--freq", "300", "--n", "4"}));
	REQUIRE(a.code == 0);
	REQUIRE(b.code == 0);
	CHECK(slurp(a.dir / "fixed_points.csv") == slurp(b.dir / "fixed_points.csv"));
	// the effective configs differ only in the output directory
	auto without_out = [](const fs::path& p) {
		std::istringstream in(slurp(p));
		std::string line, kept;
		while (std::getline(in, line))
			if (line.rfind("out = ", 0) != 0)
				kept += line + '\n';
		return kept;
	};
	CHECK(without_out(a.dir / "run_config.txt") == without_out(b.dir / "run_config.txt"));
	CHECK(summary(a)["stable_count"] == 4);

	// flags beat the file
	const Result c = run("map_override", {"map", "--config", cfg.string(), "--n", "2"});
	REQUIRE(c.code == 0);
	CHECK(summary(c)["iterate_n"] == 2);
}

TEST_CASE("map at 150 Hz finds the two stable points of g^2")
{
	const Result r = run("map_150", with_fast({"map", "--freq", "150", "--n", "2"}));
	REQUIRE(r.code == 0);
	const Json s = summary(r);
	std::vector<double> stable;
	for (const Json& p : s["fixed_points"])
		if (p["stability"] == "stable")
			stable.push_back(p["theta"].get<double>());
	REQUIRE(stable.size() == 2);
	CHECK(circ_dist(stable[0], 2.86) < 0.15);
	CHECK(circ_dist(stable[1], 5.86) < 0.15);
	CHECK(s["predicted_cluster_count"] == 2);
	CHECK(s["basins"] == "basins.csv");
	CHECK(fs::exists(r.dir / "map_graph.csv"));
}

TEST_CASE("alternating map at tau2 = 0.6 tau has two stable points of G^2")
{
	const Result r = run("map_alt", with_fast({"map", "--freq", "150", "--n", "2", "--alt", "--tau2-frac", "0.6"}));
	REQUIRE(r.code == 0);
	CHECK(summary(r)["stable_count"] == 2);
	std::ifstream graph(r.dir / "map_graph.csv");
	std::string header;
	std::getline(graph, header);
	CHECK(header == "theta,base,iterate,h1,h2");
}

TEST_CASE("invalid input exits with 2, numerical failure with 3")
{
	CHECK(run("bad_key", {"map", "--set", "bogus=1"}).code == 2);
	CHECK(run("bad_number", {"map", "--freq", "fast"}).code == 2);
	CHECK(run("bad_model", {"prc", "--model", "fitzhugh"}).code == 2);
	CHECK(run("bad_flag", {"map", "--no-such-flag"}).code == 2);
	CHECK(run("no_command", {}, false).code == 2);
	CHECK(run("bad_freq", with_fast({"map", "--freq", "900"})).code == 2);

	const Result quiet = run("quiescent", {"prc", "--set", "hh.I_b=0"});
	CHECK(quiet.code == 3);
	CHECK(quiet.err.find("orbit") != std::string::npos);

	CHECK(run("help", {"--help"}, false).code == 0);
}

TEST_CASE("bifurcate brackets the saddle-node between 0.5 and 0.6")
{
	const Result r = run("bif", with_fast({"bifurcate", "--freq", "150", "--n", "2", "--tau2-min", "0.5",
	                                        "--tau2-max", "0.6", "--tau2-step", "0.01"}));
	REQUIRE(r.code == 0);
	const Json s = summary(r);
	REQUIRE(s["events"].size() == 1);
	const Json& e = s["events"][0];
	CHECK(e["lo_fraction"].get<double>() > 0.5);
	CHECK(e["hi_fraction"].get<double>() < 0.6);
	CHECK(e["count_lo"] == 4);
	CHECK(e["count_hi"] == 2);
	CHECK(e["stable"]["multiplier"].get<double>() < 1.0);
	CHECK(e["unstable"]["multiplier"].get<double>() > 1.0);
	CHECK(fs::exists(r.dir / "tau2_scan.csv"));

	const Result none = run("bif_none", with_fast({"bifurcate", "--freq", "150", "--n", "2", "--tau2-min", "0.4",
	                                               "--tau2-max", "0.45", "--tau2-step", "0.01"}));
	REQUIRE(none.code == 0);
	CHECK(summary(none)["events"].empty());
}

TEST_CASE("sweep agrees with the map prediction")
{
	const Result r = run("sweep", with_fast({"sweep", "--freq-min", "100", "--freq-max", "300", "--freq-step", "10",
	                                          "--jobs", "2"}));
	REQUIRE(r.code == 0);
	const Json s = summary(r);
	CHECK(s["frequencies"].size() == 21);
	CHECK(s["failures"] == 0);
	CHECK(s["clustering_frequencies"].get<int>() > 10);
	CHECK(s["agreement_fraction"].get<double>() >= 0.9);
	CHECK(s["frequencies"]["150"]["simulated"] == 2);
	CHECK(fs::exists(r.dir / "sweep.csv"));
	CHECK(fs::exists(r.dir / "clusters.csv"));
}

TEST_CASE("finite-pulse simulation lines up with map iteration")
{
	const Result r = run("simulate", with_fast({"simulate", "--freq", "150", "--count", "100", "--periods", "20"}));
	REQUIRE(r.code == 0);
	const Json s = summary(r);
	CHECK(s["map_agreement_fraction"].get<double>() >= 0.99);
	CHECK(s["simulated_count"] == 2);
	CHECK(s["predicted_count"] == 2);
	CHECK(fs::exists(r.dir / "timeseries.csv"));
	CHECK(fs::exists(r.dir / "final.csv"));
}
