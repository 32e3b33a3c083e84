#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>

#include "clustermap/angle.hpp"
#include "clustermap/circle_map.hpp"
#include "clustermap/error.hpp"
#include "clustermap/map_analysis.hpp"
#include "clustermap/orbit.hpp"
#include "clustermap/population.hpp"
#include "clustermap/prc.hpp"
#include "clustermap/response.hpp"
#include "clustermap/stimulus.hpp"

namespace clustermap::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt12(double v)
{
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.12g", v);
	return buf;
}

template <typename F>
auto stage(const char* name, F&& body)
{
	try {
		return body();
	} catch (const NumericalFailure& e) {
		throw StageFailure(name, e.what());
	}
}

fs::path out_dir(const RunConfig& cfg)
{
	fs::path dir = cfg.text("out");
	std::error_code ec;
	fs::create_directories(dir, ec);
	if (ec)
		throw InvalidInput("cannot create output directory '" + dir.string() + "': " + ec.message());
	return dir;
}

std::ofstream open_out(const fs::path& path)
{
	std::ofstream f(path);
	if (!f)
		throw InvalidInput("cannot write '" + path.string() + "'");
	return f;
}

void finish(const RunConfig& cfg, const Json& summary)
{
	const fs::path dir = out_dir(cfg);
	open_out(dir / "summary.json") << summary.dump(2) << '\n';
	auto f = open_out(dir / "run_config.txt");
	cfg.write(f);
}

unsigned jobs(const RunConfig& cfg)
{
	const int j = cfg.integer("jobs");
	if (j < 1)
		throw InvalidInput("jobs must be at least 1");
	return static_cast<unsigned>(j);
}

Pulse primary_pulse(const RunConfig& cfg)
{
	Pulse p{cfg.number("u_max"), cfg.number("width"), cfg.number("lambda")};
	p.validate();
	return p;
}

TrainFamily train_family(const RunConfig& cfg)
{
	if (!cfg.flag("alt"))
		return TrainFamily::identical(primary_pulse(cfg));
	Pulse p2{cfg.number("u2_max"), cfg.number("width2"), cfg.number("lambda2")};
	p2.validate();
	const double frac = cfg.number("tau2_frac");
	if (!(frac > 0.0 && frac < 1.0))
		throw InvalidInput("tau2_frac must lie strictly between 0 and 1");
	return TrainFamily::alternating(frac, primary_pulse(cfg), p2);
}

int periods(const RunConfig& cfg)
{
	if (cfg.text("periods") == "auto")
		return cfg.flag("alt") ? 80 : 40;
	const int p = cfg.integer("periods");
	if (p < 1)
		throw InvalidInput("periods must be at least 1");
	return p;
}

int graph_points(const RunConfig& cfg)
{
	const int g = cfg.integer("graph_points");
	if (g < 2)
		throw InvalidInput("graph_points must be at least 2");
	return g;
}

struct Reduced {
	PeriodicOrbit orbit;
	AdjointSolution adjoint;
	PhaseResponseCurve prc;
};

Reduced reduce(const RunConfig& cfg)
{
	const NeuronModel model = cfg.model();
	OrbitOptions oo;
	oo.samples = cfg.integer("prc_samples");
	if (oo.samples < 2048)
		throw InvalidInput("prc_samples must be at least 2048");
	AdjointOptions ao;
	ao.order = cfg.integer("prc_order");
	if (ao.order < 0)
		throw InvalidInput("prc_order must be non-negative");
	PeriodicOrbit orbit = stage("orbit", [&] { return find_periodic_orbit(model, oo); });
	AdjointSolution adj = stage("adjoint", [&] { return solve_adjoint(orbit, ao); });
	PhaseResponseCurve prc = stage("adjoint", [&] { return compute_prc_adjoint(orbit, ao); });
	return {std::move(orbit), std::move(adj), std::move(prc)};
}

ResponseOptions response_options(const RunConfig& cfg)
{
	ResponseOptions ro;
	ro.grid = cfg.integer("response_grid");
	ro.order = cfg.integer("response_order");
	ro.jobs = jobs(cfg);
	if (ro.order < 0)
		throw InvalidInput("response_order must be non-negative");
	return ro;
}

ResponseSet responses(const RunConfig& cfg, const PhaseResponseCurve& prc, const TrainFamily& family)
{
	const ResponseOptions ro = response_options(cfg);
	return stage("response", [&] { return make_response_set(prc, family, ro); });
}

Json fixed_point_json(const FixedPoint& p)
{
	return {{"theta", p.theta}, {"iterate_n", p.iterate_n}, {"multiplier", p.multiplier},
	        {"stability", to_string(p.stability)}};
}

Json orbit_json(const MapOrbit& o)
{
	return {{"period", o.period}, {"points", o.points}, {"multiplier", o.multiplier}, {"stable", o.stable}};
}

Json count_json(const std::optional<int>& c)
{
	return c ? Json(*c) : Json("none");
}

Json model_json(const RunConfig& cfg, const Reduced& r)
{
	return {{"model", std::string(r.orbit.model.name())},
	        {"omega", r.prc.omega},
	        {"period_ms", r.orbit.period},
	        {"prc_order", r.prc.order()},
	        {"adjoint_residual", r.adjoint.max_normalization_residual},
	        {"alternating", cfg.flag("alt")}};
}

std::vector<double> sweep_frequencies(const RunConfig& cfg)
{
	const double lo = cfg.number("freq_min");
	const double hi = cfg.number("freq_max");
	const double step = cfg.number("freq_step");
	if (!(step > 0.0) || !(hi >= lo))
		throw InvalidInput("sweep needs freq_step > 0 and freq_max >= freq_min");
	const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
	if (count > 100000)
		throw InvalidInput("sweep grid is too large");
	std::vector<double> freqs;
	for (long i = 0; i < count; ++i)
		freqs.push_back(lo + static_cast<double>(i) * step);
	for (double f : freqs)
		period_from_frequency(f);
	return freqs;
}

InitialDistribution distribution(const RunConfig& cfg)
{
	InitialDistribution init;
	init.kind = parse_distribution_kind(cfg.text("dist"));
	init.kappa = cfg.number("kappa");
	init.center = cfg.number("center");
	init.count = cfg.integer("count");
	init.validate();
	return init;
}

} // namespace

Json cmd_prc(const RunConfig& cfg, std::ostream& log)
{
	const Reduced r = reduce(cfg);
	const fs::path dir = out_dir(cfg);
	{
		auto f = open_out(dir / "prc.csv");
		write_prc_csv(f, r.prc);
	}
	const int g = graph_points(cfg);
	auto dense = open_out(dir / "prc_dense.csv");
	dense << "theta,Z\n";
	for (int j = 0; j < g; ++j) {
		const double th = two_pi * j / g;
		dense << fmt12(th) << ',' << fmt12(r.prc(th)) << '\n';
	}
	Json summary = model_json(cfg, r);
	summary["command"] = "prc";
	finish(cfg, summary);
	log << "omega=" << fmt12(r.prc.omega) << '\n';
	return summary;
}

Json cmd_response(const RunConfig& cfg, std::ostream& log)
{
	const Reduced r = reduce(cfg);
	const TrainFamily family = train_family(cfg);
	const ResponseSet set = responses(cfg, r.prc, family);
	const fs::path dir = out_dir(cfg);
	{
		auto f = open_out(dir / "response.csv");
		write_response_csv(f, *set.primary);
	}
	if (set.secondary) {
		auto f = open_out(dir / "response2.csv");
		write_response_csv(f, *set.secondary);
	}
	const int g = graph_points(cfg);
	auto dense = open_out(dir / "response_dense.csv");
	dense << (set.secondary ? "theta,f,f2\n" : "theta,f\n");
	double max_abs = 0.0;
	for (int j = 0; j < g; ++j) {
		const double th = two_pi * j / g;
		const double v = (*set.primary)(th);
		max_abs = std::max(max_abs, std::abs(v));
		dense << fmt12(th) << ',' << fmt12(v);
		if (set.secondary)
			dense << ',' << fmt12((*set.secondary)(th));
		dense << '\n';
	}
	Json summary = model_json(cfg, r);
	summary["command"] = "response";
	summary["response_order"] = set.primary->series.order();
	if (set.secondary)
		summary["response2_order"] = set.secondary->series.order();
	summary["max_abs_f"] = max_abs;
	finish(cfg, summary);
	log << "omega=" << fmt12(r.prc.omega) << " response order " << set.primary->series.order() << '\n';
	return summary;
}

Json cmd_map(const RunConfig& cfg, std::ostream& log)
{
	const Reduced r = reduce(cfg);
	const TrainFamily family = train_family(cfg);
	const ResponseSet set = responses(cfg, r.prc, family);
	const double freq = cfg.number("freq");
	const int n = cfg.integer("n");
	const int n_max = cfg.integer("n_max");
	const int grid = cfg.integer("fp_grid");

	const CircleMap base = one_cycle_map(set, family, freq);
	const CircleMap nth = iterate(base, n);
	const auto points = find_fixed_points(base, n, grid);
	const auto attractors = enumerate_attractors(base, n_max);
	const fs::path dir = out_dir(cfg);

	{
		std::optional<std::pair<CircleMap, CircleMap>> halves;
		if (family.secondary) {
			const double tau = period_from_frequency(freq);
			halves = make_half_maps(r.prc.omega, tau, family.tau2_fraction * tau, set.primary, set.secondary);
		}
		auto f = open_out(dir / "map_graph.csv");
		f << (halves ? "theta,base,iterate,h1,h2\n" : "theta,base,iterate\n");
		const int g = graph_points(cfg);
		for (int j = 0; j < g; ++j) {
			const double th = two_pi * j / g;
			f << fmt12(th) << ',' << fmt12(base(th)) << ',' << fmt12(nth(th));
			if (halves)
				f << ',' << fmt12(halves->first(th)) << ',' << fmt12(halves->second(th));
			f << '\n';
		}
	}
	{
		auto f = open_out(dir / "fixed_points.csv");
		write_fixed_points_csv(f, freq, points);
	}

	Json summary = model_json(cfg, r);
	summary["command"] = "map";
	summary["freq_hz"] = freq;
	summary["iterate_n"] = n;
	Json fps = Json::array();
	int stable = 0;
	for (const FixedPoint& p : points) {
		fps.push_back(fixed_point_json(p));
		stable += p.stable();
	}
	summary["fixed_points"] = fps;
	summary["stable_count"] = stable;
	Json orbits = Json::array();
	for (const MapOrbit& o : attractors)
		orbits.push_back(orbit_json(o));
	summary["attractors"] = orbits;
	summary["predicted_cluster_count"] = count_json(predicted_cluster_count(attractors));

	try {
		const BasinPartition basins = compute_basins(base, n);
		auto f = open_out(dir / "basins.csv");
		write_basins_csv(f, freq, basins);
		summary["basins"] = "basins.csv";
	} catch (const InvalidInput& e) {
		fs::remove(dir / "basins.csv");
		summary["basins"] = e.what();
	}
	finish(cfg, summary);
	log << "map " << fmt12(freq) << " Hz, iterate " << n << ": " << points.size() << " fixed points, " << stable
	    << " stable\n";
	return summary;
}

Json cmd_sweep(const RunConfig& cfg, std::ostream& log)
{
	const Reduced r = reduce(cfg);
	const TrainFamily family = train_family(cfg);
	const ResponseSet set = responses(cfg, r.prc, family);
	const InitialDistribution init = distribution(cfg);
	const std::vector<double> freqs = sweep_frequencies(cfg);

	SweepOptions so;
	so.periods = periods(cfg);
	so.dt = cfg.number("dt");
	so.epsilon = cfg.number("epsilon");
	so.engine = parse_sweep_engine(cfg.text("engine"));
	so.n_max = cfg.integer("n_max");
	so.jobs = jobs(cfg);
	const auto sweep = stage("population", [&] {
		return family.secondary ? alternating_sweep(set, family, init, freqs, so)
		                        : frequency_sweep(set, family, init, freqs, so);
	});

	const fs::path dir = out_dir(cfg);
	{
		auto f = open_out(dir / "sweep.csv");
		write_sweep_csv(f, sweep);
	}
	{
		auto f = open_out(dir / "clusters.csv");
		write_clusters_csv(f, sweep);
	}

	Json summary = model_json(cfg, r);
	summary["command"] = "sweep";
	summary["engine"] = to_string(so.engine);
	summary["distribution"] = to_string(init.kind);
	summary["periods"] = so.periods;
	summary["epsilon"] = so.epsilon;
	Json table = Json::object();
	int clustering = 0, agreeing = 0, failures = 0;
	for (const SweepPoint& pt : sweep) {
		Json row;
		row["simulated"] = count_json(pt.simulated_count);
		row["predicted"] = count_json(pt.predicted_count);
		row["agreement"] = pt.agreement();
		if (pt.error) {
			row["error"] = *pt.error;
			++failures;
		}
		if (pt.simulated_count || pt.predicted_count) {
			++clustering;
			agreeing += pt.agreement();
		}
		table[fmt12(pt.freq_hz)] = row;
	}
	summary["frequencies"] = table;
	summary["clustering_frequencies"] = clustering;
	summary["agreement_fraction"] = clustering ? static_cast<double>(agreeing) / clustering : 1.0;
	summary["failures"] = failures;
	finish(cfg, summary);
	log << "sweep " << freqs.size() << " frequencies, agreement " << agreeing << "/" << clustering << '\n';
	return summary;
}

Json cmd_bifurcate(const RunConfig& cfg, std::ostream& log)
{
	RunConfig alt = cfg;
	alt.set("alt", "true");
	const Reduced r = reduce(alt);
	const TrainFamily family = train_family(alt);
	const ResponseSet set = responses(alt, r.prc, family);
	const double freq = cfg.number("freq");
	const double tau = period_from_frequency(freq);
	const int n = cfg.integer("n");
	Tau2ScanOptions so;
	so.step = cfg.number("tau2_step");
	so.grid = cfg.integer("fp_grid");
	so.jobs = jobs(cfg);
	const Tau2Scan scan = scan_tau2_bifurcation(r.prc.omega, tau, set.primary, set.secondary, n,
	                                            cfg.number("tau2_min"), cfg.number("tau2_max"), so);

	const fs::path dir = out_dir(cfg);
	{
		auto f = open_out(dir / "tau2_scan.csv");
		write_tau2_samples_csv(f, scan);
	}
	{
		auto f = open_out(dir / "tau2_events.csv");
		write_tau2_events_csv(f, scan);
	}

	Json summary = model_json(alt, r);
	summary["command"] = "bifurcate";
	summary["freq_hz"] = freq;
	summary["iterate_n"] = n;
	Json events = Json::array();
	for (const Tau2Event& e : scan.events) {
		Json ev = {{"lo_fraction", e.lo_fraction},
		           {"hi_fraction", e.hi_fraction},
		           {"tau2_ms", e.fraction() * tau},
		           {"count_lo", e.count_lo},
		           {"count_hi", e.count_hi}};
		if (e.stable)
			ev["stable"] = fixed_point_json(*e.stable);
		if (e.unstable)
			ev["unstable"] = fixed_point_json(*e.unstable);
		events.push_back(ev);
	}
	summary["events"] = events;
	finish(alt, summary);
	log << "bifurcate " << fmt12(freq) << " Hz: " << scan.events.size() << " count change(s)\n";
	return summary;
}

Json cmd_simulate(const RunConfig& cfg, std::ostream& log)
{
	const Reduced r = reduce(cfg);
	const TrainFamily family = train_family(cfg);
	const double freq = cfg.number("freq");
	const PulseTrain train = family.at(freq);
	const InitialDistribution init = distribution(cfg);
	const int p = periods(cfg);
	const double eps = cfg.number("epsilon");
	const int stride = cfg.integer("record_stride");
	const std::vector<double> initial = init.phases();

	const PopulationTrace trace = stage("population", [&] {
		return simulate_population(r.prc, train, initial, p, cfg.number("dt"), stride, jobs(cfg));
	});
	const ClusterReport report = detect_clusters(trace.final_phases, eps);

	const ResponseSet set = responses(cfg, r.prc, family);
	const CircleMap map = one_cycle_map(set, family, freq);
	const PopulationTrace by_map = simulate_population_by_map(map, initial, p);
	int close = 0;
	for (std::size_t i = 0; i < initial.size(); ++i)
		close += circular_distance(trace.final_phases[i], by_map.final_phases[i]) < 0.02;
	const auto predicted = predicted_cluster_count(enumerate_attractors(map, cfg.integer("n_max")));

	const fs::path dir = out_dir(cfg);
	{
		auto f = open_out(dir / "timeseries.csv");
		write_timeseries_csv(f, trace);
	}
	{
		SweepPoint pt;
		pt.freq_hz = freq;
		pt.initial = initial;
		pt.final_phases = trace.final_phases;
		pt.clusters = report;
		const std::vector<SweepPoint> one{pt};
		auto f = open_out(dir / "final.csv");
		write_sweep_csv(f, one);
		auto c = open_out(dir / "clusters.csv");
		write_clusters_csv(c, one);
	}

	Json summary = model_json(cfg, r);
	summary["command"] = "simulate";
	summary["freq_hz"] = freq;
	summary["periods"] = p;
	summary["distribution"] = to_string(init.kind);
	summary["epsilon"] = eps;
	summary["simulated_count"] = count_json(cluster_count(report));
	summary["predicted_count"] = count_json(predicted);
	summary["map_agreement_fraction"] = initial.empty() ? 1.0 : static_cast<double>(close) / initial.size();
	Json sizes = Json::array();
	for (const Cluster& c : report.clusters)
		sizes.push_back({{"representative", c.representative}, {"size", c.size()}});
	summary["clusters"] = sizes;
	finish(cfg, summary);
	log << "simulate " << fmt12(freq) << " Hz: " << report.clusters.size() << " cluster(s)\n";
	return summary;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
	CLI::App app{"Cluster formation in pulse-stimulated neural oscillator populations"};
	app.require_subcommand(1);

	struct Sub {
		CLI::App* app;
		Json (*command)(const RunConfig&, std::ostream&);
		std::vector<std::pair<std::string, CLI::Option*>> options;
	};
	std::string config_path;
	std::vector<std::string> sets;
	std::map<std::string, std::string> values;
	std::map<std::string, bool> flags;
	std::vector<Sub> subs;
	const std::pair<const char*, const char*> names[] = {
		{"prc", "natural frequency and adjoint phase response curve"},
		{"response", "per-pulse response functions f and f2"},
		{"map", "one-cycle map, fixed points of its iterate, basins"},
		{"sweep", "cluster counts across a frequency range"},
		{"bifurcate", "stable fixed-point count of G^(n) across tau2"},
		{"simulate", "finite-pulse population simulation at one frequency"},
	};
	Json (*commands[])(const RunConfig&, std::ostream&) = {cmd_prc, cmd_response, cmd_map,
	                                                        cmd_sweep, cmd_bifurcate, cmd_simulate};
	for (std::size_t i = 0; i < std::size(names); ++i) {
		Sub sub{app.add_subcommand(names[i].first, names[i].second), commands[i], {}};
		sub.app->add_option("--config", config_path, "key = value config file; flags override it");
		sub.app->add_option("--set", sets, "KEY=VALUE override, e.g. hh.I_b=9");
		for (const ConfigKey& k : RunConfig::keys()) {
			std::string flag = "--" + k.name;
			std::replace(flag.begin(), flag.end(), '_', '-');
			CLI::Option* opt = k.is_flag ? sub.app->add_flag(flag, flags[k.name], k.help)
			                             : sub.app->add_option(flag, values[k.name], k.help + " [" + k.fallback + "]");
			sub.options.emplace_back(k.name, opt);
		}
		subs.push_back(std::move(sub));
	}

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e, out, err);
		return code == 0 ? 0 : 2;
	}

	try {
		for (const Sub& sub : subs) {
			if (!sub.app->parsed())
				continue;
			RunConfig cfg;
			if (!config_path.empty())
				cfg.load_file(config_path);
			for (const std::string& kv : sets) {
				const auto eq = kv.find('=');
				if (eq == std::string::npos)
					throw InvalidInput("--set expects KEY=VALUE, got '" + kv + "'");
				cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
			}
			for (const auto& [key, opt] : sub.options) {
				if (opt->count() == 0)
					continue;
				if (flags.count(key))
					cfg.set(key, flags[key] ? "true" : "false");
				else
					cfg.set(key, values[key]);
			}
			sub.command(cfg, out);
		}
	} catch (const InvalidInput& e) {
		err << "invalid configuration: " << e.what() << '\n';
		return 2;
	} catch (const StageFailure& e) {
		err << "numerical failure in stage '" << e.stage() << "': " << e.what() << '\n';
		return 3;
	} catch (const NumericalFailure& e) {
		err << "numerical failure: " << e.what() << '\n';
		return 3;
	}
	return 0;
}

} // namespace clustermap::cli
