#include "commands.hpp"

#include "schema.hpp"
#include "verify.hpp"

#include "hoferlab/errors.hpp"
#include "hoferlab/experiments.hpp"
#include "hoferlab/flow.hpp"
#include "hoferlab/lengths.hpp"
#include "hoferlab/snowflake.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hoferlab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Outcome
{
	std::vector<CheckResult> checks;
	void add(std::string name, bool pass, json details = json::object())
	{
		checks.push_back({std::move(name), pass, std::move(details)});
	}
};

std::string read_text(const std::string& file)
{
	std::ifstream is(file, std::ios::binary);
	if (!is)
		throw IOFailure("cannot open " + file);
	std::ostringstream ss;
	ss << is.rdbuf();
	return ss.str();
}

json read_json(const std::string& file)
{
	try
	{
		return json::parse(read_text(file));
	}
	catch (const json::parse_error& e)
	{
		throw FormatError(file + ": " + e.what());
	}
}

/// Output directory from the config, created on demand; empty if none.
std::string out_dir(const json& cfg)
{
	if (!cfg.contains("out"))
		return {};
	const std::string dir = cfg["out"].get<std::string>();
	std::error_code ec;
	fs::create_directories(dir, ec);
	if (ec)
		throw IOFailure("cannot create " + dir + ": " + ec.message());
	return dir;
}

void write_text(const std::string& dir, const std::string& name, const std::string& text)
{
	const fs::path p = fs::path(dir) / name;
	std::ofstream os(p, std::ios::binary);
	if (!os || !(os << text) || !os.flush())
		throw IOFailure("cannot write " + p.string());
}

template <class F>
std::string capture(F&& f)
{
	std::ostringstream ss;
	f(ss);
	return ss.str();
}

Grid grid_for(const json& cfg, const std::optional<Grid>& fallback)
{
	if (cfg.contains("grid"))
		return Grid::from_json(read_json(cfg["grid"].get<std::string>()));
	if (fallback)
		return *fallback;
	throw ConfigInvalid("/grid", "required when the path has no domain");
}

SupportedPath supported_from_json(const json& j)
{
	try
	{
		return {HamiltonianPath::from_json(j.at("path")), j.at("lower").get<std::vector<double>>(),
		        j.at("upper").get<std::vector<double>>()};
	}
	catch (const json::exception& e)
	{
		throw FormatError(std::string("bad supported path: ") + e.what());
	}
}

void report_checks(const LengthReport& r, Outcome& o)
{
	double sum = 0;
	bool nonnegative = true;
	for (double v : r.per_order)
	{
		sum += v;
		nonnegative = nonnegative && v >= 0;
	}
	o.add("per_order_nonnegative", nonnegative);
	o.add("total_is_sum", std::abs(sum - r.total) <= 1e-12 * std::max(1.0, std::abs(r.total)),
	      {{"total", r.total}, {"sum", sum}});
}

Outcome cmd_length(const json& cfg, std::ostream& out)
{
	const std::string kind = cfg["kind"];
	const int k = cfg["k"];
	const double p = cfg["p"];
	const int ts = cfg["time_samples"];
	const json input = read_json(cfg["path"].get<std::string>());
	LengthReport r;
	if (kind == "hl")
	{
		if (cfg["two_resolution"].get<bool>())
			throw ConfigInvalid("/two_resolution", "not available for kind hl");
		const auto f = TorusSymplecticPath::from_json(input);
		std::optional<Grid> fallback;
		std::vector<int> res(f.periods().size(), 32);
		fallback = Grid::torus(f.periods(), res);
		r = hofer_like_length_k(f, k, grid_for(cfg, fallback), ts);
	}
	else
	{
		const auto f = HamiltonianPath::from_json(input);
		const Grid grid = grid_for(cfg, f.domain());
		if (cfg["two_resolution"].get<bool>())
			r = with_two_resolution_bound(f, kind, k, p, grid, ts);
		else if (kind == "k")
			r = length_k(f, k, grid, ts);
		else if (kind == "coarse")
			r = coarse_length_k(f, k, grid, ts);
		else
			r = length_kp(f, k, p, grid, ts);
	}
	out << r.to_json().dump(2) << "\n";
	Outcome o;
	report_checks(r, o);
	if (const auto dir = out_dir(cfg); !dir.empty())
	{
		write_text(dir, "report.json", r.to_json().dump(2) + "\n");
		write_text(dir, "report.csv", capture([&](std::ostream& os) { r.write_csv(os); }));
	}
	return o;
}

Outcome cmd_flow(const json& cfg, std::ostream& out)
{
	const auto f = HamiltonianPath::from_json(read_json(cfg["path"].get<std::string>()));
	std::istringstream csv(read_text(cfg["cloud"].get<std::string>()));
	const TracerCloud cloud = TracerCloud::read_csv(csv);
	if (cloud.dimension() != f.dimension())
		throw ConfigInvalid("/cloud", "cloud dimension differs from the path dimension");
	Outcome o;
	FlowMap m = [&] {
		if (cfg["area_guard"].get<bool>())
			return integrate_area_guarded(f, cloud, cfg["steps"], cfg["area_tolerance"]);
		FlowOptions fo;
		fo.safety_box = cfg["safety_box"];
		return integrate(f, cloud, cfg["steps"], fo);
	}();
	json stats = m.stats_json();
	if (cfg["area_guard"].get<bool>())
	{
		const double drift = std::abs(loop_area(m.final) - loop_area(cloud));
		stats["area_drift"] = drift;
		o.add("area_conserved", drift < cfg["area_tolerance"].get<double>(), {{"drift", drift}});
	}
	bool finite = true;
	for (double v : m.final.coords())
		finite = finite && std::isfinite(v);
	o.add("finite", finite);
	out << stats.dump(2) << "\n";
	if (const auto dir = out_dir(cfg); !dir.empty())
	{
		write_text(dir, "initial.csv", capture([&](std::ostream& os) { m.initial.write_csv(os); }));
		write_text(dir, "final.csv", capture([&](std::ostream& os) { m.final.write_csv(os); }));
		write_text(dir, "stats.json", stats.dump(2) + "\n");
	}
	return o;
}

Outcome cmd_gm(const json& cfg, std::ostream& out)
{
	const auto ms = cfg["m"].get<std::vector<int>>();
	experiments::ShellOptions so;
	so.angular_nodes = cfg["angular_nodes"];
	const bool closed = cfg["closed"];
	const auto r = experiments::gm_report(ms, cfg["k"], cfg["p"], closed, so, cfg["time_samples"]);
	Outcome o;
	const auto ok = r.slope_ok(cfg["slope_tolerance"]);
	const auto kinds = r.row_kind();
	for (int i = 0; i <= r.k; ++i)
		o.add(fmt::format("slope_order_{}", i), ok[i],
		      {{"kind", kinds[i]}, {"slope", r.slopes[i]}, {"expected", r.expected[i]}});
	bool decreasing = true;
	for (std::size_t j = 1; j < r.rows.size(); ++j)
		decreasing = decreasing && r.rows[j].length_kp < r.rows[j - 1].length_kp;
	if (r.p < 1 && r.k * r.p < 1)
		o.add("length_decreasing", decreasing);
	double outside = 0;
	for (int m : ms)
		outside = std::max(outside, experiments::gm_outside_ratio({m, closed}, 0.37));
	o.add("support_in_shell", outside < 1e-12, {{"max_outside_ratio", outside}});
	out << capture([&](std::ostream& os) { r.write_csv(os); });
	if (const auto dir = out_dir(cfg); !dir.empty())
	{
		write_text(dir, "gm.csv", capture([&](std::ostream& os) { r.write_csv(os); }));
		write_text(dir, "gm.dat", capture([&](std::ostream& os) { r.write_dat(os); }));
		write_text(dir, "gm.json", r.to_json().dump(2) + "\n");
	}
	return o;
}

Outcome cmd_displace(const json& cfg, std::ostream& out)
{
	Outcome o;
	try
	{
		const auto s = experiments::square_displacement(cfg["area"], cfg["k"], cfg["tracers"]);
		o.add("displaced", s.certificate.displaced, s.certificate.to_json());
		o.add("length_within_2_percent", s.length_ok, {{"lengths", s.lengths}});
		out << s.to_json().dump(2) << "\n";
		if (const auto dir = out_dir(cfg); !dir.empty())
		{
			write_text(dir, "certificate.json", s.to_json().dump(2) + "\n");
			write_text(dir, "path.json", s.path.to_json().dump(2) + "\n");
		}
	}
	catch (const CertificateFailed& e)
	{
		o.add("certificate", false, {{"error", e.what()}});
		out_dir(cfg);
	}
	return o;
}

Outcome cmd_shift(const json& cfg, std::ostream& out)
{
	const double v = cfg["v"], eps = cfg["eps"];
	const int pairs = cfg["pairs"];
	const auto s = experiments::sikorav_shift(v, eps, pairs);
	const TracerCloud cloud = [&] {
		if (cfg.contains("cloud"))
		{
			std::istringstream csv(read_text(cfg["cloud"].get<std::string>()));
			return TracerCloud::read_csv(csv);
		}
		const std::vector<double> lo(std::size_t(2 * pairs), -2.0), hi(std::size_t(2 * pairs), 2.0);
		return TracerCloud::lattice(lo, hi, cfg["per_axis"]);
	}();
	if (cloud.dimension() != 2 * pairs)
		throw ConfigInvalid("/cloud", "cloud dimension differs from 2 * pairs");
	const auto cert = experiments::shift_certificate(s, cloud, cfg["steps"]);
	Outcome o;
	o.add("fixed_region", cert.fixed_error < 1e-8, {{"max_error", cert.fixed_error}, {"tracers", cert.fixed}});
	o.add("shifted_region", cert.shifted_error < 1e-6, {{"max_error", cert.shifted_error}, {"tracers", cert.shifted}});
	json result = {{"v", v}, {"eps", eps}, {"pairs", pairs}, {"path", s.path.to_json()}, {"certificate", cert.to_json()}};
	if (pairs == 1)
	{
		// the conjugate of a bump in {x1 > 0} has the same length on a grid whose x1 spacing divides v
		const int cells = int(std::ceil(v / 0.05));
		const double h = v / cells;
		const int nx = int(std::ceil((3 + v) / h)) + 1;
		const Grid grid = Grid::box({-1, -1}, {-1 + (nx - 1) * h, 1}, {nx, 41});
		const auto g = HamiltonianPath::single(
		    expr::parse("(1 + t^2) * smoothstep(x1, 0.2, 0.4, 0.8) * smoothstep(y1, 0.2, 0.4) * (1 + y1/2)"), 1);
		const double lg = length_k(g, 1, grid).total;
		const double lc = length_k(s.conjugate(g, grid), 1, grid).total;
		o.add("conjugate_length", std::abs(lg - lc) <= 1e-9 * lg, {{"length", lg}, {"conjugate_length", lc}});
		result["conjugate_length"] = {{"length", lg}, {"conjugate", lc}};
	}
	out << cert.to_json().dump(2) << "\n";
	if (const auto dir = out_dir(cfg); !dir.empty())
	{
		write_text(dir, "certificate.json", result.dump(2) + "\n");
		const FlowMap m = integrate(s.path, cloud, cfg["steps"]);
		write_text(dir, "final.csv", capture([&](std::ostream& os) { m.final.write_csv(os); }));
	}
	return o;
}

Outcome cmd_commutator(const json& cfg, std::ostream& out)
{
	const auto f = supported_from_json(read_json(cfg["f"].get<std::string>()));
	const auto g = supported_from_json(read_json(cfg["g"].get<std::string>()));
	const Grid grid = Grid::from_json(read_json(cfg["grid"].get<std::string>()));
	experiments::CommutatorOptions co;
	co.k = cfg["k"];
	co.steps = cfg["steps"];
	co.time_samples = cfg["time_samples"];
	co.affine_tolerance = cfg["affine_tolerance"];
	co.flow_tolerance = cfg["flow_tolerance"];
	const auto r = experiments::commutator_path(f, g, grid, co);
	Outcome o;
	o.add("length_bound", r.bound_holds, {{"length", r.length.total}, {"bound", r.bound}});
	o.add("flow_certificate", r.flow_certified, {{"defect", r.flow_defect}});
	out << r.to_json().dump(2) << "\n";
	if (const auto dir = out_dir(cfg); !dir.empty())
		write_text(dir, "commutator.json", r.to_json().dump(2) + "\n");
	return o;
}

Outcome cmd_constants(const json& cfg, std::ostream& out)
{
	const auto l = experiments::constants(cfg["k"]);
	if (cfg["format"] == "json")
		out << l.to_json().dump(2) << "\n";
	else
		l.write_table(out);
	if (const auto dir = out_dir(cfg); !dir.empty())
	{
		write_text(dir, "constants.json", l.to_json().dump(2) + "\n");
		write_text(dir, "constants.txt", capture([&](std::ostream& os) { l.write_table(os); }));
	}
	return {};
}

Outcome cmd_disjoint(const json& cfg, std::ostream& out)
{
	const json input = read_json(cfg["paths"].get<std::string>());
	if (!input.is_array())
		throw FormatError("paths file must hold a JSON array");
	std::vector<SupportedPath> paths;
	for (const auto& j : input)
		paths.push_back(supported_from_json(j));
	const Grid grid = Grid::from_json(read_json(cfg["grid"].get<std::string>()));
	const auto r = experiments::disjoint_bound_check(paths, cfg["k"], grid, cfg["time_samples"]);
	Outcome o;
	o.add("coarse_bound", r.holds, {{"lhs", r.lhs}, {"rhs", r.rhs}});
	out << r.to_json().dump(2) << "\n";
	if (const auto dir = out_dir(cfg); !dir.empty())
		write_text(dir, "disjoint.json", r.to_json().dump(2) + "\n");
	return o;
}

Outcome cmd_snowflake(const json& cfg, std::ostream& out)
{
	const std::string group = cfg["group"];
	std::vector<double> weights;
	if (cfg.contains("weights"))
		weights = cfg["weights"].get<std::vector<double>>();
	snowflake::WeightedGroup g = [&] {
		if (fs::exists(group))
		{
			auto parsed = snowflake::WeightedGroup::from_json(read_json(group));
			return weights.empty() ? parsed : parsed.with_weights(weights);
		}
		if (weights.empty())
			throw ConfigInvalid("/weights", "required for a built-in group");
		return snowflake::WeightedGroup::named(group, weights);
	}();
	Outcome o;
	json result;
	const std::string mode = cfg["mode"];
	std::optional<snowflake::SharpResult> r;
	if (mode.rfind("dk:", 0) == 0)
	{
		const int k = std::stoi(mode.substr(3));
		const auto dk = snowflake::build_dk_style_weight(k, g);
		o.add("dk_sandwich", dk.sandwich);
		if (dk.agreement)
			o.add("dk_agreement", *dk.agreement);
		result = dk.to_json();
		r = dk.result;
	}
	else
	{
		r = snowflake::sharp(g);
		o.add("sandwich", snowflake::sandwich_holds(g, *r, std::pow(2 * r->C, -2.0)));
		o.add("beta_subadditive_alpha", snowflake::beta_subadditive(g, r->sharp, r->alpha));
		o.add("beta_subadditive_half_alpha", snowflake::beta_subadditive(g, r->sharp, r->alpha / 2));
		o.add("zero_sets_match", snowflake::zero_sets_match(g, r->sharp));
		if (snowflake::is_class_function(g, g.weights()))
			o.add("class_function_preserved", snowflake::is_class_function(g, r->sharp));
		if (snowflake::is_symmetric(g, g.weights()))
			o.add("symmetry_preserved", snowflake::is_symmetric(g, r->sharp));
		result = r->to_json();
	}
	if (cfg.contains("brute_force"))
	{
		const auto b = snowflake::brute_force_sharp(g, cfg["brute_force"], r->alpha);
		double diff = 0;
		for (int a = 0; a < g.order(); ++a)
			diff = std::max(diff, std::abs(b[a] - r->sharp[a]));
		o.add("brute_force_agrees", diff <= 1e-12, {{"max_difference", diff}});
		result["brute_force"] = b;
	}
	out << result.dump(2) << "\n";
	if (const auto dir = out_dir(cfg); !dir.empty())
		write_text(dir, "snowflake.json", result.dump(2) + "\n");
	return o;
}

json summary(const std::string& command, const Outcome& o)
{
	SuiteReport r{command, 0, o.checks};
	json j = r.summary();
	j.erase("suite");
	j.erase("seed");
	j["command"] = command;
	return j;
}

int dispatch(const std::string& command, const json& cfg, std::ostream& out)
{
	if (command == "verify")
	{
		const auto r = run_verify(cfg["suite"], cfg["seed"].get<std::uint64_t>());
		const std::string text = r.summary().dump(2) + "\n";
		if (const auto dir = out_dir(cfg); !dir.empty())
		{
			write_text(dir, "summary.json", text);
			for (const auto& c : r.checks)
				out << (c.pass ? "pass " : "FAIL ") << c.name << "\n";
		}
		else
			out << text;
		return r.failed() == 0 ? kExitPass : kExitCheckFailed;
	}
	Outcome o;
	if (command == "length")
		o = cmd_length(cfg, out);
	else if (command == "flow")
		o = cmd_flow(cfg, out);
	else if (command == "gm")
		o = cmd_gm(cfg, out);
	else if (command == "displace")
		o = cmd_displace(cfg, out);
	else if (command == "shift")
		o = cmd_shift(cfg, out);
	else if (command == "commutator")
		o = cmd_commutator(cfg, out);
	else if (command == "constants")
		o = cmd_constants(cfg, out);
	else if (command == "disjoint")
		o = cmd_disjoint(cfg, out);
	else if (command == "snowflake")
		o = cmd_snowflake(cfg, out);
	else
		throw ConfigInvalid("/", "unknown command '" + command + "'");
	if (const auto dir = out_dir(cfg); !dir.empty())
		write_text(dir, "summary.json", summary(command, o).dump(2) + "\n");
	bool pass = true;
	for (const auto& c : o.checks)
		pass = pass && c.pass;
	return pass ? kExitPass : kExitCheckFailed;
}

} // namespace

nlohmann::json merge_config(const nlohmann::json& options)
{
	json merged = json::object();
	if (options.contains("config"))
	{
		const std::string file = options["config"].get<std::string>();
		try
		{
			merged = json::parse(read_text(file));
		}
		catch (const json::parse_error& e)
		{
			throw ConfigInvalid("/config", file + ": " + e.what());
		}
		if (!merged.is_object())
			throw ConfigInvalid("/config", file + ": top level must be an object");
		merged.erase("config");
	}
	for (auto it = options.begin(); it != options.end(); ++it)
		if (it.key() != "config")
			merged[it.key()] = it.value();
	return merged;
}

int run(const std::string& command, const nlohmann::json& config, std::ostream& out, std::ostream& err)
{
	try
	{
		const json& schema = schema_for(command);
		validate(schema, config);
		return dispatch(command, with_defaults(schema, config), out);
	}
	catch (const ConfigInvalid& e)
	{
		err << "config invalid at " << e.pointer() << ": " << e.what() << "\n";
		return kExitConfigInvalid;
	}
	catch (const IOFailure& e)
	{
		err << "io error: " << e.what() << "\n";
		return kExitIO;
	}
	catch (const SyntaxError& e)
	{
		err << "input invalid: " << e.what() << "\n";
		return kExitConfigInvalid;
	}
	catch (const UnknownIdentifier& e)
	{
		err << "input invalid: " << e.what() << "\n";
		return kExitConfigInvalid;
	}
	catch (const FormatError& e)
	{
		err << "input invalid: " << e.what() << "\n";
		return kExitConfigInvalid;
	}
	catch (const PreconditionError& e)
	{
		err << "input invalid: " << e.what() << "\n";
		return kExitConfigInvalid;
	}
	catch (const GeometryError& e)
	{
		err << "input invalid: " << e.what() << "\n";
		return kExitConfigInvalid;
	}
	catch (const SupportOverlap& e)
	{
		err << "input invalid: " << e.what() << "\n";
		return kExitConfigInvalid;
	}
	catch (const ConjugationUnsupported& e)
	{
		err << "input invalid: " << e.what() << "\n";
		return kExitConfigInvalid;
	}
	catch (const InputNotQuasiSubadditive& e)
	{
		err << "input invalid: " << e.what() << "\n";
		return kExitConfigInvalid;
	}
	catch (const CloudMismatch& e)
	{
		err << "input invalid: " << e.what() << "\n";
		return kExitConfigInvalid;
	}
	catch (const std::exception& e)
	{
		err << "check failed: " << e.what() << "\n";
		return kExitCheckFailed;
	}
}

} // namespace hoferlab::cli
