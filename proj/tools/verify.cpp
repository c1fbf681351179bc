#include "verify.hpp"

#include "hoferlab/corpus.hpp"
#include "hoferlab/errors.hpp"
#include "hoferlab/experiments.hpp"
#include "hoferlab/flow.hpp"
#include "hoferlab/lengths.hpp"
#include "hoferlab/snowflake.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace hoferlab::cli {

namespace {

using nlohmann::json;

/// Every check draws from its own stream so adding checks does not shift others.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt)
{
	std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(salt)};
	return std::mt19937_64(seq);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Context
{
	bool all = false;
	std::uint64_t seed = 0;
	int corpus() const { return all ? 50 : 10; }
};

using CheckFn = std::function<CheckResult(const Context&)>;

CheckResult expr_roundtrip(const Context& c)
{
	auto rng = stream(c.seed, 1);
	int count = 0, mismatches = 0;
	for (int n = 0; n < c.corpus(); ++n)
	{
		const auto p = corpus::random_path(rng);
		for (const Piece& piece : p.path.pieces())
		{
			const std::string once = expr::print(piece.hamiltonian);
			const std::string twice = expr::print(expr::parse(once));
			mismatches += once != twice;
			++count;
		}
	}
	return {"expr.print_parse_roundtrip", mismatches == 0, {{"expressions", count}, {"mismatches", mismatches}}};
}

CheckResult lengths_algebra(const Context& c)
{
	auto rng = stream(c.seed, 2);
	const Grid grid = corpus::corpus_grid();
	const auto gp = std::make_shared<const Grid>(grid);
	double rev = 0, cat = 0, rep = 0, oracle = 0;
	bool monotone = true;
	for (int n = 0; n < c.corpus(); ++n)
	{
		const auto f = corpus::random_path(rng);
		const auto g = corpus::random_path(rng);
		const TimeMap s = corpus::random_time_map(rng);
		const HamiltonianPath fr = reverse(f.path);
		const HamiltonianPath fg = concatenate(f.path, g.path);
		std::vector<double> osc;
		for (const auto& h : f.profiles)
			osc.push_back(oscillation(sample(h, gp, 0.0)));
		double previous = 0;
		for (int k = 0; k <= 3; ++k)
		{
			const LengthReport lf = length_k(f.path, k, grid);
			const LengthReport lg = length_k(g.path, k, grid);
			rev = std::max(rev, rel(length_k(fr, k, grid).total, lf.total));
			double expected = 0;
			for (int i = 0; i <= k; ++i)
				expected += std::ldexp(lf.per_order[i] + lg.per_order[i], i);
			cat = std::max(cat, rel(length_k(fg, k, grid).total, expected));
			double analytic = 0;
			for (std::size_t l = 0; l < f.factors.size(); ++l)
				for (int i = 0; i <= k; ++i)
					analytic += osc[l] * f.factors[l].abs_integral(i, f.path.pieces()[l].t_start, f.path.pieces()[l].t_end);
			oracle = std::max(oracle, rel(lf.total, analytic));
			monotone = monotone && lf.total >= previous;
			previous = lf.total;
		}
		rep = std::max(rep, rel(length_k(reparametrize(f.path, s), 0, grid).total, length_k(f.path, 0, grid).total));
	}
	const bool pass = rev <= 1e-9 && cat <= 1e-9 && rep <= 1e-8 && oracle <= 1e-9 && monotone;
	return {"lengths.path_algebra",
	        pass,
	        {{"paths", c.corpus()},
	         {"reverse_rel_error", rev},
	         {"concatenation_rel_error", cat},
	         {"reparametrization_rel_error", rep},
	         {"analytic_rel_error", oracle},
	         {"monotone_in_k", monotone}}};
}

CheckResult coarse_dominates(const Context& c)
{
	auto rng = stream(c.seed, 3);
	const Grid grid = corpus::corpus_grid(25);
	const int n = c.all ? 20 : 5;
	double worst = 1e300;
	for (int j = 0; j < n; ++j)
	{
		const auto f = corpus::random_path(rng);
		for (int k = 0; k <= 2; ++k)
		{
			const double lk = length_k(f.path, k, grid).total;
			const double ck = coarse_length_k(f.path, k, grid).total;
			worst = std::min(worst, (ck - lk) / lk);
		}
	}
	return {"lengths.coarse_dominates_integral", worst >= -1e-12, {{"paths", n}, {"min_rel_gap", worst}}};
}

CheckResult flow_shift(const Context&)
{
	const auto f = HamiltonianPath::single(expr::parse("2*x1"), 1);
	const std::vector<double> lo{-2, -2}, hi{2, 2};
	const TracerCloud cloud = TracerCloud::lattice(lo, hi, 9);
	const FlowMap m = integrate(f, cloud, 16);
	double err = 0;
	for (std::size_t i = 0; i < cloud.size(); ++i)
	{
		err = std::max(err, std::abs(m.final.point(i)[0] - cloud.point(i)[0]));
		err = std::max(err, std::abs(m.final.point(i)[1] - cloud.point(i)[1] - 2.0));
	}
	return {"flow.shift", err <= 1e-10, {{"max_error", err}}};
}

double rotation_error(int steps)
{
	const auto f = HamiltonianPath::single(expr::parse("(x1^2 + y1^2)/2"), 1);
	const TracerCloud cloud = TracerCloud::circle(0.3, -0.2, 1.0, 16);
	FlowOptions o;
	o.error_estimate = false;
	const FlowMap m = integrate(f, cloud, steps, o);
	double err = 0;
	for (std::size_t i = 0; i < cloud.size(); ++i)
	{
		const double x = cloud.point(i)[0], y = cloud.point(i)[1];
		err = std::max(err, std::hypot(m.final.point(i)[0] - (x * std::cos(1.0) - y * std::sin(1.0)),
		                               m.final.point(i)[1] - (x * std::sin(1.0) + y * std::cos(1.0))));
	}
	return err;
}

CheckResult flow_rotation(const Context&)
{
	const double e256 = rotation_error(256);
	const double e16 = rotation_error(16), e32 = rotation_error(32);
	const double order = std::log2(e16 / e32);
	return {"flow.rotation",
	        e256 <= 1e-8 && order >= 3.7,
	        {{"error_256", e256}, {"error_16", e16}, {"error_32", e32}, {"observed_order", order}}};
}

CheckResult flow_area(const Context&)
{
	const auto f = HamiltonianPath::single(expr::parse("sin(x1) * cos(y1) * (1 + t)"), 1);
	const TracerCloud loop = TracerCloud::circle(0.2, 0.1, 0.8, 2000);
	const FlowMap m = integrate_area_guarded(f, loop, 64, 1e-5);
	const double drift = std::abs(loop_area(m.final) - loop_area(loop));
	return {"flow.area_conservation", drift < 1e-5, {{"area", loop_area(loop)}, {"drift", drift}, {"steps", m.stats.steps}}};
}

CheckResult snowflake_groups(const Context& c)
{
	auto rng = stream(c.seed, 4);
	const std::vector<std::string> names =
	    c.all ? std::vector<std::string>{"Z4", "Z5", "Z6", "S3", "D4"} : std::vector<std::string>{"Z4", "S3"};
	const int per_group = c.all ? 20 : 3;
	double brute = 0;
	int failures = 0, runs = 0;
	json failed = json::array();
	for (const auto& name : names)
	{
		const auto base = snowflake::WeightedGroup::named(name);
		const int maxN = base.order() - 1;
		for (int w = 0; w < per_group; ++w)
		{
			const bool class_fn = w % 2 == 0;
			const auto g = base.with_weights(snowflake::random_weights(base, rng, class_fn));
			const auto r = snowflake::sharp(g);
			const auto b = snowflake::brute_force_sharp(g, maxN);
			double diff = 0;
			for (int a = 0; a < g.order(); ++a)
				diff = std::max(diff, std::abs(b[a] - r.sharp[a]));
			brute = std::max(brute, diff);
			const double low = std::pow(2 * r.C, -2.0);
			const bool ok = diff <= 1e-12 && snowflake::sandwich_holds(g, r, low) &&
			                snowflake::beta_subadditive(g, r.sharp, r.alpha) &&
			                snowflake::beta_subadditive(g, r.sharp, r.alpha / 2) &&
			                snowflake::zero_sets_match(g, r.sharp) &&
			                (!class_fn || snowflake::is_class_function(g, r.sharp)) &&
			                (!snowflake::is_symmetric(g, g.weights()) || snowflake::is_symmetric(g, r.sharp));
			++runs;
			if (!ok)
			{
				++failures;
				failed.push_back({{"group", name}, {"index", w}});
			}
		}
	}
	return {"snowflake.transform",
	        failures == 0,
	        {{"weights", runs}, {"max_brute_force_difference", brute}, {"failures", failed}}};
}

CheckResult snowflake_dk(const Context& c)
{
	auto rng = stream(c.seed, 5);
	const std::vector<std::string> names =
	    c.all ? std::vector<std::string>{"Z4", "Z5", "Z6", "S3", "D4"} : std::vector<std::string>{"Z5", "S3"};
	int runs = 0, failures = 0;
	for (const auto& name : names)
		for (int k = 0; k <= 2; ++k)
		{
			const auto base = snowflake::WeightedGroup::named(name);
			const auto g0 = base.with_weights(snowflake::random_weights(base, rng, false));
			// a subadditive weight raised to the power k+1 is 2^k-quasi-subadditive
			auto w = snowflake::sharp_with_alpha(g0, 1.0).sharp;
			for (double& v : w)
				v = std::pow(v, k + 1);
			const auto r = snowflake::build_dk_style_weight(k, base.with_weights(w));
			++runs;
			failures += !r.sandwich || (r.agreement && !*r.agreement);
		}
	return {"snowflake.dk_sandwich", failures == 0, {{"runs", runs}, {"failures", failures}}};
}

CheckResult constants_k0(const Context&)
{
	const auto l = experiments::constants(0);
	const bool ok = l.at("hofer_C").value == "3840" && l.at("sikorav_C").value == "240" &&
	                l.at("bi_bound").value == "4" && l.at("hofer_C").note.find("128") != std::string::npos &&
	                l.entries.size() == 11;
	return {"constants.k0",
	        ok,
	        {{"hofer_C", l.at("hofer_C").value}, {"sikorav_C", l.at("sikorav_C").value}, {"bi_bound", l.at("bi_bound").value}}};
}

CheckResult constants_scaling(const Context&)
{
	// ratios between consecutive k follow from the closed forms
	bool ok = true;
	for (int k = 0; k < 5; ++k)
	{
		const auto a = experiments::constants(k), b = experiments::constants(k + 1);
		ok = ok && std::stod(b.at("bi_bound").value) == 8 * std::stod(a.at("bi_bound").value);
		ok = ok && std::stod(b.at("quasi_triangle").value) == 2 * std::stod(a.at("quasi_triangle").value);
		ok = ok && std::stod(b.at("disjoint_product").value) == std::stod(a.at("disjoint_product").value) + 2;
	}
	return {"constants.scaling", ok, {{"k_max", 5}}};
}

CheckResult square(const Context& c)
{
	const std::vector<double> areas = c.all ? std::vector<double>{0.25, 1.0, 4.0} : std::vector<double>{1.0};
	json rows = json::array();
	bool ok = true;
	for (double a : areas)
	{
		const auto s = experiments::square_displacement(a, 5, c.all ? 24 : 12);
		ok = ok && s.certificate.displaced && s.length_ok;
		double worst = 0;
		for (double l : s.lengths)
			worst = std::max(worst, std::abs(l - a) / a);
		rows.push_back({{"area", a}, {"displaced", s.certificate.displaced}, {"max_rel_length_gap", worst}});
	}
	return {"experiments.square_displacement", ok, {{"runs", rows}}};
}

CheckResult shift(const Context&)
{
	const auto s = experiments::sikorav_shift(1.0, 0.1);
	const std::vector<double> lo{-2, -2}, hi{2, 2};
	const auto cert = experiments::shift_certificate(s, TracerCloud::lattice(lo, hi, 21));
	return {"experiments.shift", cert.ok, cert.to_json()};
}

CheckResult gm(const Context&)
{
	const std::vector<int> ms{4, 8, 16, 32, 64};
	struct Case
	{
		int k;
		double p;
		int i;
	};
	const std::vector<Case> cases{{1, 0.5, 1}, {2, 1.0 / 3, 2}, {0, 0.5, 0}};
	json rows = json::array();
	bool ok = true;
	for (const Case& cs : cases)
	{
		const auto r = experiments::gm_report(ms, cs.k, cs.p);
		const bool slope = r.slope_ok()[cs.i];
		bool decreasing = true;
		for (std::size_t j = 1; j < r.rows.size(); ++j)
			decreasing = decreasing && r.rows[j].length_kp < r.rows[j - 1].length_kp;
		const double ratio = r.rows.back().length_kp / r.rows.front().length_kp;
		ok = ok && slope && decreasing && ratio < 0.1;
		rows.push_back({{"k", cs.k},
		                {"p", cs.p},
		                {"i", cs.i},
		                {"slope", r.slopes[cs.i]},
		                {"expected", r.expected[cs.i]},
		                {"length_decreasing", decreasing},
		                {"length_ratio", ratio}});
	}
	return {"experiments.gm_rates", ok, {{"cases", rows}}};
}

CheckResult disjoint(const Context& c)
{
	auto rng = stream(c.seed, 6);
	const Grid grid = corpus::disjoint_grid();
	const int n = c.all ? 20 : 4;
	double worst = 0;
	bool ok = true;
	for (int j = 0; j < n; ++j)
	{
		const int m = 2 + j % 2;
		const int k = j % 3;
		const auto family = corpus::random_disjoint_family(rng, m);
		const auto r = experiments::disjoint_bound_check(family, k, grid);
		ok = ok && r.holds;
		worst = std::max(worst, r.lhs / r.rhs);
	}
	return {"experiments.disjoint_bound", ok, {{"configurations", n}, {"max_lhs_over_rhs", worst}}};
}

CheckResult hofer_like(const Context& c)
{
	auto rng = stream(c.seed, 7);
	const Grid grid = corpus::torus_grid();
	TorusPiece piece;
	piece.harmonic = {expr::constant(1), expr::constant(0)};
	piece.exact = expr::constant(0);
	const TorusSymplecticPath harmonic({piece}, {2 * M_PI, 2 * M_PI});
	double pure = 0;
	for (int k = 0; k <= 3; ++k)
		pure = std::max(pure, std::abs(hofer_like_length_k(harmonic, k, grid).total - 1));
	const int n = c.all ? 20 : 5;
	double rep = 0, flux_gap = 1e300;
	for (int j = 0; j < n; ++j)
	{
		const auto f = corpus::random_torus_path(rng, j % 2 == 0);
		const TimeMap s = corpus::random_time_map(rng);
		rep = std::max(rep, rel(hofer_like_length_k(reparametrize(f, s), 0, grid).total,
		                        hofer_like_length_k(f, 0, grid).total));
		double l1 = 0;
		for (double v : flux_harmonic(f))
			l1 += std::abs(v);
		flux_gap = std::min(flux_gap, harmonic_l1_length(f) - l1);
	}
	return {"lengths.hofer_like",
	        pure <= 1e-12 && rep <= 1e-8 && flux_gap >= -1e-12,
	        {{"pure_harmonic_error", pure}, {"reparametrization_rel_error", rep}, {"min_flux_gap", flux_gap}}};
}

CheckResult commutator(const Context&)
{
	const std::vector<double> flo{-0.8, -0.8}, fhi{0.8, 0.8}, glo{-3.5, -3.5}, ghi{3.5, 3.5};
	const SupportedPath f{
	    HamiltonianPath::single(expr::parse("(1 + t) * smoothstep(x1, 0.3, 0.8) * smoothstep(y1, 0.3, 0.8)"), 1), flo, fhi};
	const SupportedPath g{HamiltonianPath::single(expr::parse("-0.5 * y1 * smoothstep(x1, 2, 3) * smoothstep(y1, 2, 3)"), 1), glo,
	                      ghi};
	const Grid grid = Grid::box({-4, -4}, {4, 4}, {81, 81});
	const auto r = experiments::commutator_path(f, g, grid);
	return {"experiments.commutator",
	        r.bound_holds && r.flow_certified,
	        {{"construction", r.construction},
	         {"length", r.length.total},
	         {"bound", r.bound},
	         {"flow_defect", r.flow_defect}}};
}

CheckResult guarded(const std::string& name, const CheckFn& fn, const Context& c)
{
	try
	{
		return fn(c);
	}
	catch (const std::exception& e)
	{
		return {name, false, {{"error", e.what()}}};
	}
}

} // namespace

int SuiteReport::passed() const
{
	return int(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; }));
}

int SuiteReport::failed() const { return int(checks.size()) - passed(); }

nlohmann::json SuiteReport::summary() const
{
	json list = json::array();
	for (const auto& c : checks)
		list.push_back({{"name", c.name}, {"status", c.pass ? "pass" : "fail"}, {"details", c.details}});
	return {{"suite", suite}, {"seed", seed}, {"checks", list}, {"passed", passed()}, {"failed", failed()}};
}

SuiteReport run_verify(const std::string& suite, std::uint64_t seed)
{
	if (suite != "core" && suite != "all")
		throw PreconditionError("unknown suite '" + suite + "'");
	Context c{suite == "all", seed};
	std::vector<std::pair<std::string, CheckFn>> list{
	    {"expr.print_parse_roundtrip", expr_roundtrip},
	    {"lengths.path_algebra", lengths_algebra},
	    {"lengths.coarse_dominates_integral", coarse_dominates},
	    {"lengths.hofer_like", hofer_like},
	    {"flow.shift", flow_shift},
	    {"flow.rotation", flow_rotation},
	    {"snowflake.transform", snowflake_groups},
	    {"snowflake.dk_sandwich", snowflake_dk},
	    {"constants.k0", constants_k0},
	    {"constants.scaling", constants_scaling},
	    {"experiments.square_displacement", square},
	    {"experiments.shift", shift},
	    {"experiments.disjoint_bound", disjoint},
	};
	if (c.all)
	{
		list.emplace_back("flow.area_conservation", flow_area);
		list.emplace_back("experiments.gm_rates", gm);
		list.emplace_back("experiments.commutator", commutator);
	}
	SuiteReport r{suite, seed, {}};
	for (const auto& [name, fn] : list)
		r.checks.push_back(guarded(name, fn, c));
	return r;
}

} // namespace hoferlab::cli
