// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when all pass.
// Usage: acceptance <hoferlab executable> <golden constants.json>

#include "hoferlab/corpus.hpp"
#include "hoferlab/experiments.hpp"
#include "hoferlab/flow.hpp"
#include "hoferlab/lengths.hpp"
#include "hoferlab/snowflake.hpp"

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

using namespace hoferlab;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
	bool pass = false;
	std::string detail;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

HamiltonianPath path(const char* h) { return HamiltonianPath::single(expr::parse(h), 1); }

Outcome path_algebra(bool& monotone)
{
	std::mt19937_64 rng(20240601);
	const Grid grid = corpus::corpus_grid();
	double rev = 0, cat = 0, rep = 0;
	monotone = true;
	for (int n = 0; n < 50; ++n)
	{
		const auto f = corpus::random_path(rng);
		const auto g = corpus::random_path(rng);
		const TimeMap s = corpus::random_time_map(rng);
		double previous = -1;
		for (int k = 0; k <= 3; ++k)
		{
			const LengthReport lf = length_k(f.path, k, grid), lg = length_k(g.path, k, grid);
			monotone = monotone && lf.total >= previous;
			previous = lf.total;
			rev = std::max(rev, rel(length_k(reverse(f.path), k, grid).total, lf.total));
			double expected = 0;
			for (int i = 0; i <= k; ++i)
				expected += std::ldexp(lf.per_order[i] + lg.per_order[i], i);
			const double lc = length_k(concatenate(f.path, g.path), k, grid).total;
			cat = std::max(cat, rel(lc, expected));
		}
		const double l0 = length_k(f.path, 0, grid).total;
		rep = std::max(rep, rel(length_k(reparametrize(f.path, s), 0, grid).total, l0));
	}
	return {rev <= 1e-9 && cat <= 1e-9 && rep <= 1e-8,
	        fmt::format("50 paths, reverse {:.1e}, concat {:.1e}, reparam {:.1e}", rev, cat, rep)};
}

Outcome snowflake_transform()
{
	std::mt19937_64 rng(777);
	int failures = 0, runs = 0;
	double brute = 0;
	for (const char* name : {"Z4", "Z5", "Z6", "S3", "D4"})
	{
		const auto base = snowflake::WeightedGroup::named(name);
		for (int w = 0; w < 20; ++w)
		{
			const bool class_fn = w % 2 == 0;
			const auto g = base.with_weights(snowflake::random_weights(base, rng, class_fn));
			const auto r = snowflake::sharp(g);
			const auto b = snowflake::brute_force_sharp(g, base.order() - 1);
			double diff = 0;
			for (int a = 0; a < g.order(); ++a)
				diff = std::max(diff, std::abs(b[a] - r.sharp[a]));
			brute = std::max(brute, diff);
			const bool ok = diff <= 1e-12 && snowflake::sandwich_holds(g, r, std::pow(2 * r.C, -2.0)) &&
			                snowflake::beta_subadditive(g, r.sharp, r.alpha) &&
			                snowflake::beta_subadditive(g, r.sharp, r.alpha / 2) &&
			                snowflake::zero_sets_match(g, r.sharp) &&
			                (!class_fn || snowflake::is_class_function(g, r.sharp));
			failures += !ok;
			++runs;
		}
		for (int k = 0; k <= 2; ++k)
		{
			auto v = snowflake::sharp_with_alpha(base.with_weights(snowflake::random_weights(base, rng, true)), 1.0).sharp;
			for (double& x : v)
				x = std::pow(x, k + 1);
			const auto d = snowflake::build_dk_style_weight(k, base.with_weights(v));
			failures += !d.sandwich;
			++runs;
		}
	}
	return {failures == 0, fmt::format("{} runs, {} failures, brute-force gap {:.1e}", runs, failures, brute)};
}

Outcome gm_rates()
{
	struct Case
	{
		int k;
		double p;
		int i;
	};
	bool ok = true;
	std::string detail;
	for (const Case c : {Case{1, 0.5, 1}, Case{2, 1.0 / 3, 2}, Case{0, 0.5, 0}})
	{
		const auto r = experiments::gm_report({4, 8, 16, 32, 64}, c.k, c.p);
		const double expected = (c.i * c.p - 1) / c.p;
		bool decreasing = true;
		for (std::size_t j = 1; j < r.rows.size(); ++j)
			decreasing = decreasing && r.rows[j].length_kp < r.rows[j - 1].length_kp;
		const double ratio = r.rows.back().length_kp / r.rows.front().length_kp;
		ok = ok && std::abs(r.slopes[c.i] - expected) <= 0.15 && decreasing && ratio < 0.1;
		detail += fmt::format("(k={},i={}) slope {:.3f} vs {:.3f}, ratio {:.3f}; ", c.k, c.i, r.slopes[c.i], expected, ratio);
	}
	return {ok, detail};
}

Outcome flow_and_square()
{
	const std::vector<double> lo{-1, -1}, hi{1, 1};
	const TracerCloud lattice = TracerCloud::lattice(lo, hi, 7);
	const FlowMap m = integrate(path("2*x1"), lattice, 64);
	double shift = 0;
	for (std::size_t i = 0; i < lattice.size(); ++i)
		shift = std::max({shift, std::abs(m.final.point(i)[0] - lattice.point(i)[0]),
		                  std::abs(m.final.point(i)[1] - lattice.point(i)[1] - 2)});
	const auto rotation = [](int steps) {
		const TracerCloud c = TracerCloud::circle(0, 0, 1, 12);
		const FlowMap r = integrate(path("(x1*x1 + y1*y1)/2"), c, steps);
		double err = 0;
		for (std::size_t i = 0; i < c.size(); ++i)
		{
			const double x = c.point(i)[0], y = c.point(i)[1];
			err = std::max(err, std::hypot(r.final.point(i)[0] - (x * std::cos(1.0) - y * std::sin(1.0)),
			                               r.final.point(i)[1] - (x * std::sin(1.0) + y * std::cos(1.0))));
		}
		return err;
	};
	const double e256 = rotation(256);
	const double order = std::log2(rotation(16) / rotation(32));
	bool squares = true;
	double worst = 0;
	for (double c : {0.25, 1.0, 4.0})
	{
		const auto s = experiments::square_displacement(c);
		squares = squares && s.certificate.displaced;
		for (double l : s.lengths)
			worst = std::max(worst, std::abs(l - c) / c);
	}
	return {shift <= 1e-10 && e256 <= 1e-8 && order >= 3.7 && squares && worst <= 0.02,
	        fmt::format("shift {:.1e}, rotation {:.1e}, order {:.2f}, square gap {:.3f}", shift, e256, order, worst)};
}

Outcome disjoint_bound()
{
	std::mt19937_64 rng(4242);
	const Grid grid = corpus::disjoint_grid();
	int failures = 0;
	double worst = 0;
	for (int j = 0; j < 20; ++j)
	{
		const int m = 2 + j % 2, k = j % 3;
		const auto family = corpus::random_disjoint_family(rng, m);
		const auto r = experiments::disjoint_bound_check(family, k, grid);
		failures += !r.holds;
		worst = std::max(worst, r.lhs / r.rhs);
	}
	return {failures == 0, fmt::format("20 configurations, {} failures, max lhs/rhs {:.3f}", failures, worst)};
}

Outcome constants_ledger(const std::string& golden_path)
{
	std::ifstream is(golden_path);
	if (!is)
		return {false, "golden file missing: " + golden_path};
	const auto golden = nlohmann::json::parse(is);
	int mismatches = 0;
	for (int k = 0; k <= 5; ++k)
	{
		const auto l = experiments::constants(k);
		const auto& row = golden[std::to_string(k)];
		mismatches += l.entries.size() != 11 || row.size() != 11;
		for (const auto& e : l.entries)
			mismatches += !row.contains(e.name) || row[e.name].get<std::string>() != e.value;
	}
	const auto l0 = experiments::constants(0);
	const bool k0 = l0.at("hofer_C").value == "3840" && l0.at("sikorav_C").value == "240" &&
	                l0.at("bi_bound").value == "4" && l0.at("hofer_C").note.find("128") != std::string::npos;
	return {mismatches == 0 && k0, fmt::format("{} mismatches over k = 0..5, k=0 row {}", mismatches, k0 ? "ok" : "wrong")};
}

Outcome hofer_like()
{
	const Grid grid = corpus::torus_grid();
	TorusPiece piece;
	piece.harmonic = {expr::constant(1), expr::constant(0)};
	piece.exact = expr::constant(0);
	const TorusSymplecticPath pure({piece}, {2 * M_PI, 2 * M_PI});
	bool unit = true;
	for (int k = 0; k <= 5; ++k)
		unit = unit && std::abs(hofer_like_length_k(pure, k, grid).total - 1) <= 1e-12;
	std::mt19937_64 rng(99);
	double rep = 0;
	int flux_failures = 0;
	for (int n = 0; n < 20; ++n)
	{
		const auto f = corpus::random_torus_path(rng, n % 2 == 0);
		const TimeMap s = corpus::random_time_map(rng);
		const double l = hofer_like_length_k(f, 0, grid).total;
		rep = std::max(rep, rel(hofer_like_length_k(reparametrize(f, s), 0, grid).total, l));
		double flux = 0;
		for (double v : flux_harmonic(f))
			flux += std::abs(v);
		flux_failures += flux > harmonic_l1_length(f) + 1e-12;
	}
	return {unit && rep <= 1e-8 && flux_failures == 0,
	        fmt::format("pure harmonic {}, reparam {:.1e}, flux failures {}", unit ? "1" : "wrong", rep, flux_failures)};
}

Outcome determinism(const std::string& exe)
{
	const fs::path root = fs::temp_directory_path() / "hoferlab_acceptance";
	fs::remove_all(root);
	std::string bytes[2];
	for (int run = 0; run < 2; ++run)
	{
		const fs::path dir = root / std::to_string(run);
		const std::string cmd =
		    fmt::format("\"{}\" verify --suite all --seed 42 --out \"{}\" > /dev/null", exe, dir.string());
		if (std::system(cmd.c_str()) != 0)
			return {false, "verify run " + std::to_string(run) + " did not pass"};
		std::ifstream is(dir / "summary.json", std::ios::binary);
		std::ostringstream ss;
		ss << is.rdbuf();
		bytes[run] = ss.str();
	}
	fs::remove_all(root);
	return {!bytes[0].empty() && bytes[0] == bytes[1], fmt::format("summary.json {} bytes, identical {}",
	                                                               bytes[0].size(), bytes[0] == bytes[1])};
}

} // namespace

int main(int argc, char** argv)
{
	if (argc < 3)
	{
		fmt::print(stderr, "usage: acceptance <hoferlab executable> <golden constants.json>\n");
		return 2;
	}
	const std::string exe = argv[1], golden = argv[2];
	int failed = 0;
	const auto report = [&](int id, const char* name, double limit, const std::function<Outcome()>& body) {
		const auto start = std::chrono::steady_clock::now();
		Outcome o;
		try
		{
			o = body();
		}
		catch (const std::exception& e)
		{
			o = {false, std::string("exception: ") + e.what()};
		}
		const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
		const bool in_time = limit <= 0 || seconds < limit;
		const bool pass = o.pass && in_time;
		failed += !pass;
		fmt::print("{} {} {} ({:.1f} s{}) {}\n", pass ? "PASS" : "FAIL", id, name, seconds,
		           limit > 0 ? fmt::format(", limit {:.0f} s", limit) : "", o.detail);
		std::fflush(stdout);
	};

	bool monotone = false;
	report(1, "path_algebra", 60, [&] { return path_algebra(monotone); });
	report(2, "monotone_in_k", 0, [&] { return Outcome{monotone, "Length_k nondecreasing over the corpus"}; });
	report(3, "snowflake", 30, snowflake_transform);
	report(4, "degeneracy_rates", 300, gm_rates);
	report(5, "flow_integrator", 120, flow_and_square);
	report(6, "disjoint_support", 60, disjoint_bound);
	report(7, "constants_ledger", 0, [&] { return constants_ledger(golden); });
	report(8, "hofer_like", 0, hofer_like);
	report(9, "determinism", 0, [&] { return determinism(exe); });
	fmt::print("{} of 9 criteria passed\n", 9 - failed);
	return failed == 0 ? 0 : 1;
}
