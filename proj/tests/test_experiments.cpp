#include "hoferlab/corpus.hpp"
#include "hoferlab/errors.hpp"
#include "hoferlab/experiments.hpp"
#include "hoferlab/smoothstep.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

using namespace hoferlab;
using namespace hoferlab::experiments;

namespace {

HamiltonianPath path(const char* h) { return HamiltonianPath::single(expr::parse(h), 1); }

} // namespace

TEST(Gm, ExpressionMatchesDirectFormula)
{
	const expr::Expression e = gm_expression({4, false});
	for (double t : {0.0, 0.4})
		for (double x : {-1.1, 0.2, 0.9, 1.05})
			for (double y : {0.3, 0.8, 1.6})
			{
				const double r = std::hypot(x, y - 2 * t);
				const double direct = 2 * x * bump_derivative(4 * (r - 1), 0.25, 0.75);
				EXPECT_NEAR(expr::evaluate(e, std::vector<double>{x, y}, t), direct, 1e-14);
			}
}

TEST(Gm, PolarNormMatchesGridNorm)
{
	const GmSpec spec{4, false};
	const double t = 0.3;
	const auto grid = std::make_shared<const Grid>(Grid::box({-1.6, -1.0}, {1.6, 2.2}, {641, 641}));
	for (int i : {0, 1})
	{
		const double on_grid = lp_norm(sample(expr::diff_t(gm_expression(spec), i), grid, t), 1);
		EXPECT_NEAR(gm_norm(spec, i, 1, t), on_grid, 1e-4 * on_grid) << "i=" << i;
	}
	// |f|^(1/2) has a kink on the zero set, so the grid converges slowly; the
	// gap to a well-resolved polar value must shrink under refinement
	ShellOptions fine;
	fine.angular_nodes = 16384;
	const double polar = gm_norm(spec, 1, 0.5, t, fine);
	const auto field = expr::diff_t(gm_expression(spec), 1);
	const double coarse_gap = std::abs(lp_norm(sample(field, grid, t), 0.5) - polar);
	const double fine_gap = std::abs(lp_norm(sample(field, std::make_shared<const Grid>(grid->refined(2)), t), 0.5) - polar);
	EXPECT_LT(fine_gap, coarse_gap / 2);
	EXPECT_LT(fine_gap, 2e-4 * polar);
	EXPECT_NEAR(gm_norm(spec, 1, 0.5, t), polar, 5e-4 * polar);
}

TEST(Gm, ClosedModeDoublesPthPower)
{
	for (double p : {0.5, 1.0})
	{
		const double open = gm_norm({8, false}, 1, p, 0.2);
		const double closed = gm_norm({8, true}, 1, p, 0.2);
		EXPECT_NEAR(std::pow(closed, p), 2 * std::pow(open, p), 1e-10 * std::pow(closed, p));
	}
}

TEST(Gm, ResolutionAndSupport)
{
	ShellOptions coarse;
	coarse.panel_width = 1.0 / 16 + 1e-3;
	EXPECT_THROW(gm_norm({2, false}, 0, 1, 0, coarse), ShellUnresolved);
	EXPECT_LT(gm_outside_ratio({8, false}, 0.5), 1e-14);
	EXPECT_LT(gm_outside_ratio({8, true}, 0.5), 1e-14);
}

TEST(Gm, ReportSlopes)
{
	EXPECT_NEAR(loglog_slope({1, 2, 4}, {3, 3.0 / 8, 3.0 / 64}), -3, 1e-12);
	const auto r = gm_report({8, 16, 32}, 1, 0.5);
	EXPECT_EQ(r.row_kind(), (std::vector<std::string>{"decay", "decay"}));
	EXPECT_NEAR(r.slopes[0], -2, 0.15);
	EXPECT_NEAR(r.slopes[1], -1, 0.15);
	EXPECT_GT(r.rows[0].length_kp, r.rows[2].length_kp);
	const auto control = gm_report({8, 16, 32}, 2, 1);
	EXPECT_EQ(control.row_kind()[2], "control");
	EXPECT_GE(control.slopes[2], 0);
}

TEST(Square, DisplacesUnitSquare)
{
	const auto s = square_displacement(1.0, 2, 12);
	EXPECT_TRUE(s.certificate.displaced);
	EXPECT_TRUE(s.length_ok);
	for (double l : s.lengths)
		EXPECT_NEAR(l, 1.0, 0.02);
	EXPECT_THROW(square_displacement(-1), PreconditionError);
}

TEST(Shift, FixesLeftAndTranslatesRight)
{
	const auto s = sikorav_shift(0.8, 0.1);
	const TracerCloud c(2, {-0.2, 0.5, 1.0, -0.3});
	const FlowMap m = integrate(s.path, c, 64);
	EXPECT_NEAR(m.final.point(0)[0], -0.2, 1e-12);
	EXPECT_NEAR(m.final.point(0)[1], 0.5, 1e-12);
	EXPECT_NEAR(m.final.point(1)[0], 1.8, 1e-10);
	EXPECT_NEAR(m.final.point(1)[1], -0.3, 1e-10);
	const std::vector<double> lo{-2, -2}, hi{2, 2};
	EXPECT_TRUE(shift_certificate(s, TracerCloud::lattice(lo, hi, 15)).ok);
	const Grid grid = Grid::box({-1, -1}, {3, 1}, {81, 41});
	EXPECT_THROW(s.conjugate(path("smoothstep(x1, 0.2, 0.4)*smoothstep(y1, 0.2, 0.4)"), grid), PreconditionError);
	const auto g = s.conjugate(path("smoothstep(x1, 0.2, 0.4, 1)*smoothstep(y1, 0.2, 0.4)"), grid);
	EXPECT_NEAR(expr::evaluate(g.pieces()[0].hamiltonian, std::vector<double>{1.8, 0}, 0), 1, 1e-15);
}

TEST(Commutator, TrivialAndDisjointCases)
{
	const Grid grid = Grid::box({-4, -4}, {4, 4}, {41, 41});
	CommutatorOptions o;
	o.steps = 64;
	o.time_samples = 10;
	const SupportedPath f{path("(1 + t)*smoothstep(x1, 0.3, 0.8)*smoothstep(y1, 0.3, 0.8)"), {-0.8, -0.8}, {0.8, 0.8}};
	const SupportedPath id{path("0"), {-4, -4}, {4, 4}};
	const auto r = commutator_path(f, id, grid, o);
	EXPECT_TRUE(r.flow_certified);
	EXPECT_LT(r.flow_defect, 1e-7);
	EXPECT_TRUE(r.bound_holds);
	// f reverse(f) concatenated: its time-one map is the identity; the field
	// reaches speed ~16, so this needs many steps
	const TracerCloud cloud = TracerCloud::circle(0.1, 0.2, 0.5, 12);
	const FlowMap still = integrate(path("0"), cloud, 1);
	EXPECT_LT(c0_distance(integrate(r.path, cloud, 4096), still), 1e-7);

	const SupportedPath far{path("t*smoothstep(x1, 0.3, 0.8, 2.5)*smoothstep(y1, 0.3, 0.8)"), {1.7, -0.8}, {3.3, 0.8}};
	const auto d = commutator_path(f, far, grid, o);
	EXPECT_TRUE(d.flow_certified);
	EXPECT_LT(c0_distance(integrate(d.path, cloud, 4096), still), 1e-7);

	const SupportedPath twist{path("(x1^2 + y1^2)*smoothstep(x1, 0.5, 1.5)*smoothstep(y1, 0.5, 1.5)"), {-1.5, -1.5},
	                          {1.5, 1.5}};
	const SupportedPath bumpy{path("x1*y1*smoothstep(x1, 0.5, 1.5, 0.5)*smoothstep(y1, 0.5, 1.5)"), {-1, -1.5},
	                          {2, 1.5}};
	EXPECT_THROW(commutator_path(twist, bumpy, grid, o), ConjugationUnsupported);
}

TEST(Commutator, AffineTranslationBound)
{
	const Grid grid = Grid::box({-4, -4}, {4, 4}, {81, 81});
	const SupportedPath f{path("(1 + t)*smoothstep(x1, 0.3, 0.8)*smoothstep(y1, 0.3, 0.8)"), {-0.8, -0.8}, {0.8, 0.8}};
	const SupportedPath g{path("-0.5*y1*smoothstep(x1, 2, 3)*smoothstep(y1, 2, 3)"), {-3.5, -3.5}, {3.5, 3.5}};
	const auto r = commutator_path(f, g, grid);
	EXPECT_TRUE(r.bound_holds);
	EXPECT_TRUE(r.flow_certified);
	EXPECT_LT(r.length.total, r.bound);
}

TEST(Disjoint, Examples)
{
	const Grid grid = corpus::disjoint_grid();
	const SupportedPath a{path("(1 + t)*smoothstep(x1, 0.3, 0.8, -2)*smoothstep(y1, 0.3, 0.8)"), {-2.8, -0.8},
	                      {-1.2, 0.8}};
	const std::vector<SupportedPath> one{a};
	EXPECT_TRUE(disjoint_bound_check(one, 1, grid).holds);
	const SupportedPath b{path("(1 + t)*smoothstep(x1, 0.3, 0.8, 2)*smoothstep(y1, 0.3, 0.8)"), {1.2, -0.8},
	                      {2.8, 0.8}};
	const std::vector<SupportedPath> copies{a, b};
	const auto r = disjoint_bound_check(copies, 0, grid);
	EXPECT_TRUE(r.holds);
	EXPECT_LE(r.lhs / (r.rhs / 2), 2 + 1e-12);
	std::mt19937_64 rng(21);
	const auto family = corpus::random_disjoint_family(rng, 3);
	EXPECT_TRUE(disjoint_bound_check(family, 2, grid).holds);
}

TEST(Constants, GoldenFile)
{
	std::ifstream is(std::string(HOFERLAB_TEST_DATA) + "/../golden/constants.json");
	ASSERT_TRUE(is);
	const auto golden = nlohmann::json::parse(is);
	for (int k = 0; k <= 5; ++k)
	{
		const auto l = constants(k);
		ASSERT_EQ(l.entries.size(), golden[std::to_string(k)].size());
		for (const auto& e : l.entries)
			EXPECT_EQ(e.value, golden[std::to_string(k)][e.name].get<std::string>()) << k << " " << e.name;
	}
	const auto l0 = constants(0);
	EXPECT_NE(l0.at("hofer_C").note.find("128"), std::string::npos);
	EXPECT_EQ(l0.at("r_alpha_bound").note, "per unit alpha");
	EXPECT_EQ(constants(20).at("sandwich_low").value, "1/" + std::string("4398046511104"));
	EXPECT_THROW(constants(21), PreconditionError);
}
