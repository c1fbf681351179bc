#include "hoferlab/corpus.hpp"
#include "hoferlab/errors.hpp"
#include "hoferlab/lengths.hpp"
#include "hoferlab/smoothstep.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace hoferlab;

namespace {

HamiltonianPath path(const char* h) { return HamiltonianPath::single(expr::parse(h), 1); }

const Grid unit_box = Grid::box({-1, -1}, {1, 1}, {21, 21});

} // namespace

TEST(LengthK, AutonomousLinear)
{
	for (int k = 0; k <= 3; ++k)
	{
		const LengthReport r = length_k(path("x1"), k, unit_box);
		EXPECT_DOUBLE_EQ(r.total, 2);
		EXPECT_DOUBLE_EQ(r.per_order[0], 2);
		for (int i = 1; i <= k; ++i)
			EXPECT_EQ(r.per_order[i], 0);
		EXPECT_EQ(r.kind, "k");
		EXPECT_FALSE(r.notes.empty());
	}
}

TEST(LengthK, CorpusMatchesClosedForm)
{
	std::mt19937_64 rng(7);
	const Grid grid = corpus::corpus_grid();
	const auto g = std::make_shared<const Grid>(grid);
	for (int n = 0; n < 8; ++n)
	{
		const auto f = corpus::random_path(rng);
		for (int k = 0; k <= 3; ++k)
		{
			double expected = 0;
			for (std::size_t l = 0; l < f.factors.size(); ++l)
			{
				const double osc = oscillation(sample(f.profiles[l], g, 0));
				for (int i = 0; i <= k; ++i)
					expected += osc * f.factors[l].abs_integral(i, f.path.pieces()[l].t_start, f.path.pieces()[l].t_end);
			}
			EXPECT_NEAR(length_k(f.path, k, grid).total, expected, 1e-10 * expected);
		}
	}
}

TEST(LengthK, PathAlgebra)
{
	std::mt19937_64 rng(11);
	const Grid grid = corpus::corpus_grid(25);
	for (int n = 0; n < 5; ++n)
	{
		const auto f = corpus::random_path(rng);
		const auto g = corpus::random_path(rng);
		const TimeMap s = corpus::random_time_map(rng);
		for (int k = 0; k <= 3; ++k)
		{
			const LengthReport lf = length_k(f.path, k, grid), lg = length_k(g.path, k, grid);
			EXPECT_NEAR(length_k(reverse(f.path), k, grid).total, lf.total, 1e-9 * lf.total);
			double expected = 0;
			for (int i = 0; i <= k; ++i)
				expected += std::ldexp(lf.per_order[i] + lg.per_order[i], i);
			EXPECT_NEAR(length_k(concatenate(f.path, g.path), k, grid).total, expected, 1e-9 * expected);
		}
		const double l0 = length_k(f.path, 0, grid).total;
		EXPECT_NEAR(length_k(reparametrize(f.path, s), 0, grid).total, l0, 1e-8 * l0);
	}
}

TEST(CoarseLength, Examples)
{
	EXPECT_DOUBLE_EQ(coarse_length_k(path("x1"), 2, unit_box).total, 2);
	// osc(h) = 1 with h = (x1 + 1)/2 on [-1, 1]
	const LengthReport r = coarse_length_k(path("t*(x1 + 1)/2"), 1, unit_box);
	EXPECT_NEAR(r.per_order[0], 1, 1e-12);
	EXPECT_NEAR(r.per_order[1], 1, 1e-12);
	EXPECT_NEAR(r.total, 2, 1e-12);
	// interior maximum found by the golden-section refinement
	const LengthReport s = coarse_length_k(path("sin(3.14159265358979*t)*x1 + 0*t"), 0, unit_box, 8);
	EXPECT_NEAR(s.total, 2, 1e-10);
}

TEST(LengthKp, ClosedForm)
{
	EXPECT_EQ(length_kp(path("0"), 2, 0.5, unit_box).total, 0);
	// separable: ||b(x1) b(y1)||_p = (int |b|^p)^(2/p)
	const Grid grid = Grid::box({-2, -2}, {2, 2}, {201, 201});
	const double p = 0.5;
	double one_d = 0;
	const int n = 400000;
	for (int i = 0; i <= n; ++i)
	{
		const double x = -2 + 4.0 * i / n;
		const double w = (i == 0 || i == n) ? 0.5 : 1.0;
		one_d += w * std::pow(bump_derivative(x, 0.3, 1.2), p) * 4.0 / n;
	}
	const double expected = std::pow(one_d * one_d, 1 / p);
	const double got = length_kp(path("smoothstep(x1, 0.3, 1.2)*smoothstep(y1, 0.3, 1.2)"), 0, p, grid).total;
	EXPECT_NEAR(got, expected, 1e-6 * expected);
	EXPECT_THROW(length_kp(path("x1"), 0, 0, unit_box), PreconditionError);
}

TEST(LengthKp, TwoResolutionBound)
{
	// (1/2 + 1) (int b)^2 with int b = 2 (0.3 + 0.25)
	const LengthReport r =
	    with_two_resolution_bound(path("t*smoothstep(x1, 0.3, 0.8)*smoothstep(y1, 0.3, 0.8)"), "kp", 1, 1, unit_box);
	ASSERT_TRUE(r.extrapolated_total.has_value());
	EXPECT_NEAR(r.total, 1.5 * 1.1 * 1.1, 1e-9);
	// nested grids: the fine sample contains the coarse one
	const LengthReport z = with_two_resolution_bound(path("t*cos(3*(x1 - 0.05))"), "k", 1, 1, unit_box);
	EXPECT_GE(*z.extrapolated_total, z.total);
	// extremes of cos(3 (x1 - 0.07)) fall between nodes; exact osc is 2
	const LengthReport o = with_two_resolution_bound(path("t*cos(3*(x1 - 0.07))"), "k", 1, 1, unit_box);
	EXPECT_LT(o.total, 3);
	EXPECT_LT(std::abs(*o.extrapolated_total - 3), std::abs(o.total - 3) / 4);
}

TEST(Report, JsonAndCsv)
{
	const LengthReport r = length_k(path("t*x1"), 1, unit_box);
	const auto j = r.to_json();
	EXPECT_EQ(j["kind"], "k");
	EXPECT_EQ(j["per_order"].size(), 2u);
	std::ostringstream os;
	r.write_csv(os);
	EXPECT_NE(os.str().find("order"), std::string::npos);
}

TEST(HoferLike, PureHarmonicAndErrors)
{
	TorusPiece piece;
	piece.harmonic = {expr::constant(1), expr::constant(0)};
	piece.exact = expr::constant(0);
	const TorusSymplecticPath f({piece}, {2 * M_PI, 2 * M_PI});
	for (int k = 0; k <= 4; ++k)
		EXPECT_DOUBLE_EQ(hofer_like_length_k(f, k, corpus::torus_grid()).total, 1);
	EXPECT_THROW(hofer_like_length_k(f, 0, unit_box), GeometryError);
	const auto back = TorusSymplecticPath::from_json(f.to_json());
	EXPECT_DOUBLE_EQ(hofer_like_length_k(back, 1, corpus::torus_grid()).total, 1);
}

TEST(HoferLike, ReparametrizationAndFlux)
{
	std::mt19937_64 rng(3);
	const Grid grid = corpus::torus_grid();
	for (int n = 0; n < 10; ++n)
	{
		const auto f = corpus::random_torus_path(rng, n % 2 == 0);
		const TimeMap s = corpus::random_time_map(rng);
		const double l = hofer_like_length_k(f, 0, grid).total;
		EXPECT_NEAR(hofer_like_length_k(reparametrize(f, s), 0, grid).total, l, 1e-8 * l);
		double flux = 0;
		for (double v : flux_harmonic(f))
			flux += std::abs(v);
		EXPECT_LE(flux, harmonic_l1_length(f) + 1e-12);
	}
}

TEST(HoferLike, SignChangeIsIntegratedExactly)
{
	// int_0^1 |sin(2 pi t)| dt = 2 / pi
	TorusPiece piece;
	piece.harmonic = {expr::parse("sin(6.283185307179586*t)"), expr::constant(0)};
	piece.exact = expr::constant(0);
	const TorusSymplecticPath f({piece}, {2 * M_PI, 2 * M_PI});
	EXPECT_NEAR(harmonic_l1_length(f), 2 / M_PI, 1e-13);
	EXPECT_NEAR(std::abs(flux_harmonic(f)[0]), 0, 1e-13);
}
