#include "hoferlab/errors.hpp"
#include "hoferlab/hampath.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hoferlab;

namespace {

double value(const HamiltonianPath& f, std::vector<double> p, double t)
{
	return expr::evaluate(f.pieces()[f.piece_index(t)].hamiltonian, p, t);
}

HamiltonianPath path(const char* h) { return HamiltonianPath::single(expr::parse(h), 1); }

} // namespace

TEST(Path, TilingIsValidated)
{
	EXPECT_THROW(HamiltonianPath({Piece{0, 0.5, expr::parse("x1")}}, 1), PreconditionError);
	EXPECT_THROW(HamiltonianPath({Piece{0, 0.5, expr::parse("x1")}, Piece{0.6, 1, expr::parse("x1")}}, 1),
	             PreconditionError);
	EXPECT_THROW(HamiltonianPath::single(expr::parse("x2"), 1), PreconditionError);
	const HamiltonianPath f({Piece{0, 0.25, expr::parse("x1")}, Piece{0.25, 1, expr::parse("t")}}, 1);
	EXPECT_EQ(f.piece_index(0.25), 1u);
	EXPECT_EQ(f.piece_index(1.0), 1u);
	EXPECT_FALSE(f.is_autonomous());
}

TEST(Path, JsonRoundTripAndHash)
{
	const HamiltonianPath f({Piece{0, 0.5, expr::parse("t*x1")}, Piece{0.5, 1, expr::parse("sin(y1)")}}, 1,
	                        Grid::box({-1, -1}, {1, 1}, {5, 5}));
	const HamiltonianPath g = HamiltonianPath::from_json(f.to_json());
	EXPECT_EQ(g.hash(), f.hash());
	EXPECT_EQ(g.piece_count(), 2u);
	EXPECT_TRUE(g.domain().has_value());
	EXPECT_NE(path("x1").hash(), path("y1").hash());
	EXPECT_THROW(HamiltonianPath::from_json(nlohmann::json{{"dimension", 3}, {"pieces", nlohmann::json::array()}}),
	             FormatError);
}

TEST(Reverse, Examples)
{
	const HamiltonianPath r = reverse(path("x1"));
	ASSERT_EQ(r.piece_count(), 1u);
	EXPECT_DOUBLE_EQ(value(r, {0.7, 0}, 0.2), -0.7);
	const HamiltonianPath s = reverse(path("t*x1"));
	for (double t : {0.0, 0.3, 1.0})
		EXPECT_NEAR(value(s, {2, 0}, t), -(1 - t) * 2, 1e-15);
}

TEST(Reverse, MirrorsDivision)
{
	const HamiltonianPath f({Piece{0, 0.2, expr::parse("x1")}, Piece{0.2, 1, expr::parse("t*y1")}}, 1);
	const HamiltonianPath r = reverse(f);
	EXPECT_NEAR(r.breakpoints()[1], 0.8, 1e-15);
	const HamiltonianPath rr = reverse(r);
	for (double t : {0.1, 0.5, 0.9})
		EXPECT_NEAR(value(rr, {0.3, 0.4}, t), value(f, {0.3, 0.4}, t), 1e-15);
}

TEST(Concatenate, SpeedsUpBothHalves)
{
	const HamiltonianPath c = concatenate(path("t*x1"), path("y1"));
	ASSERT_EQ(c.piece_count(), 2u);
	EXPECT_NEAR(value(c, {1, 3}, 0.25), 2 * 0.5 * 1, 1e-15);
	EXPECT_NEAR(value(c, {1, 3}, 0.75), 2 * 3, 1e-15);
	EXPECT_THROW(concatenate(path("x1"), HamiltonianPath::single(expr::parse("x2"), 2)), PreconditionError);
}

TEST(Reparametrize, IdentityAndMonotonicity)
{
	const HamiltonianPath f = path("t*x1 + y1");
	const HamiltonianPath g = reparametrize(f, TimeMap::identity());
	for (double t : {0.1, 0.6})
		EXPECT_NEAR(value(g, {1, 2}, t), value(f, {1, 2}, t), 1e-15);
	const TimeMap s = TimeMap::two_speed(0.5, 0.2);
	EXPECT_NEAR(s(0.5), 0.2, 1e-15);
	EXPECT_NEAR(s.preimage(0.2), 0.5, 1e-12);
	// s' F(s) on the first half: s' = 0.4
	EXPECT_NEAR(value(reparametrize(f, s), {1, 2}, 0.25), 0.4 * (0.1 * 1 + 2), 1e-14);
	EXPECT_THROW(reparametrize(f, TimeMap({Piece{0, 1, expr::parse("t - 0.5*sin(6.283185307179586*t)")}})),
	             NotMonotone);
}

TEST(Conjugate, Translation)
{
	const HamiltonianPath f = path("x1");
	EXPECT_DOUBLE_EQ(value(conjugate(f, AffineSymplectic::identity(1)), {0.3, 0.1}, 0.5), 0.3);
	const std::vector<double> shift{1.5, 0};
	const HamiltonianPath g = conjugate(f, AffineSymplectic::translation(shift));
	EXPECT_DOUBLE_EQ(value(g, {0.3, 0.1}, 0.5), 0.3 - 1.5);
}

TEST(Affine, RejectsNonSymplectic)
{
	Eigen::MatrixXd a(2, 2);
	a << 2, 0, 0, 1;
	EXPECT_THROW(AffineSymplectic(a, Eigen::VectorXd::Zero(2)), PreconditionError);
	Eigen::MatrixXd r(2, 2);
	r << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
	const AffineSymplectic rot(r, Eigen::VectorXd::Ones(2));
	const Eigen::VectorXd x = Eigen::Vector2d(0.2, -0.7);
	EXPECT_NEAR((rot.inverse().apply(rot.apply(x)) - x).norm(), 0, 1e-15);
}

TEST(DisjointProduct, SumAndOverlap)
{
	const Grid grid = Grid::box({-4, -4}, {4, 4}, {41, 41});
	const SupportedPath a{path("smoothstep(x1, 0.2, 0.6, -2)*smoothstep(y1, 0.2, 0.6)"), {-2.6, -0.6}, {-1.4, 0.6}};
	const SupportedPath b{path("-3*smoothstep(x1, 0.2, 0.6, 2)*smoothstep(y1, 0.2, 0.6)"), {1.4, -0.6}, {2.6, 0.6}};
	const std::vector<SupportedPath> both{a, b};
	const HamiltonianPath p = disjoint_product(both, grid);
	EXPECT_DOUBLE_EQ(value(p, {-2, 0}, 0.5), 1);
	EXPECT_DOUBLE_EQ(value(p, {2, 0}, 0.5), -3);
	// oscillation of the sum is max sup - min inf over the parts
	const auto g = std::make_shared<const Grid>(grid);
	EXPECT_DOUBLE_EQ(oscillation(sample(p.pieces()[0].hamiltonian, g, 0.5)), 1 - (-3));
	const SupportedPath c{path("smoothstep(x1, 0.2, 0.6, -1.5)*smoothstep(y1, 0.2, 0.6)"), {-2.1, -0.6}, {-0.9, 0.6}};
	const std::vector<SupportedPath> overlap{a, c};
	EXPECT_THROW(disjoint_product(overlap, grid), SupportOverlap);
	const SupportedPath lying{path("smoothstep(x1, 0.2, 0.6)*smoothstep(y1, 0.2, 0.6)"), {2, 2}, {3, 3}};
	const std::vector<SupportedPath> bad{a, lying};
	EXPECT_THROW(disjoint_product(bad, grid), SupportOverlap);
}
