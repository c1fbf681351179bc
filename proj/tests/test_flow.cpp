#include "hoferlab/errors.hpp"
#include "hoferlab/flow.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace hoferlab;

namespace {

HamiltonianPath path(const char* h) { return HamiltonianPath::single(expr::parse(h), 1); }

double rotation_error(int steps)
{
	const TracerCloud c = TracerCloud::circle(0, 0, 1, 12);
	FlowOptions o;
	o.error_estimate = false;
	const FlowMap m = integrate(path("(x1*x1 + y1*y1)/2"), c, steps, o);
	double err = 0;
	for (std::size_t i = 0; i < c.size(); ++i)
	{
		const double x = c.point(i)[0], y = c.point(i)[1];
		err = std::max(err, std::hypot(m.final.point(i)[0] - (x * std::cos(1.0) - y * std::sin(1.0)),
		                               m.final.point(i)[1] - (x * std::sin(1.0) + y * std::cos(1.0))));
	}
	return err;
}

} // namespace

TEST(Cloud, ValidationAndCsv)
{
	EXPECT_THROW(TracerCloud(3, {0, 0, 0}), PreconditionError);
	EXPECT_THROW(TracerCloud(2, {0, 0, 1}), PreconditionError);
	const TracerCloud c(2, {0, 1, 2.5, -3}, {"a", "b"});
	std::stringstream ss;
	c.write_csv(ss);
	const TracerCloud back = TracerCloud::read_csv(ss);
	EXPECT_EQ(back.coords(), c.coords());
	EXPECT_EQ(back.labels(), c.labels());
	std::istringstream bad("x1,y1\n1,zz\n");
	EXPECT_THROW(TracerCloud::read_csv(bad), FormatError);
	const std::vector<double> lo{0, 0}, hi{1, 1};
	EXPECT_EQ(TracerCloud::lattice(lo, hi, 3).size(), 9u);
}

TEST(Integrate, ZeroAndShift)
{
	const std::vector<double> lo{-1, -1}, hi{1, 1};
	const TracerCloud c = TracerCloud::lattice(lo, hi, 5);
	EXPECT_EQ(integrate(path("0"), c, 4).final.coords(), c.coords());
	const FlowMap m = integrate(path("2*x1"), c, 8);
	for (std::size_t i = 0; i < c.size(); ++i)
	{
		EXPECT_NEAR(m.final.point(i)[0], c.point(i)[0], 1e-10);
		EXPECT_NEAR(m.final.point(i)[1], c.point(i)[1] + 2, 1e-10);
	}
	EXPECT_FALSE(m.path_hash.empty());
}

TEST(Integrate, RotationAndOrder)
{
	EXPECT_LT(rotation_error(256), 1e-8);
	const double order = std::log2(rotation_error(16) / rotation_error(32));
	EXPECT_GE(order, 3.7);
}

TEST(Integrate, PiecewiseAndErrorEstimate)
{
	// x1 on [0, 1/2] moves y1 by +1/2, then -x1 brings it back
	const HamiltonianPath f({Piece{0, 0.5, expr::parse("x1")}, Piece{0.5, 1, expr::parse("-x1")}}, 1);
	const TracerCloud c(2, {0.3, 0.4});
	const FlowMap m = integrate(f, c, 4);
	EXPECT_NEAR(m.final.point(0)[1], 0.4, 1e-14);
	// the step-doubling estimate tracks the true error against a fine reference
	const TracerCloud loop = TracerCloud::circle(0.2, 0.1, 0.5, 8);
	const FlowMap r = integrate(path("sin(x1*y1)*(1 + t)"), loop, 64);
	const FlowMap ref = integrate(path("sin(x1*y1)*(1 + t)"), loop, 2048);
	const double actual = c0_distance(r, ref);
	EXPECT_GT(r.stats.error_estimate, actual / 3);
	EXPECT_LT(r.stats.error_estimate, actual * 3);
}

TEST(Integrate, BlowUp)
{
	// dy/dt = y^2 leaves every box before t = 1 when y(0) = 2
	const TracerCloud c(2, {1.0, 2.0});
	FlowOptions o;
	o.safety_box = 100;
	EXPECT_THROW(integrate(path("x1*y1^2"), c, 64, o), BlowUp);
}

TEST(Distance, Examples)
{
	const TracerCloud c = TracerCloud::circle(0, 0, 1, 16);
	const FlowMap id = integrate(path("0"), c, 2);
	EXPECT_EQ(c0_distance(id, id), 0);
	EXPECT_NEAR(c0_distance(integrate(path("2*x1"), c, 4), id), 2, 1e-12);
	EXPECT_NEAR(c0_distance(integrate(path("(x1*x1 + y1*y1)/2"), c, 256), id), 2 * std::sin(0.5), 1e-9);
	const FlowMap other = integrate(path("0"), TracerCloud::circle(0, 0, 2, 16), 2);
	EXPECT_THROW(c0_distance(id, other), CloudMismatch);
}

TEST(Area, ConservedAlongTheFlow)
{
	const TracerCloud loop = TracerCloud::circle(0.1, 0.2, 0.7, 1500);
	EXPECT_NEAR(loop_area(loop), M_PI * 0.49, 1e-5);
	const FlowMap m = integrate_area_guarded(path("sin(x1)*cos(y1)*(1 + t)"), loop, 32, 1e-5);
	EXPECT_NEAR(loop_area(m.final), loop_area(loop), 1e-5);
}

TEST(Displacement, Examples)
{
	const std::vector<double> lo{-0.5, -0.5}, hi{0.5, 0.5};
	const TracerCloud c = TracerCloud::lattice(lo, hi, 21);
	const RegionTest ball = [](std::span<const double> p) { return std::hypot(p[0], p[1]) <= 0.5; };
	const DisplacementCertificate none = displaced(integrate(path("0"), c, 2), ball);
	EXPECT_FALSE(none.displaced);
	EXPECT_EQ(none.margin, 0);
	const DisplacementCertificate moved = displaced(integrate(path("2*x1"), c, 4), ball);
	EXPECT_TRUE(moved.displaced);
	EXPECT_GE(moved.margin, 1 - 1e-12);
	EXPECT_GT(moved.density, 0);
}

TEST(Then, ComposesFlows)
{
	const TracerCloud c = TracerCloud::circle(0, 0, 1, 8);
	FlowMap m = integrate(path("2*x1"), c, 4);
	m = then(m, path("-2*x1"), 4);
	for (std::size_t i = 0; i < c.size(); ++i)
		EXPECT_NEAR(m.final.point(i)[1], c.point(i)[1], 1e-12);
}
