#include "hoferlab/errors.hpp"
#include "hoferlab/expr.hpp"
#include "hoferlab/smoothstep.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace hoferlab;
using namespace hoferlab::expr;

namespace {

double at(const Expression& e, std::vector<double> p, double t) { return evaluate(e, p, t); }

// Fourth-order central difference in t.
double fd_t(const Expression& e, std::vector<double> p, double t, double h)
{
	return (-at(e, p, t + 2 * h) + 8 * at(e, p, t + h) - 8 * at(e, p, t - h) + at(e, p, t - 2 * h)) / (12 * h);
}

} // namespace

TEST(Parse, ProductNode)
{
	const Expression e = parse("2*x1");
	ASSERT_EQ(e.op(), Op::Mul);
	EXPECT_TRUE(Expression(e.node().lhs).is_constant(2));
	EXPECT_EQ(e.node().rhs->op, Op::Variable);
	EXPECT_EQ(e.node().rhs->var, Var::x(1));
}

TEST(Parse, Precedence)
{
	const Expression e = parse("t*t*x1 + sin(t)");
	ASSERT_EQ(e.op(), Op::Add);
	EXPECT_EQ(e.node().lhs->op, Op::Mul);
	EXPECT_EQ(e.node().rhs->op, Op::Sin);
	EXPECT_DOUBLE_EQ(at(parse("1 + 2*3"), {}, 0), 7);
	EXPECT_DOUBLE_EQ(at(parse("8/2/2"), {}, 0), 2);
	EXPECT_DOUBLE_EQ(at(parse("2 - 3 - 4"), {}, 0), -5);
	// unary minus binds tighter than ^
	EXPECT_DOUBLE_EQ(at(parse("-x1^2"), {3, 0}, 0), 9);
	EXPECT_DOUBLE_EQ(at(parse("-(x1^2)"), {3, 0}, 0), -9);
	EXPECT_DOUBLE_EQ(at(parse("x1^2^3"), {3, 0}, 0), 729);
}

TEST(Parse, SyntaxErrorOffset)
{
	try
	{
		parse("x1+");
		FAIL() << "expected SyntaxError";
	}
	catch (const SyntaxError& e)
	{
		EXPECT_EQ(e.offset(), 3u);
	}
	EXPECT_THROW(parse("2*(x1"), SyntaxError);
	EXPECT_THROW(parse(""), SyntaxError);
}

TEST(Parse, UnknownIdentifier)
{
	try
	{
		parse("1 + foo(x1)");
		FAIL() << "expected UnknownIdentifier";
	}
	catch (const UnknownIdentifier& e)
	{
		EXPECT_EQ(e.offset(), 4u);
		EXPECT_EQ(e.name(), "foo");
	}
	EXPECT_THROW(parse("x3", {2}), UnknownIdentifier);
	EXPECT_NO_THROW(parse("x2", {2}));
}

TEST(Parse, PrintRoundTrip)
{
	for (const char* s : {"2*x1", "t*t*x1 + sin(t)", "-(1 - t)*x1", "exp(-x1^2 - y1^2)*cos(3*t)", "x2/(1 + y2^2)",
	                      "smoothstep(x1, 0.25, 0.75, 1.5)*step(y1, -1, 1)", "smoothstep_d(x1 - 2*t, 0.3, 0.9, 0, 2)",
	                      "sqrt(1 + x1^2) - log(2 + sin(y1))", "1e-3*x1 - 2.5e10"})
	{
		const Expression e = parse(s, {2});
		EXPECT_TRUE(parse(print(e), {2}) == e) << s << " printed as " << print(e);
	}
}

TEST(Diff, TimeDerivatives)
{
	EXPECT_TRUE(diff_t(parse("t*x1"), 1) == parse("x1"));
	EXPECT_TRUE(diff_t(parse("x1"), 1).is_constant(0));
	EXPECT_TRUE(diff_t(parse("x1*t"), 0) == parse("x1*t"));
	EXPECT_NEAR(at(diff_t(parse("sin(t)*x1"), 2), {2, 0}, 0.3), -2 * std::sin(0.3), 1e-12);
	EXPECT_THROW(diff_t(parse("t"), 9), PreconditionError);
}

TEST(Diff, AgreesWithFiniteDifferences)
{
	const Expression e = parse("sin(t)*x1 + exp(-t*y1^2)*smoothstep(x1 - t, 0.2, 0.7) + t^3*step(y1, -0.5, 0.5)");
	const std::vector<double> p{0.35, 0.2};
	for (int order = 1; order <= 3; ++order)
	{
		const double expected = fd_t(diff_t(e, order - 1), p, 0.41, 1e-3);
		EXPECT_NEAR(at(diff_t(e, order), p, 0.41), expected, 1e-6) << "order " << order;
	}
	const double h = 1e-4;
	auto shifted = [&](double dx) { return at(e, {p[0] + dx, p[1]}, 0.41); };
	const double fd = (-shifted(2 * h) + 8 * shifted(h) - 8 * shifted(-h) + shifted(-2 * h)) / (12 * h);
	EXPECT_NEAR(at(diff(e, Var::x(1)), p, 0.41), fd, 1e-8);
}

TEST(Evaluate, Basics)
{
	const std::vector<double> pts{1, 0};
	EXPECT_EQ(evaluate(parse("2*x1"), pts, 2, 0.7), std::vector<double>{2});
	const std::vector<double> many{1, 2, 3, 4, -5, 6};
	for (double v : evaluate(parse("0"), many, 2, 0.1))
		EXPECT_EQ(v, 0);
	EXPECT_THROW(at(parse("log(x1)"), {-1, 0}, 0), DomainError);
	EXPECT_THROW(at(parse("sqrt(x1)"), {-1, 0}, 0), DomainError);
	EXPECT_THROW(at(parse("1/x1"), {0, 0}, 0), DomainError);
}

TEST(Evaluate, SubstituteAndPrograms)
{
	const Expression e = parse("x1*y1 + t");
	const Expression s = substitute(e, {{Var::x(1), parse("x1 - 2")}});
	EXPECT_DOUBLE_EQ(at(s, {5, 2}, 1), 7);
	const std::vector<Expression> outs{parse("x1 + y1"), parse("x1*y1*t"), parse("sin(x1)")};
	const Program prog(outs);
	std::vector<double> out(3), scratch;
	const std::vector<double> p{0.5, -1.5};
	prog.run(p, 0.25, out, scratch);
	for (std::size_t i = 0; i < outs.size(); ++i)
		EXPECT_DOUBLE_EQ(out[i], at(outs[i], p, 0.25));
}

TEST(Evaluate, BatchProgramMatchesProgram)
{
	const std::vector<Expression> outs{parse("exp(-x1^2)*cos(t*y1)"), parse("smoothstep(x1, 0.1, 0.5)*t^2 + y1")};
	const Program prog(outs);
	std::vector<double> pts;
	for (int i = 0; i < 20; ++i)
	{
		pts.push_back(-1 + 0.1 * i);
		pts.push_back(0.05 * i);
	}
	const BatchProgram batch(prog, pts, 2);
	std::vector<double> out(2 * 20), single(2), scratch;
	for (double t : {0.0, 0.3, 0.9})
	{
		batch.run(t, out);
		for (std::size_t j = 0; j < 20; ++j)
		{
			prog.run(std::span<const double>(pts).subspan(2 * j, 2), t, single, scratch);
			EXPECT_DOUBLE_EQ(out[0 * 20 + j], single[0]);
			EXPECT_DOUBLE_EQ(out[1 * 20 + j], single[1]);
		}
	}
}

TEST(SmoothStep, Shape)
{
	EXPECT_EQ(step_derivative(-1, 0, 1), 0);
	EXPECT_EQ(step_derivative(2, 0, 1), 1);
	EXPECT_NEAR(step_derivative(0.5, 0, 1), 0.5, 1e-15);
	const SmoothStep b{1.0, 0.25, 0.75};
	EXPECT_EQ(b(1.2), 1);
	EXPECT_EQ(b(0.2), 0);
	EXPECT_EQ(b(1.9), 0);
	EXPECT_GT(b(1.5), 0);
	EXPECT_LT(b(1.5), 1);
}

TEST(SmoothStep, DerivativesMatchFiniteDifferences)
{
	const double h = 1e-3;
	for (int order = 1; order <= 4; ++order)
		for (double s : {-0.3, 0.1, 0.37, 0.62})
		{
			auto f = [&](double x) { return bump_derivative(x, 0.2, 0.8, 0.0, order - 1); };
			const double fd = (-f(s + 2 * h) + 8 * f(s + h) - 8 * f(s - h) + f(s - 2 * h)) / (12 * h);
			EXPECT_NEAR(bump_derivative(s, 0.2, 0.8, 0.0, order), fd, 1e-5 * std::max(1.0, std::abs(fd)))
			    << "order " << order << " at " << s;
		}
	EXPECT_THROW(step_derivative(0.5, 0, 1, 32), PreconditionError);
}
