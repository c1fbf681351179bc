#include "hoferlab/errors.hpp"
#include "hoferlab/snowflake.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace hoferlab;
using namespace hoferlab::snowflake;

TEST(Group, BuiltIns)
{
	const auto z = WeightedGroup::cyclic(5);
	EXPECT_EQ(z.order(), 5);
	EXPECT_EQ(z.multiply(3, 4), 2);
	EXPECT_EQ(z.inverse(2), 3);
	const auto s3 = WeightedGroup::symmetric(3);
	EXPECT_EQ(s3.identity(), 0);
	std::vector<std::size_t> sizes;
	for (const auto& c : s3.conjugacy_classes())
		sizes.push_back(c.size());
	EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 3, 2}));
	EXPECT_EQ(WeightedGroup::dihedral4().conjugacy_classes().size(), 5u);
	EXPECT_EQ(WeightedGroup::named("S4").order(), 24);
	EXPECT_THROW(WeightedGroup::named("Q8"), PreconditionError);
	EXPECT_THROW(WeightedGroup({{0, 1}, {1, 1}}, {0, 1}), PreconditionError);
}

TEST(Group, JsonRoundTrip)
{
	const double inf = std::numeric_limits<double>::infinity();
	const auto g = WeightedGroup::cyclic(3, {0, inf, 2});
	const auto j = g.to_json();
	EXPECT_EQ(j["weights"][1], "inf");
	const auto back = WeightedGroup::from_json(j);
	EXPECT_EQ(back.weights()[1], inf);
	EXPECT_EQ(back.table(), g.table());
	EXPECT_THROW(WeightedGroup::from_json(nlohmann::json{{"order", 2}}), FormatError);
}

TEST(QuasiConstant, Examples)
{
	EXPECT_DOUBLE_EQ(quasi_constant(WeightedGroup::cyclic(4, {0, 1, 2, 1})), 1);
	EXPECT_DOUBLE_EQ(quasi_constant(WeightedGroup::cyclic(4, {0, 1, 3, 1})), 1.5);
	EXPECT_DOUBLE_EQ(quasi_constant(WeightedGroup::cyclic(4, {0, 0, 0, 0})), 1);
	EXPECT_TRUE(std::isinf(quasi_constant(WeightedGroup::cyclic(4, {0, 0, 1, 0}))));
	EXPECT_DOUBLE_EQ(alpha_for(1), 1);
	EXPECT_DOUBLE_EQ(alpha_for(2), 0.5);
}

TEST(Sharp, TrueNormIsFixed)
{
	const auto g = WeightedGroup::cyclic(4, {0, 1, 2, 1});
	const auto r = sharp(g);
	EXPECT_EQ(r.alpha, 1);
	for (int a = 0; a < 4; ++a)
		EXPECT_NEAR(r.sharp[a], g.weight(a), 1e-15);
	EXPECT_THROW(sharp(WeightedGroup::cyclic(4, {0, 0, 1, 0})), InputNotQuasiSubadditive);
}

TEST(Sharp, ClassFunctionMatchesBruteForce)
{
	// Z6 is abelian, so every symmetric weight is a class function
	const auto g = WeightedGroup::cyclic(6, {0, 1, 1, 5, 1, 1});
	const auto r = sharp(g);
	const auto b = brute_force_sharp(g, 5);
	for (int a = 0; a < 6; ++a)
		EXPECT_NEAR(r.sharp[a], b[a], 1e-12);
	// the extremal pair 1 + 2 ties: 2^(1/alpha) = 2C = 5
	EXPECT_DOUBLE_EQ(r.C, 2.5);
	EXPECT_NEAR(r.sharp[3], 5, 1e-12);
	EXPECT_TRUE(sandwich_holds(g, r, std::pow(2 * r.C, -2.0)));
	EXPECT_TRUE(beta_subadditive(g, r.sharp, r.alpha));
	EXPECT_TRUE(is_class_function(g, r.sharp));
	// witnesses realize the value
	for (int a = 1; a < 6; ++a)
	{
		double s = 0;
		int prod = g.identity();
		for (int w : r.witnesses[a])
		{
			s += std::pow(g.weight(w), r.alpha);
			prod = g.multiply(prod, w);
		}
		EXPECT_EQ(prod, a);
		EXPECT_NEAR(std::pow(s, 1 / r.alpha), r.sharp[a], 1e-12);
	}
}

TEST(BruteForce, SingleFactorsAndBudget)
{
	const auto g = WeightedGroup::cyclic(5, {0, 2, 1, 1, 2});
	const auto one = brute_force_sharp(g, 1);
	for (int a = 1; a < 5; ++a)
		EXPECT_DOUBLE_EQ(one[a], g.weight(a));
	std::mt19937_64 rng(5);
	const auto base = WeightedGroup::cyclic(5);
	for (int n = 0; n < 5; ++n)
	{
		const auto h = base.with_weights(random_weights(base, rng, false));
		const auto r = sharp(h);
		const auto b = brute_force_sharp(h, 5);
		for (int a = 0; a < 5; ++a)
			EXPECT_NEAR(r.sharp[a], b[a], 1e-12);
	}
	EXPECT_THROW(brute_force_sharp(WeightedGroup::cyclic(10), 8), BudgetExceeded);
}

TEST(Sharp, ClassFunctionOnS3)
{
	std::mt19937_64 rng(9);
	const auto base = WeightedGroup::symmetric(3);
	for (int n = 0; n < 10; ++n)
	{
		const auto g = base.with_weights(random_weights(base, rng, true));
		ASSERT_TRUE(is_class_function(g, g.weights()));
		const auto r = sharp(g);
		EXPECT_TRUE(is_class_function(g, r.sharp));
		EXPECT_TRUE(zero_sets_match(g, r.sharp));
		EXPECT_TRUE(beta_subadditive(g, r.sharp, r.alpha / 2));
	}
}

TEST(DkMode, Sandwich)
{
	const auto sub = WeightedGroup::cyclic(4, {0, 1, 2, 1});
	const auto r0 = build_dk_style_weight(0, sub);
	EXPECT_TRUE(r0.sandwich);
	for (int a = 0; a < 4; ++a)
		EXPECT_NEAR(r0.result.sharp[a], sub.weight(a), 1e-15);
	const auto toy = WeightedGroup::cyclic(4, {0, 1, 3, 1});
	const auto r1 = build_dk_style_weight(1, toy);
	EXPECT_EQ(r1.result.alpha, 0.5);
	EXPECT_TRUE(r1.sandwich);
	EXPECT_FALSE(r1.agreement.has_value());
	EXPECT_THROW(build_dk_style_weight(0, toy), QuasiTriangleViolated);
	// C = 2 exactly: squared word length on Z4
	const auto sq = WeightedGroup::cyclic(4, {0, 1, 4, 1});
	const auto r2 = build_dk_style_weight(1, sq);
	ASSERT_TRUE(r2.agreement.has_value());
	EXPECT_TRUE(*r2.agreement);
}
