#pragma once

// Snowflake transform of a quasi-subadditive weight on a finite group:
//
//   C      smallest constant with psi(ab) <= C (psi(a) + psi(b))
//   alpha  1 / (1 + log2 C)
//   psi#   inf over words a = a_1 ... a_N of (sum psi(a_i)^alpha)^(1/alpha)
//
// psi#^alpha is a shortest-path distance in the complete Cayley graph.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hoferlab::snowflake {

class WeightedGroup
{
public:
	/// Identity and inverses are found from the table. Groups of order <= 64
	/// are checked for associativity. With `norm_mode` psi(identity) must be 0.
	WeightedGroup(std::vector<std::vector<int>> table, std::vector<double> weights, bool norm_mode = false);

	static WeightedGroup cyclic(int n, std::vector<double> weights = {});
	/// Symmetric group on 3 or 4 letters, permutations in lexicographic order.
	static WeightedGroup symmetric(int letters, std::vector<double> weights = {});
	/// Symmetries of the square: r^i s^f has index i + 4 f.
	static WeightedGroup dihedral4(std::vector<double> weights = {});
	/// "Z<n>", "S3", "S4" or "D4".
	static WeightedGroup named(const std::string& name, std::vector<double> weights = {});

	int order() const { return int(table_.size()); }
	int identity() const { return identity_; }
	int multiply(int a, int b) const { return table_[a][b]; }
	int inverse(int a) const { return inverse_[a]; }
	double weight(int a) const { return weights_[a]; }
	const std::vector<double>& weights() const { return weights_; }
	const std::vector<std::vector<int>>& table() const { return table_; }
	const std::vector<int>& inverses() const { return inverse_; }

	WeightedGroup with_weights(std::vector<double> weights) const;
	/// Conjugacy classes, each sorted, ordered by smallest member.
	std::vector<std::vector<int>> conjugacy_classes() const;

	/// {order, table, inverse, weights}; infinite weights are written as "inf".
	nlohmann::json to_json() const;
	static WeightedGroup from_json(const nlohmann::json& j);

private:
	std::vector<std::vector<int>> table_;
	std::vector<int> inverse_;
	std::vector<double> weights_;
	int identity_ = 0;
};

/// Smallest C >= 1 with psi(ab) <= C (psi(a) + psi(b)); may be infinite.
double quasi_constant(const WeightedGroup& g);

/// 1 / (1 + log2 C).
double alpha_for(double C);

struct SharpResult
{
	double C = 1;
	double alpha = 1;
	std::vector<double> sharp;
	/// An optimal word for every element (empty for the identity when psi#(e) = 0 via the empty word).
	std::vector<std::vector<int>> witnesses;

	nlohmann::json to_json() const;
};

/// psi# with the generic exponent. Throws InputNotQuasiSubadditive if C is infinite.
SharpResult sharp(const WeightedGroup& g);
/// psi# with a prescribed exponent in (0, 1].
SharpResult sharp_with_alpha(const WeightedGroup& g, double alpha);

/// Exact infimum over words of length 1..maxN by enumeration. Throws
/// BudgetExceeded if order^maxN > 1e7.
std::vector<double> brute_force_sharp(const WeightedGroup& g, int maxN, std::optional<double> alpha = std::nullopt);

struct DkResult
{
	int k = 0;
	double measured_C = 1;
	SharpResult result;            ///< alpha forced to 1/(k+1)
	bool sandwich = false;         ///< 4^-(k+1) psi <= psi# <= psi
	std::optional<bool> agreement; ///< generic and forced exponents agree (only when C == 2^k)

	nlohmann::json to_json() const;
};

/// Validates the 2^k-quasi-triangle inequality (QuasiTriangleViolated), runs
/// the transform with exponent 1/(k+1) and checks the 4^-(k+1) sandwich.
DkResult build_dk_style_weight(int k, const WeightedGroup& base);

// Property checks used by the tests and the verify suite.

/// (2C)^-2 psi <= psi# <= psi for every element.
bool sandwich_holds(const WeightedGroup& g, const SharpResult& r, double low_factor, double tol = 1e-12);
/// psi#(ab)^beta <= psi#(a)^beta + psi#(b)^beta for every pair.
bool beta_subadditive(const WeightedGroup& g, const std::vector<double>& values, double beta, double tol = 1e-12);
bool zero_sets_match(const WeightedGroup& g, const std::vector<double>& values);
bool is_class_function(const WeightedGroup& g, const std::vector<double>& values, double tol = 1e-12);
bool is_symmetric(const WeightedGroup& g, const std::vector<double>& values, double tol = 1e-12);

/// Seeded norm-like weights: psi(e) = 0 and positive elsewhere. With
/// `class_function` the weight is constant on conjugacy classes, otherwise it
/// is symmetric under inversion.
std::vector<double> random_weights(const WeightedGroup& g, std::mt19937_64& rng, bool class_function);

} // namespace hoferlab::snowflake
