#pragma once

// Piecewise-smooth Hamiltonian paths on [0, 1] and their path algebra.

#include "hoferlab/expr.hpp"
#include "hoferlab/grid.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hoferlab {

struct Piece
{
	double t_start = 0;
	double t_end = 1;
	expr::Expression hamiltonian;
};

/// Ordered pieces tiling [0, 1] exactly: the first starts at 0, the last ends
/// at 1 and consecutive endpoints are equal. The data model does not require
/// the Hamiltonian to be continuous across breakpoints.
class HamiltonianPath
{
public:
	HamiltonianPath(std::vector<Piece> pieces, int pairs, std::optional<Grid> domain = std::nullopt);

	static HamiltonianPath single(expr::Expression h, int pairs, std::optional<Grid> domain = std::nullopt);

	const std::vector<Piece>& pieces() const { return pieces_; }
	std::size_t piece_count() const { return pieces_.size(); }
	int pairs() const { return pairs_; }
	int dimension() const { return 2 * pairs_; }
	const std::optional<Grid>& domain() const { return domain_; }

	std::vector<double> breakpoints() const;
	/// Index of the piece whose interval contains t (right-continuous, last piece closed).
	std::size_t piece_index(double t) const;
	bool is_autonomous() const;

	HamiltonianPath with_domain(std::optional<Grid> domain) const;

	nlohmann::json to_json() const;
	static HamiltonianPath from_json(const nlohmann::json& j);

	/// Stable FNV-1a hash of the JSON form.
	std::string hash() const;

private:
	std::vector<Piece> pieces_;
	int pairs_;
	std::optional<Grid> domain_;
};

/// Throws PreconditionError unless the pieces tile [0, 1] exactly.
void check_tiling(std::span<const Piece> pieces);

/// Standard symplectic matrix for interleaved coordinates (x1, y1, ...).
Eigen::MatrixXd symplectic_j(int pairs);

/// x -> linear * x + shift with linear^T J linear = J.
class AffineSymplectic
{
public:
	AffineSymplectic(Eigen::MatrixXd linear, Eigen::VectorXd shift, double tolerance = 1e-10);

	static AffineSymplectic identity(int pairs);
	static AffineSymplectic translation(std::span<const double> shift);

	const Eigen::MatrixXd& linear() const { return linear_; }
	const Eigen::VectorXd& shift() const { return shift_; }
	int pairs() const { return int(shift_.size()) / 2; }

	Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return linear_ * x + shift_; }
	AffineSymplectic inverse() const;

private:
	Eigen::MatrixXd linear_;
	Eigen::VectorXd shift_;
};

/// G_j(x, t) = -F_{n-j+1}(x, 1 - t) on the mirrored division.
HamiltonianPath reverse(const HamiltonianPath& f);

/// The path running `first` on [0, 1/2] with 2 F(x, 2t) and `second` on
/// [1/2, 1] with 2 G(x, 2t - 1). Its time-one map is second o first.
HamiltonianPath concatenate(const HamiltonianPath& first, const HamiltonianPath& second);

/// A piecewise nondecreasing time change s: [0, 1] -> [0, 1] given
/// symbolically on each of its own pieces (expressions in t only).
class TimeMap
{
public:
	explicit TimeMap(std::vector<Piece> pieces);
	static TimeMap identity();
	/// Linear with speed change at `knee`: s(knee) = value.
	static TimeMap two_speed(double knee, double value);

	const std::vector<Piece>& pieces() const { return pieces_; }
	double operator()(double t) const;
	/// Smallest u with s(u) >= target.
	double preimage(double target) const;

private:
	std::vector<Piece> pieces_;
	std::vector<expr::Program> programs_;
};

/// Pieces s'(t) F(x, s(t)). Throws NotMonotone if a sampled s' < -1e-12.
HamiltonianPath reparametrize(const HamiltonianPath& f, const TimeMap& s);

/// Pieces F(theta^{-1}(x), t).
HamiltonianPath conjugate(const HamiltonianPath& f, const AffineSymplectic& theta);

/// Right composition by a fixed map leaves the generating Hamiltonians
/// unchanged; the path is returned as is.
inline HamiltonianPath right_compose(const HamiltonianPath& f) { return f; }

/// Merged, sorted breakpoints of several paths.
std::vector<double> common_division(std::span<const HamiltonianPath> paths);

/// Same path on a finer division containing `division`.
HamiltonianPath refine(const HamiltonianPath& f, std::span<const double> division);

/// A path together with the box declared to contain its support.
struct SupportedPath
{
	HamiltonianPath path;
	std::vector<double> lower;
	std::vector<double> upper;
};

/// Sum of disjointly supported paths over their common division. Boxes must
/// be pairwise disjoint and each Hamiltonian must vanish (below
/// 1e-9 * oscillation) at the `check` grid samples outside its box;
/// otherwise SupportOverlap.
HamiltonianPath disjoint_product(std::span<const SupportedPath> paths, const Grid& check);

} // namespace hoferlab
