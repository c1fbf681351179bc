#pragma once

// Scalar expressions H(x1, y1, ..., xn, yn, t) with exact symbolic
// differentiation. Nodes are immutable and shared, so an Expression is a cheap
// value type and concurrent reads need no synchronization.
//
// Coordinates are interleaved: a point in R^{2n} is (x1, y1, x2, y2, ...).

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hoferlab::expr {

enum class VarKind : std::uint8_t { X, Y, T };

struct Var
{
	VarKind kind = VarKind::T;
	int index = 0; ///< 1-based pair index for X/Y, 0 for T

	static Var x(int i) { return {VarKind::X, i}; }
	static Var y(int i) { return {VarKind::Y, i}; }
	static Var t() { return {VarKind::T, 0}; }

	/// Position in the interleaved coordinate tuple; -1 for t.
	int slot() const { return kind == VarKind::T ? -1 : 2 * (index - 1) + (kind == VarKind::Y ? 1 : 0); }

	auto operator<=>(const Var&) const = default;
};

enum class Op : std::uint8_t {
	Constant,
	Variable,
	Add,
	Sub,
	Mul,
	Div,
	Neg,
	Pow,
	Sin,
	Cos,
	Exp,
	Log,
	Sqrt,
	Bump, ///< C^inf plateau cutoff around a center
	Step, ///< C^inf monotone transition from 0 to 1
};

/// Parameters of a cutoff node. For Bump, (a, b) = (inner, outer); for Step,
/// (a, b) = (lo, hi). `order` is the derivative order of the cutoff itself.
struct CutoffParams
{
	double a = 0;
	double b = 0;
	double center = 0;
	int order = 0;

	auto operator<=>(const CutoffParams&) const = default;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node
{
	Op op = Op::Constant;
	double value = 0;
	Var var{};
	int exponent = 0;
	CutoffParams cutoff{};
	NodePtr lhs;
	NodePtr rhs;
};

class Expression
{
public:
	Expression(); ///< the constant 0
	explicit Expression(NodePtr node);

	const Node& node() const { return *node_; }
	const NodePtr& ptr() const { return node_; }
	Op op() const { return node_->op; }

	bool is_constant() const { return node_->op == Op::Constant; }
	bool is_constant(double c) const { return is_constant() && node_->value == c; }

	/// Largest pair index referenced by an x_i or y_i variable (0 if none).
	int max_pair_index() const;
	bool depends_on_time() const;
	bool depends_on_space() const;

	/// Structural (tree) equality.
	friend bool operator==(const Expression& a, const Expression& b);

private:
	NodePtr node_;
};

// Builders. They fold constants and drop neutral elements but never reorder.
Expression constant(double c);
Expression variable(Var v);
Expression add(const Expression& a, const Expression& b);
Expression sub(const Expression& a, const Expression& b);
Expression mul(const Expression& a, const Expression& b);
Expression div(const Expression& a, const Expression& b);
Expression neg(const Expression& a);
Expression pow(const Expression& a, int n);
Expression sin(const Expression& a);
Expression cos(const Expression& a);
Expression exp(const Expression& a);
Expression log(const Expression& a);
Expression sqrt(const Expression& a);
Expression bump(const Expression& arg, double inner, double outer, double center = 0, int order = 0);
Expression step(const Expression& arg, double lo, double hi, int order = 0);

inline Expression operator+(const Expression& a, const Expression& b) { return add(a, b); }
inline Expression operator-(const Expression& a, const Expression& b) { return sub(a, b); }
inline Expression operator*(const Expression& a, const Expression& b) { return mul(a, b); }
inline Expression operator/(const Expression& a, const Expression& b) { return div(a, b); }
inline Expression operator-(const Expression& a) { return neg(a); }

struct ParseOptions
{
	int pairs = 8; ///< highest admissible index for x_i / y_i
};

/// Parses the documented grammar (see docs/grammar.md).
/// Throws SyntaxError (with byte offset) or UnknownIdentifier.
Expression parse(std::string_view source, const ParseOptions& options = {});

/// Prints an expression so that parse(print(e)) == e.
std::string print(const Expression& e);

inline constexpr int kDefaultMaxTimeOrder = 8;

/// Symbolic partial derivative.
Expression diff(const Expression& e, Var v);

/// order-th symbolic t-derivative; diff_t(e, 0) is e itself.
/// Throws PreconditionError if order exceeds max_order.
Expression diff_t(const Expression& e, int order, int max_order = kDefaultMaxTimeOrder);

/// Replaces variables by expressions; unmapped variables stay.
Expression substitute(const Expression& e, const std::map<Var, Expression>& replacements);

/// Evaluates at one point. `point` holds interleaved coordinates and must
/// cover every referenced pair. Throws DomainError on guarded operations.
double evaluate(const Expression& e, std::span<const double> point, double t);

/// Evaluates at many points; each row of `points` has length `dimension`.
std::vector<double> evaluate(const Expression& e, std::span<const double> points, int dimension, double t);

/// A compiled, common-subexpression-eliminated evaluator for one or more
/// expressions sharing the same inputs.
class Program
{
public:
	Program() = default;
	explicit Program(const Expression& e);
	explicit Program(std::span<const Expression> outputs);

	std::size_t outputs() const { return outputs_.size(); }
	std::size_t instructions() const { return code_.size(); }
	int max_pair_index() const { return max_pair_; }

	/// Evaluates every output at one point. `scratch` is resized as needed.
	void run(std::span<const double> point, double t, std::span<double> out, std::vector<double>& scratch) const;

	/// Value of the first output.
	double operator()(std::span<const double> point, double t) const;

private:
	friend class BatchProgram;
	void check_point(std::size_t size) const;

	struct Instr
	{
		Op op;
		int lhs = -1;
		int rhs = -1;
		double value = 0;
		int slot = -1;
		int exponent = 0;
		CutoffParams cutoff{};
	};

	std::vector<Instr> code_;
	std::vector<char> timed_; ///< instruction depends on t
	std::vector<int> outputs_;
	int max_pair_ = 0;
};

/// Evaluates a Program on a fixed point set at many times. Registers that do
/// not depend on t are computed once per point. The program and the point
/// buffer must outlive this object.
class BatchProgram
{
public:
	BatchProgram(const Program& program, std::span<const double> points, int dimension);

	std::size_t size() const { return n_; }
	/// out[k * size() + j] is output k at point j.
	void run(double t, std::vector<double>& out) const;

private:
	const Program& prog_;
	std::span<const double> points_;
	int dimension_;
	std::size_t n_ = 0;
	std::vector<int> dynamic_;
	std::vector<int> cached_;
	std::vector<double> cache_;
};

} // namespace hoferlab::expr
