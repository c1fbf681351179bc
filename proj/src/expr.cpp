#include "hoferlab/expr.hpp"

#include "hoferlab/errors.hpp"
#include "hoferlab/smoothstep.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <tuple>
#include <unordered_map>

namespace hoferlab::expr {

namespace {

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

Expression unary(Op op, const Expression& a)
{
	Node n;
	n.op = op;
	n.lhs = a.ptr();
	return Expression(make(std::move(n)));
}

Expression binary(Op op, const Expression& a, const Expression& b)
{
	Node n;
	n.op = op;
	n.lhs = a.ptr();
	n.rhs = b.ptr();
	return Expression(make(std::move(n)));
}

Expression raw_pow(const Expression& a, int k)
{
	Node n;
	n.op = Op::Pow;
	n.lhs = a.ptr();
	n.exponent = k;
	return Expression(make(std::move(n)));
}

Expression raw_cutoff(Op op, const Expression& arg, CutoffParams p)
{
	Node n;
	n.op = op;
	n.lhs = arg.ptr();
	n.cutoff = p;
	return Expression(make(std::move(n)));
}

double ipow(double base, int k)
{
	if (k < 0)
	{
		if (base == 0)
			throw DomainError("zero raised to a negative power");
		return 1.0 / ipow(base, -k);
	}
	double result = 1;
	while (k)
	{
		if (k & 1)
			result *= base;
		base *= base;
		k >>= 1;
	}
	return result;
}

/// Walks a DAG once per distinct node.
template <class T> class Memo
{
public:
	explicit Memo(std::function<T(const NodePtr&, Memo&)> f) : f_(std::move(f)) {}
	T operator()(const NodePtr& p)
	{
		if (auto it = cache_.find(p.get()); it != cache_.end())
			return it->second;
		T value = f_(p, *this);
		cache_.emplace(p.get(), value);
		return value;
	}

private:
	std::function<T(const NodePtr&, Memo&)> f_;
	std::unordered_map<const Node*, T> cache_;
};

bool structurally_equal(const Node* a, const Node* b)
{
	if (a == b)
		return true;
	if (!a || !b)
		return false;
	if (a->op != b->op)
		return false;
	switch (a->op)
	{
	case Op::Constant: return std::bit_cast<std::uint64_t>(a->value) == std::bit_cast<std::uint64_t>(b->value);
	case Op::Variable: return a->var == b->var;
	case Op::Pow:
		if (a->exponent != b->exponent)
			return false;
		break;
	case Op::Bump:
	case Op::Step:
		if (!(a->cutoff == b->cutoff))
			return false;
		break;
	default: break;
	}
	return structurally_equal(a->lhs.get(), b->lhs.get()) && structurally_equal(a->rhs.get(), b->rhs.get());
}

} // namespace

// ---------------------------------------------------------------------------
// Expression

Expression::Expression() : node_(make(Node{})) {}

Expression::Expression(NodePtr node) : node_(std::move(node))
{
	if (!node_)
		throw PreconditionError("null expression node");
}

int Expression::max_pair_index() const
{
	Memo<int> walk([](const NodePtr& p, Memo<int>& self) {
		const Node& n = *p;
		int m = 0;
		if (n.op == Op::Variable && n.var.kind != VarKind::T)
			m = n.var.index;
		if (n.lhs)
			m = std::max(m, self(n.lhs));
		if (n.rhs)
			m = std::max(m, self(n.rhs));
		return m;
	});
	return walk(node_);
}

namespace {
bool depends(const NodePtr& root, bool time)
{
	Memo<bool> walk([time](const NodePtr& p, Memo<bool>& self) {
		const Node& n = *p;
		if (n.op == Op::Variable)
			return (n.var.kind == VarKind::T) == time;
		return (n.lhs && self(n.lhs)) || (n.rhs && self(n.rhs));
	});
	return walk(root);
}
} // namespace

bool Expression::depends_on_time() const { return depends(node_, true); }
bool Expression::depends_on_space() const { return depends(node_, false); }

bool operator==(const Expression& a, const Expression& b)
{
	return structurally_equal(a.node_.get(), b.node_.get());
}

// ---------------------------------------------------------------------------
// Builders

Expression constant(double c)
{
	Node n;
	n.value = c;
	return Expression(make(std::move(n)));
}

Expression variable(Var v)
{
	if (v.kind != VarKind::T && v.index < 1)
		throw PreconditionError("coordinate index must be >= 1");
	Node n;
	n.op = Op::Variable;
	n.var = v.kind == VarKind::T ? Var::t() : v;
	return Expression(make(std::move(n)));
}

Expression add(const Expression& a, const Expression& b)
{
	if (a.is_constant() && b.is_constant())
		return constant(a.node().value + b.node().value);
	if (a.is_constant(0))
		return b;
	if (b.is_constant(0))
		return a;
	return binary(Op::Add, a, b);
}

Expression sub(const Expression& a, const Expression& b)
{
	if (a.is_constant() && b.is_constant())
		return constant(a.node().value - b.node().value);
	if (b.is_constant(0))
		return a;
	if (a.is_constant(0))
		return neg(b);
	return binary(Op::Sub, a, b);
}

Expression mul(const Expression& a, const Expression& b)
{
	if (a.is_constant() && b.is_constant())
		return constant(a.node().value * b.node().value);
	if (a.is_constant(0) || b.is_constant(0))
		return constant(0);
	if (a.is_constant(1))
		return b;
	if (b.is_constant(1))
		return a;
	if (a.is_constant(-1))
		return neg(b);
	if (b.is_constant(-1))
		return neg(a);
	return binary(Op::Mul, a, b);
}

Expression div(const Expression& a, const Expression& b)
{
	if (b.is_constant(0))
		throw DomainError("division by the constant zero");
	if (a.is_constant() && b.is_constant())
		return constant(a.node().value / b.node().value);
	if (a.is_constant(0))
		return constant(0);
	if (b.is_constant(1))
		return a;
	return binary(Op::Div, a, b);
}

Expression neg(const Expression& a)
{
	if (a.is_constant())
		return constant(-a.node().value);
	if (a.op() == Op::Neg)
		return Expression(a.node().lhs);
	return unary(Op::Neg, a);
}

Expression pow(const Expression& a, int k)
{
	if (k == 0)
		return constant(1);
	if (k == 1)
		return a;
	if (a.is_constant())
		return constant(ipow(a.node().value, k));
	return raw_pow(a, k);
}

#define HOFERLAB_UNARY_BUILDER(name, Name, fn)                                                                         \
	Expression name(const Expression& a)                                                                               \
	{                                                                                                                  \
		if (a.is_constant())                                                                                           \
			return constant(fn(a.node().value));                                                                       \
		return unary(Op::Name, a);                                                                                     \
	}

HOFERLAB_UNARY_BUILDER(sin, Sin, std::sin)
HOFERLAB_UNARY_BUILDER(cos, Cos, std::cos)
HOFERLAB_UNARY_BUILDER(exp, Exp, std::exp)

#undef HOFERLAB_UNARY_BUILDER

Expression log(const Expression& a)
{
	if (a.is_constant())
	{
		if (a.node().value <= 0)
			throw DomainError("log of a nonpositive constant");
		return constant(std::log(a.node().value));
	}
	return unary(Op::Log, a);
}

Expression sqrt(const Expression& a)
{
	if (a.is_constant())
	{
		if (a.node().value < 0)
			throw DomainError("sqrt of a negative constant");
		return constant(std::sqrt(a.node().value));
	}
	return unary(Op::Sqrt, a);
}

Expression bump(const Expression& arg, double inner, double outer, double center, int order)
{
	if (!(0 <= inner && inner < outer))
		throw PreconditionError("smoothstep requires 0 <= inner < outer");
	if (order < 0)
		throw PreconditionError("negative cutoff order");
	if (arg.is_constant())
		return constant(bump_derivative(arg.node().value, inner, outer, center, order));
	return raw_cutoff(Op::Bump, arg, {inner, outer, center, order});
}

Expression step(const Expression& arg, double lo, double hi, int order)
{
	if (!(lo < hi))
		throw PreconditionError("step requires lo < hi");
	if (order < 0)
		throw PreconditionError("negative cutoff order");
	if (arg.is_constant())
		return constant(step_derivative(arg.node().value, lo, hi, order));
	return raw_cutoff(Op::Step, arg, {lo, hi, 0, order});
}

// ---------------------------------------------------------------------------
// Differentiation and substitution

Expression diff(const Expression& e, Var v)
{
	if (v.kind == VarKind::T)
		v = Var::t();
	Memo<Expression> d([v](const NodePtr& p, Memo<Expression>& self) -> Expression {
		const Node& n = *p;
		auto L = [&] { return Expression(n.lhs); };
		auto R = [&] { return Expression(n.rhs); };
		switch (n.op)
		{
		case Op::Constant: return constant(0);
		case Op::Variable: return constant(n.var == v ? 1.0 : 0.0);
		case Op::Add: return add(self(n.lhs), self(n.rhs));
		case Op::Sub: return sub(self(n.lhs), self(n.rhs));
		case Op::Mul: return add(mul(self(n.lhs), R()), mul(L(), self(n.rhs)));
		case Op::Div:
		{
			Expression du = self(n.lhs);
			Expression dv = self(n.rhs);
			if (dv.is_constant(0))
				return div(du, R());
			return sub(div(du, R()), div(mul(L(), dv), pow(R(), 2)));
		}
		case Op::Neg: return neg(self(n.lhs));
		case Op::Pow:
			return mul(mul(constant(n.exponent), pow(L(), n.exponent - 1)), self(n.lhs));
		case Op::Sin: return mul(cos(L()), self(n.lhs));
		case Op::Cos: return neg(mul(sin(L()), self(n.lhs)));
		case Op::Exp: return mul(exp(L()), self(n.lhs));
		case Op::Log: return div(self(n.lhs), L());
		case Op::Sqrt: return div(self(n.lhs), mul(constant(2), sqrt(L())));
		case Op::Bump:
		{
			Expression du = self(n.lhs);
			if (du.is_constant(0))
				return constant(0);
			const auto& c = n.cutoff;
			return mul(bump(L(), c.a, c.b, c.center, c.order + 1), du);
		}
		case Op::Step:
		{
			Expression du = self(n.lhs);
			if (du.is_constant(0))
				return constant(0);
			const auto& c = n.cutoff;
			return mul(step(L(), c.a, c.b, c.order + 1), du);
		}
		}
		throw Error("unreachable");
	});
	return d(e.ptr());
}

Expression diff_t(const Expression& e, int order, int max_order)
{
	if (order < 0 || order > max_order)
		throw PreconditionError("time-derivative order " + std::to_string(order) + " outside [0, " +
		                        std::to_string(max_order) + "]");
	Expression r = e;
	for (int i = 0; i < order; ++i)
		r = diff(r, Var::t());
	return r;
}

Expression substitute(const Expression& e, const std::map<Var, Expression>& replacements)
{
	Memo<Expression> s([&](const NodePtr& p, Memo<Expression>& self) -> Expression {
		const Node& n = *p;
		if (n.op == Op::Constant)
			return Expression(p);
		if (n.op == Op::Variable)
		{
			auto it = replacements.find(n.var);
			return it == replacements.end() ? Expression(p) : it->second;
		}
		const Expression l = self(n.lhs);
		const Expression r = n.rhs ? self(n.rhs) : Expression();
		// untouched subtrees keep their identity
		if (l.ptr() == n.lhs && (!n.rhs || r.ptr() == n.rhs))
			return Expression(p);
		switch (n.op)
		{
		case Op::Add: return add(l, r);
		case Op::Sub: return sub(l, r);
		case Op::Mul: return mul(l, r);
		case Op::Div: return div(l, r);
		case Op::Neg: return neg(l);
		case Op::Pow: return pow(l, n.exponent);
		case Op::Sin: return sin(l);
		case Op::Cos: return cos(l);
		case Op::Exp: return exp(l);
		case Op::Log: return log(l);
		case Op::Sqrt: return sqrt(l);
		case Op::Bump: return bump(l, n.cutoff.a, n.cutoff.b, n.cutoff.center, n.cutoff.order);
		case Op::Step: return step(l, n.cutoff.a, n.cutoff.b, n.cutoff.order);
		default: break;
		}
		throw Error("unreachable");
	});
	return s(e.ptr());
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser
{
public:
	Parser(std::string_view src, const ParseOptions& opt) : src_(src), opt_(opt) {}

	Expression run()
	{
		skip_ws();
		Expression e = parse_sum();
		skip_ws();
		if (pos_ != src_.size())
			throw SyntaxError(pos_, std::string("unexpected '") + src_[pos_] + "'");
		return e;
	}

private:
	std::string_view src_;
	ParseOptions opt_;
	std::size_t pos_ = 0;

	void skip_ws()
	{
		while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
			++pos_;
	}

	bool peek(char c)
	{
		skip_ws();
		return pos_ < src_.size() && src_[pos_] == c;
	}

	bool accept(char c)
	{
		if (!peek(c))
			return false;
		++pos_;
		return true;
	}

	void expect(char c)
	{
		if (!accept(c))
		{
			if (pos_ >= src_.size())
				throw SyntaxError(pos_, std::string("expected '") + c + "' but input ended");
			throw SyntaxError(pos_, std::string("expected '") + c + "'");
		}
	}

	static bool is_digit(char c) { return c >= '0' && c <= '9'; }
	static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
	static bool is_ident(char c) { return is_ident_start(c) || is_digit(c); }

	Expression parse_sum()
	{
		Expression e = parse_product();
		for (;;)
		{
			if (accept('+'))
				e = binary(Op::Add, e, parse_product());
			else if (accept('-'))
				e = binary(Op::Sub, e, parse_product());
			else
				return e;
		}
	}

	Expression parse_product()
	{
		Expression e = parse_power();
		for (;;)
		{
			if (accept('*'))
				e = binary(Op::Mul, e, parse_power());
			else if (accept('/'))
				e = binary(Op::Div, e, parse_power());
			else
				return e;
		}
	}

	Expression parse_power()
	{
		Expression e = parse_unary();
		while (accept('^'))
			e = raw_pow(e, parse_integer_exponent());
		return e;
	}

	int parse_integer_exponent()
	{
		skip_ws();
		const std::size_t start = pos_;
		bool negative = false;
		if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+'))
		{
			negative = src_[pos_] == '-';
			++pos_;
		}
		skip_ws();
		const std::size_t digits = pos_;
		while (pos_ < src_.size() && is_digit(src_[pos_]))
			++pos_;
		if (digits == pos_)
			throw SyntaxError(digits, "expected an integer exponent");
		if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
			throw SyntaxError(start, "exponent must be an integer literal");
		int k = 0;
		auto [p, ec] = std::from_chars(src_.data() + digits, src_.data() + pos_, k);
		if (ec != std::errc())
			throw SyntaxError(digits, "exponent out of range");
		return negative ? -k : k;
	}

	Expression parse_unary()
	{
		skip_ws();
		if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+'))
		{
			const bool minus = src_[pos_] == '-';
			++pos_;
			skip_ws();
			// a sign directly applied to a numeric literal is part of the literal
			if (minus && pos_ < src_.size() && (is_digit(src_[pos_]) || src_[pos_] == '.'))
				return constant(-parse_number());
			Expression inner = parse_unary();
			return minus ? unary(Op::Neg, inner) : inner;
		}
		return parse_primary();
	}

	double parse_number()
	{
		const std::size_t start = pos_;
		while (pos_ < src_.size() && (is_digit(src_[pos_]) || src_[pos_] == '.'))
			++pos_;
		if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E'))
		{
			std::size_t q = pos_ + 1;
			if (q < src_.size() && (src_[q] == '+' || src_[q] == '-'))
				++q;
			if (q < src_.size() && is_digit(src_[q]))
			{
				pos_ = q;
				while (pos_ < src_.size() && is_digit(src_[pos_]))
					++pos_;
			}
		}
		double v = 0;
		auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
		if (ec != std::errc() || p != src_.data() + pos_)
			throw SyntaxError(start, "malformed number");
		return v;
	}

	Expression parse_primary()
	{
		skip_ws();
		if (pos_ >= src_.size())
			throw SyntaxError(pos_, "unexpected end of input");
		const char c = src_[pos_];
		if (is_digit(c) || c == '.')
			return constant(parse_number());
		if (c == '(')
		{
			++pos_;
			Expression e = parse_sum();
			expect(')');
			return e;
		}
		if (is_ident_start(c))
		{
			const std::size_t start = pos_;
			while (pos_ < src_.size() && is_ident(src_[pos_]))
				++pos_;
			const std::string name(src_.substr(start, pos_ - start));
			if (peek('('))
				return parse_call(name, start);
			return identifier(name, start);
		}
		throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
	}

	Expression identifier(const std::string& name, std::size_t at)
	{
		if (name == "t")
			return variable(Var::t());
		if (name == "pi")
			return constant(std::numbers::pi);
		if (name == "x")
			return variable(Var::x(1));
		if (name == "y")
			return variable(Var::y(1));
		if ((name[0] == 'x' || name[0] == 'y') && name.size() > 1)
		{
			int idx = 0;
			auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
			if (ec == std::errc() && p == name.data() + name.size() && name[1] != '0' && idx >= 1 &&
			    idx <= opt_.pairs)
				return variable(name[0] == 'x' ? Var::x(idx) : Var::y(idx));
		}
		throw UnknownIdentifier(at, name);
	}

	double constant_argument()
	{
		skip_ws();
		const std::size_t at = pos_;
		Expression e = parse_sum();
		if (e.depends_on_time() || e.depends_on_space())
			throw SyntaxError(at, "cutoff parameter must be a constant");
		return evaluate(e, {}, 0.0);
	}

	int order_argument()
	{
		skip_ws();
		const std::size_t at = pos_;
		const double v = constant_argument();
		if (v < 0 || v != std::floor(v) || v > 31)
			throw SyntaxError(at, "cutoff order must be a small nonnegative integer");
		return int(v);
	}

	Expression parse_call(const std::string& name, std::size_t at)
	{
		expect('(');
		auto one = [&](Op op) {
			Expression a = parse_sum();
			expect(')');
			// raw node: keeps "sin(2)" a call rather than a folded constant
			return unary(op, a);
		};
		if (name == "sin")
			return one(Op::Sin);
		if (name == "cos")
			return one(Op::Cos);
		if (name == "exp")
			return one(Op::Exp);
		if (name == "log")
			return one(Op::Log);
		if (name == "sqrt")
			return one(Op::Sqrt);
		if (name == "smoothstep" || name == "smoothstep_d")
		{
			Expression arg = parse_sum();
			expect(',');
			CutoffParams p;
			p.a = constant_argument();
			expect(',');
			p.b = constant_argument();
			if (accept(','))
				p.center = constant_argument();
			if (name == "smoothstep_d")
			{
				expect(',');
				p.order = order_argument();
			}
			expect(')');
			if (!(0 <= p.a && p.a < p.b))
				throw SyntaxError(at, "smoothstep requires 0 <= inner < outer");
			return raw_cutoff(Op::Bump, arg, p);
		}
		if (name == "step" || name == "step_d")
		{
			Expression arg = parse_sum();
			expect(',');
			CutoffParams p;
			p.a = constant_argument();
			expect(',');
			p.b = constant_argument();
			if (name == "step_d")
			{
				expect(',');
				p.order = order_argument();
			}
			expect(')');
			if (!(p.a < p.b))
				throw SyntaxError(at, "step requires lo < hi");
			return raw_cutoff(Op::Step, arg, p);
		}
		throw UnknownIdentifier(at, name);
	}
};

// Printer precedence levels
constexpr int kSum = 1, kProduct = 2, kPower = 3, kUnary = 4, kAtom = 5;

std::string number(double v)
{
	if (!std::isfinite(v))
		throw FormatError("cannot print a non-finite constant");
	char buf[64];
	auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
	return std::string(buf, p);
}

int level(const Node& n)
{
	switch (n.op)
	{
	case Op::Add:
	case Op::Sub: return kSum;
	case Op::Mul:
	case Op::Div: return kProduct;
	case Op::Pow: return kPower;
	case Op::Neg: return kUnary;
	case Op::Constant: return (n.value < 0 || std::signbit(n.value)) ? kUnary : kAtom;
	default: return kAtom;
	}
}

void print_node(const Node& n, int min_level, std::string& out);

void print_child(const NodePtr& c, int min_level, std::string& out)
{
	if (level(*c) < min_level)
	{
		out += '(';
		print_node(*c, kSum, out);
		out += ')';
	}
	else
		print_node(*c, min_level, out);
}

void print_var(Var v, std::string& out)
{
	if (v.kind == VarKind::T)
		out += 't';
	else
		out += (v.kind == VarKind::X ? "x" : "y") + std::to_string(v.index);
}

void print_node(const Node& n, int, std::string& out)
{
	switch (n.op)
	{
	case Op::Constant: out += number(n.value); return;
	case Op::Variable: print_var(n.var, out); return;
	case Op::Add:
	case Op::Sub:
		print_child(n.lhs, kSum, out);
		out += n.op == Op::Add ? " + " : " - ";
		print_child(n.rhs, kProduct, out);
		return;
	case Op::Mul:
	case Op::Div:
		print_child(n.lhs, kProduct, out);
		out += n.op == Op::Mul ? "*" : "/";
		print_child(n.rhs, kPower, out);
		return;
	case Op::Pow:
		print_child(n.lhs, kPower, out);
		out += '^';
		out += std::to_string(n.exponent);
		return;
	case Op::Neg:
		out += '-';
		if (n.lhs->op == Op::Constant)
		{
			// "-2" would read back as a single negative literal
			out += '(';
			print_node(*n.lhs, kSum, out);
			out += ')';
		}
		else
			print_child(n.lhs, kUnary, out);
		return;
	case Op::Sin:
	case Op::Cos:
	case Op::Exp:
	case Op::Log:
	case Op::Sqrt:
	{
		static const char* names[] = {"sin", "cos", "exp", "log", "sqrt"};
		out += names[int(n.op) - int(Op::Sin)];
		out += '(';
		print_node(*n.lhs, kSum, out);
		out += ')';
		return;
	}
	case Op::Bump:
	case Op::Step:
	{
		const auto& c = n.cutoff;
		const bool bump = n.op == Op::Bump;
		out += bump ? "smoothstep" : "step";
		if (c.order)
			out += "_d";
		out += '(';
		print_node(*n.lhs, kSum, out);
		out += ", " + number(c.a) + ", " + number(c.b);
		if (bump)
			out += ", " + number(c.center);
		if (c.order)
			out += ", " + std::to_string(c.order);
		out += ')';
		return;
	}
	}
}

} // namespace

Expression parse(std::string_view source, const ParseOptions& options) { return Parser(source, options).run(); }

std::string print(const Expression& e)
{
	std::string out;
	print_node(e.node(), kSum, out);
	return out;
}

// ---------------------------------------------------------------------------
// Evaluation

Program::Program(const Expression& e) : Program(std::span<const Expression>(&e, 1)) {}

Program::Program(std::span<const Expression> outputs)
{
	using Key = std::tuple<int, int, int, std::uint64_t, int, int, CutoffParams>;
	std::map<Key, int> interned;
	std::unordered_map<const Node*, int> seen;

	std::function<int(const NodePtr&)> emit = [&](const NodePtr& p) -> int {
		if (auto it = seen.find(p.get()); it != seen.end())
			return it->second;
		const Node& n = *p;
		Instr ins;
		ins.op = n.op;
		if (n.lhs)
			ins.lhs = emit(n.lhs);
		if (n.rhs)
			ins.rhs = emit(n.rhs);
		if (n.op == Op::Constant)
			ins.value = n.value;
		if (n.op == Op::Variable)
		{
			ins.slot = n.var.slot();
			if (n.var.kind != VarKind::T)
				max_pair_ = std::max(max_pair_, n.var.index);
		}
		if (n.op == Op::Pow)
			ins.exponent = n.exponent;
		if (n.op == Op::Bump || n.op == Op::Step)
			ins.cutoff = n.cutoff;
		Key key{int(ins.op), ins.lhs, ins.rhs, std::bit_cast<std::uint64_t>(ins.value), ins.slot, ins.exponent,
		        ins.cutoff};
		auto [it, inserted] = interned.emplace(key, int(code_.size()));
		if (inserted)
		{
			const bool timed = (n.op == Op::Variable && n.var.kind == VarKind::T) || (ins.lhs >= 0 && timed_[ins.lhs]) ||
			                   (ins.rhs >= 0 && timed_[ins.rhs]);
			code_.push_back(ins);
			timed_.push_back(timed ? 1 : 0);
		}
		seen.emplace(p.get(), it->second);
		return it->second;
	};
	for (const Expression& e : outputs)
		outputs_.push_back(emit(e.ptr()));
}

namespace {

inline double apply(const Op op, const double value, const int slot, const int exponent, const CutoffParams& cut,
                    const double a, const double b, std::span<const double> point, const double t)
{
	switch (op)
	{
	case Op::Constant: return value;
	case Op::Variable: return slot < 0 ? t : point[slot];
	case Op::Add: return a + b;
	case Op::Sub: return a - b;
	case Op::Mul: return a * b;
	case Op::Div:
		if (b == 0)
			throw DomainError("division by zero");
		return a / b;
	case Op::Neg: return -a;
	case Op::Pow: return ipow(a, exponent);
	case Op::Sin: return std::sin(a);
	case Op::Cos: return std::cos(a);
	case Op::Exp: return std::exp(a);
	case Op::Log:
		if (a <= 0)
			throw DomainError("log of a nonpositive value");
		return std::log(a);
	case Op::Sqrt:
		if (a < 0)
			throw DomainError("sqrt of a negative value");
		return std::sqrt(a);
	case Op::Bump: return bump_derivative(a, cut.a, cut.b, cut.center, cut.order);
	case Op::Step: return step_derivative(a, cut.a, cut.b, cut.order);
	}
	return 0.0;
}

} // namespace

void Program::check_point(std::size_t size) const
{
	if (size < std::size_t(2 * max_pair_))
		throw PreconditionError("point has " + std::to_string(size) + " coordinates but the expression uses " +
		                        std::to_string(2 * max_pair_));
}

void Program::run(std::span<const double> point, double t, std::span<double> out, std::vector<double>& reg) const
{
	check_point(point.size());
	reg.resize(code_.size());
	for (std::size_t i = 0; i < code_.size(); ++i)
	{
		const Instr& c = code_[i];
		const double a = c.lhs >= 0 ? reg[c.lhs] : 0.0;
		const double b = c.rhs >= 0 ? reg[c.rhs] : 0.0;
		reg[i] = apply(c.op, c.value, c.slot, c.exponent, c.cutoff, a, b, point, t);
	}
	for (std::size_t k = 0; k < outputs_.size() && k < out.size(); ++k)
		out[k] = reg[outputs_[k]];
}

BatchProgram::BatchProgram(const Program& program, std::span<const double> points, int dimension)
    : prog_(program), points_(points), dimension_(dimension)
{
	if (dimension <= 0 || points.size() % std::size_t(dimension) != 0)
		throw PreconditionError("point buffer does not match the dimension");
	prog_.check_point(std::size_t(dimension));
	n_ = points.size() / std::size_t(dimension);
	const auto& code = prog_.code_;
	const std::size_t m = code.size();

	// static registers read by a time-dependent instruction or an output are cached per point
	std::vector<char> needed(m, 0);
	for (std::size_t i = 0; i < m; ++i)
	{
		if (!prog_.timed_[i])
			continue;
		dynamic_.push_back(int(i));
		for (int arg : {code[i].lhs, code[i].rhs})
			if (arg >= 0 && !prog_.timed_[arg])
				needed[arg] = 1;
	}
	for (int o : prog_.outputs_)
		if (!prog_.timed_[o])
			needed[o] = 1;
	for (std::size_t i = 0; i < m; ++i)
		if (needed[i])
			cached_.push_back(int(i));

	cache_.resize(cached_.size() * n_);
	std::vector<double> reg(m);
	for (std::size_t j = 0; j < n_; ++j)
	{
		const auto pt = points_.subspan(j * std::size_t(dimension_), std::size_t(dimension_));
		for (std::size_t i = 0; i < m; ++i)
		{
			if (prog_.timed_[i])
				continue;
			const auto& c = code[i];
			const double a = c.lhs >= 0 ? reg[c.lhs] : 0.0;
			const double b = c.rhs >= 0 ? reg[c.rhs] : 0.0;
			reg[i] = apply(c.op, c.value, c.slot, c.exponent, c.cutoff, a, b, pt, 0.0);
		}
		for (std::size_t s = 0; s < cached_.size(); ++s)
			cache_[s * n_ + j] = reg[cached_[s]];
	}
}

void BatchProgram::run(double t, std::vector<double>& out) const
{
	const auto& code = prog_.code_;
	const std::size_t outs = prog_.outputs_.size();
	out.resize(outs * n_);
	std::vector<double> reg(code.size());
	for (std::size_t j = 0; j < n_; ++j)
	{
		const auto pt = points_.subspan(j * std::size_t(dimension_), std::size_t(dimension_));
		for (std::size_t s = 0; s < cached_.size(); ++s)
			reg[cached_[s]] = cache_[s * n_ + j];
		for (int i : dynamic_)
		{
			const auto& c = code[i];
			const double a = c.lhs >= 0 ? reg[c.lhs] : 0.0;
			const double b = c.rhs >= 0 ? reg[c.rhs] : 0.0;
			reg[i] = apply(c.op, c.value, c.slot, c.exponent, c.cutoff, a, b, pt, t);
		}
		for (std::size_t k = 0; k < outs; ++k)
			out[k * n_ + j] = reg[prog_.outputs_[k]];
	}
}

double Program::operator()(std::span<const double> point, double t) const
{
	std::vector<double> reg;
	double v = 0;
	run(point, t, std::span<double>(&v, 1), reg);
	return v;
}

double evaluate(const Expression& e, std::span<const double> point, double t) { return Program(e)(point, t); }

std::vector<double> evaluate(const Expression& e, std::span<const double> points, int dimension, double t)
{
	if (dimension <= 0 || points.size() % std::size_t(dimension) != 0)
		throw PreconditionError("point buffer does not match the dimension");
	if (2 * e.max_pair_index() > dimension)
		throw PreconditionError("expression references coordinates beyond the declared dimension");
	Program prog(e);
	std::vector<double> out(points.size() / dimension);
	std::vector<double> reg;
	for (std::size_t i = 0; i < out.size(); ++i)
		prog.run(points.subspan(i * dimension, dimension), t, std::span<double>(&out[i], 1), reg);
	return out;
}

} // namespace hoferlab::expr
