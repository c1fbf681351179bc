#include "hoferlab/hampath.hpp"

#include "hoferlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace hoferlab {

using expr::Expression;
using expr::Var;

void check_tiling(std::span<const Piece> pieces)
{
	if (pieces.empty())
		throw PreconditionError("a path needs at least one piece");
	if (pieces.front().t_start != 0.0 || pieces.back().t_end != 1.0)
		throw PreconditionError("pieces must start at 0 and end at 1");
	for (std::size_t i = 0; i < pieces.size(); ++i)
	{
		if (!(pieces[i].t_start < pieces[i].t_end))
			throw PreconditionError("piece " + std::to_string(i) + " has t_start >= t_end");
		if (i > 0 && pieces[i].t_start != pieces[i - 1].t_end)
			throw PreconditionError("pieces " + std::to_string(i - 1) + " and " + std::to_string(i) + " do not meet");
	}
}

HamiltonianPath::HamiltonianPath(std::vector<Piece> pieces, int pairs, std::optional<Grid> domain)
    : pieces_(std::move(pieces)), pairs_(pairs), domain_(std::move(domain))
{
	if (pairs_ < 1)
		throw PreconditionError("dimension must be a positive even number");
	check_tiling(pieces_);
	for (const Piece& p : pieces_)
		if (p.hamiltonian.max_pair_index() > pairs_)
			throw PreconditionError("Hamiltonian uses coordinates beyond the path dimension");
	if (domain_ && domain_->dimension() != dimension())
		throw PreconditionError("domain grid dimension differs from the path dimension");
}

HamiltonianPath HamiltonianPath::single(Expression h, int pairs, std::optional<Grid> domain)
{
	return HamiltonianPath({Piece{0.0, 1.0, std::move(h)}}, pairs, std::move(domain));
}

std::vector<double> HamiltonianPath::breakpoints() const
{
	std::vector<double> b{0.0};
	for (const Piece& p : pieces_)
		b.push_back(p.t_end);
	return b;
}

std::size_t HamiltonianPath::piece_index(double t) const
{
	for (std::size_t i = 0; i < pieces_.size(); ++i)
		if (t < pieces_[i].t_end)
			return i;
	return pieces_.size() - 1;
}

bool HamiltonianPath::is_autonomous() const
{
	return std::none_of(pieces_.begin(), pieces_.end(),
	                    [](const Piece& p) { return p.hamiltonian.depends_on_time(); }) &&
	       std::adjacent_find(pieces_.begin(), pieces_.end(), [](const Piece& a, const Piece& b) {
		       return !(a.hamiltonian == b.hamiltonian);
	       }) == pieces_.end();
}

HamiltonianPath HamiltonianPath::with_domain(std::optional<Grid> domain) const
{
	return HamiltonianPath(pieces_, pairs_, std::move(domain));
}

nlohmann::json HamiltonianPath::to_json() const
{
	nlohmann::json j;
	j["dimension"] = dimension();
	j["pieces"] = nlohmann::json::array();
	for (const Piece& p : pieces_)
		j["pieces"].push_back({{"t0", p.t_start}, {"t1", p.t_end}, {"expr", expr::print(p.hamiltonian)}});
	if (domain_)
		j["domain"] = domain_->to_json();
	return j;
}

HamiltonianPath HamiltonianPath::from_json(const nlohmann::json& j)
{
	try
	{
		const int dim = j.at("dimension").get<int>();
		if (dim < 2 || dim % 2)
			throw FormatError("path dimension must be a positive even number");
		std::vector<Piece> pieces;
		for (const auto& p : j.at("pieces"))
			pieces.push_back(Piece{p.at("t0").get<double>(), p.at("t1").get<double>(),
			                       expr::parse(p.at("expr").get<std::string>(), {dim / 2})});
		std::optional<Grid> domain;
		if (j.contains("domain"))
			domain = Grid::from_json(j.at("domain"));
		return HamiltonianPath(std::move(pieces), dim / 2, std::move(domain));
	}
	catch (const nlohmann::json::exception& e)
	{
		throw FormatError(std::string("bad path JSON: ") + e.what());
	}
}

std::string HamiltonianPath::hash() const
{
	const std::string s = to_json().dump();
	std::uint64_t h = 1469598103934665603ull;
	for (unsigned char c : s)
	{
		h ^= c;
		h *= 1099511628211ull;
	}
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
	return buf;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd symplectic_j(int pairs)
{
	Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * pairs, 2 * pairs);
	for (int i = 0; i < pairs; ++i)
	{
		J(2 * i, 2 * i + 1) = 1;
		J(2 * i + 1, 2 * i) = -1;
	}
	return J;
}

AffineSymplectic::AffineSymplectic(Eigen::MatrixXd linear, Eigen::VectorXd shift, double tolerance)
    : linear_(std::move(linear)), shift_(std::move(shift))
{
	const auto n = shift_.size();
	if (n == 0 || n % 2 || linear_.rows() != n || linear_.cols() != n)
		throw PreconditionError("affine map needs a 2n x 2n matrix and a 2n shift");
	const Eigen::MatrixXd J = symplectic_j(int(n / 2));
	if ((linear_.transpose() * J * linear_ - J).cwiseAbs().maxCoeff() > tolerance)
		throw PreconditionError("linear part is not symplectic");
}

AffineSymplectic AffineSymplectic::identity(int pairs)
{
	return AffineSymplectic(Eigen::MatrixXd::Identity(2 * pairs, 2 * pairs), Eigen::VectorXd::Zero(2 * pairs));
}

AffineSymplectic AffineSymplectic::translation(std::span<const double> shift)
{
	Eigen::VectorXd b(Eigen::Index(shift.size()));
	for (std::size_t i = 0; i < shift.size(); ++i)
		b[Eigen::Index(i)] = shift[i];
	return AffineSymplectic(Eigen::MatrixXd::Identity(b.size(), b.size()), b);
}

AffineSymplectic AffineSymplectic::inverse() const
{
	// L^{-1} = J^{-1} L^T J = -J L^T J for symplectic L
	const Eigen::MatrixXd J = symplectic_j(pairs());
	Eigen::MatrixXd inv = -J * linear_.transpose() * J;
	Eigen::VectorXd b = -(inv * shift_);
	return AffineSymplectic(std::move(inv), std::move(b), 1e-8);
}

// ---------------------------------------------------------------------------

namespace {

Expression time_var() { return expr::variable(Var::t()); }

/// e(x, a*t + b) scaled by `factor`.
Expression affine_in_time(const Expression& e, double factor, double a, double b)
{
	Expression arg = expr::add(expr::mul(expr::constant(a), time_var()), expr::constant(b));
	Expression sub = expr::substitute(e, {{Var::t(), arg}});
	return expr::mul(expr::constant(factor), sub);
}

} // namespace

HamiltonianPath reverse(const HamiltonianPath& f)
{
	std::vector<Piece> out;
	const auto& ps = f.pieces();
	for (auto it = ps.rbegin(); it != ps.rend(); ++it)
	{
		Expression one_minus_t = expr::sub(expr::constant(1), time_var());
		Expression g = expr::neg(expr::substitute(it->hamiltonian, {{Var::t(), one_minus_t}}));
		out.push_back(Piece{1.0 - it->t_end, 1.0 - it->t_start, g});
	}
	return HamiltonianPath(std::move(out), f.pairs(), f.domain());
}

HamiltonianPath concatenate(const HamiltonianPath& first, const HamiltonianPath& second)
{
	if (first.pairs() != second.pairs())
		throw PreconditionError("cannot concatenate paths of different dimension");
	std::vector<Piece> out;
	for (const Piece& p : first.pieces())
		out.push_back(Piece{p.t_start / 2, p.t_end / 2, affine_in_time(p.hamiltonian, 2, 2, 0)});
	for (const Piece& p : second.pieces())
		out.push_back(Piece{0.5 + p.t_start / 2, 0.5 + p.t_end / 2, affine_in_time(p.hamiltonian, 2, 2, -1)});
	return HamiltonianPath(std::move(out), first.pairs(), first.domain() ? first.domain() : second.domain());
}

// ---------------------------------------------------------------------------

TimeMap::TimeMap(std::vector<Piece> pieces) : pieces_(std::move(pieces))
{
	check_tiling(pieces_);
	for (const Piece& p : pieces_)
	{
		if (p.hamiltonian.depends_on_space())
			throw PreconditionError("a time map depends on t only");
		programs_.emplace_back(p.hamiltonian);
	}
	const double s0 = (*this)(0.0), s1 = (*this)(1.0);
	if (std::abs(s0) > 1e-12 || std::abs(s1 - 1.0) > 1e-12)
		throw PreconditionError("a time map must fix 0 and 1");
	for (std::size_t i = 1; i < pieces_.size(); ++i)
	{
		const double t = pieces_[i].t_start;
		if (std::abs(programs_[i - 1]({}, t) - programs_[i]({}, t)) > 1e-12)
			throw PreconditionError("a time map must be continuous");
	}
}

TimeMap TimeMap::identity() { return TimeMap({Piece{0, 1, time_var()}}); }

TimeMap TimeMap::two_speed(double knee, double value)
{
	if (!(knee > 0 && knee < 1 && value >= 0 && value <= 1))
		throw PreconditionError("two-speed map needs 0 < knee < 1 and 0 <= value <= 1");
	using namespace expr;
	Expression first = mul(constant(value / knee), time_var());
	Expression second = add(constant(value), mul(constant((1 - value) / (1 - knee)), sub(time_var(), constant(knee))));
	return TimeMap({Piece{0, knee, first}, Piece{knee, 1, second}});
}

double TimeMap::operator()(double t) const
{
	for (std::size_t i = 0; i < pieces_.size(); ++i)
		if (t < pieces_[i].t_end || i + 1 == pieces_.size())
			return programs_[i]({}, t);
	return programs_.back()({}, t);
}

double TimeMap::preimage(double target) const
{
	double lo = 0, hi = 1;
	if ((*this)(0.0) >= target)
		return 0.0;
	// invariant: s(lo) < target <= s(hi)
	for (int it = 0; it < 2000; ++it)
	{
		const double mid = lo + (hi - lo) / 2;
		if (mid <= lo || mid >= hi)
			break;
		if ((*this)(mid) >= target)
			hi = mid;
		else
			lo = mid;
	}
	return hi;
}

HamiltonianPath reparametrize(const HamiltonianPath& f, const TimeMap& s)
{
	// s' must be nonnegative
	std::vector<Expression> derivs;
	for (const Piece& p : s.pieces())
	{
		derivs.push_back(expr::diff_t(p.hamiltonian, 1));
		expr::Program dp(derivs.back());
		constexpr int kChecks = 64;
		for (int q = 0; q <= kChecks; ++q)
		{
			const double t = p.t_start + (p.t_end - p.t_start) * q / kChecks;
			if (dp({}, t) < -1e-12)
				throw NotMonotone("time map derivative is negative at t = " + std::to_string(t));
		}
	}

	std::vector<double> cuts{0.0, 1.0};
	for (const Piece& p : s.pieces())
		cuts.push_back(p.t_start);
	const auto fb = f.breakpoints();
	for (std::size_t i = 1; i + 1 < fb.size(); ++i)
		cuts.push_back(s.preimage(fb[i]));
	std::sort(cuts.begin(), cuts.end());
	cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

	std::vector<Piece> out;
	for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
	{
		const double a = cuts[i], b = cuts[i + 1];
		const double mid = a + (b - a) / 2;
		std::size_t j = 0;
		while (j + 1 < s.pieces().size() && mid >= s.pieces()[j].t_end)
			++j;
		const Expression& sj = s.pieces()[j].hamiltonian;
		const std::size_t l = f.piece_index(s(mid));
		Expression moved = expr::substitute(f.pieces()[l].hamiltonian, {{Var::t(), sj}});
		out.push_back(Piece{a, b, expr::mul(derivs[j], moved)});
	}
	return HamiltonianPath(std::move(out), f.pairs(), f.domain());
}

// ---------------------------------------------------------------------------

HamiltonianPath conjugate(const HamiltonianPath& f, const AffineSymplectic& theta)
{
	if (theta.pairs() != f.pairs())
		throw PreconditionError("conjugating map has the wrong dimension");
	const AffineSymplectic inv = theta.inverse();
	const int d = f.dimension();
	std::map<Var, Expression> repl;
	for (int k = 0; k < d; ++k)
	{
		Expression row = expr::constant(0);
		for (int j = 0; j < d; ++j)
		{
			const double m = inv.linear()(k, j);
			if (m == 0)
				continue;
			const Var vj = j % 2 == 0 ? Var::x(j / 2 + 1) : Var::y(j / 2 + 1);
			row = expr::add(row, expr::mul(expr::constant(m), expr::variable(vj)));
		}
		row = expr::sub(row, expr::constant(-inv.shift()[k]));
		const Var vk = k % 2 == 0 ? Var::x(k / 2 + 1) : Var::y(k / 2 + 1);
		repl.emplace(vk, row);
	}
	std::vector<Piece> out;
	for (const Piece& p : f.pieces())
		out.push_back(Piece{p.t_start, p.t_end, expr::substitute(p.hamiltonian, repl)});
	return HamiltonianPath(std::move(out), f.pairs(), f.domain());
}

// ---------------------------------------------------------------------------

std::vector<double> common_division(std::span<const HamiltonianPath> paths)
{
	std::vector<double> cuts;
	for (const auto& p : paths)
	{
		auto b = p.breakpoints();
		cuts.insert(cuts.end(), b.begin(), b.end());
	}
	std::sort(cuts.begin(), cuts.end());
	cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
	return cuts;
}

HamiltonianPath refine(const HamiltonianPath& f, std::span<const double> division)
{
	std::vector<double> cuts(division.begin(), division.end());
	auto b = f.breakpoints();
	cuts.insert(cuts.end(), b.begin(), b.end());
	std::sort(cuts.begin(), cuts.end());
	cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
	std::vector<Piece> out;
	for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
	{
		const double mid = cuts[i] + (cuts[i + 1] - cuts[i]) / 2;
		out.push_back(Piece{cuts[i], cuts[i + 1], f.pieces()[f.piece_index(mid)].hamiltonian});
	}
	return HamiltonianPath(std::move(out), f.pairs(), f.domain());
}

HamiltonianPath disjoint_product(std::span<const SupportedPath> paths, const Grid& check)
{
	if (paths.empty())
		throw PreconditionError("disjoint product of no paths");
	const int pairs = paths.front().path.pairs();
	const int d = 2 * pairs;
	for (const auto& sp : paths)
	{
		if (sp.path.pairs() != pairs || int(sp.lower.size()) != d || int(sp.upper.size()) != d)
			throw PreconditionError("support boxes must match the path dimension");
		if (check.dimension() != d)
			throw PreconditionError("check grid has the wrong dimension");
	}
	// declared boxes must be pairwise disjoint (open boxes)
	for (std::size_t a = 0; a < paths.size(); ++a)
		for (std::size_t b = a + 1; b < paths.size(); ++b)
		{
			bool separated = false;
			for (int k = 0; k < d; ++k)
				if (paths[a].upper[k] <= paths[b].lower[k] || paths[b].upper[k] <= paths[a].lower[k])
					separated = true;
			if (!separated)
				throw SupportOverlap("support boxes " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
		}
	// each Hamiltonian must vanish outside its box
	auto grid = std::make_shared<const Grid>(check);
	const auto& pts = grid->points();
	for (std::size_t j = 0; j < paths.size(); ++j)
	{
		const auto& sp = paths[j];
		std::vector<char> outside(grid->size(), 0);
		for (std::size_t i = 0; i < grid->size(); ++i)
			for (int k = 0; k < d; ++k)
			{
				const double x = pts[i * d + k];
				if (x <= sp.lower[k] || x >= sp.upper[k])
					outside[i] = 1;
			}
		for (const Piece& p : sp.path.pieces())
		{
			expr::Program prog(p.hamiltonian);
			for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0})
			{
				const double t = p.t_start + frac * (p.t_end - p.t_start);
				Field fld = sample(prog, grid, t);
				const double osc = oscillation(fld);
				double leak = 0;
				for (std::size_t i = 0; i < grid->size(); ++i)
					if (outside[i])
						leak = std::max(leak, std::abs(fld.values()[i]));
				if (leak > 1e-9 * osc && leak > 0)
					throw SupportOverlap("path " + std::to_string(j) + " is nonzero outside its declared box");
			}
		}
	}

	std::vector<HamiltonianPath> plain;
	for (const auto& sp : paths)
		plain.push_back(sp.path);
	const auto cuts = common_division(plain);
	std::vector<Piece> out;
	for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
	{
		const double mid = cuts[i] + (cuts[i + 1] - cuts[i]) / 2;
		Expression sum = expr::constant(0);
		for (const auto& p : plain)
			sum = expr::add(sum, p.pieces()[p.piece_index(mid)].hamiltonian);
		out.push_back(Piece{cuts[i], cuts[i + 1], sum});
	}
	return HamiltonianPath(std::move(out), pairs, paths.front().path.domain());
}

} // namespace hoferlab
