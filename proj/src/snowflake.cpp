#include "hoferlab/snowflake.hpp"

#include "hoferlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace hoferlab::snowflake {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double power(double w, double alpha)
{
	if (std::isinf(w))
		return kInf;
	return w == 0 ? 0.0 : std::pow(w, alpha);
}

double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1p-53; }

std::vector<double> default_weights(int order, std::vector<double> w)
{
	if (w.empty())
		w.assign(static_cast<std::size_t>(order), 0.0);
	return w;
}

} // namespace

WeightedGroup::WeightedGroup(std::vector<std::vector<int>> table, std::vector<double> weights, bool norm_mode)
    : table_(std::move(table)), weights_(std::move(weights))
{
	const int n = order();
	if (n < 1)
		throw PreconditionError("empty group table");
	for (const auto& row : table_)
	{
		if (int(row.size()) != n)
			throw PreconditionError("multiplication table must be square");
		for (int v : row)
			if (v < 0 || v >= n)
				throw PreconditionError("table entry out of range");
	}
	if (int(weights_.size()) != n)
		throw PreconditionError("one weight per element");
	for (double w : weights_)
		if (std::isnan(w) || w < 0)
			throw PreconditionError("weights must be >= 0");

	identity_ = -1;
	for (int e = 0; e < n && identity_ < 0; ++e)
	{
		bool ok = true;
		for (int a = 0; a < n && ok; ++a)
			ok = table_[e][a] == a && table_[a][e] == a;
		if (ok)
			identity_ = e;
	}
	if (identity_ < 0)
		throw PreconditionError("table has no identity");
	inverse_.assign(static_cast<std::size_t>(n), -1);
	for (int a = 0; a < n; ++a)
		for (int b = 0; b < n; ++b)
			if (table_[a][b] == identity_ && table_[b][a] == identity_)
			{
				inverse_[a] = b;
				break;
			}
	if (std::count(inverse_.begin(), inverse_.end(), -1))
		throw PreconditionError("table has an element without inverse");
	if (n <= 64)
		for (int a = 0; a < n; ++a)
			for (int b = 0; b < n; ++b)
				for (int c = 0; c < n; ++c)
					if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
						throw PreconditionError("table is not associative");
	if (norm_mode && weights_[identity_] != 0)
		throw PreconditionError("norm mode requires psi(identity) = 0");
}

WeightedGroup WeightedGroup::cyclic(int n, std::vector<double> weights)
{
	if (n < 1)
		throw PreconditionError("cyclic group order must be >= 1");
	std::vector<std::vector<int>> t(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
	for (int a = 0; a < n; ++a)
		for (int b = 0; b < n; ++b)
			t[a][b] = (a + b) % n;
	return WeightedGroup(std::move(t), default_weights(n, std::move(weights)));
}

WeightedGroup WeightedGroup::symmetric(int letters, std::vector<double> weights)
{
	if (letters != 3 && letters != 4)
		throw PreconditionError("symmetric groups on 3 or 4 letters only");
	std::vector<std::vector<int>> perms;
	std::vector<int> p(static_cast<std::size_t>(letters));
	std::iota(p.begin(), p.end(), 0);
	do
		perms.push_back(p);
	while (std::next_permutation(p.begin(), p.end()));
	const int n = int(perms.size());
	auto index = [&](const std::vector<int>& q) {
		return int(std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
	};
	std::vector<std::vector<int>> t(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
	for (int a = 0; a < n; ++a)
		for (int b = 0; b < n; ++b)
		{
			// (ab)(i) = a(b(i))
			std::vector<int> q(static_cast<std::size_t>(letters));
			for (int i = 0; i < letters; ++i)
				q[i] = perms[a][perms[b][i]];
			t[a][b] = index(q);
		}
	return WeightedGroup(std::move(t), default_weights(n, std::move(weights)));
}

WeightedGroup WeightedGroup::dihedral4(std::vector<double> weights)
{
	std::vector<std::vector<int>> t(8, std::vector<int>(8));
	for (int a = 0; a < 8; ++a)
		for (int b = 0; b < 8; ++b)
		{
			const int i = a % 4, f = a / 4, j = b % 4, g = b / 4;
			// r^i s^f r^j s^g = r^(i +- j) s^(f+g)
			const int rot = ((f ? i - j : i + j) % 4 + 4) % 4;
			t[a][b] = rot + 4 * (f ^ g);
		}
	return WeightedGroup(std::move(t), default_weights(8, std::move(weights)));
}

WeightedGroup WeightedGroup::named(const std::string& name, std::vector<double> weights)
{
	if (name == "S3")
		return symmetric(3, std::move(weights));
	if (name == "S4")
		return symmetric(4, std::move(weights));
	if (name == "D4")
		return dihedral4(std::move(weights));
	if (name.size() > 1 && name[0] == 'Z')
	{
		int n = 0;
		for (std::size_t i = 1; i < name.size(); ++i)
		{
			if (!std::isdigit(static_cast<unsigned char>(name[i])) || n > 1000)
				throw PreconditionError("unknown group '" + name + "'");
			n = 10 * n + (name[i] - '0');
		}
		return cyclic(n, std::move(weights));
	}
	throw PreconditionError("unknown group '" + name + "'");
}

WeightedGroup WeightedGroup::with_weights(std::vector<double> weights) const
{
	return WeightedGroup(table_, std::move(weights));
}

std::vector<std::vector<int>> WeightedGroup::conjugacy_classes() const
{
	const int n = order();
	std::vector<int> seen(static_cast<std::size_t>(n), 0);
	std::vector<std::vector<int>> classes;
	for (int a = 0; a < n; ++a)
	{
		if (seen[a])
			continue;
		std::set<int> cls;
		for (int h = 0; h < n; ++h)
			cls.insert(multiply(multiply(h, a), inverse(h)));
		for (int c : cls)
			seen[c] = 1;
		classes.emplace_back(cls.begin(), cls.end());
	}
	return classes;
}

nlohmann::json WeightedGroup::to_json() const
{
	nlohmann::json w = nlohmann::json::array();
	for (double v : weights_)
		w.push_back(std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v));
	return {{"order", order()}, {"table", table_}, {"inverse", inverse_}, {"weights", w}};
}

WeightedGroup WeightedGroup::from_json(const nlohmann::json& j)
{
	try
	{
		std::vector<double> weights;
		for (const auto& v : j.at("weights"))
			weights.push_back(v.is_string() && v.get<std::string>() == "inf" ? kInf : v.get<double>());
		if (j.contains("name"))
			return named(j.at("name").get<std::string>(), std::move(weights));
		WeightedGroup g(j.at("table").get<std::vector<std::vector<int>>>(), std::move(weights),
		                j.value("norm_mode", false));
		if (j.contains("order") && j.at("order").get<int>() != g.order())
			throw FormatError("group order does not match the table");
		if (j.contains("inverse") && j.at("inverse").get<std::vector<int>>() != g.inverse_)
			throw FormatError("inverse table is inconsistent with the multiplication table");
		return g;
	}
	catch (const nlohmann::json::exception& e)
	{
		throw FormatError(std::string("bad group JSON: ") + e.what());
	}
}

double quasi_constant(const WeightedGroup& g)
{
	const int n = g.order();
	double C = 1;
	for (int a = 0; a < n; ++a)
		for (int b = 0; b < n; ++b)
		{
			const double num = g.weight(g.multiply(a, b));
			const double den = g.weight(a) + g.weight(b);
			if (std::isinf(den))
				continue;
			if (den == 0)
			{
				if (num > 0)
					return kInf;
				continue;
			}
			C = std::max(C, num / den);
		}
	return C;
}

double alpha_for(double C) { return 1.0 / (1.0 + std::log2(C)); }

SharpResult sharp(const WeightedGroup& g)
{
	const double C = quasi_constant(g);
	if (std::isinf(C))
		throw InputNotQuasiSubadditive("psi(ab) > 0 with psi(a) + psi(b) = 0");
	SharpResult r = sharp_with_alpha(g, alpha_for(C));
	r.C = C;
	return r;
}

SharpResult sharp_with_alpha(const WeightedGroup& g, double alpha)
{
	if (!(alpha > 0 && alpha <= 1))
		throw PreconditionError("exponent must lie in (0, 1]");
	const int n = g.order();
	const int e = g.identity();
	std::vector<double> cost(static_cast<std::size_t>(n));
	for (int s = 0; s < n; ++s)
		cost[s] = power(g.weight(s), alpha);

	// Dijkstra from the identity; stepping from x by s lands on x*s.
	std::vector<double> dist(static_cast<std::size_t>(n), kInf);
	std::vector<int> prev(static_cast<std::size_t>(n), -1), letter(static_cast<std::size_t>(n), -1);
	std::vector<char> done(static_cast<std::size_t>(n), 0);
	dist[e] = 0;
	for (int it = 0; it < n; ++it)
	{
		int u = -1;
		for (int v = 0; v < n; ++v)
			if (!done[v] && (u < 0 || dist[v] < dist[u]))
				u = v;
		if (u < 0 || std::isinf(dist[u]))
			break;
		done[u] = 1;
		for (int s = 0; s < n; ++s)
		{
			const int v = g.multiply(u, s);
			const double d = dist[u] + cost[s];
			if (d < dist[v])
			{
				dist[v] = d;
				prev[v] = u;
				letter[v] = s;
			}
		}
	}

	auto word_to = [&](int target) {
		std::vector<int> w;
		for (int v = target; v != e; v = prev[v])
			w.push_back(letter[v]);
		std::reverse(w.begin(), w.end());
		return w;
	};

	SharpResult r;
	r.C = std::pow(2.0, 1.0 / alpha - 1.0);
	r.alpha = alpha;
	r.sharp.resize(static_cast<std::size_t>(n));
	r.witnesses.resize(static_cast<std::size_t>(n));
	for (int a = 0; a < n; ++a)
	{
		if (a == e)
			continue;
		r.sharp[a] = std::isinf(dist[a]) ? kInf : std::pow(dist[a], 1.0 / alpha);
		if (!std::isinf(dist[a]))
			r.witnesses[a] = word_to(a);
	}

	// Words for the identity are nonempty: a single letter e, or s followed by a word for s^-1.
	double best = cost[e];
	std::vector<int> word{e};
	for (int s = 0; s < n; ++s)
	{
		if (s == e)
			continue;
		const double d = cost[s] + dist[g.inverse(s)];
		if (d < best)
		{
			best = d;
			word = word_to(g.inverse(s));
			word.insert(word.begin(), s);
		}
	}
	r.sharp[e] = std::isinf(best) ? kInf : std::pow(best, 1.0 / alpha);
	r.witnesses[e] = std::isinf(best) ? std::vector<int>{} : word;
	return r;
}

std::vector<double> brute_force_sharp(const WeightedGroup& g, int maxN, std::optional<double> alpha)
{
	const int n = g.order();
	if (maxN < 1)
		throw PreconditionError("maxN must be >= 1");
	if (maxN * std::log10(double(n)) > 7 + 1e-12)
		throw BudgetExceeded("order^maxN exceeds 1e7 words");
	double a = 1;
	if (alpha)
		a = *alpha;
	else
	{
		const double C = quasi_constant(g);
		if (std::isinf(C))
			throw InputNotQuasiSubadditive("psi(ab) > 0 with psi(a) + psi(b) = 0");
		a = alpha_for(C);
	}
	std::vector<double> cost(static_cast<std::size_t>(n));
	for (int s = 0; s < n; ++s)
		cost[s] = power(g.weight(s), a);
	std::vector<double> best(static_cast<std::size_t>(n), kInf);

	// depth-first over all words, carrying the running product and cost sum
	auto recurse = [&](auto&& self, int product, double sum, int depth) -> void {
		for (int s = 0; s < n; ++s)
		{
			const int p = g.multiply(product, s);
			const double c = sum + cost[s];
			best[p] = std::min(best[p], c);
			if (depth + 1 < maxN)
				self(self, p, c, depth + 1);
		}
	};
	recurse(recurse, g.identity(), 0.0, 0);
	for (double& b : best)
		b = std::isinf(b) ? kInf : std::pow(b, 1.0 / a);
	return best;
}

nlohmann::json SharpResult::to_json() const
{
	auto num = [](double v) { return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v); };
	nlohmann::json s = nlohmann::json::array();
	for (double v : sharp)
		s.push_back(num(v));
	return {{"C", num(C)}, {"alpha", alpha}, {"sharp", s}, {"witnesses", witnesses}};
}

DkResult build_dk_style_weight(int k, const WeightedGroup& base)
{
	if (k < 0)
		throw PreconditionError("k must be >= 0");
	const double C = quasi_constant(base);
	const double bound = std::ldexp(1.0, k);
	if (!(C <= bound * (1 + 1e-12)))
		throw QuasiTriangleViolated("measured constant exceeds 2^k");
	DkResult r;
	r.k = k;
	r.measured_C = C;
	r.result = sharp_with_alpha(base, 1.0 / (k + 1));
	r.sandwich = sandwich_holds(base, r.result, std::ldexp(1.0, -2 * (k + 1)));
	if (C == bound)
	{
		const SharpResult generic = sharp(base);
		bool same = std::abs(generic.alpha - r.result.alpha) <= 1e-15;
		for (int a = 0; a < base.order() && same; ++a)
		{
			const double x = generic.sharp[a], y = r.result.sharp[a];
			same = x == y || std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y));
		}
		r.agreement = same;
	}
	return r;
}

nlohmann::json DkResult::to_json() const
{
	nlohmann::json j = {{"k", k}, {"measured_C", measured_C}, {"sandwich", sandwich}, {"result", result.to_json()}};
	if (agreement)
		j["agreement"] = *agreement;
	return j;
}

bool sandwich_holds(const WeightedGroup& g, const SharpResult& r, double low_factor, double tol)
{
	for (int a = 0; a < g.order(); ++a)
	{
		const double w = g.weight(a), s = r.sharp[a];
		if (std::isinf(w))
			continue;
		const double slack = tol * std::max(1.0, w);
		if (s > w + slack || low_factor * w > s + slack)
			return false;
	}
	return true;
}

bool beta_subadditive(const WeightedGroup& g, const std::vector<double>& values, double beta, double tol)
{
	const int n = g.order();
	for (int a = 0; a < n; ++a)
		for (int b = 0; b < n; ++b)
		{
			const double lhs = power(values[g.multiply(a, b)], beta);
			const double rhs = power(values[a], beta) + power(values[b], beta);
			if (std::isinf(rhs))
				continue;
			if (lhs > rhs + tol * std::max(1.0, rhs))
				return false;
		}
	return true;
}

bool zero_sets_match(const WeightedGroup& g, const std::vector<double>& values)
{
	for (int a = 0; a < g.order(); ++a)
		if ((g.weight(a) == 0) != (values[a] == 0))
			return false;
	return true;
}

bool is_class_function(const WeightedGroup& g, const std::vector<double>& values, double tol)
{
	for (const auto& cls : g.conjugacy_classes())
		for (int c : cls)
			if (std::abs(values[c] - values[cls.front()]) > tol * std::max(1.0, std::abs(values[cls.front()])))
				return false;
	return true;
}

bool is_symmetric(const WeightedGroup& g, const std::vector<double>& values, double tol)
{
	for (int a = 0; a < g.order(); ++a)
		if (std::abs(values[a] - values[g.inverse(a)]) > tol * std::max(1.0, std::abs(values[a])))
			return false;
	return true;
}

std::vector<double> random_weights(const WeightedGroup& g, std::mt19937_64& rng, bool class_function)
{
	const int n = g.order();
	const int e = g.identity();

	// Sometimes vanish on a proper normal subgroup, which keeps C finite.
	std::vector<char> zero(static_cast<std::size_t>(n), 0);
	zero[e] = 1;
	if (n > 2 && rng() % 4 == 0)
	{
		const int x = int(rng() % std::uint64_t(n));
		std::set<int> sub{e};
		for (int h = 0; h < n; ++h)
			sub.insert(g.multiply(g.multiply(h, x), g.inverse(h)));
		for (bool grew = true; grew;)
		{
			grew = false;
			const std::vector<int> cur(sub.begin(), sub.end());
			for (int a : cur)
				for (int b : cur)
					grew |= sub.insert(g.multiply(a, b)).second;
		}
		if (int(sub.size()) < n)
			for (int a : sub)
				zero[a] = 1;
	}

	std::vector<double> w(static_cast<std::size_t>(n), 0.0);
	auto draw = [&] { return 0.125 + 2.0 * unit(rng); };
	if (class_function)
	{
		for (const auto& cls : g.conjugacy_classes())
		{
			const double v = zero[cls.front()] ? 0.0 : draw();
			for (int c : cls)
				w[c] = v;
		}
	}
	else
	{
		for (int a = 0; a < n; ++a)
		{
			const int b = g.inverse(a);
			if (b < a)
				w[a] = w[b];
			else
				w[a] = zero[a] ? 0.0 : draw();
		}
	}
	// one inflated value pushes C above 1
	if (rng() % 2 == 0)
	{
		int a = int(rng() % std::uint64_t(n));
		if (!zero[a])
		{
			const double f = 1.5 + 2.0 * unit(rng);
			if (class_function)
			{
				for (const auto& cls : g.conjugacy_classes())
					if (std::find(cls.begin(), cls.end(), a) != cls.end())
						for (int c : cls)
							w[c] *= f;
			}
			else
			{
				w[a] *= f;
				if (g.inverse(a) != a)
					w[g.inverse(a)] *= f;
			}
		}
	}
	return w;
}

} // namespace hoferlab::snowflake
