#include "hoferlab/lengths.hpp"

#include "hoferlab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <memory>
#include <ostream>

namespace hoferlab {

using expr::Expression;

namespace quadrature {

void gauss_legendre(double a, double b, int panels, std::vector<double>& nodes, std::vector<double>& weights)
{
	static constexpr double x[5] = {-0.9061798459386639928, -0.5384693101056830910, 0.0, 0.5384693101056830910,
	                                0.9061798459386639928};
	static constexpr double w[5] = {0.2369268850561890875, 0.4786286704993664680, 0.5688888888888888889,
	                                0.4786286704993664680, 0.2369268850561890875};
	nodes.clear();
	weights.clear();
	const double h = (b - a) / panels;
	for (int p = 0; p < panels; ++p)
	{
		const double lo = a + p * h;
		const double hi = p + 1 == panels ? b : a + (p + 1) * h;
		const double c = (lo + hi) / 2, r = (hi - lo) / 2;
		for (int q = 0; q < 5; ++q)
		{
			nodes.push_back(c + r * x[q]);
			weights.push_back(r * w[q]);
		}
	}
}

int panels_for(int time_samples) { return std::max(1, (time_samples + 4) / 5); }

} // namespace quadrature

namespace {

constexpr const char* kUpperBoundNote =
    "length of the supplied path: an upper bound for the corresponding distance, not the distance itself";

void check_common(int k, int time_samples)
{
	if (k < 0 || k > expr::kDefaultMaxTimeOrder)
		throw PreconditionError("k must lie in [0, " + std::to_string(expr::kDefaultMaxTimeOrder) + "]");
	if (time_samples < 8)
		throw PreconditionError("time_samples must be >= 8 per piece");
}

/// Program whose output i is the i-th time derivative.
expr::Program derivative_program(const Expression& h, int k)
{
	std::vector<Expression> outs{h};
	for (int i = 1; i <= k; ++i)
		outs.push_back(expr::diff(outs.back(), expr::Var::t()));
	return expr::Program(outs);
}

/// Spatial functional of every derivative order at one time.
class OrderSampler
{
public:
	OrderSampler(const Expression& h, int k, std::shared_ptr<const Grid> grid,
	             std::function<double(const Field&)> functional)
	    : prog_(derivative_program(h, k)), k_(k), grid_(std::move(grid)), functional_(std::move(functional))
	{
		if (2 * prog_.max_pair_index() > grid_->dimension())
			throw PreconditionError("Hamiltonian uses coordinates beyond the grid dimension");
		batch_ = std::make_unique<expr::BatchProgram>(prog_, grid_->points(), grid_->dimension());
	}
	OrderSampler(const OrderSampler&) = delete;
	OrderSampler& operator=(const OrderSampler&) = delete;

	std::vector<double> operator()(double t)
	{
		const std::size_t n = grid_->size();
		batch_->run(t, buf_);
		std::vector<double> r(k_ + 1);
		for (int i = 0; i <= k_; ++i)
		{
			Field fld(grid_, std::vector<double>(buf_.begin() + std::ptrdiff_t(i * n), buf_.begin() + std::ptrdiff_t((i + 1) * n)));
			if (i == 0)
				margin_ok_ = margin_ok_ && support_margin_ok(fld);
			r[i] = functional_(fld);
		}
		return r;
	}

	bool margin_ok() const { return margin_ok_; }

private:
	expr::Program prog_;
	int k_;
	std::shared_ptr<const Grid> grid_;
	std::function<double(const Field&)> functional_;
	std::unique_ptr<expr::BatchProgram> batch_;
	std::vector<double> buf_;
	bool margin_ok_ = true;
};

LengthReport integrated(const HamiltonianPath& f, int k, const Grid& grid, int time_samples,
                        std::function<double(const Field&)> functional)
{
	check_common(k, time_samples);
	auto g = std::make_shared<const Grid>(grid);
	LengthReport rep;
	rep.k = k;
	rep.per_order.assign(k + 1, 0.0);
	rep.quadrature = {time_samples, "composite Gauss-Legendre (5 nodes per panel)"};
	bool margin_ok = true;
	std::vector<double> nodes, weights;
	for (const Piece& piece : f.pieces())
	{
		OrderSampler sampler(piece.hamiltonian, k, g, functional);
		quadrature::gauss_legendre(piece.t_start, piece.t_end, quadrature::panels_for(time_samples), nodes, weights);
		std::vector<double> acc(k + 1, 0.0);
		for (std::size_t q = 0; q < nodes.size(); ++q)
		{
			const auto v = sampler(nodes[q]);
			for (int i = 0; i <= k; ++i)
				acc[i] += weights[q] * v[i];
		}
		margin_ok = margin_ok && sampler.margin_ok();
		rep.per_piece.push_back(acc);
	}
	for (const auto& row : rep.per_piece)
		for (int i = 0; i <= k; ++i)
			rep.per_order[i] += row[i];
	for (double v : rep.per_order)
		rep.total += v;
	rep.notes.push_back(kUpperBoundNote);
	if (!margin_ok)
		rep.notes.push_back("warning: Hamiltonian does not vanish on the box boundary layer");
	return rep;
}

} // namespace

LengthReport length_k(const HamiltonianPath& f, int k, const Grid& grid, int time_samples)
{
	auto rep = integrated(f, k, grid, time_samples, [](const Field& fld) { return oscillation(fld); });
	rep.kind = "k";
	return rep;
}

LengthReport length_kp(const HamiltonianPath& f, int k, double p, const Grid& grid, int time_samples)
{
	if (!(p > 0))
		throw PreconditionError("p must be > 0");
	auto rep = integrated(f, k, grid, time_samples, [p](const Field& fld) { return lp_norm(fld, p); });
	rep.kind = "kp";
	rep.p = p;
	return rep;
}

namespace {

/// Maximizes g on [a, b] by golden-section search.
double golden_max(const std::function<double(double)>& g, double a, double b, double fa_hint)
{
	constexpr double inv_phi = 0.6180339887498948482;
	double best = fa_hint;
	double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
	double fc = g(c), fd = g(d);
	best = std::max({best, fc, fd});
	for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(a)); ++it)
	{
		if (fc >= fd)
		{
			b = d;
			d = c;
			fd = fc;
			c = b - inv_phi * (b - a);
			fc = g(c);
			best = std::max(best, fc);
		}
		else
		{
			a = c;
			c = d;
			fc = fd;
			d = a + inv_phi * (b - a);
			fd = g(d);
			best = std::max(best, fd);
		}
	}
	return best;
}

/// int_a^b |g(t)| dt for a smooth scalar g of t: the interval is split at the
/// sign changes found on a fine scan (located by bisection) and every part is
/// integrated with Gauss-Legendre.
double abs_integral(const std::function<double(double)>& g, double a, double b, int time_samples)
{
	constexpr int scan = 512;
	std::vector<double> cuts{a};
	double t0 = a, g0 = g(a);
	for (int j = 1; j <= scan; ++j)
	{
		const double t1 = a + (b - a) * j / scan;
		const double g1 = g(t1);
		if ((g0 < 0 && g1 > 0) || (g0 > 0 && g1 < 0))
		{
			double lo = t0, hi = t1, glo = g0;
			for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it)
			{
				const double mid = 0.5 * (lo + hi);
				const double gm = g(mid);
				if ((gm < 0) == (glo < 0))
				{
					lo = mid;
					glo = gm;
				}
				else
					hi = mid;
			}
			cuts.push_back(0.5 * (lo + hi));
		}
		t0 = t1;
		g0 = g1;
	}
	cuts.push_back(b);
	double total = 0;
	std::vector<double> nodes, weights;
	for (std::size_t c = 1; c < cuts.size(); ++c)
	{
		quadrature::gauss_legendre(cuts[c - 1], cuts[c], quadrature::panels_for(time_samples), nodes, weights);
		for (std::size_t q = 0; q < nodes.size(); ++q)
			total += weights[q] * std::abs(g(nodes[q]));
	}
	return total;
}

} // namespace

LengthReport coarse_length_k(const HamiltonianPath& f, int k, const Grid& grid, int time_samples)
{
	check_common(k, time_samples);
	auto g = std::make_shared<const Grid>(grid);
	LengthReport rep;
	rep.kind = "coarse";
	rep.k = k;
	rep.per_order.assign(k + 1, 0.0);
	rep.quadrature = {time_samples, "uniform sampling + golden-section refinement of the time maximum"};
	auto osc = [](const Field& fld) { return oscillation(fld); };
	bool margin_ok = true;
	for (const Piece& piece : f.pieces())
	{
		OrderSampler sampler(piece.hamiltonian, k, g, osc);
		const int n = time_samples;
		std::vector<double> ts(n + 1);
		std::vector<std::vector<double>> vals(n + 1);
		for (int q = 0; q <= n; ++q)
		{
			ts[q] = q == n ? piece.t_end : piece.t_start + (piece.t_end - piece.t_start) * q / n;
			vals[q] = sampler(ts[q]);
		}
		std::vector<double> row(k + 1, 0.0);
		for (int i = 0; i <= k; ++i)
		{
			int best = 0;
			for (int q = 1; q <= n; ++q)
				if (vals[q][i] > vals[best][i])
					best = q;
			const double a = ts[std::max(best - 1, 0)];
			const double b = ts[std::min(best + 1, n)];
			OrderSampler single(expr::diff_t(piece.hamiltonian, i), 0, g, osc);
			row[i] = golden_max([&](double t) { return single(t)[0]; }, a, b, vals[best][i]);
		}
		margin_ok = margin_ok && sampler.margin_ok();
		rep.per_piece.push_back(row);
		for (int i = 0; i <= k; ++i)
			rep.per_order[i] = std::max(rep.per_order[i], row[i]);
	}
	for (double v : rep.per_order)
		rep.total += v;
	rep.notes.push_back(kUpperBoundNote);
	if (!margin_ok)
		rep.notes.push_back("warning: Hamiltonian does not vanish on the box boundary layer");
	return rep;
}

LengthReport with_two_resolution_bound(const HamiltonianPath& f, const std::string& kind, int k, double p,
                                       const Grid& grid, int time_samples)
{
	auto run = [&](const Grid& g) {
		if (kind == "k")
			return length_k(f, k, g, time_samples);
		if (kind == "coarse")
			return coarse_length_k(f, k, g, time_samples);
		if (kind == "kp")
			return length_kp(f, k, p, g, time_samples);
		throw PreconditionError("unknown length kind '" + kind + "'");
	};
	LengthReport fine = run(grid);
	std::vector<int> res = grid.resolution();
	bool can_coarsen = true;
	for (int& r : res)
	{
		if (grid.is_torus())
		{
			can_coarsen = can_coarsen && r % 2 == 0 && r >= 4;
			r /= 2;
		}
		else
		{
			can_coarsen = can_coarsen && (r - 1) % 2 == 0 && r >= 5;
			r = (r - 1) / 2 + 1;
		}
	}
	if (!can_coarsen)
		throw PreconditionError("grid cannot be coarsened by a factor of two");
	const Grid coarse = grid.is_torus() ? Grid::torus(grid.upper(), res) : Grid::box(grid.lower(), grid.upper(), res);
	const LengthReport c = run(coarse);
	fine.extrapolated_total = fine.total + (fine.total - c.total) / 3.0;
	return fine;
}

nlohmann::json LengthReport::to_json() const
{
	nlohmann::json j;
	j["kind"] = kind;
	j["k"] = k;
	if (kind == "kp")
		j["p"] = p;
	j["total"] = total;
	j["per_order"] = per_order;
	j["per_piece"] = per_piece;
	j["quadrature"] = {{"time_samples", quadrature.time_samples}, {"scheme", quadrature.scheme}};
	if (extrapolated_total)
		j["extrapolated_total"] = *extrapolated_total;
	j["notes"] = notes;
	return j;
}

void LengthReport::write_csv(std::ostream& os) const
{
	os << "piece";
	for (int i = 0; i <= k; ++i)
		os << ",order" << i;
	os << '\n';
	char buf[32];
	auto put = [&](double v) {
		auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
		os << ',';
		os.write(buf, p - buf);
	};
	for (std::size_t l = 0; l < per_piece.size(); ++l)
	{
		os << l;
		for (double v : per_piece[l])
			put(v);
		os << '\n';
	}
	os << "total";
	for (double v : per_order)
		put(v);
	os << '\n';
}

// ---------------------------------------------------------------------------
// Flat torus

TorusSymplecticPath::TorusSymplecticPath(std::vector<TorusPiece> pieces, std::vector<double> periods)
    : pieces_(std::move(pieces)), periods_(std::move(periods))
{
	if (periods_.empty() || periods_.size() % 2)
		throw PreconditionError("torus periods must have even length");
	for (double p : periods_)
		if (!(p > 0))
			throw PreconditionError("torus periods must be positive");
	std::vector<Piece> shape;
	for (const auto& tp : pieces_)
	{
		if (tp.harmonic.size() != periods_.size())
			throw PreconditionError("each piece needs one harmonic coefficient per coordinate");
		for (const auto& l : tp.harmonic)
			if (l.depends_on_space())
				throw PreconditionError("harmonic coefficients depend on t only");
		if (tp.exact.max_pair_index() > pairs())
			throw PreconditionError("potential uses coordinates beyond the torus dimension");
		shape.push_back(Piece{tp.t_start, tp.t_end, tp.exact});
	}
	check_tiling(shape);
}

HamiltonianPath TorusSymplecticPath::exact_part() const
{
	std::vector<Piece> out;
	for (const auto& tp : pieces_)
		out.push_back(Piece{tp.t_start, tp.t_end, tp.exact});
	return HamiltonianPath(std::move(out), pairs());
}

nlohmann::json TorusSymplecticPath::to_json() const
{
	nlohmann::json j;
	j["periods"] = periods_;
	j["pieces"] = nlohmann::json::array();
	for (const auto& tp : pieces_)
	{
		nlohmann::json h = nlohmann::json::array();
		for (const auto& l : tp.harmonic)
			h.push_back(expr::print(l));
		j["pieces"].push_back({{"t0", tp.t_start}, {"t1", tp.t_end}, {"harmonic", h}, {"exact", expr::print(tp.exact)}});
	}
	return j;
}

TorusSymplecticPath TorusSymplecticPath::from_json(const nlohmann::json& j)
{
	try
	{
		auto periods = j.at("periods").get<std::vector<double>>();
		const int pairs = int(periods.size()) / 2;
		std::vector<TorusPiece> pieces;
		for (const auto& p : j.at("pieces"))
		{
			TorusPiece tp;
			tp.t_start = p.at("t0").get<double>();
			tp.t_end = p.at("t1").get<double>();
			for (const auto& h : p.at("harmonic"))
				tp.harmonic.push_back(expr::parse(h.get<std::string>(), {pairs}));
			tp.exact = expr::parse(p.at("exact").get<std::string>(), {pairs});
			pieces.push_back(std::move(tp));
		}
		return TorusSymplecticPath(std::move(pieces), std::move(periods));
	}
	catch (const nlohmann::json::exception& e)
	{
		throw FormatError(std::string("bad torus path JSON: ") + e.what());
	}
}

TorusSymplecticPath reparametrize(const TorusSymplecticPath& f, const TimeMap& s)
{
	// Pack every component as a separate Hamiltonian path sharing the division,
	// reparametrize each, then unpack.
	const std::size_t m = f.periods().size();
	auto component = [&](std::size_t c) {
		std::vector<Piece> ps;
		for (const auto& tp : f.pieces())
			ps.push_back(Piece{tp.t_start, tp.t_end, c < m ? tp.harmonic[c] : tp.exact});
		return reparametrize(HamiltonianPath(std::move(ps), f.pairs()), s);
	};
	std::vector<HamiltonianPath> parts;
	for (std::size_t c = 0; c <= m; ++c)
		parts.push_back(component(c));
	std::vector<TorusPiece> out;
	for (std::size_t l = 0; l < parts.back().piece_count(); ++l)
	{
		TorusPiece tp;
		tp.t_start = parts.back().pieces()[l].t_start;
		tp.t_end = parts.back().pieces()[l].t_end;
		for (std::size_t c = 0; c < m; ++c)
			tp.harmonic.push_back(parts[c].pieces()[l].hamiltonian);
		tp.exact = parts.back().pieces()[l].hamiltonian;
		out.push_back(std::move(tp));
	}
	return TorusSymplecticPath(std::move(out), f.periods());
}

LengthReport hofer_like_length_k(const TorusSymplecticPath& f, int k, const Grid& grid, int time_samples)
{
	check_common(k, time_samples);
	if (!grid.is_torus())
		throw GeometryError("the Hofer-like length is computed on torus grids");
	if (grid.dimension() != int(f.periods().size()))
		throw PreconditionError("grid dimension differs from the torus dimension");
	auto g = std::make_shared<const Grid>(grid);
	LengthReport rep;
	rep.kind = "hl";
	rep.k = k;
	rep.per_order.assign(k + 1, 0.0);
	rep.quadrature = {time_samples, "composite Gauss-Legendre (5 nodes per panel)"};
	std::vector<double> nodes, weights;
	for (const auto& tp : f.pieces())
	{
		OrderSampler exact(tp.exact, k, g, [](const Field& fld) { return oscillation(mean_zero_normalize(fld)); });
		quadrature::gauss_legendre(tp.t_start, tp.t_end, quadrature::panels_for(time_samples), nodes, weights);
		std::vector<double> acc(k + 1, 0.0);
		for (std::size_t q = 0; q < nodes.size(); ++q)
		{
			const auto osc = exact(nodes[q]);
			for (int i = 0; i <= k; ++i)
				acc[i] += weights[q] * osc[i];
		}
		for (const auto& l : tp.harmonic)
		{
			const expr::Program prog = derivative_program(l, k);
			std::vector<double> out(k + 1), reg;
			for (int i = 0; i <= k; ++i)
				acc[i] += abs_integral(
				    [&](double t) {
					    prog.run({}, t, out, reg);
					    return out[i];
				    },
				    tp.t_start, tp.t_end, time_samples);
		}
		rep.per_piece.push_back(acc);
	}
	for (const auto& row : rep.per_piece)
		for (int i = 0; i <= k; ++i)
			rep.per_order[i] += row[i];
	for (double v : rep.per_order)
		rep.total += v;
	rep.notes.push_back(kUpperBoundNote);
	return rep;
}

std::vector<double> flux_harmonic(const TorusSymplecticPath& f, int time_samples)
{
	std::vector<double> flux(f.periods().size(), 0.0);
	std::vector<double> nodes, weights;
	for (const auto& tp : f.pieces())
	{
		quadrature::gauss_legendre(tp.t_start, tp.t_end, quadrature::panels_for(time_samples), nodes, weights);
		for (std::size_t j = 0; j < tp.harmonic.size(); ++j)
		{
			expr::Program prog(tp.harmonic[j]);
			for (std::size_t q = 0; q < nodes.size(); ++q)
				flux[j] += weights[q] * prog({}, nodes[q]);
		}
	}
	return flux;
}

double harmonic_l1_length(const TorusSymplecticPath& f, int time_samples)
{
	double total = 0;
	for (const auto& tp : f.pieces())
		for (const auto& l : tp.harmonic)
		{
			const expr::Program prog(l);
			total += abs_integral([&](double t) { return prog({}, t); }, tp.t_start, tp.t_end, time_samples);
		}
	return total;
}

} // namespace hoferlab
