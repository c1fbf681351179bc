#include "hoferlab/experiments.hpp"

#include "hoferlab/errors.hpp"
#include "hoferlab/parallel.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace hoferlab::experiments {

using expr::Expression;
using expr::Var;

namespace {

Expression c(double v) { return expr::constant(v); }
Expression x(int i) { return expr::variable(Var::x(i)); }
Expression y(int i) { return expr::variable(Var::y(i)); }
Expression tv() { return expr::variable(Var::t()); }

/// delta_m(r - 1) for the circle of radius 1 around (cx, 2t).
Expression shell(int m, double cx)
{
	const Expression dx = cx == 0 ? x(1) : x(1) - c(cx);
	const Expression dy = y(1) - c(2) * tv();
	const Expression r = expr::sqrt(dx * dx + dy * dy);
	return expr::bump(c(m) * (r - c(1)), 0.25, 0.75);
}

std::vector<double> centres(const GmSpec& spec)
{
	return spec.closed_mode ? std::vector<double>{0.0, 4.0} : std::vector<double>{0.0};
}

} // namespace

Expression gm_expression(const GmSpec& spec)
{
	if (spec.m < 1)
		throw PreconditionError("m must be >= 1");
	Expression g = c(2) * x(1) * shell(spec.m, 0);
	if (spec.closed_mode)
		g = g - c(2) * (x(1) - c(4)) * shell(spec.m, 4);
	return g;
}

HamiltonianPath gm_path(const GmSpec& spec) { return HamiltonianPath::single(gm_expression(spec), 1); }

double gm_norm(const GmSpec& spec, int i, double p, double t, const ShellOptions& options)
{
	if (!(p > 0))
		throw PreconditionError("p must be > 0");
	const double half = 0.75 / spec.m;
	const double limit = 1.0 / (8.0 * spec.m);
	const double width = options.panel_width > 0 ? options.panel_width : limit;
	if (width > limit * (1 + 1e-12))
		throw ShellUnresolved(fmt::format("radial panel width {} exceeds 1/(8m) = {}", width, limit));
	if (options.angular_nodes < 8)
		throw PreconditionError("at least 8 angular nodes");

	const expr::Program prog(expr::diff_t(gm_expression(spec), i));
	const int panels = int(std::ceil(2 * half / width - 1e-9));
	std::vector<double> rn, rw;
	quadrature::gauss_legendre(1 - half, 1 + half, panels, rn, rw);
	const int na = options.angular_nodes;
	const double dtheta = 2 * M_PI / na;

	double sum = 0;
	std::vector<double> reg;
	double pt[2];
	for (double cx : centres(spec))
		for (std::size_t q = 0; q < rn.size(); ++q)
		{
			double ring = 0;
			for (int a = 0; a < na; ++a)
			{
				const double th = a * dtheta;
				pt[0] = cx + rn[q] * std::cos(th);
				pt[1] = 2 * t + rn[q] * std::sin(th);
				double v = 0;
				prog.run(pt, t, {&v, 1}, reg);
				ring += std::pow(std::abs(v), p);
			}
			sum += rw[q] * rn[q] * ring * dtheta;
		}
	return std::pow(sum, 1.0 / p);
}

double gm_outside_ratio(const GmSpec& spec, double t, int samples_per_axis)
{
	const expr::Program prog(gm_expression(spec));
	const double half = 0.75 / spec.m;
	const double x0 = -2.5, x1 = spec.closed_mode ? 6.5 : 2.5;
	const double y0 = 2 * t - 2.5, y1 = 2 * t + 2.5;
	double inside = 0, outside = 0;
	double pt[2];
	for (int a = 0; a < samples_per_axis; ++a)
		for (int b = 0; b < samples_per_axis; ++b)
		{
			pt[0] = x0 + (x1 - x0) * a / (samples_per_axis - 1);
			pt[1] = y0 + (y1 - y0) * b / (samples_per_axis - 1);
			bool in_shell = false;
			for (double cx : centres(spec))
				in_shell |= std::abs(std::hypot(pt[0] - cx, pt[1] - 2 * t) - 1) <= half;
			const double v = std::abs(prog(pt, t));
			(in_shell ? inside : outside) = std::max(in_shell ? inside : outside, v);
		}
	return inside > 0 ? outside / inside : (outside > 0 ? std::numeric_limits<double>::infinity() : 0.0);
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys)
{
	if (xs.size() != ys.size() || xs.size() < 2)
		throw PreconditionError("slope fit needs two or more points");
	const double n = double(xs.size());
	double sx = 0, sy = 0, sxx = 0, sxy = 0;
	for (std::size_t i = 0; i < xs.size(); ++i)
	{
		const double lx = std::log(xs[i]), ly = std::log(ys[i]);
		sx += lx;
		sy += ly;
		sxx += lx * lx;
		sxy += lx * ly;
	}
	return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GmReport gm_report(const std::vector<int>& ms, int k, double p, bool closed_mode, const ShellOptions& options,
                   int time_samples)
{
	if (k < 0 || !(p > 0) || ms.empty())
		throw PreconditionError("gm_report needs k >= 0, p > 0 and at least one m");
	GmReport rep;
	rep.k = k;
	rep.p = p;
	rep.closed_mode = closed_mode;
	rep.rows.resize(ms.size());
	std::vector<double> nodes, weights;
	quadrature::gauss_legendre(0, 1, quadrature::panels_for(time_samples), nodes, weights);

	// one job per (m, i)
	const std::size_t jobs = ms.size() * std::size_t(k + 1);
	std::vector<double> value(jobs), total(jobs);
	parallel_for(jobs, [&](std::size_t job) {
		const GmSpec spec{ms[job / (k + 1)], closed_mode};
		const int i = int(job % (k + 1));
		double mx = 0, acc = 0;
		for (std::size_t q = 0; q < nodes.size(); ++q)
		{
			const double v = gm_norm(spec, i, p, nodes[q], options);
			mx = std::max(mx, v);
			acc += weights[q] * v;
		}
		value[job] = mx;
		total[job] = acc;
	});
	for (std::size_t r = 0; r < ms.size(); ++r)
	{
		GmRow& row = rep.rows[r];
		row.m = ms[r];
		for (int i = 0; i <= k; ++i)
		{
			row.values.push_back(value[r * (k + 1) + i]);
			row.totals.push_back(total[r * (k + 1) + i]);
			row.length_kp += row.totals.back();
		}
	}
	std::vector<double> mx;
	for (int m : ms)
		mx.push_back(m);
	for (int i = 0; i <= k; ++i)
	{
		std::vector<double> ys;
		for (const GmRow& row : rep.rows)
			ys.push_back(row.values[i]);
		rep.slopes.push_back(ms.size() > 1 ? loglog_slope(mx, ys) : std::numeric_limits<double>::quiet_NaN());
		rep.expected.push_back((i * p - 1) / p);
	}
	return rep;
}

std::vector<std::string> GmReport::row_kind() const
{
	std::vector<std::string> kinds;
	for (int i = 0; i <= k; ++i)
	{
		const double ip = i * p;
		kinds.push_back(ip < 1 - 1e-12 ? "decay" : (ip > 1 + 1e-12 ? "control" : "boundary"));
	}
	return kinds;
}

std::vector<bool> GmReport::slope_ok(double tol) const
{
	const auto kinds = row_kind();
	std::vector<bool> ok;
	for (int i = 0; i <= k; ++i)
	{
		if (kinds[i] == "decay")
			ok.push_back(std::abs(slopes[i] - expected[i]) <= tol);
		else if (kinds[i] == "control")
			ok.push_back(slopes[i] >= 0);
		else
			ok.push_back(true);
	}
	return ok;
}

nlohmann::json GmReport::to_json() const
{
	nlohmann::json rows_j = nlohmann::json::array();
	for (const GmRow& r : rows)
		rows_j.push_back({{"m", r.m}, {"values", r.values}, {"totals", r.totals}, {"length_kp", r.length_kp}});
	const auto ok = slope_ok();
	nlohmann::json orders = nlohmann::json::array();
	const auto kinds = row_kind();
	for (int i = 0; i <= k; ++i)
		orders.push_back({{"i", i},
		                  {"slope", slopes[i]},
		                  {"expected", expected[i]},
		                  {"kind", kinds[i]},
		                  {"ok", bool(ok[i])}});
	return {{"k", k}, {"p", p}, {"closed_mode", closed_mode}, {"rows", rows_j}, {"orders", orders}};
}

void GmReport::write_csv(std::ostream& os) const
{
	os << "m";
	for (int i = 0; i <= k; ++i)
		os << ",value_" << i << ",total_" << i;
	os << ",length_kp\n";
	for (const GmRow& r : rows)
	{
		os << r.m;
		for (int i = 0; i <= k; ++i)
			os << fmt::format(",{},{}", r.values[i], r.totals[i]);
		os << fmt::format(",{}\n", r.length_kp);
	}
}

void GmReport::write_dat(std::ostream& os) const
{
	os << "# m";
	for (int i = 0; i <= k; ++i)
		os << " order" << i;
	os << fmt::format("\n# p = {}, slopes:", p);
	for (double s : slopes)
		os << fmt::format(" {}", s);
	os << '\n';
	for (const GmRow& r : rows)
	{
		os << r.m;
		for (double v : r.values)
			os << fmt::format(" {}", v);
		os << '\n';
	}
}

// ---------------------------------------------------------------------------

SquareDisplacement square_displacement(double area, int max_k, int tracers_per_axis)
{
	if (!(area > 0))
		throw PreconditionError("area must be > 0");
	if (max_k < 0)
		throw PreconditionError("max_k must be >= 0");
	const double s = std::sqrt(area);
	const double eta = 0.01;
	const double eps = 0.002 * s;
	const double v = (1 + eta) * s;

	// plateau in y over [0, s]; plateau in x over the whole trajectory [0, s + v]
	const Expression w = expr::bump(y(1), s / 2, s / 2 + eps, s / 2);
	const double xc = (s + v) / 2;
	const double xin = xc + 0.05 * s, xout = xin + 0.1 * s;
	const Expression chi = expr::bump(x(1), xin, xout, xc);
	const Expression h = c(-v) * y(1) * w * chi;

	const double pad = 0.02 * s;
	Grid grid = Grid::box({xc - xout - pad, -eps - pad}, {xc + xout + pad, s + eps + pad}, {161, 161});
	SquareDisplacement out{area, s, v, HamiltonianPath::single(h, 1, grid), grid, {}, {}, false};

	const LengthReport rep = length_k(out.path, max_k, grid, 8);
	double acc = 0;
	for (int i = 0; i <= max_k; ++i)
	{
		acc += rep.per_order[i];
		out.lengths.push_back(acc);
	}
	out.length_ok = std::all_of(out.lengths.begin(), out.lengths.end(),
	                            [&](double l) { return std::abs(l - area) <= 0.02 * area; });

	const std::vector<double> lo{0, 0}, hi{s, s};
	const TracerCloud cloud = TracerCloud::lattice(lo, hi, tracers_per_axis, false);
	const FlowMap flow = integrate(out.path, cloud, 64);
	out.certificate = displaced(flow, [s](std::span<const double> q) {
		return q[0] > 0 && q[0] < s && q[1] > 0 && q[1] < s;
	});
	if (!out.length_ok)
		throw CertificateFailed(fmt::format("square displacement length outside 2% of {}", area));
	if (!out.certificate.displaced)
		throw CertificateFailed("square is not displaced by the constructed flow");
	return out;
}

nlohmann::json SquareDisplacement::to_json() const
{
	return {{"area", area},
	        {"side", side},
	        {"translation", speed},
	        {"hamiltonian", expr::print(path.pieces().front().hamiltonian)},
	        {"grid", grid.to_json()},
	        {"lengths", lengths},
	        {"length_ok", length_ok},
	        {"certificate", certificate.to_json()}};
}

// ---------------------------------------------------------------------------

SikoravShift sikorav_shift(double v, double eps, int pairs)
{
	if (!(v > 0) || !(eps > 0))
		throw PreconditionError("v and eps must be > 0");
	if (pairs < 1)
		throw PreconditionError("pairs must be >= 1");
	const Expression h = -(expr::step(x(1), -eps, 0) * c(v) * y(1));
	return {v, eps, HamiltonianPath::single(h, pairs)};
}

HamiltonianPath SikoravShift::conjugate(const HamiltonianPath& g, const Grid& check) const
{
	if (g.dimension() != path.dimension() || check.dimension() != g.dimension())
		throw PreconditionError("dimension mismatch");
	const auto grid = std::make_shared<const Grid>(check);
	std::vector<double> pt(std::size_t(check.dimension()));
	for (const Piece& piece : g.pieces())
	{
		const expr::Program prog(piece.hamiltonian);
		double osc_scale = 0;
		for (double t : {piece.t_start, 0.5 * (piece.t_start + piece.t_end), piece.t_end})
			osc_scale = std::max(osc_scale, oscillation(sample(prog, grid, t)));
		for (double t : {piece.t_start, 0.5 * (piece.t_start + piece.t_end), piece.t_end})
			for (std::size_t n = 0; n < check.size(); ++n)
			{
				check.point(n, pt);
				if (pt[0] <= 0 && std::abs(prog(pt, t)) > 1e-12 * std::max(1.0, osc_scale))
					throw PreconditionError("g is not supported in {x1 > 0}");
			}
	}
	std::vector<double> shift(std::size_t(path.dimension()), 0.0);
	shift[0] = v;
	return hoferlab::conjugate(g, AffineSymplectic::translation(shift));
}

ShiftCertificate shift_certificate(const SikoravShift& s, const TracerCloud& cloud, int steps)
{
	const FlowMap flow = integrate(s.path, cloud, steps);
	ShiftCertificate cert;
	for (std::size_t i = 0; i < cloud.size(); ++i)
	{
		const auto a = flow.initial.point(i);
		const auto b = flow.final.point(i);
		if (a[0] < -s.eps)
		{
			double d = 0;
			for (std::size_t j = 0; j < a.size(); ++j)
				d = std::max(d, std::abs(b[j] - a[j]));
			cert.fixed_error = std::max(cert.fixed_error, d);
			++cert.fixed;
		}
		else if (a[0] > 0)
		{
			double d = 0;
			for (std::size_t j = 0; j < a.size(); ++j)
				d = std::max(d, std::abs(b[j] - a[j] - (j == 0 ? s.v : 0.0)));
			cert.shifted_error = std::max(cert.shifted_error, d);
			++cert.shifted;
		}
	}
	cert.ok = cert.fixed_error < 1e-8 && cert.shifted_error < 1e-6;
	return cert;
}

nlohmann::json ShiftCertificate::to_json() const
{
	return {{"fixed_error", fixed_error}, {"shifted_error", shifted_error}, {"fixed", fixed},
	        {"shifted", shifted},         {"ok", ok}};
}

// ---------------------------------------------------------------------------

std::optional<AffineSymplectic> affine_on_box(const HamiltonianPath& g, std::span<const double> lower,
                                              std::span<const double> upper, int steps, double tolerance,
                                              int per_axis)
{
	const int d = g.dimension();
	if (int(lower.size()) != d || int(upper.size()) != d)
		throw PreconditionError("support box dimension mismatch");
	FlowOptions opt;
	opt.error_estimate = false;

	std::vector<double> probes;
	Eigen::VectorXd base(d);
	std::vector<double> step(static_cast<std::size_t>(d));
	for (int a = 0; a < d; ++a)
	{
		base[a] = 0.5 * (lower[a] + upper[a]);
		step[a] = std::max(0.5 * (upper[a] - lower[a]), 1e-3);
	}
	for (int j = -1; j < d; ++j)
		for (int a = 0; a < d; ++a)
			probes.push_back(base[a] + (a == j ? step[a] : 0.0));
	const FlowMap fit = integrate(g, TracerCloud(d, probes), steps, opt);

	Eigen::VectorXd image0(d);
	for (int a = 0; a < d; ++a)
		image0[a] = fit.final.point(0)[a];
	Eigen::MatrixXd lin(d, d);
	for (int j = 0; j < d; ++j)
		for (int a = 0; a < d; ++a)
			lin(a, j) = (fit.final.point(std::size_t(j + 1))[a] - image0[a]) / step[j];
	std::optional<AffineSymplectic> theta;
	try
	{
		theta.emplace(lin, image0 - lin * base, tolerance);
	}
	catch (const PreconditionError&)
	{
		return std::nullopt;
	}

	const FlowMap check = integrate(g, TracerCloud::lattice(lower, upper, per_axis, true), steps, opt);
	for (std::size_t n = 0; n < check.initial.size(); ++n)
	{
		Eigen::VectorXd p(d);
		for (int a = 0; a < d; ++a)
			p[a] = check.initial.point(n)[a];
		const Eigen::VectorXd q = theta->apply(p);
		for (int a = 0; a < d; ++a)
			if (std::abs(q[a] - check.final.point(n)[a]) > tolerance)
				return std::nullopt;
	}
	return theta;
}

CommutatorResult commutator_path(const SupportedPath& f, const SupportedPath& g, const Grid& grid,
                                 const CommutatorOptions& o)
{
	if (f.path.dimension() != g.path.dimension())
		throw PreconditionError("paths live in different dimensions");
	CommutatorResult r;
	const LengthReport lf = length_k(f.path, o.k, grid, o.time_samples);
	const LengthReport lg = length_k(g.path, o.k, grid, o.time_samples);
	r.length_f = lf.total;
	r.length_g = lg.total;
	const double factor = std::ldexp(1.0, o.k + 1);

	if (auto psi = affine_on_box(g.path, f.lower, f.upper, o.steps, o.affine_tolerance))
	{
		// psi phi^-1 psi^-1 first, then phi
		r.path = concatenate(conjugate(reverse(f.path), *psi), f.path);
		r.construction = "conjugate reverse(f) by the time-one map of g";
		r.bound = factor * r.length_f;
	}
	else if (auto phi = affine_on_box(f.path, g.lower, g.upper, o.steps, o.affine_tolerance))
	{
		// psi^-1 first, then phi psi phi^-1
		r.path = concatenate(reverse(g.path), conjugate(g.path, *phi));
		r.construction = "conjugate g by the time-one map of f";
		r.bound = factor * r.length_g;
	}
	else
		throw ConjugationUnsupported("neither time-one map is affine on the other's support");

	r.length = length_k(r.path, o.k, grid, o.time_samples);
	r.bound_holds = r.length.total <= r.bound * (1 + 1e-6) + 1e-12;

	FlowOptions fo;
	fo.error_estimate = false;
	const TracerCloud cloud = TracerCloud::lattice(grid.lower(), grid.upper(), o.cloud_per_axis, true);
	FlowMap seq = integrate(reverse(g.path), cloud, o.steps, fo);
	seq = then(seq, reverse(f.path), o.steps, fo);
	seq = then(seq, g.path, o.steps, fo);
	seq = then(seq, f.path, o.steps, fo);
	const FlowMap direct = integrate(r.path, cloud, o.steps, fo);
	r.flow_defect = c0_distance(direct, seq);
	r.flow_certified = r.flow_defect <= o.flow_tolerance;
	return r;
}

nlohmann::json CommutatorResult::to_json() const
{
	return {{"construction", construction},
	        {"path", path.to_json()},
	        {"length", length.to_json()},
	        {"length_f", length_f},
	        {"length_g", length_g},
	        {"bound", bound},
	        {"bound_holds", bound_holds},
	        {"flow_defect", flow_defect},
	        {"flow_certified", flow_certified}};
}

// ---------------------------------------------------------------------------

DisjointReport disjoint_bound_check(std::span<const SupportedPath> paths, int k, const Grid& grid, int time_samples,
                                    double tol)
{
	if (paths.empty())
		throw PreconditionError("no paths given");
	const HamiltonianPath product = disjoint_product(paths, grid);
	DisjointReport rep;
	rep.k = k;
	const LengthReport lhs = coarse_length_k(product, k, grid, time_samples);
	rep.lhs = lhs.total;
	rep.product_per_order = lhs.per_order;
	rep.max_per_order.assign(std::size_t(k + 1), 0.0);
	rep.min_per_order.assign(std::size_t(k + 1), std::numeric_limits<double>::infinity());
	for (const SupportedPath& p : paths)
	{
		const LengthReport l = coarse_length_k(p.path, k, grid, time_samples);
		rep.per_path.push_back(l.total);
		for (int i = 0; i <= k; ++i)
		{
			rep.max_per_order[i] = std::max(rep.max_per_order[i], l.per_order[i]);
			rep.min_per_order[i] = std::min(rep.min_per_order[i], l.per_order[i]);
		}
	}
	rep.rhs = 2.0 * (k + 1) * *std::max_element(rep.per_path.begin(), rep.per_path.end());
	rep.holds = rep.lhs <= rep.rhs * (1 + tol);
	return rep;
}

nlohmann::json DisjointReport::to_json() const
{
	return {{"k", k},
	        {"lhs", lhs},
	        {"rhs", rhs},
	        {"per_path", per_path},
	        {"holds", holds},
	        {"product_per_order", product_per_order},
	        {"max_per_order", max_per_order},
	        {"min_per_order", min_per_order}};
}

// ---------------------------------------------------------------------------

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_int pow2(int e) { return cpp_int(1) << e; }

std::string str(const cpp_rational& q)
{
	const cpp_int num = boost::multiprecision::numerator(q);
	const cpp_int den = boost::multiprecision::denominator(q);
	return den == 1 ? num.str() : num.str() + "/" + den.str();
}

} // namespace

ConstantsLedger constants(int k)
{
	if (k < 0 || k > 20)
		throw PreconditionError("k must lie in [0, 20]");
	const cpp_int k1 = k + 1;
	const cpp_int geometric = 1 + pow2(k + 1) + pow2(2 * k + 2) + pow2(3 * k + 3);

	ConstantsLedger l;
	l.k = k;
	auto add = [&](std::string name, std::string formula, const cpp_rational& v, std::string note = {}) {
		l.entries.push_back({std::move(name), std::move(formula), str(v), std::move(note)});
	};
	add("quasi_triangle", "2^k", cpp_rational(pow2(k)));
	add("coarse_quasi_triangle", "2^(k+1)", cpp_rational(pow2(k + 1)));
	add("commutator", "2^(k+1)", cpp_rational(pow2(k + 1)));
	add("commutator_energy", "4^(k+1)", cpp_rational(pow2(2 * k + 2)));
	add("sandwich_low", "4^-(k+1)", cpp_rational(cpp_int(1), pow2(2 * k + 2)));
	add("hofer_C", "2^(3k+8) (k+1)^2 (1 + 2^(k+1) + 2^(2k+2) + 2^(3k+3))",
	    cpp_rational(pow2(3 * k + 8) * k1 * k1 * geometric),
	    k == 0 ? "at k = 0 the constant can be chosen as 128" : "");
	add("sikorav_C", "2^(2k+4) (k+1) (1 + 2^(k+1) + 2^(2k+2) + 2^(3k+3))",
	    cpp_rational(pow2(2 * k + 4) * k1 * geometric));
	add("bi_bound", "2^(3k+2)", cpp_rational(pow2(3 * k + 2)));
	add("r_alpha_bound", "2^(k+1)", cpp_rational(pow2(k + 1)), "per unit alpha");
	add("estimate_lemma", "2^(3k+2)", cpp_rational(pow2(3 * k + 2)));
	add("disjoint_product", "2(k+1)", cpp_rational(2 * k1));
	return l;
}

const LedgerEntry& ConstantsLedger::at(const std::string& name) const
{
	for (const LedgerEntry& e : entries)
		if (e.name == name)
			return e;
	throw PreconditionError("no ledger entry named " + name);
}

nlohmann::json ConstantsLedger::to_json() const
{
	nlohmann::json rows = nlohmann::json::array();
	for (const LedgerEntry& e : entries)
	{
		nlohmann::json row = {{"name", e.name}, {"formula", e.formula}, {"value", e.value}};
		if (!e.note.empty())
			row["note"] = e.note;
		rows.push_back(row);
	}
	return {{"k", k}, {"entries", rows}};
}

void ConstantsLedger::write_table(std::ostream& os) const
{
	std::size_t wn = 4, wv = 5;
	for (const LedgerEntry& e : entries)
	{
		wn = std::max(wn, e.name.size());
		wv = std::max(wv, e.value.size());
	}
	os << fmt::format("{:<{}}  {:>{}}  {}\n", "name", wn, "value", wv, "formula");
	for (const LedgerEntry& e : entries)
	{
		os << fmt::format("{:<{}}  {:>{}}  {}", e.name, wn, e.value, wv, e.formula);
		if (!e.note.empty())
			os << "  [" << e.note << "]";
		os << '\n';
	}
}

} // namespace hoferlab::experiments
