#include "hoferlab/flow.hpp"

#include "hoferlab/errors.hpp"
#include "hoferlab/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace hoferlab {

using expr::Var;

TracerCloud::TracerCloud(int dimension, std::vector<double> coords, std::vector<std::string> labels)
    : dimension_(dimension), coords_(std::move(coords)), labels_(std::move(labels))
{
	if (dimension_ < 2 || dimension_ % 2)
		throw PreconditionError("tracer dimension must be a positive even number");
	if (coords_.empty() || coords_.size() % std::size_t(dimension_))
		throw PreconditionError("a tracer cloud must be nonempty and complete");
	if (!labels_.empty() && labels_.size() != size())
		throw PreconditionError("one label per tracer");
	for (double c : coords_)
		if (!std::isfinite(c))
			throw PreconditionError("tracer coordinates must be finite");
}

TracerCloud TracerCloud::lattice(std::span<const double> lower, std::span<const double> upper, int per_axis, bool closed)
{
	const std::size_t d = lower.size();
	if (d != upper.size() || per_axis < 2)
		throw PreconditionError("bad lattice specification");
	std::size_t total = 1;
	for (std::size_t a = 0; a < d; ++a)
		total *= std::size_t(per_axis);
	std::vector<double> coords;
	coords.reserve(total * d);
	for (std::size_t i = 0; i < total; ++i)
	{
		std::size_t idx = i;
		std::vector<double> p(d);
		for (std::size_t a = d; a-- > 0;)
		{
			const std::size_t j = idx % std::size_t(per_axis);
			idx /= std::size_t(per_axis);
			const double frac = closed ? double(j) / (per_axis - 1) : (j + 0.5) / per_axis;
			p[a] = lower[a] + frac * (upper[a] - lower[a]);
		}
		coords.insert(coords.end(), p.begin(), p.end());
	}
	return TracerCloud(int(d), std::move(coords));
}

TracerCloud TracerCloud::circle(double cx, double cy, double radius, int n)
{
	std::vector<double> coords;
	for (int i = 0; i < n; ++i)
	{
		const double a = 2 * M_PI * i / n;
		coords.push_back(cx + radius * std::cos(a));
		coords.push_back(cy + radius * std::sin(a));
	}
	return TracerCloud(2, std::move(coords));
}

void TracerCloud::write_csv(std::ostream& os) const
{
	for (int a = 0; a < dimension_; ++a)
		os << (a ? "," : "") << (a % 2 == 0 ? "x" : "y") << (a / 2 + 1);
	if (!labels_.empty())
		os << ",label";
	os << '\n';
	char buf[32];
	for (std::size_t i = 0; i < size(); ++i)
	{
		for (int a = 0; a < dimension_; ++a)
		{
			auto [p, ec] = std::to_chars(buf, buf + sizeof buf, coords_[i * dimension_ + a]);
			if (a)
				os << ',';
			os.write(buf, p - buf);
		}
		if (!labels_.empty())
			os << ',' << labels_[i];
		os << '\n';
	}
}

TracerCloud TracerCloud::read_csv(std::istream& is)
{
	std::string line;
	if (!std::getline(is, line))
		throw FormatError("empty cloud CSV");
	std::vector<std::string> header;
	{
		std::stringstream ss(line);
		std::string cell;
		while (std::getline(ss, cell, ','))
			header.push_back(cell);
	}
	const bool labelled = !header.empty() && header.back() == "label";
	const int d = int(header.size()) - (labelled ? 1 : 0);
	std::vector<double> coords;
	std::vector<std::string> labels;
	std::size_t lineno = 1;
	while (std::getline(is, line))
	{
		++lineno;
		if (line.empty())
			continue;
		std::stringstream ss(line);
		std::string cell;
		int col = 0;
		while (std::getline(ss, cell, ','))
		{
			if (col < d)
			{
				double v = 0;
				auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
				if (ec != std::errc())
					throw FormatError("bad number on cloud CSV line " + std::to_string(lineno));
				coords.push_back(v);
			}
			else
				labels.push_back(cell);
			++col;
		}
		if (col != int(header.size()))
			throw FormatError("cloud CSV line " + std::to_string(lineno) + " has the wrong column count");
	}
	return TracerCloud(d, std::move(coords), std::move(labels));
}

// ---------------------------------------------------------------------------

namespace {

/// Multi-output program for X_F = (-dF/dy_i, dF/dx_i) in interleaved order.
expr::Program vector_field(const expr::Expression& h, int pairs)
{
	std::vector<expr::Expression> comps;
	for (int i = 1; i <= pairs; ++i)
	{
		comps.push_back(expr::neg(expr::diff(h, Var::y(i))));
		comps.push_back(expr::diff(h, Var::x(i)));
	}
	return expr::Program(comps);
}

void advance(const HamiltonianPath& f, const std::vector<expr::Program>& fields, TracerCloud& cloud, int steps,
             const FlowOptions& opt)
{
	const int d = cloud.dimension();
	parallel_for(cloud.size(), [&](std::size_t n) {
		std::vector<double> x(cloud.point(n).begin(), cloud.point(n).end());
		std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d), reg;
		for (std::size_t l = 0; l < f.piece_count(); ++l)
		{
			const auto& prog = fields[l];
			const double t0 = f.pieces()[l].t_start, t1 = f.pieces()[l].t_end;
			const double h = (t1 - t0) / steps;
			for (int s = 0; s < steps; ++s)
			{
				const double t = t0 + s * h;
				prog.run(x, t, k1, reg);
				for (int a = 0; a < d; ++a)
					tmp[a] = x[a] + 0.5 * h * k1[a];
				prog.run(tmp, t + 0.5 * h, k2, reg);
				for (int a = 0; a < d; ++a)
					tmp[a] = x[a] + 0.5 * h * k2[a];
				prog.run(tmp, t + 0.5 * h, k3, reg);
				for (int a = 0; a < d; ++a)
					tmp[a] = x[a] + h * k3[a];
				prog.run(tmp, t + h, k4, reg);
				for (int a = 0; a < d; ++a)
				{
					x[a] += h / 6.0 * (k1[a] + 2 * k2[a] + 2 * k3[a] + k4[a]);
					if (!std::isfinite(x[a]) || std::abs(x[a]) > opt.safety_box)
						throw BlowUp("tracer " + std::to_string(n) + " left the safety box");
				}
			}
		}
		std::copy(x.begin(), x.end(), cloud.point(n).begin());
	});
}

} // namespace

FlowMap integrate(const HamiltonianPath& f, const TracerCloud& cloud, int steps_per_piece, const FlowOptions& options)
{
	if (steps_per_piece < 1)
		throw PreconditionError("steps_per_piece must be >= 1");
	if (cloud.dimension() != f.dimension())
		throw PreconditionError("cloud dimension differs from the path dimension");
	std::vector<expr::Program> fields;
	for (const Piece& p : f.pieces())
		fields.push_back(vector_field(p.hamiltonian, f.pairs()));

	TracerCloud out = cloud;
	advance(f, fields, out, steps_per_piece, options);
	FlowMap map{cloud, out, f.hash(), {steps_per_piece, 0.0, 0}};
	if (options.error_estimate && steps_per_piece >= 2 && steps_per_piece % 2 == 0)
	{
		TracerCloud half = cloud;
		advance(f, fields, half, steps_per_piece / 2, options);
		double e = 0;
		for (std::size_t i = 0; i < out.coords().size(); ++i)
			e = std::max(e, std::abs(out.coords()[i] - half.coords()[i]));
		map.stats.error_estimate = e / 15.0;
	}
	return map;
}

FlowMap then(const FlowMap& map, const HamiltonianPath& f, int steps_per_piece, const FlowOptions& options)
{
	FlowMap next = integrate(f, map.final, steps_per_piece, options);
	next.initial = map.initial;
	next.path_hash = map.path_hash + "+" + next.path_hash;
	next.stats.error_estimate += map.stats.error_estimate;
	return next;
}

double loop_area(const TracerCloud& loop)
{
	// sum_i oint x_i dy_i, trapezoid rule on the closed polygon
	const int d = loop.dimension();
	const std::size_t n = loop.size();
	double area = 0;
	for (std::size_t k = 0; k < n; ++k)
	{
		const auto p = loop.point(k);
		const auto q = loop.point((k + 1) % n);
		for (int i = 0; i < d; i += 2)
			area += 0.5 * (p[i] + q[i]) * (q[i + 1] - p[i + 1]);
	}
	return area;
}

FlowMap integrate_area_guarded(const HamiltonianPath& f, const TracerCloud& loop, int steps_per_piece,
                               double tolerance, int max_doublings)
{
	const double a0 = loop_area(loop);
	int steps = steps_per_piece;
	for (int d = 0;; ++d)
	{
		FlowMap map = integrate(f, loop, steps);
		map.stats.doublings = d;
		if (std::abs(loop_area(map.final) - a0) < tolerance || d >= max_doublings)
			return map;
		steps *= 2;
	}
}

double c0_distance(const FlowMap& a, const FlowMap& b)
{
	if (a.initial.dimension() != b.initial.dimension() || a.initial.coords() != b.initial.coords())
		throw CloudMismatch("flow maps start from different clouds");
	double m = 0;
	const int d = a.initial.dimension();
	for (std::size_t i = 0; i < a.final.size(); ++i)
	{
		double s = 0;
		for (int k = 0; k < d; ++k)
		{
			const double diff = a.final.point(i)[k] - b.final.point(i)[k];
			s += diff * diff;
		}
		m = std::max(m, std::sqrt(s));
	}
	return m;
}

// ---------------------------------------------------------------------------

namespace {

/// Points sorted by first coordinate for pruned nearest-neighbour queries.
class SortedPoints
{
public:
	SortedPoints(std::vector<std::vector<double>> pts) : pts_(std::move(pts))
	{
		std::sort(pts_.begin(), pts_.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
	}

	/// Distance from q to the nearest stored point, skipping `skip` exact copies of q itself.
	double nearest(std::span<const double> q, bool skip_self = false) const
	{
		auto it = std::lower_bound(pts_.begin(), pts_.end(), q[0],
		                           [](const std::vector<double>& p, double v) { return p[0] < v; });
		double best = std::numeric_limits<double>::infinity();
		bool skipped = false;
		auto visit = [&](const std::vector<double>& p) {
			double s = 0;
			for (std::size_t k = 0; k < p.size(); ++k)
				s += (p[k] - q[k]) * (p[k] - q[k]);
			if (skip_self && !skipped && s == 0)
			{
				skipped = true;
				return;
			}
			best = std::min(best, std::sqrt(s));
		};
		for (auto r = it; r != pts_.end() && r->front() - q[0] < best; ++r)
			visit(*r);
		for (auto l = it; l != pts_.begin();)
		{
			--l;
			if (q[0] - l->front() >= best)
				break;
			visit(*l);
		}
		return best;
	}

private:
	std::vector<std::vector<double>> pts_;
};

} // namespace

DisplacementCertificate displaced(const FlowMap& flow, const RegionTest& region)
{
	DisplacementCertificate cert;
	std::vector<std::size_t> members;
	for (std::size_t i = 0; i < flow.initial.size(); ++i)
		if (region(flow.initial.point(i)))
			members.push_back(i);
	cert.samples = members.size();
	if (members.empty())
		return cert;
	std::vector<std::vector<double>> a;
	for (std::size_t i : members)
		a.emplace_back(flow.initial.point(i).begin(), flow.initial.point(i).end());
	const SortedPoints sampled(a);
	if (members.size() > 1)
		for (const auto& p : a)
			cert.density = std::max(cert.density, sampled.nearest(p, true));
	bool inside = false;
	double margin = std::numeric_limits<double>::infinity();
	for (std::size_t i : members)
	{
		const auto q = flow.final.point(i);
		if (region(q))
			inside = true;
		margin = std::min(margin, sampled.nearest(q));
	}
	cert.margin = inside ? 0.0 : margin;
	cert.displaced = !inside && margin > 0;
	return cert;
}

nlohmann::json DisplacementCertificate::to_json() const
{
	return {{"displaced", displaced}, {"margin", margin}, {"density", density}, {"samples", samples},
	        {"note", "sampled certificate, not a proof"}};
}

nlohmann::json FlowMap::stats_json() const
{
	return {{"path_hash", path_hash},
	        {"tracers", initial.size()},
	        {"steps_per_piece", stats.steps},
	        {"error_estimate", stats.error_estimate},
	        {"doublings", stats.doublings}};
}

} // namespace hoferlab
