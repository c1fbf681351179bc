#include "hoferlab/grid.hpp"

#include "hoferlab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace hoferlab {

Grid::Grid(Geometry g, std::vector<double> lower, std::vector<double> upper, std::vector<int> resolution)
    : geometry_(g), lower_(std::move(lower)), upper_(std::move(upper)), resolution_(std::move(resolution))
{
	const std::size_t d = resolution_.size();
	if (d == 0 || lower_.size() != d || upper_.size() != d)
		throw PreconditionError("grid bounds and resolution must have the same nonzero length");
	size_ = 1;
	cell_volume_ = 1;
	for (std::size_t a = 0; a < d; ++a)
	{
		if (resolution_[a] < 2)
			throw PreconditionError("grid resolution must be >= 2 per axis");
		if (!(upper_[a] > lower_[a]))
			throw PreconditionError("grid extent must be positive on every axis");
		const double h = geometry_ == Geometry::Torus ? (upper_[a] - lower_[a]) / resolution_[a]
		                                              : (upper_[a] - lower_[a]) / (resolution_[a] - 1);
		spacing_.push_back(h);
		cell_volume_ *= h;
		size_ *= std::size_t(resolution_[a]);
	}
	points_.resize(size_ * d);
	for (std::size_t i = 0; i < size_; ++i)
		point(i, std::span<double>(points_.data() + i * d, d));
}

Grid Grid::box(std::vector<double> lower, std::vector<double> upper, std::vector<int> resolution)
{
	return Grid(Geometry::Box, std::move(lower), std::move(upper), std::move(resolution));
}

Grid Grid::torus(std::vector<double> periods, std::vector<int> resolution)
{
	std::vector<double> lower(periods.size(), 0.0);
	return Grid(Geometry::Torus, std::move(lower), std::move(periods), std::move(resolution));
}

void Grid::point(std::size_t index, std::span<double> out) const
{
	for (int a = dimension() - 1; a >= 0; --a)
	{
		const auto r = std::size_t(resolution_[a]);
		const std::size_t j = index % r;
		index /= r;
		// the last vertex is pinned to the upper bound to avoid drift
		out[a] = (geometry_ == Geometry::Box && j + 1 == r) ? upper_[a] : lower_[a] + double(j) * spacing_[a];
	}
}

bool Grid::on_boundary(std::size_t index) const
{
	if (geometry_ == Geometry::Torus)
		return false;
	for (int a = dimension() - 1; a >= 0; --a)
	{
		const auto r = std::size_t(resolution_[a]);
		const std::size_t j = index % r;
		index /= r;
		if (j == 0 || j + 1 == r)
			return true;
	}
	return false;
}

Grid Grid::refined(int factor) const
{
	if (factor < 1)
		throw PreconditionError("refinement factor must be >= 1");
	std::vector<int> res = resolution_;
	for (int& r : res)
		r = geometry_ == Geometry::Torus ? r * factor : factor * (r - 1) + 1;
	return Grid(geometry_, lower_, upper_, std::move(res));
}

nlohmann::json Grid::to_json() const
{
	nlohmann::json j;
	j["dim"] = dimension();
	j["resolution"] = resolution_;
	if (is_torus())
	{
		j["geometry"] = "torus";
		j["periods"] = upper_;
	}
	else
	{
		j["geometry"] = "box";
		nlohmann::json b = nlohmann::json::array();
		for (int a = 0; a < dimension(); ++a)
			b.push_back({lower_[a], upper_[a]});
		j["bounds"] = b;
	}
	return j;
}

Grid Grid::from_json(const nlohmann::json& j)
{
	try
	{
		const int dim = j.at("dim").get<int>();
		std::vector<int> res;
		if (j.at("resolution").is_array())
			res = j.at("resolution").get<std::vector<int>>();
		else
			res.assign(std::size_t(dim), j.at("resolution").get<int>());
		if (int(res.size()) != dim)
			throw FormatError("grid resolution length differs from dim");
		const std::string geometry = j.at("geometry").get<std::string>();
		if (geometry == "torus")
		{
			auto periods = j.at("periods").get<std::vector<double>>();
			if (int(periods.size()) != dim)
				throw FormatError("grid periods length differs from dim");
			return torus(std::move(periods), std::move(res));
		}
		if (geometry == "box")
		{
			std::vector<double> lo, hi;
			for (const auto& b : j.at("bounds"))
			{
				lo.push_back(b.at(0).get<double>());
				hi.push_back(b.at(1).get<double>());
			}
			if (int(lo.size()) != dim)
				throw FormatError("grid bounds length differs from dim");
			return box(std::move(lo), std::move(hi), std::move(res));
		}
		throw FormatError("unknown grid geometry '" + geometry + "'");
	}
	catch (const nlohmann::json::exception& e)
	{
		throw FormatError(std::string("bad grid spec: ") + e.what());
	}
}

// ---------------------------------------------------------------------------

Field::Field(std::shared_ptr<const Grid> grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values))
{
	if (!grid_)
		throw PreconditionError("field without grid");
	if (values_.size() != grid_->size())
		throw PreconditionError("field size differs from grid size");
}

Field Field::operator+(const Field& other) const
{
	if (other.grid_ != grid_ && other.grid_->points() != grid_->points())
		throw PreconditionError("fields live on different grids");
	std::vector<double> v(values_);
	for (std::size_t i = 0; i < v.size(); ++i)
		v[i] += other.values_[i];
	return Field(grid_, std::move(v));
}

Field Field::operator*(double s) const
{
	std::vector<double> v(values_);
	for (double& x : v)
		x *= s;
	return Field(grid_, std::move(v));
}

Field Field::shifted(double c) const
{
	std::vector<double> v(values_);
	for (double& x : v)
		x += c;
	return Field(grid_, std::move(v));
}

Field sample(const expr::Program& program, std::shared_ptr<const Grid> grid, double t)
{
	const int d = grid->dimension();
	if (2 * program.max_pair_index() > d)
		throw PreconditionError("expression uses coordinates beyond the grid dimension");
	std::vector<double> v(grid->size());
	std::vector<double> reg;
	const auto& pts = grid->points();
	for (std::size_t i = 0; i < v.size(); ++i)
		program.run(std::span<const double>(pts.data() + i * d, d), t, std::span<double>(&v[i], 1), reg);
	return Field(std::move(grid), std::move(v));
}

Field sample(const expr::Expression& e, std::shared_ptr<const Grid> grid, double t)
{
	return sample(expr::Program(e), std::move(grid), t);
}

double oscillation(const Field& f)
{
	const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
	return *hi - *lo;
}

double sup_norm(const Field& f)
{
	double m = 0;
	for (double v : f.values())
		m = std::max(m, std::abs(v));
	return m;
}

double lp_norm(const Field& f, double p)
{
	if (!(p > 0))
		throw PreconditionError("lp_norm requires p > 0");
	double s = 0;
	for (double v : f.values())
		s += std::pow(std::abs(v), p);
	return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double mean(const Field& f)
{
	double s = 0;
	for (double v : f.values())
		s += v;
	return s / double(f.values().size());
}

Field mean_zero_normalize(const Field& f)
{
	if (!f.grid().is_torus())
		throw GeometryError("mean-zero normalization is defined on torus grids only");
	return f.shifted(-mean(f));
}

bool support_margin_ok(const Field& f, double rel_tol)
{
	if (f.grid().is_torus())
		return true;
	const double osc = oscillation(f);
	double edge = 0;
	for (std::size_t i = 0; i < f.values().size(); ++i)
		if (f.grid().on_boundary(i))
			edge = std::max(edge, std::abs(f.values()[i]));
	return edge <= rel_tol * osc;
}

void write_csv(std::ostream& os, const Field& f)
{
	const int d = f.grid().dimension();
	for (int a = 0; a < d; ++a)
		os << (a % 2 == 0 ? "x" : "y") << (a / 2 + 1) << ',';
	os << "value\n";
	const auto& pts = f.grid().points();
	char buf[32];
	auto put = [&](double v) {
		auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
		os.write(buf, p - buf);
	};
	for (std::size_t i = 0; i < f.values().size(); ++i)
	{
		for (int a = 0; a < d; ++a)
		{
			put(pts[i * d + a]);
			os << ',';
		}
		put(f.values()[i]);
		os << '\n';
	}
}

Field read_csv(std::istream& is, std::shared_ptr<const Grid> grid)
{
	const int d = grid->dimension();
	std::string line;
	if (!std::getline(is, line))
		throw FormatError("empty field CSV");
	std::vector<double> values;
	values.reserve(grid->size());
	std::vector<double> row;
	std::size_t lineno = 1;
	while (std::getline(is, line))
	{
		++lineno;
		if (line.empty())
			continue;
		row.clear();
		std::stringstream ss(line);
		std::string cell;
		while (std::getline(ss, cell, ','))
		{
			double v = 0;
			auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
			if (ec != std::errc())
				throw FormatError("bad number on CSV line " + std::to_string(lineno));
			row.push_back(v);
		}
		if (int(row.size()) != d + 1)
			throw FormatError("CSV line " + std::to_string(lineno) + " has the wrong column count");
		const std::size_t i = values.size();
		if (i >= grid->size())
			throw FormatError("CSV has more rows than the grid has points");
		for (int a = 0; a < d; ++a)
			if (std::abs(row[a] - grid->points()[i * d + a]) > 1e-9 * (1 + std::abs(row[a])))
				throw FormatError("CSV coordinates on line " + std::to_string(lineno) + " do not match the grid");
		values.push_back(row[d]);
	}
	if (values.size() != grid->size())
		throw FormatError("CSV has fewer rows than the grid has points");
	return Field(std::move(grid), std::move(values));
}

} // namespace hoferlab
