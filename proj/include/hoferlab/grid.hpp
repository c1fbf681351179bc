#pragma once

// Uniform sample grids on a compact box in R^{2n} or on a flat torus T^{2n},
// and the spatial norms used by the length functionals.
//
// Box grids are vertex-centred (both faces are sampled) and represent fields
// compactly supported inside the box, so sum(values) * cell_volume is the
// trapezoid rule for such fields. Torus grids sample [0, P) per axis.

#include "hoferlab/expr.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hoferlab {

enum class Geometry { Box, Torus };

class Grid
{
public:
	static Grid box(std::vector<double> lower, std::vector<double> upper, std::vector<int> resolution);
	static Grid torus(std::vector<double> periods, std::vector<int> resolution);

	Geometry geometry() const { return geometry_; }
	bool is_torus() const { return geometry_ == Geometry::Torus; }
	int dimension() const { return int(resolution_.size()); }
	std::size_t size() const { return size_; }
	double cell_volume() const { return cell_volume_; }
	const std::vector<int>& resolution() const { return resolution_; }
	const std::vector<double>& lower() const { return lower_; }
	const std::vector<double>& upper() const { return upper_; }
	double spacing(int axis) const { return spacing_[axis]; }

	/// Coordinates of sample `index` (row-major, last axis fastest).
	void point(std::size_t index, std::span<double> out) const;
	/// All sample points, flattened, `dimension()` values per point.
	const std::vector<double>& points() const { return points_; }
	/// True if the sample lies on the outer face of a box grid.
	bool on_boundary(std::size_t index) const;

	/// Same geometry with every resolution multiplied by `factor`
	/// (box grids keep their vertices: r -> factor*(r-1)+1).
	Grid refined(int factor) const;

	nlohmann::json to_json() const;
	static Grid from_json(const nlohmann::json& j);

private:
	Grid(Geometry g, std::vector<double> lower, std::vector<double> upper, std::vector<int> resolution);

	Geometry geometry_;
	std::vector<double> lower_;
	std::vector<double> upper_;
	std::vector<int> resolution_;
	std::vector<double> spacing_;
	std::size_t size_ = 0;
	double cell_volume_ = 0;
	std::vector<double> points_;
};

/// Samples of a function aligned with the points of a Grid.
class Field
{
public:
	Field(std::shared_ptr<const Grid> grid, std::vector<double> values);

	const Grid& grid() const { return *grid_; }
	const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
	const std::vector<double>& values() const { return values_; }

	Field operator+(const Field& other) const;
	Field operator*(double s) const;
	Field shifted(double c) const;

private:
	std::shared_ptr<const Grid> grid_;
	std::vector<double> values_;
};

/// Evaluates `e` at every grid point at time t.
Field sample(const expr::Expression& e, std::shared_ptr<const Grid> grid, double t);
Field sample(const expr::Program& program, std::shared_ptr<const Grid> grid, double t);

/// max - min of the samples.
double oscillation(const Field& f);
/// max |value|
double sup_norm(const Field& f);
/// (sum |v|^p * cell_volume)^(1/p); a quasinorm for p < 1.
double lp_norm(const Field& f, double p);
/// Volume-weighted mean.
double mean(const Field& f);
/// Subtracts the mean; torus grids only (GeometryError otherwise).
Field mean_zero_normalize(const Field& f);

/// True if |values| on the box boundary layer stay below rel_tol * oscillation.
/// Always true on torus grids.
bool support_margin_ok(const Field& f, double rel_tol = 1e-9);

/// CSV with header x1,y1,...,value.
void write_csv(std::ostream& os, const Field& f);
/// Reads values for the given grid; coordinates must match the grid samples.
Field read_csv(std::istream& is, std::shared_ptr<const Grid> grid);

} // namespace hoferlab
