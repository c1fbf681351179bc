#pragma once

// Tracer-level integration of Hamiltonian flows.
//
// Convention: i_{X_F} omega = -dF with omega = sum dx_i ^ dy_i, so
//   dx_i/dt = -dF/dy_i,   dy_i/dt = dF/dx_i.
// With F = 2 x1 this is the translation by 2t along y1.

#include "hoferlab/hampath.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hoferlab {

class TracerCloud
{
public:
	TracerCloud(int dimension, std::vector<double> coords, std::vector<std::string> labels = {});

	int dimension() const { return dimension_; }
	std::size_t size() const { return coords_.size() / std::size_t(dimension_); }
	std::span<const double> point(std::size_t i) const
	{
		return {coords_.data() + i * std::size_t(dimension_), std::size_t(dimension_)};
	}
	std::span<double> point(std::size_t i) { return {coords_.data() + i * std::size_t(dimension_), std::size_t(dimension_)}; }
	const std::vector<double>& coords() const { return coords_; }
	const std::vector<std::string>& labels() const { return labels_; }

	/// Points on a uniform lattice inside a box (both faces included when `closed`).
	static TracerCloud lattice(std::span<const double> lower, std::span<const double> upper, int per_axis,
	                           bool closed = true);
	/// n points on a circle in the (x1, y1) plane.
	static TracerCloud circle(double cx, double cy, double radius, int n);

	void write_csv(std::ostream& os) const;
	static TracerCloud read_csv(std::istream& is);

private:
	int dimension_;
	std::vector<double> coords_;
	std::vector<std::string> labels_;
};

struct IntegratorStats
{
	int steps = 0;              ///< RK4 steps per piece
	double error_estimate = 0;  ///< max |x_N - x_{N/2}| / 15 over tracers
	int doublings = 0;          ///< automatic step doublings (area guard)
};

struct FlowMap
{
	TracerCloud initial;
	TracerCloud final;
	std::string path_hash;
	IntegratorStats stats;

	nlohmann::json stats_json() const;
};

struct FlowOptions
{
	double safety_box = 1e6;  ///< BlowUp if any coordinate exceeds this magnitude
	bool error_estimate = true;
};

/// Classical RK4 with `steps_per_piece` steps on every piece.
FlowMap integrate(const HamiltonianPath& f, const TracerCloud& cloud, int steps_per_piece,
                  const FlowOptions& options = {});

/// Symplectic area sum_i oint x_i dy_i of the closed polygon through the cloud.
double loop_area(const TracerCloud& loop);

/// Integrates a closed loop and doubles the step count until the enclosed
/// area drifts by less than `tolerance` (at most `max_doublings` times).
FlowMap integrate_area_guarded(const HamiltonianPath& f, const TracerCloud& loop, int steps_per_piece,
                               double tolerance = 1e-6, int max_doublings = 6);

/// Sampled C^0 distance: max Euclidean distance of final points.
/// Throws CloudMismatch unless both maps start from the same cloud.
double c0_distance(const FlowMap& a, const FlowMap& b);

using RegionTest = std::function<bool(std::span<const double>)>;

struct DisplacementCertificate
{
	bool displaced = false;
	/// min distance from a moved A-sample to the sampled A (0 if any landed in A)
	double margin = 0;
	/// largest nearest-neighbour spacing of the A-samples
	double density = 0;
	std::size_t samples = 0;

	nlohmann::json to_json() const;
};

/// Sampled certificate that A and its image are disjoint. A is given by a
/// membership test evaluated on the initial cloud.
DisplacementCertificate displaced(const FlowMap& flow, const RegionTest& region);

/// Applies a path's flow to the final points of `map` (composition).
FlowMap then(const FlowMap& map, const HamiltonianPath& f, int steps_per_piece, const FlowOptions& options = {});

} // namespace hoferlab
