#pragma once

// Length functionals of Hamiltonian paths. Every value here is the length of
// the path that was supplied; the distances d_k, d*_k, d_(k,p) themselves are
// infima over all connecting paths and are only bounded from above by these.

#include "hoferlab/expr.hpp"
#include "hoferlab/grid.hpp"
#include "hoferlab/hampath.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hoferlab {

struct QuadratureInfo
{
	int time_samples = 0; ///< nodes per piece
	std::string scheme;
};

struct LengthReport
{
	std::string kind; ///< "k", "coarse", "kp" or "hl"
	int k = 0;
	double p = 0; ///< exponent for "kp", 0 otherwise
	double total = 0;
	std::vector<double> per_order;             ///< i = 0..k
	std::vector<std::vector<double>> per_piece; ///< [piece][order]
	QuadratureInfo quadrature;
	/// fine + (fine - coarse) / 3 from a half-resolution grid, when requested
	std::optional<double> extrapolated_total;
	std::vector<std::string> notes;

	nlohmann::json to_json() const;
	void write_csv(std::ostream& os) const;
};

/// Nodes per piece used when callers do not care.
inline constexpr int kDefaultTimeSamples = 40;

/// sum_l sum_{i<=k} int osc(d^i F^l / dt^i (., t)) dt, composite 5-point
/// Gauss-Legendre in t, grid oscillation in x.
LengthReport length_k(const HamiltonianPath& f, int k, const Grid& grid, int time_samples = kDefaultTimeSamples);

/// sum_{i<=k} max over pieces and t of osc(d^i F / dt^i). The time maximum is
/// located by sampling and refined by golden-section search, so the value does
/// not depend on the division.
LengthReport coarse_length_k(const HamiltonianPath& f, int k, const Grid& grid,
                             int time_samples = kDefaultTimeSamples);

/// sum_l sum_{i<=k} int ||d^i F^l / dt^i (., t)||_p dt.
LengthReport length_kp(const HamiltonianPath& f, int k, double p, const Grid& grid,
                       int time_samples = kDefaultTimeSamples);

/// Adds a two-resolution extrapolated total (grid coarsened by one level).
LengthReport with_two_resolution_bound(const HamiltonianPath& f, const std::string& kind, int k, double p,
                                       const Grid& grid, int time_samples = kDefaultTimeSamples);

/// One piece of a symplectic isotopy of the flat torus T^{2n}: the dual
/// 1-form is sum_j lambda_j(t) h_j + dU_t with h_j the constant coordinate
/// 1-forms (interleaved order dx1, dy1, ...).
struct TorusPiece
{
	double t_start = 0;
	double t_end = 1;
	std::vector<expr::Expression> harmonic; ///< 2n coefficients, functions of t only
	expr::Expression exact;                 ///< potential U(x, t)
};

class TorusSymplecticPath
{
public:
	TorusSymplecticPath(std::vector<TorusPiece> pieces, std::vector<double> periods);

	const std::vector<TorusPiece>& pieces() const { return pieces_; }
	const std::vector<double>& periods() const { return periods_; }
	int pairs() const { return int(periods_.size()) / 2; }

	/// The exact parts as a Hamiltonian path.
	HamiltonianPath exact_part() const;

	nlohmann::json to_json() const;
	static TorusSymplecticPath from_json(const nlohmann::json& j);

private:
	std::vector<TorusPiece> pieces_;
	std::vector<double> periods_;
};

/// Pieces s'(t) lambda(s(t)), s'(t) U(x, s(t)).
TorusSymplecticPath reparametrize(const TorusSymplecticPath& f, const TimeMap& s);

/// sum_{i<=k} int ( sum_j |d^i lambda_j / dt^i| + osc(d^i U / dt^i) ) dt on a torus grid.
LengthReport hofer_like_length_k(const TorusSymplecticPath& f, int k, const Grid& grid,
                                 int time_samples = kDefaultTimeSamples);

/// int_0^1 lambda_j(t) dt for each j.
std::vector<double> flux_harmonic(const TorusSymplecticPath& f, int time_samples = kDefaultTimeSamples);

/// int_0^1 sum_j |lambda_j(t)| dt.
double harmonic_l1_length(const TorusSymplecticPath& f, int time_samples = kDefaultTimeSamples);

namespace quadrature {

/// Composite 5-point Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(double a, double b, int panels, std::vector<double>& nodes, std::vector<double>& weights);

/// Panels used for `time_samples` nodes per piece.
int panels_for(int time_samples);

} // namespace quadrature

} // namespace hoferlab
