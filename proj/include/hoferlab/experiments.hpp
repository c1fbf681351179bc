#pragma once

// Explicit constructions and estimates: the G_m degeneracy family, square
// displacement, the shift conjugator, commutators, the disjoint-support
// product bound and the ledger of explicit constants.

#include "hoferlab/flow.hpp"
#include "hoferlab/hampath.hpp"
#include "hoferlab/lengths.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hoferlab::experiments {

// ---------------------------------------------------------------- G_m family

struct GmSpec
{
	int m = 4;
	/// Adds the mirrored copy -2 (x1 - 4) delta_m(...) centred at (4, 2t).
	bool closed_mode = false;
};

/// 2 x1 delta_m(sqrt(x1^2 + (y1 - 2t)^2) - 1) with delta_m(s) = SmoothStep(m s).
expr::Expression gm_expression(const GmSpec& spec);
HamiltonianPath gm_path(const GmSpec& spec);

struct ShellOptions
{
	double panel_width = 0; ///< radial panel width; 0 means 1/(8m)
	int angular_nodes = 1024;
};

/// || d^i G_m / dt^i (., t) ||_p by polar quadrature around the moving
/// centre(s). Throws ShellUnresolved if panel_width > 1/(8m).
double gm_norm(const GmSpec& spec, int i, double p, double t, const ShellOptions& options = {});

/// Largest |G_m(., t)| sampled outside the support shell(s), relative to the
/// largest value sampled inside.
double gm_outside_ratio(const GmSpec& spec, double t, int samples_per_axis = 201);

struct GmRow
{
	int m = 0;
	std::vector<double> values; ///< max over sampled t of ||d^i G_m / dt^i||_p, i = 0..k
	std::vector<double> totals; ///< int_0^1 ||d^i G_m / dt^i||_p dt
	double length_kp = 0;       ///< sum of totals
};

struct GmReport
{
	int k = 0;
	double p = 1;
	bool closed_mode = false;
	std::vector<GmRow> rows;
	std::vector<double> slopes;   ///< least-squares log-log slope per order
	std::vector<double> expected; ///< (i p - 1) / p

	/// Per order: "decay" (i p < 1, slope within tol of expected),
	/// "control" (i p > 1, slope >= 0) or "boundary".
	std::vector<std::string> row_kind() const;
	std::vector<bool> slope_ok(double tol = 0.15) const;

	nlohmann::json to_json() const;
	void write_csv(std::ostream& os) const;
	/// gnuplot-ready: m followed by one column per order.
	void write_dat(std::ostream& os) const;
};

GmReport gm_report(const std::vector<int>& ms, int k, double p, bool closed_mode = false,
                   const ShellOptions& options = {}, int time_samples = 8);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ------------------------------------------------------- square displacement

struct SquareDisplacement
{
	double area = 1;
	double side = 1;
	double speed = 0; ///< translation distance of the square along x1
	HamiltonianPath path;
	Grid grid;        ///< box grid containing the support
	std::vector<double> lengths; ///< length_k for k = 0..max_k
	DisplacementCertificate certificate;
	bool length_ok = false;

	nlohmann::json to_json() const;
};

/// Autonomous H = -v y1 W(y1) chi(x1) translating Q = (0, s)^2 by v = (1 + eta) s
/// with s^2 = area. Throws CertificateFailed unless Q is displaced and
/// |length_k - area| <= 0.02 area for every k <= max_k.
SquareDisplacement square_displacement(double area, int max_k = 5, int tracers_per_axis = 24);

// ------------------------------------------------------------------- shift

struct SikoravShift
{
	double v = 1;
	double eps = 0.1;
	HamiltonianPath path;

	/// g' = S g S^-1 for g supported in {x1 > 0}, where S acts as translation by v.
	/// Throws PreconditionError if g does not vanish on the `check` samples with x1 <= 0.
	HamiltonianPath conjugate(const HamiltonianPath& g, const Grid& check) const;
};

/// H = -eta(x1) v y1, eta = step(x1; -eps, 0), in dimension 2 * pairs.
SikoravShift sikorav_shift(double v, double eps, int pairs = 1);

struct ShiftCertificate
{
	double fixed_error = 0;   ///< max |delta| over tracers with x1 < -eps
	double shifted_error = 0; ///< max |delta - (v, 0, ...)| over tracers with x1 > 0
	std::size_t fixed = 0;
	std::size_t shifted = 0;
	bool ok = false;

	nlohmann::json to_json() const;
};

ShiftCertificate shift_certificate(const SikoravShift& s, const TracerCloud& cloud, int steps = 64);

// -------------------------------------------------------------- commutator

struct CommutatorOptions
{
	int k = 1;
	int steps = 256;
	int time_samples = kDefaultTimeSamples;
	double affine_tolerance = 1e-7;
	double flow_tolerance = 1e-6;
	int cloud_per_axis = 7;
};

struct CommutatorResult
{
	HamiltonianPath path = HamiltonianPath::single(expr::Expression(), 1);
	std::string construction; ///< which factor was used as the affine conjugator
	LengthReport length;
	double length_f = 0;
	double length_g = 0;
	double bound = 0; ///< 2^(k+1) * length_k of the conjugated factor
	bool bound_holds = false;
	double flow_defect = 0; ///< sampled C^0 distance to the sequential composition
	bool flow_certified = false;

	nlohmann::json to_json() const;
};

/// Time-one map of g restricted to a box, if it is affine there.
std::optional<AffineSymplectic> affine_on_box(const HamiltonianPath& g, std::span<const double> lower,
                                              std::span<const double> upper, int steps, double tolerance,
                                              int per_axis = 5);

/// Path for [phi, psi] = phi psi phi^-1 psi^-1. Uses psi as an affine
/// conjugator on supp(f), or phi on supp(g); ConjugationUnsupported otherwise.
CommutatorResult commutator_path(const SupportedPath& f, const SupportedPath& g, const Grid& grid,
                                 const CommutatorOptions& options = {});

// ---------------------------------------------------------- disjoint bound

struct DisjointReport
{
	int k = 0;
	double lhs = 0; ///< coarse length of the product
	std::vector<double> per_path;
	double rhs = 0; ///< 2 (k + 1) max_j
	bool holds = false;
	std::vector<double> product_per_order;
	std::vector<double> max_per_order;
	std::vector<double> min_per_order;

	nlohmann::json to_json() const;
};

/// Checks coarse_length_k(product) <= 2 (k + 1) max_j coarse_length_k(path_j).
DisjointReport disjoint_bound_check(std::span<const SupportedPath> paths, int k, const Grid& grid,
                                    int time_samples = kDefaultTimeSamples, double tol = 1e-9);

// ----------------------------------------------------------- constants

struct LedgerEntry
{
	std::string name;
	std::string formula;
	std::string value; ///< exact integer or reduced fraction
	std::string note;
};

struct ConstantsLedger
{
	int k = 0;
	std::vector<LedgerEntry> entries;

	const LedgerEntry& at(const std::string& name) const;
	nlohmann::json to_json() const;
	void write_table(std::ostream& os) const;
};

/// Exact values for 0 <= k <= 20.
ConstantsLedger constants(int k);

} // namespace hoferlab::experiments
