#pragma once

// Seeded random paths with closed-form time behaviour. Every piece has the
// form a(t) h(x) where every derivative of a keeps one sign on the piece, so
// osc(d^i F / dt^i) = |a^(i)(t)| osc(h) and lengths have an analytic value.

#include "hoferlab/hampath.hpp"
#include "hoferlab/lengths.hpp"

#include <random>
#include <vector>

namespace hoferlab::corpus {

/// sign * sum c_j t^j with c_j >= 0, or sign * c exp(lambda t) with c > 0.
struct TimeFactor
{
	bool exponential = false;
	double sign = 1;
	std::vector<double> coeffs;
	double c = 1;
	double lambda = 0;

	expr::Expression expression() const;
	/// a^(order)(t)
	double derivative(int order, double t) const;
	/// int_t0^t1 |a^(order)(t)| dt in closed form.
	double abs_integral(int order, double t0, double t1) const;
};

struct CorpusPath
{
	HamiltonianPath path;
	std::vector<TimeFactor> factors;          ///< one per piece
	std::vector<expr::Expression> profiles;   ///< h per piece
};

/// Box grid on [-3, 3]^2 used with the corpus.
Grid corpus_grid(int resolution = 41);

double uniform(std::mt19937_64& rng, double lo, double hi);

TimeFactor random_time_factor(std::mt19937_64& rng);
/// Compactly supported profile inside [-2.5, 2.5]^2.
expr::Expression random_profile(std::mt19937_64& rng);

/// One to four pieces with random breakpoints.
CorpusPath random_path(std::mt19937_64& rng);

/// t + beta sin(2 pi t) / (2 pi) with |beta| < 1, or a two-speed map.
TimeMap random_time_map(std::mt19937_64& rng);

/// m paths with disjoint declared support boxes inside [-4, 4]^2, mixed signs.
std::vector<SupportedPath> random_disjoint_family(std::mt19937_64& rng, int m);
Grid disjoint_grid(int resolution = 49);

/// Flat torus R^2 / (2 pi Z)^2 path with a mean-zero trigonometric
/// potential. With `sign_definite` every harmonic coefficient is a TimeFactor,
/// otherwise some oscillate in sign.
TorusSymplecticPath random_torus_path(std::mt19937_64& rng, bool sign_definite = true);
Grid torus_grid(int resolution = 32);

} // namespace hoferlab::corpus
