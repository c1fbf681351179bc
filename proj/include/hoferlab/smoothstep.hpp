#pragma once

// C^inf cutoffs built from the glue function g(x) = exp(-1/x) (x > 0), 0 otherwise.
//
//   step(s; lo, hi) = g(s - lo) / (g(s - lo) + g(hi - s))     0 for s <= lo, 1 for s >= hi
//   bump(s)         = g(outer - w) / (g(outer - w) + g(w - inner)),  w = |s - center|
//
// Derivatives of any order are computed exactly (to rounding) by truncated
// Taylor arithmetic.

namespace hoferlab {

/// order-th derivative of step(s; lo, hi) with respect to s.
double step_derivative(double s, double lo, double hi, int order = 0);

/// order-th derivative of the plateau cutoff with respect to s.
double bump_derivative(double s, double inner, double outer, double center = 0, int order = 0);

/// Plateau cutoff: 1 on |s - center| <= inner, 0 on |s - center| >= outer.
struct SmoothStep
{
	double center = 0;
	double inner = 0.25;
	double outer = 0.75;

	double operator()(double s, int order = 0) const { return bump_derivative(s, inner, outer, center, order); }
};

} // namespace hoferlab
