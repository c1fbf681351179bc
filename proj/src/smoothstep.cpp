#include "hoferlab/smoothstep.hpp"

#include "hoferlab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hoferlab {

namespace {

constexpr int kMaxOrder = 31;

/// Truncated Taylor series c_0 + c_1 h + ... + c_d h^d (d = n - 1).
struct Jet
{
	std::array<double, kMaxOrder + 1> c{};
	int n = 1;

	explicit Jet(int size) : n(size) {}
	double& operator[](int i) { return c[i]; }
	double operator[](int i) const { return c[i]; }
};

Jet reciprocal(const Jet& a)
{
	Jet c(a.n);
	c[0] = 1.0 / a[0];
	for (int k = 1; k < a.n; ++k)
	{
		double s = 0;
		for (int j = 1; j <= k; ++j)
			s += a[j] * c[k - j];
		c[k] = -s * c[0];
	}
	return c;
}

Jet exp(const Jet& a)
{
	Jet b(a.n);
	b[0] = std::exp(a[0]);
	for (int k = 1; k < a.n; ++k)
	{
		double s = 0;
		for (int j = 1; j <= k; ++j)
			s += double(j) * a[j] * b[k - j];
		b[k] = s / double(k);
	}
	return b;
}

Jet multiply(const Jet& a, const Jet& b)
{
	Jet c(a.n);
	for (int i = 0; i < a.n; ++i)
		for (int j = 0; i + j < a.n; ++j)
			c[i + j] += a[i] * b[j];
	return c;
}

// exp(-1/x + shift) and all its derivatives underflow below this exponent
constexpr double kUnderflow = -745.0;

/// exp(-1/(x0 + slope*h) + shift) as a jet in h.
Jet glue(double x0, double slope, int order, double shift)
{
	Jet out(order + 1);
	if (x0 <= 0 || -1.0 / x0 + shift <= kUnderflow)
		return out;
	Jet x(order + 1);
	x[0] = x0;
	if (order >= 1)
		x[1] = slope;
	Jet r = reciprocal(x);
	for (int i = 0; i < r.n; ++i)
		r[i] = -r[i];
	r[0] += shift;
	return exp(r);
}

/// order-th Taylor coefficient of step(w; lo, hi) around w0.
double step_coefficient(double w0, double lo, double hi, int order)
{
	if (w0 <= lo)
		return 0.0;
	if (w0 >= hi)
		return order == 0 ? 1.0 : 0.0;
	const double a = w0 - lo, b = hi - w0;
	if (order == 0)
		return 1.0 / (1.0 + std::exp(1.0 / a - 1.0 / b));
	// scale both glue terms so the larger one is exp(0)
	const double shift = std::min(1.0 / a, 1.0 / b);
	Jet rising = glue(a, 1.0, order, shift);
	Jet falling = glue(b, -1.0, order, shift);
	Jet denom(order + 1);
	for (int i = 0; i <= order; ++i)
		denom[i] = rising[i] + falling[i];
	return multiply(rising, reciprocal(denom))[order];
}

double factorial(int n)
{
	double f = 1;
	for (int i = 2; i <= n; ++i)
		f *= i;
	return f;
}

void check(double lo, double hi, int order)
{
	if (!(lo < hi))
		throw PreconditionError("cutoff requires lower edge < upper edge");
	if (order < 0)
		throw PreconditionError("negative derivative order");
	if (order > kMaxOrder)
		throw PreconditionError("cutoff derivative order above " + std::to_string(kMaxOrder));
}

} // namespace

double step_derivative(double s, double lo, double hi, int order)
{
	check(lo, hi, order);
	return step_coefficient(s, lo, hi, order) * factorial(order);
}

double bump_derivative(double s, double inner, double outer, double center, int order)
{
	check(inner, outer, order);
	if (inner < 0)
		throw PreconditionError("cutoff inner radius must be >= 0");
	const double d = s - center;
	const double w = std::abs(d);
	const double value = step_coefficient(w, inner, outer, order) * factorial(order);
	if (order == 0)
		return 1.0 - value;
	// d^j/ds^j (1 - step(|s - c|)) = -sign^j * step^(j)(w)
	const double sign = (d < 0 && order % 2 == 1) ? -1.0 : 1.0;
	return -sign * value;
}

} // namespace hoferlab
