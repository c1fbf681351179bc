#include "hoferlab/corpus.hpp"

#include "hoferlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hoferlab::corpus {

using expr::Expression;
using expr::Var;

namespace {

Expression num(double v) { return expr::constant(v); }
Expression tv() { return expr::variable(Var::t()); }

/// Tiles [0, 1] with `pieces` intervals no shorter than 0.05.
std::vector<double> random_breaks(std::mt19937_64& rng, int pieces)
{
	for (;;)
	{
		std::vector<double> b{0.0, 1.0};
		for (int i = 1; i < pieces; ++i)
			b.push_back(uniform(rng, 0.05, 0.95));
		std::sort(b.begin(), b.end());
		bool ok = true;
		for (std::size_t i = 1; i < b.size(); ++i)
			ok = ok && b[i] - b[i - 1] >= 0.05;
		if (ok)
			return b;
	}
}

} // namespace

double uniform(std::mt19937_64& rng, double lo, double hi)
{
	return lo + (hi - lo) * (double(rng() >> 11) * 0x1p-53);
}

Expression TimeFactor::expression() const
{
	if (exponential)
		return num(sign * this->c) * expr::exp(num(lambda) * tv());
	Expression sum = num(coeffs.empty() ? 0.0 : coeffs[0]);
	for (std::size_t j = 1; j < coeffs.size(); ++j)
		sum = sum + num(coeffs[j]) * expr::pow(tv(), int(j));
	return num(sign) * sum;
}

double TimeFactor::derivative(int order, double t) const
{
	if (exponential)
		return sign * this->c * std::pow(lambda, order) * std::exp(lambda * t);
	double v = 0;
	for (std::size_t j = std::size_t(order); j < coeffs.size(); ++j)
	{
		double f = 1;
		for (int q = 0; q < order; ++q)
			f *= double(j - std::size_t(q));
		v += coeffs[j] * f * std::pow(t, double(j) - order);
	}
	return sign * v;
}

double TimeFactor::abs_integral(int order, double t0, double t1) const
{
	if (exponential)
	{
		if (lambda == 0)
			return order == 0 ? this->c * (t1 - t0) : 0.0;
		// |c lambda^order| int e^{lambda t}
		return std::abs(this->c * std::pow(lambda, order)) * std::abs(std::exp(lambda * t1) - std::exp(lambda * t0)) /
		       std::abs(lambda);
	}
	// every derivative is >= 0 on [0, 1] up to the sign
	if (order > 0)
		return std::abs(derivative(order - 1, t1) - derivative(order - 1, t0));
	double v = 0;
	for (std::size_t j = 0; j < coeffs.size(); ++j)
		v += coeffs[j] * (std::pow(t1, double(j + 1)) - std::pow(t0, double(j + 1))) / double(j + 1);
	return v;
}

Grid corpus_grid(int resolution) { return Grid::box({-3, -3}, {3, 3}, {resolution, resolution}); }

TimeFactor random_time_factor(std::mt19937_64& rng)
{
	TimeFactor a;
	a.sign = rng() % 2 ? 1.0 : -1.0;
	a.exponential = rng() % 3 == 0;
	if (a.exponential)
	{
		a.c = uniform(rng, 0.2, 1.5);
		a.lambda = uniform(rng, -1.5, 1.5);
	}
	else
	{
		const int degree = int(rng() % 4);
		for (int j = 0; j <= degree; ++j)
			a.coeffs.push_back(uniform(rng, 0.05, 1.0));
	}
	return a;
}

Expression random_profile(std::mt19937_64& rng)
{
	const Expression x = expr::variable(Var::x(1));
	const Expression y = expr::variable(Var::y(1));
	const double rx = uniform(rng, 0.3, 0.8), Rx = rx + uniform(rng, 0.4, 1.0);
	const double ry = uniform(rng, 0.3, 0.8), Ry = ry + uniform(rng, 0.4, 1.0);
	const double cx = uniform(rng, -(2.5 - Rx), 2.5 - Rx);
	const double cy = uniform(rng, -(2.5 - Ry), 2.5 - Ry);
	const double c0 = uniform(rng, 0.5, 1.5);
	const double c1 = uniform(rng, -0.5, 0.5);
	const double c2 = uniform(rng, -0.5, 0.5);
	const Expression poly = num(c0) + num(c1) * x + num(c2) * expr::sin(y);
	return expr::bump(x, rx, Rx, cx) * expr::bump(y, ry, Ry, cy) * poly;
}

CorpusPath random_path(std::mt19937_64& rng)
{
	const int pieces = 1 + int(rng() % 4);
	const auto b = random_breaks(rng, pieces);
	std::vector<Piece> ps;
	std::vector<TimeFactor> factors;
	std::vector<Expression> profiles;
	for (int l = 0; l < pieces; ++l)
	{
		factors.push_back(random_time_factor(rng));
		profiles.push_back(random_profile(rng));
		ps.push_back(Piece{b[l], b[l + 1], factors.back().expression() * profiles.back()});
	}
	return {HamiltonianPath(std::move(ps), 1), std::move(factors), std::move(profiles)};
}

TimeMap random_time_map(std::mt19937_64& rng)
{
	if (rng() % 2)
	{
		const double knee = uniform(rng, 0.2, 0.8);
		const double value = uniform(rng, 0.1, 0.9);
		return TimeMap::two_speed(knee, value);
	}
	const double beta = uniform(rng, -0.9, 0.9);
	const Expression s = tv() + num(beta / (2 * M_PI)) * expr::sin(num(2 * M_PI) * tv());
	return TimeMap({Piece{0, 1, s}});
}

Grid disjoint_grid(int resolution) { return Grid::box({-4, -4}, {4, 4}, {resolution, resolution}); }

std::vector<SupportedPath> random_disjoint_family(std::mt19937_64& rng, int m)
{
	if (m < 1 || m > 9)
		throw PreconditionError("between 1 and 9 disjoint paths");
	std::vector<int> cells(9);
	for (int i = 0; i < 9; ++i)
		cells[i] = i;
	std::shuffle(cells.begin(), cells.end(), rng);
	const double w = 8.0 / 3;
	const Expression x = expr::variable(Var::x(1));
	const Expression y = expr::variable(Var::y(1));
	std::vector<SupportedPath> out;
	for (int j = 0; j < m; ++j)
	{
		const double cx = -4 + w * (cells[j] % 3 + 0.5) + uniform(rng, -0.2, 0.2);
		const double cy = -4 + w * (cells[j] / 3 + 0.5) + uniform(rng, -0.2, 0.2);
		const double r = uniform(rng, 0.2, 0.5);
		const double R = r + uniform(rng, 0.3, 0.5);
		const double c0 = uniform(rng, 0.5, 1.5);
		const double c1 = uniform(rng, -0.3, 0.3);
		const Expression h =
		    expr::bump(x, r, R, cx) * expr::bump(y, r, R, cy) * (num(c0) + num(c1) * (x - num(cx)));
		const int pieces = 1 + int(rng() % 2);
		const auto b = random_breaks(rng, pieces);
		std::vector<Piece> ps;
		for (int l = 0; l < pieces; ++l)
			ps.push_back(Piece{b[l], b[l + 1], random_time_factor(rng).expression() * h});
		out.push_back({HamiltonianPath(std::move(ps), 1), {cx - R, cy - R}, {cx + R, cy + R}});
	}
	return out;
}

Grid torus_grid(int resolution)
{
	return Grid::torus({2 * M_PI, 2 * M_PI}, {resolution, resolution});
}

TorusSymplecticPath random_torus_path(std::mt19937_64& rng, bool sign_definite)
{
	const Expression x = expr::variable(Var::x(1));
	const Expression y = expr::variable(Var::y(1));
	const int pieces = 1 + int(rng() % 2);
	const auto b = random_breaks(rng, pieces);
	std::vector<TorusPiece> ps;
	for (int l = 0; l < pieces; ++l)
	{
		TorusPiece p;
		p.t_start = b[l];
		p.t_end = b[l + 1];
		for (int j = 0; j < 2; ++j)
		{
			if (!sign_definite && rng() % 2)
			{
				const double amp = uniform(rng, 0.2, 1.5);
				const double freq = 2 * M_PI * double(1 + rng() % 3);
				const double phase = uniform(rng, 0, 6);
				p.harmonic.push_back(num(amp) * expr::sin(num(freq) * tv() + num(phase)));
			}
			else
				p.harmonic.push_back(random_time_factor(rng).expression());
		}
		const double a = uniform(rng, 0.3, 1.0);
		const double pa = uniform(rng, 0, 6);
		const double b2 = uniform(rng, 0.0, 0.5);
		const double pb = uniform(rng, 0, 6);
		const Expression wave = num(a) * expr::sin(x + num(pa)) + num(b2) * expr::cos(y + num(2) * x + num(pb));
		p.exact = random_time_factor(rng).expression() * wave;
		ps.push_back(std::move(p));
	}
	return TorusSymplecticPath(std::move(ps), {2 * M_PI, 2 * M_PI});
}

} // namespace hoferlab::corpus
