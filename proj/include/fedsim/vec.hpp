#pragma once

// Dense parameter vectors and the handful of BLAS-1 style operations the
// optimizers are written in terms of. Everything is double precision; the
// convergence-slope checks need the full dynamic range.

#include <cstddef>
#include <string>
#include <vector>

#include "fedsim/errors.hpp"

namespace fedsim {

/// Model/control-variate vector (the x, y_i, c, c_i objects).
using Vec = std::vector<double>;

Vec zeros(std::size_t dim);
Vec constant(std::size_t dim, double value);

/// Returns a*x + y. Throws DimensionError on length mismatch.
Vec axpy(double a, const Vec& x, const Vec& y);

/// y += a*x in place.
void axpy_inplace(double a, const Vec& x, Vec& y);

Vec add(const Vec& x, const Vec& y);
Vec sub(const Vec& x, const Vec& y);
Vec scaled(double a, const Vec& x);

double dot(const Vec& x, const Vec& y);
double squared_norm(const Vec& x);
double norm(const Vec& x);

bool all_finite(const Vec& x);

/// Throws NumericError naming `what` if any entry is NaN/Inf.
void ensure_finite(const Vec& x, const std::string& what);

void ensure_same_dim(const Vec& x, const Vec& y, const std::string& where);

}  // namespace fedsim
