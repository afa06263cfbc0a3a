#include "fedsim/vec.hpp"

#include <cmath>

namespace fedsim {

Vec zeros(std::size_t dim) { return Vec(dim, 0.0); }

Vec constant(std::size_t dim, double value) { return Vec(dim, value); }

void ensure_same_dim(const Vec& x, const Vec& y, const std::string& where) {
    if (x.size() != y.size()) {
        throw DimensionError(where + ": dimension mismatch (" + std::to_string(x.size()) +
                             " vs " + std::to_string(y.size()) + ")");
    }
}

Vec axpy(double a, const Vec& x, const Vec& y) {
    ensure_same_dim(x, y, "axpy");
    Vec out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = a * x[i] + y[i];
    return out;
}

void axpy_inplace(double a, const Vec& x, Vec& y) {
    ensure_same_dim(x, y, "axpy_inplace");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

Vec add(const Vec& x, const Vec& y) {
    ensure_same_dim(x, y, "add");
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

Vec sub(const Vec& x, const Vec& y) {
    ensure_same_dim(x, y, "sub");
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return out;
}

Vec scaled(double a, const Vec& x) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
    return out;
}

double dot(const Vec& x, const Vec& y) {
    ensure_same_dim(x, y, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double squared_norm(const Vec& x) { return dot(x, x); }

double norm(const Vec& x) { return std::sqrt(squared_norm(x)); }

bool all_finite(const Vec& x) {
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void ensure_finite(const Vec& x, const std::string& what) {
    if (!all_finite(x)) throw NumericError(what + ": non-finite entry");
}

}  // namespace fedsim
