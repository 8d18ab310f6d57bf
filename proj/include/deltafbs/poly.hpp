#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace dfbs {

// Polynomial with ascending coefficients: p[0] + p[1] x + p[2] x^2 + ...
using Poly = Eigen::VectorXd;

// Running multiply/add tally. Passed by pointer; nullptr disables counting.
struct FlopCount {
    std::int64_t mul = 0;
    std::int64_t add = 0;
    std::int64_t total() const { return mul + add; }
};

Poly poly_mul(const Poly& a, const Poly& b, FlopCount* fc = nullptr);
Poly poly_add(const Poly& a, const Poly& b, FlopCount* fc = nullptr);
Poly poly_axpy(double alpha, const Poly& x, const Poly& y, FlopCount* fc = nullptr);  // alpha*x + y
Poly poly_scale(double alpha, const Poly& a, FlopCount* fc = nullptr);
Poly poly_sub(const Poly& a, const Poly& b, FlopCount* fc = nullptr);
Poly poly_trim(const Poly& a, double tol = 0.0);

double poly_eval(const Poly& p, double x);
std::complex<double> poly_eval(const Poly& p, std::complex<double> x);

// Coefficient substitution p(x) -> p(alpha * x).
Poly poly_scale_arg(const Poly& p, double alpha);

// Roots via companion-matrix eigenvalues. Caller is responsible for sane
// coefficient scaling (see poly_scale_arg).
Eigen::VectorXcd poly_roots(const Poly& p);

// Derivative coefficients.
Poly poly_derivative(const Poly& p);

}  // namespace dfbs
