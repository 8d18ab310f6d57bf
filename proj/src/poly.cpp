#include "deltafbs/poly.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace dfbs {

Poly poly_mul(const Poly& a, const Poly& b, FlopCount* fc) {
    Poly c = Poly::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index j = 0; j < b.size(); ++j)
            c[i + j] += a[i] * b[j];
    if (fc) {
        fc->mul += a.size() * b.size();
        fc->add += a.size() * b.size();
    }
    return c;
}

Poly poly_add(const Poly& a, const Poly& b, FlopCount* fc) {
    Poly c = Poly::Zero(std::max(a.size(), b.size()));
    c.head(a.size()) = a;
    c.head(b.size()) += b;
    if (fc) fc->add += b.size();
    return c;
}

Poly poly_axpy(double alpha, const Poly& x, const Poly& y, FlopCount* fc) {
    Poly c = Poly::Zero(std::max(x.size(), y.size()));
    c.head(y.size()) = y;
    c.head(x.size()) += alpha * x;
    if (fc) {
        fc->mul += x.size();
        fc->add += x.size();
    }
    return c;
}

Poly poly_scale(double alpha, const Poly& a, FlopCount* fc) {
    if (fc) fc->mul += a.size();
    return alpha * a;
}

Poly poly_sub(const Poly& a, const Poly& b, FlopCount* fc) {
    Poly c = Poly::Zero(std::max(a.size(), b.size()));
    c.head(a.size()) = a;
    c.head(b.size()) -= b;
    if (fc) fc->add += b.size();
    return c;
}

Poly poly_trim(const Poly& a, double tol) {
    Eigen::Index n = a.size();
    double scale = a.cwiseAbs().maxCoeff();
    while (n > 1 && std::abs(a[n - 1]) <= tol * scale) --n;
    return a.head(n);
}

double poly_eval(const Poly& p, double x) {
    double acc = 0.0;
    for (Eigen::Index i = p.size() - 1; i >= 0; --i) acc = acc * x + p[i];
    return acc;
}

std::complex<double> poly_eval(const Poly& p, std::complex<double> x) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index i = p.size() - 1; i >= 0; --i) acc = acc * x + p[i];
    return acc;
}

Poly poly_scale_arg(const Poly& p, double alpha) {
    Poly q = p;
    double f = 1.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        q[i] *= f;
        f *= alpha;
    }
    return q;
}

Eigen::VectorXcd poly_roots(const Poly& p_in) {
    Poly p = poly_trim(p_in, 1e-14);
    const Eigen::Index n = p.size() - 1;
    if (n < 1) return Eigen::VectorXcd();
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    companion.diagonal(-1).setOnes();
    companion.col(n - 1) = -p.head(n) / p[n];
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    return es.eigenvalues();
}

Poly poly_derivative(const Poly& p) {
    if (p.size() <= 1) return Poly::Zero(1);
    Poly d(p.size() - 1);
    for (Eigen::Index i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
    return d;
}

}  // namespace dfbs
