#pragma once

#include <Eigen/Dense>
#include <vector>

namespace dfbs {

// Clamped B-spline basis of degree m over a given knot vector, with n+1
// basis functions.  Knots must be nondecreasing with the first and last
// knot repeated m+1 times.
class BSplineBasis {
public:
    BSplineBasis(int degree, Eigen::VectorXd knots);

    // Clamped basis with uniform interior knots over [t0, t1] and n+1
    // control points.
    static BSplineBasis uniform_clamped(int degree, int num_ctrl, double t0, double t1);
    // Unclamped basis on an infinite-style uniform knot grid t_j = origin + j*h,
    // exposing funcs with support overlapping [origin, origin + spans*h].
    static BSplineBasis uniform_open(int degree, int num_funcs, double origin, double h);

    int degree() const { return m_; }
    int num_funcs() const { return num_funcs_; }
    const Eigen::VectorXd& knots() const { return knots_; }
    double domain_lo() const { return knots_[m_]; }
    double domain_hi() const { return knots_[knots_.size() - 1 - m_]; }

    // Row of basis values [phi_0(t) ... phi_n(t)], and its time derivative.
    Eigen::RowVectorXd eval_row(double t) const;
    Eigen::RowVectorXd eval_deriv_row(double t) const;
    // Row of order-th time derivatives (order 0 = eval_row).
    Eigen::RowVectorXd eval_dern_row(double t, int order) const;

    // Greville abscissae (knot averages) of each basis function.
    Eigen::VectorXd greville() const;

private:
    int find_span(double t) const;
    int m_;
    int num_funcs_;
    Eigen::VectorXd knots_;
};

struct WindowBasis {
    Eigen::MatrixXd Phi;       // (samples)×(funcs) basis values
    Eigen::MatrixXd PhiDot;    // time derivative
    Eigen::MatrixXd block3() const;      // 3×3 block-diagonal of Phi
    Eigen::MatrixXd block3_dot() const;  // same for PhiDot
};

// Sample the basis (and derivative) at times t_k = t0 + k*Ts, k = 0..L.
WindowBasis basis_matrix(const BSplineBasis& basis, double t0, double Ts, int num_samples);

Eigen::VectorXd eval_curve(const Eigen::MatrixXd& Phi, const Eigen::VectorXd& p);

}  // namespace dfbs
