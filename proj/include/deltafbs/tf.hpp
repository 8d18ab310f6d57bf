#pragma once

#include <Eigen/Dense>
#include <vector>

#include "deltafbs/poly.hpp"

namespace dfbs {

// Proper rational transfer function in ascending powers of s.
struct RationalTF {
    Poly num;
    Poly den;

    RationalTF() = default;
    RationalTF(Poly n, Poly d);

    int num_degree() const { return static_cast<int>(num.size()) - 1; }
    int den_degree() const { return static_cast<int>(den.size()) - 1; }
    bool is_proper() const { return num_degree() <= den_degree(); }
    bool is_strictly_proper() const { return num_degree() < den_degree(); }

    std::complex<double> eval(std::complex<double> s) const;
    double dc_gain() const;
    bool is_stable(double margin = 0.0) const;

    // Substitute s -> alpha*s (frequency normalization).
    RationalTF scaled_arg(double alpha) const;
    RationalTF operator*(const RationalTF& o) const;
};

enum class DiscretizationMethod { Zoh, Tustin };

// Discrete SISO filter in state-space form, x+ = A x + B u, y = C x + D u.
struct DiscreteFilter {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    double D = 0.0;
    double Ts = 0.0;

    int order() const { return static_cast<int>(A.rows()); }
    std::vector<double> filter(const std::vector<double>& u) const;
    Eigen::VectorXd filter(const Eigen::VectorXd& u) const;
    double dc_gain() const;
};

// Controllable-canonical continuous realization of a proper TF.
// For biproper TFs the direct term is split off first.
struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    double D = 0.0;
};

StateSpace to_state_space(const RationalTF& tf);
DiscreteFilter discretize_zoh(const RationalTF& tf, double Ts);
DiscreteFilter discretize_tustin(const RationalTF& tf, double Ts);
DiscreteFilter discretize(const RationalTF& tf, double Ts, DiscretizationMethod m);

// Truncated impulse response: trailing samples below tol * max|h| are
// dropped.  Throws NotSettledError if the response has not decayed below
// tolerance within max_len samples.
Eigen::VectorXd impulse_response(const DiscreteFilter& f, double tol, int max_len = 200000);

}  // namespace dfbs
