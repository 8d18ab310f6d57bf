#include "deltafbs/tf.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "deltafbs/errors.hpp"

namespace dfbs {

RationalTF::RationalTF(Poly n, Poly d) : num(poly_trim(n, 1e-300)), den(poly_trim(d, 1e-300)) {
    if (den.size() == 0 || den.cwiseAbs().maxCoeff() == 0.0)
        throw DomainError("transfer function denominator is zero");
    if (!is_proper()) throw DomainError("transfer function is improper");
}

std::complex<double> RationalTF::eval(std::complex<double> s) const {
    return poly_eval(num, s) / poly_eval(den, s);
}

double RationalTF::dc_gain() const {
    if (den[0] == 0.0) throw DomainError("dc gain undefined: pole at s = 0");
    return num[0] / den[0];
}

bool RationalTF::is_stable(double margin) const {
    // Normalize coefficient magnitudes before rooting for conditioning.
    double alpha = std::pow(std::abs(den[den.size() - 1] / den[0]),
                            -1.0 / static_cast<double>(den.size() - 1));
    if (!std::isfinite(alpha) || alpha <= 0.0) alpha = 1.0;
    Eigen::VectorXcd r = poly_roots(poly_scale_arg(den, alpha));
    for (Eigen::Index i = 0; i < r.size(); ++i)
        if (r[i].real() * alpha >= -margin) return false;
    return true;
}

RationalTF RationalTF::scaled_arg(double alpha) const {
    return RationalTF(poly_scale_arg(num, alpha), poly_scale_arg(den, alpha));
}

RationalTF RationalTF::operator*(const RationalTF& o) const {
    return RationalTF(poly_mul(num, o.num), poly_mul(den, o.den));
}

StateSpace to_state_space(const RationalTF& tf) {
    const int n = tf.den_degree();
    Poly den = tf.den / tf.den[tf.den.size() - 1];  // monic
    Poly num = tf.num / tf.den[tf.den.size() - 1];
    StateSpace ss;
    ss.D = 0.0;
    if (static_cast<int>(num.size()) - 1 == n) {
        // biproper: split off the direct term
        ss.D = num[num.size() - 1];
        Poly rem = Poly::Zero(n);
        for (int i = 0; i < n; ++i) rem[i] = num[i] - ss.D * den[i];
        num = rem;
    }
    ss.A = Eigen::MatrixXd::Zero(n, n);
    ss.B = Eigen::VectorXd::Zero(n);
    ss.C = Eigen::RowVectorXd::Zero(n);
    if (n == 0) return ss;
    ss.A.diagonal(1).setOnes();
    ss.A.row(n - 1) = -den.head(n).transpose();
    ss.B[n - 1] = 1.0;
    ss.C.head(num.size()) = num.transpose();
    return ss;
}

DiscreteFilter discretize_zoh(const RationalTF& tf, double Ts) {
    if (!(Ts > 0.0)) throw DomainError("sampling time must be positive");
    StateSpace ss = to_state_space(tf);
    const int n = static_cast<int>(ss.A.rows());
    DiscreteFilter f;
    f.Ts = Ts;
    f.D = ss.D;
    f.C = ss.C;
    if (n == 0) {
        f.A.resize(0, 0);
        f.B.resize(0);
        return f;
    }
    // exp of the augmented [[A B];[0 0]] block gives Ad and Bd jointly.
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = ss.A * Ts;
    aug.topRightCorner(n, 1) = ss.B * Ts;
    Eigen::MatrixXd e = aug.exp();
    f.A = e.topLeftCorner(n, n);
    f.B = e.topRightCorner(n, 1);
    return f;
}

DiscreteFilter discretize_tustin(const RationalTF& tf, double Ts) {
    if (!(Ts > 0.0)) throw DomainError("sampling time must be positive");
    StateSpace ss = to_state_space(tf);
    const int n = static_cast<int>(ss.A.rows());
    DiscreteFilter f;
    f.Ts = Ts;
    if (n == 0) {
        f.A.resize(0, 0);
        f.B.resize(0);
        f.C.resize(0);
        f.D = ss.D;
        return f;
    }
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd M = I - (Ts / 2.0) * ss.A;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    f.A = lu.solve(I + (Ts / 2.0) * ss.A);
    Eigen::VectorXd Bi = lu.solve(ss.B);
    f.B = std::sqrt(Ts) * Bi;
    f.C = std::sqrt(Ts) * ss.C;
    f.D = ss.D + (Ts / 2.0) * (ss.C * Bi)(0);
    return f;
}

DiscreteFilter discretize(const RationalTF& tf, double Ts, DiscretizationMethod m) {
    return m == DiscretizationMethod::Zoh ? discretize_zoh(tf, Ts) : discretize_tustin(tf, Ts);
}

Eigen::VectorXd DiscreteFilter::filter(const Eigen::VectorXd& u) const {
    Eigen::VectorXd y(u.size());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(A.rows());
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        y[k] = (A.rows() ? (C * x)(0) : 0.0) + D * u[k];
        if (A.rows()) x = A * x + B * u[k];
    }
    return y;
}

std::vector<double> DiscreteFilter::filter(const std::vector<double>& u) const {
    Eigen::VectorXd ue = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
    Eigen::VectorXd ye = filter(ue);
    return std::vector<double>(ye.data(), ye.data() + ye.size());
}

double DiscreteFilter::dc_gain() const {
    if (A.rows() == 0) return D;
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(A.rows(), A.cols());
    return (C * (I - A).partialPivLu().solve(B))(0) + D;
}

Eigen::VectorXd impulse_response(const DiscreteFilter& f, double tol, int max_len) {
    std::vector<double> h;
    h.reserve(1024);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(f.A.rows());
    double peak = 0.0;
    const int n = static_cast<int>(f.A.rows());
    int tail = 0;  // consecutive samples below tolerance
    for (int k = 0; k < max_len; ++k) {
        double yk = (n ? (f.C * x)(0) : 0.0) + (k == 0 ? f.D : 0.0);
        if (n) x = f.A * x + (k == 0 ? f.B : Eigen::VectorXd::Zero(n).eval());
        h.push_back(yk);
        peak = std::max(peak, std::abs(yk));
        if (std::abs(yk) <= tol * peak && peak > 0.0)
            ++tail;
        else
            tail = 0;
        // require a settled stretch longer than the filter order so a zero
        // crossing is not mistaken for decay
        if (tail > std::max(4 * n, 8) && k > n) {
            int keep = static_cast<int>(h.size()) - tail + 1;
            return Eigen::Map<Eigen::VectorXd>(h.data(), keep);
        }
    }
    throw NotSettledError("impulse response did not settle within sample cap");
}

}  // namespace dfbs
