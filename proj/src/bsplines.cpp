#include "deltafbs/bsplines.hpp"

#include <cmath>

#include "deltafbs/errors.hpp"

namespace dfbs {

BSplineBasis::BSplineBasis(int degree, Eigen::VectorXd knots)
    : m_(degree), num_funcs_(static_cast<int>(knots.size()) - degree - 1), knots_(std::move(knots)) {
    if (degree < 0) throw DomainError("spline degree must be nonnegative");
    if (num_funcs_ < degree + 1) throw DomainError("too few knots for requested degree");
    for (Eigen::Index i = 1; i < knots_.size(); ++i)
        if (knots_[i] < knots_[i - 1]) throw DomainError("knots must be nondecreasing");
}

BSplineBasis BSplineBasis::uniform_clamped(int degree, int num_ctrl, double t0, double t1) {
    if (num_ctrl < degree + 1) throw DomainError("need at least degree+1 control points");
    int interior = num_ctrl - degree - 1;
    Eigen::VectorXd knots(num_ctrl + degree + 1);
    double h = (t1 - t0) / static_cast<double>(interior + 1);
    for (int i = 0; i <= degree; ++i) knots[i] = t0;
    for (int i = 1; i <= interior; ++i) knots[degree + i] = t0 + i * h;
    for (int i = 0; i <= degree; ++i) knots[num_ctrl + i] = t1;
    return BSplineBasis(degree, std::move(knots));
}

BSplineBasis BSplineBasis::uniform_open(int degree, int num_funcs, double origin, double h) {
    // First basis function's support begins at origin - degree*h so that the
    // basis is translation-invariant across the whole grid (no clamping).
    Eigen::VectorXd knots(num_funcs + degree + 1);
    for (Eigen::Index i = 0; i < knots.size(); ++i)
        knots[i] = origin + (static_cast<double>(i) - degree) * h;
    return BSplineBasis(degree, std::move(knots));
}

int BSplineBasis::find_span(double t) const {
    // Index i with knots[i] <= t < knots[i+1], restricted to valid spans.
    int lo = m_;
    int hi = static_cast<int>(knots_.size()) - m_ - 2;
    if (t < knots_[lo] - 1e-12 || t > knots_[hi + 1] + 1e-12)
        throw DomainError("sample time outside knot domain");
    if (t >= knots_[hi + 1]) return hi;  // right end closed
    while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (knots_[mid] <= t)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

namespace {
// Cox-de Boor with derivatives, after DersBasisFuns (Piegl & Tiller).
void ders_basis(int span, double t, int m, const Eigen::VectorXd& U, int nders,
                Eigen::MatrixXd& ders) {
    Eigen::MatrixXd ndu(m + 1, m + 1);
    Eigen::VectorXd left(m + 1), right(m + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= m; ++j) {
        left[j] = t - U[span + 1 - j];
        right[j] = U[span + j] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[r + 1] + left[j - r];
            double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu(j, j) = saved;
    }
    ders.setZero(nders + 1, m + 1);
    for (int j = 0; j <= m; ++j) ders(0, j) = ndu(j, m);
    Eigen::MatrixXd a(2, m + 1);
    for (int r = 0; r <= m; ++r) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        for (int k = 1; k <= nders; ++k) {
            double d = 0.0;
            int rk = r - k, pk = m - k;
            if (r >= k) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            int j1 = (rk >= -1) ? 1 : -rk;
            int j2 = (r - 1 <= pk) ? k - 1 : m - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
                d += a(s2, k) * ndu(r, pk);
            }
            ders(k, r) = d;
            std::swap(s1, s2);
        }
    }
    double f = m;
    for (int k = 1; k <= nders; ++k) {
        for (int j = 0; j <= m; ++j) ders(k, j) *= f;
        f *= (m - k);
    }
}
}  // namespace

Eigen::RowVectorXd BSplineBasis::eval_row(double t) const {
    int span = find_span(t);
    Eigen::MatrixXd ders;
    ders_basis(span, t, m_, knots_, 0, ders);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(num_funcs_);
    for (int j = 0; j <= m_; ++j) row[span - m_ + j] = ders(0, j);
    return row;
}

Eigen::RowVectorXd BSplineBasis::eval_deriv_row(double t) const {
    int span = find_span(t);
    Eigen::MatrixXd ders;
    ders_basis(span, t, m_, knots_, 1, ders);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(num_funcs_);
    for (int j = 0; j <= m_; ++j) row[span - m_ + j] = ders(1, j);
    return row;
}

Eigen::RowVectorXd BSplineBasis::eval_dern_row(double t, int order) const {
    int span = find_span(t);
    Eigen::MatrixXd ders;
    ders_basis(span, t, m_, knots_, order, ders);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(num_funcs_);
    for (int j = 0; j <= m_; ++j) row[span - m_ + j] = ders(order, j);
    return row;
}

Eigen::VectorXd BSplineBasis::greville() const {
    Eigen::VectorXd g(num_funcs_);
    for (int j = 0; j < num_funcs_; ++j)
        g[j] = knots_.segment(j + 1, m_).sum() / std::max(1, m_);
    return g;
}

WindowBasis basis_matrix(const BSplineBasis& basis, double t0, double Ts, int num_samples) {
    WindowBasis wb;
    wb.Phi.resize(num_samples, basis.num_funcs());
    wb.PhiDot.resize(num_samples, basis.num_funcs());
    for (int k = 0; k < num_samples; ++k) {
        double t = t0 + k * Ts;
        wb.Phi.row(k) = basis.eval_row(t);
        wb.PhiDot.row(k) = basis.eval_deriv_row(t);
    }
    return wb;
}

namespace {
Eigen::MatrixXd block_diag3(const Eigen::MatrixXd& M) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3 * M.rows(), 3 * M.cols());
    for (int i = 0; i < 3; ++i)
        B.block(i * M.rows(), i * M.cols(), M.rows(), M.cols()) = M;
    return B;
}
}  // namespace

Eigen::MatrixXd WindowBasis::block3() const { return block_diag3(Phi); }
Eigen::MatrixXd WindowBasis::block3_dot() const { return block_diag3(PhiDot); }

Eigen::VectorXd eval_curve(const Eigen::MatrixXd& Phi, const Eigen::VectorXd& p) {
    if (Phi.cols() != p.size())
        throw DimensionMismatchError("eval_curve: control point count mismatch");
    return Phi * p;
}

}  // namespace dfbs
