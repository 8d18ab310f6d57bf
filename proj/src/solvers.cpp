#include "deltafbs/solvers.hpp"

#include <cmath>

#include "deltafbs/errors.hpp"

namespace dfbs {

namespace {
constexpr double kRankTol = 1e-12;

void tally(FlopLedger* l, std::int64_t mul, std::int64_t add) {
    if (l) {
        l->count.mul += mul;
        l->count.add += add;
    }
}

// Cholesky factorization + explicit inverse of an SPD matrix, counting work.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& G, FlopLedger* ledger) {
    const Eigen::Index n = G.rows();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    double maxdiag = G.diagonal().cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < n; ++j) {
        double s = G(j, j);
        for (Eigen::Index k = 0; k < j; ++k) s -= L(j, k) * L(j, k);
        tally(ledger, j, j + 1);
        if (s <= kRankTol * maxdiag) throw RankDeficientError("normal equations rank deficient");
        L(j, j) = std::sqrt(s);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double t = G(i, j);
            for (Eigen::Index k = 0; k < j; ++k) t -= L(i, k) * L(j, k);
            L(i, j) = t / L(j, j);
            tally(ledger, j + 1, j);
        }
    }
    // Columns of the inverse by forward/back substitution against e_i.
    Eigen::MatrixXd inv(n, n);
    Eigen::VectorXd y(n), x(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (Eigen::Index k = 0; k < i; ++k) s -= L(i, k) * y[k];
            y[i] = s / L(i, i);
            tally(ledger, i + 1, i);
        }
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            double s = y[i];
            for (Eigen::Index k = i + 1; k < n; ++k) s -= L(k, i) * x[k];
            x[i] = s / L(i, i);
            tally(ledger, n - i, n - i - 1);
        }
        inv.col(c) = x;
    }
    return inv;
}

Eigen::MatrixXd counted_atb(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            FlopLedger* ledger) {
    tally(ledger, A.cols() * B.cols() * A.rows(), A.cols() * B.cols() * A.rows());
    return A.transpose() * B;
}
}  // namespace

Eigen::VectorXd lsq_pinv(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         FlopLedger* ledger) {
    if (A.rows() != b.size()) throw DimensionMismatchError("lsq_pinv: dimension mismatch");
    Eigen::MatrixXd G = counted_atb(A, A, ledger);
    Eigen::MatrixXd Ginv = spd_inverse(G, ledger);
    Eigen::VectorXd Atb = counted_atb(A, b, ledger);
    tally(ledger, G.rows() * G.rows(), G.rows() * G.rows());
    return Ginv * Atb;
}

void mgs_qr(const Eigen::MatrixXd& A, Eigen::MatrixXd& Q, Eigen::MatrixXd& R,
            FlopLedger* ledger) {
    const Eigen::Index m = A.rows(), n = A.cols();
    Q = A;
    R = Eigen::MatrixXd::Zero(n, n);
    double scale = A.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < n; ++k) {
        double nrm = Q.col(k).norm();
        tally(ledger, m, m);
        if (nrm <= kRankTol * std::max(1.0, scale))
            throw RankDeficientError("matrix rank deficient in MGS");
        R(k, k) = nrm;
        Q.col(k) /= nrm;
        tally(ledger, m, 0);
        for (Eigen::Index j = k + 1; j < n; ++j) {
            R(k, j) = Q.col(k).dot(Q.col(j));
            Q.col(j) -= R(k, j) * Q.col(k);
            tally(ledger, 2 * m, 2 * m);
        }
    }
}

Eigen::VectorXd lsq_qr(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       FlopLedger* ledger) {
    if (A.rows() != b.size()) throw DimensionMismatchError("lsq_qr: dimension mismatch");
    Eigen::MatrixXd Q, R;
    mgs_qr(A, Q, R, ledger);
    Eigen::VectorXd w = counted_atb(Q, b, ledger);
    const Eigen::Index n = R.rows();
    Eigen::VectorXd x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double s = w[i];
        for (Eigen::Index k = i + 1; k < n; ++k) s -= R(i, k) * x[k];
        x[i] = s / R(i, i);
        tally(ledger, n - i, n - i - 1);
    }
    return x;
}

namespace {
// Hand-rolled LU with partial pivoting; throws on a vanishing pivot.
Eigen::VectorXd lu_solve(Eigen::MatrixXd M, Eigen::VectorXd rhs, FlopLedger* ledger) {
    const Eigen::Index n = M.rows();
    double scale = M.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index piv = k;
        for (Eigen::Index i = k + 1; i < n; ++i)
            if (std::abs(M(i, k)) > std::abs(M(piv, k))) piv = i;
        if (std::abs(M(piv, k)) <= kRankTol * std::max(1.0, scale))
            throw SingularKktError("KKT system is singular");
        if (piv != k) {
            M.row(piv).swap(M.row(k));
            std::swap(rhs[piv], rhs[k]);
        }
        for (Eigen::Index i = k + 1; i < n; ++i) {
            double f = M(i, k) / M(k, k);
            M.row(i).tail(n - k - 1) -= f * M.row(k).tail(n - k - 1);
            rhs[i] -= f * rhs[k];
            tally(ledger, n - k, n - k);
        }
    }
    Eigen::VectorXd x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double s = rhs[i];
        for (Eigen::Index k = i + 1; k < n; ++k) s -= M(i, k) * x[k];
        x[i] = s / M(i, i);
        tally(ledger, n - i, n - i - 1);
    }
    return x;
}
}  // namespace

ConstrainedSolution constrained_lsq_kkt(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                        const Eigen::MatrixXd& C, const Eigen::VectorXd& d,
                                        FlopLedger* ledger) {
    if (A.rows() != b.size() || C.rows() != d.size() ||
        (C.rows() > 0 && C.cols() != A.cols()))
        throw DimensionMismatchError("constrained_lsq_kkt: dimension mismatch");
    const Eigen::Index n = A.cols(), p = C.rows();
    if (p == 0) return {lsq_pinv(A, b, ledger), Eigen::VectorXd()};
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + p, n + p);
    K.topLeftCorner(n, n) = counted_atb(A, A, ledger);
    K.topRightCorner(n, p) = C.transpose();
    K.bottomLeftCorner(p, n) = C;
    Eigen::VectorXd rhs(n + p);
    rhs.head(n) = counted_atb(A, b, ledger);
    rhs.tail(p) = d;
    Eigen::VectorXd sol = lu_solve(std::move(K), std::move(rhs), ledger);
    return {sol.head(n), sol.tail(p)};
}

ConstrainedSolution constrained_lsq_nullspace(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                              const Eigen::MatrixXd& C, const Eigen::VectorXd& d) {
    const Eigen::Index n = A.cols(), p = C.rows();
    if (p == 0) return {lsq_pinv(A, b), Eigen::VectorXd()};
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(C);
    if (cod.rank() < p) throw SingularKktError("constraints not independent");
    Eigen::VectorXd x0 = cod.solve(d);  // min-norm feasible point
    // Null-space basis from the full SVD of C.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
    Eigen::MatrixXd Z = svd.matrixV().rightCols(n - p);
    Eigen::VectorXd y = (A * Z).colPivHouseholderQr().solve(b - A * x0);
    Eigen::VectorXd x = x0 + Z * y;
    // Multipliers from stationarity: C^T lambda = A^T(b - A x).
    Eigen::VectorXd lambda = C.transpose().colPivHouseholderQr().solve(A.transpose() * (b - A * x));
    return {x, lambda};
}

}  // namespace dfbs
