#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "deltafbs/poly.hpp"

namespace dfbs {

// Flop accounting: one multiply-add counts as 2 flops.
struct FlopLedger {
    FlopCount count;
    std::int64_t flops() const { return count.total(); }

    // Leading-order closed-form predictions (final-line totals).
    static std::int64_t pinv_prediction(std::int64_t L, std::int64_t n) {
        return n * n * n + L * n * n + 4 * L * n;
    }
    static std::int64_t qr_prediction(std::int64_t L, std::int64_t n) {
        return n * n + L * n * n + 2 * L * n;
    }
};

// x = (A^T A)^{-1} A^T b, formed literally via normal equations and an
// explicit Cholesky-based inverse.
Eigen::VectorXd lsq_pinv(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         FlopLedger* ledger = nullptr);

// Thin QR via modified Gram-Schmidt, then back substitution.
Eigen::VectorXd lsq_qr(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       FlopLedger* ledger = nullptr);

// Expose the MGS factorization for testing Q^T Q = I.
void mgs_qr(const Eigen::MatrixXd& A, Eigen::MatrixXd& Q, Eigen::MatrixXd& R,
            FlopLedger* ledger = nullptr);

struct ConstrainedSolution {
    Eigen::VectorXd x;
    Eigen::VectorXd lambda;
};

// min ||Ax - b|| s.t. Cx = d, via the KKT system [[A^T A, C^T],[C, 0]]
// solved with LU (partial pivoting).
ConstrainedSolution constrained_lsq_kkt(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                        const Eigen::MatrixXd& C, const Eigen::VectorXd& d,
                                        FlopLedger* ledger = nullptr);

// Reference solver used as a test oracle: eliminates the constraints with an
// orthonormal null-space basis.
ConstrainedSolution constrained_lsq_nullspace(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                              const Eigen::MatrixXd& C, const Eigen::VectorXd& d);

}  // namespace dfbs
