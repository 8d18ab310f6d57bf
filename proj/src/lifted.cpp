#include "deltafbs/lifted.hpp"

#include "deltafbs/errors.hpp"

namespace dfbs {

LiftedMatrix::LiftedMatrix(const Eigen::VectorXd& impulse, int rows, int cols, int lead)
    : impulses_{impulse}, rows_(rows), cols_(cols), lead_(lead) {
    if (rows <= 0 || cols <= 0) throw DimensionMismatchError("lifted matrix must be non-empty");
}

LiftedMatrix::LiftedMatrix(std::vector<Eigen::VectorXd> impulses, int rows, int lead)
    : impulses_(std::move(impulses)), rows_(rows), cols_(static_cast<int>(impulses_.size())), lead_(lead) {
    if (rows <= 0 || impulses_.empty())
        throw DimensionMismatchError("lifted matrix must be non-empty");
}

Eigen::VectorXd LiftedMatrix::apply(const Eigen::VectorXd& u) const {
    if (u.size() != cols())
        throw DimensionMismatchError("lifted apply: input length does not match columns");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rows_);
    for (int k = 0; k < cols(); ++k) {
        if (u[k] == 0.0) continue;
        const Eigen::VectorXd& h = column_impulse(k);
        int start = k - lead_;
        int i0 = std::max(0, -start);
        int i1 = std::min<int>(static_cast<int>(h.size()), rows_ - start);
        for (int i = i0; i < i1; ++i) y[start + i] += h[i] * u[k];
    }
    return y;
}

Eigen::MatrixXd LiftedMatrix::dense() const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows_, cols());
    for (int k = 0; k < cols(); ++k) {
        const Eigen::VectorXd& h = column_impulse(k);
        int start = k - lead_;
        int i0 = std::max(0, -start);
        int i1 = std::min<int>(static_cast<int>(h.size()), rows_ - start);
        for (int i = i0; i < i1; ++i) M(start + i, k) = h[i];
    }
    return M;
}

}  // namespace dfbs
