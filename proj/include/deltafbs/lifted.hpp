#pragma once

#include <Eigen/Dense>
#include <vector>

namespace dfbs {

// Lifted system representation of a (possibly time-varying) discrete filter
// over a finite horizon.  Column k holds the truncated impulse response of
// the filter active at step k, placed starting at row k - lead; rows outside
// [0, rows) are truncated.  lead > 0 models anticausal terms (preview).
class LiftedMatrix {
public:
    // LTI: one impulse response shared by all columns.
    LiftedMatrix(const Eigen::VectorXd& impulse, int rows, int cols, int lead = 0);
    // LTV: impulse response per column.
    LiftedMatrix(std::vector<Eigen::VectorXd> impulses, int rows, int lead = 0);

    int rows() const { return rows_; }
    int cols() const { return static_cast<int>(impulses_.size() == 1 ? cols_ : impulses_.size()); }
    int lead() const { return lead_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
    Eigen::MatrixXd dense() const;
    const Eigen::VectorXd& column_impulse(int k) const {
        return impulses_[impulses_.size() == 1 ? 0 : static_cast<size_t>(k)];
    }

private:
    std::vector<Eigen::VectorXd> impulses_;
    int rows_;
    int cols_;
    int lead_;
};

}  // namespace dfbs
