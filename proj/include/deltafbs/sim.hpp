#pragma once

#include <vector>

#include "deltafbs/controller.hpp"

namespace dfbs {

// Exact LPV plant: per-sample impulse responses of the full model evaluated
// at every desired configuration.  Built once per trajectory and shared
// across variant runs.
struct PlantModel {
    std::vector<ImpulseSet> impulses;  // one per trajectory sample
    Eigen::RowVector3d q_rest;
};

PlantModel build_plant(const Trajectory& traj, const DeltaGeometry& geometry,
                       const ModelBlocks& blocks, const InertialDistribution& P,
                       double settle_tol = 1e-4, double Ts = 1e-3);

struct SimResult {
    Eigen::MatrixXd q;  // actual joint outputs
    Eigen::MatrixXd X;  // actual task positions (forward kinematics)
};

SimResult simulate_plant(const Eigen::MatrixXd& q_dm, const PlantModel& plant,
                         const DeltaGeometry& geometry);

struct ContourErrorSeries {
    Eigen::VectorXd e;  // mm, per sample
    double rms = 0.0;
    double max = 0.0;
    double improvement_vs(const ContourErrorSeries& ref) const {
        return ref.rms > 0.0 ? (ref.rms - rms) / ref.rms * 100.0 : 0.0;
    }
};

// Minimum distance from each actual point to the desired polyline.
// window <= 0 does a brute-force search over all segments.
ContourErrorSeries contour_error(const Eigen::MatrixXd& desired, const Eigen::MatrixXd& actual,
                                 int window = 250);

struct ComparisonRow {
    ControllerReport report;
    ContourErrorSeries contour;
    double improvement_pct = 0.0;  // vs baseline row, NaN when absent
    Eigen::MatrixXd q_dm;
    SimResult sim;
};

std::vector<ComparisonRow> run_comparison(const Trajectory& traj, const DeltaGeometry& geometry,
                                          const ModelBlocks& blocks, const InertialDistribution& P,
                                          const std::vector<Variant>& variants,
                                          const ControllerParams& params);

}  // namespace dfbs
