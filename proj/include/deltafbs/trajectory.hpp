#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "deltafbs/geometry.hpp"

namespace dfbs {

struct KinematicLimits {
    double v_max = 150.0;     // mm/s
    double a_max = 20000.0;   // mm/s^2
};

// Time-sampled desired trajectory at fixed Ts, with consistent task- and
// joint-space samples.
struct Trajectory {
    Eigen::VectorXd t;   // seconds
    Eigen::MatrixXd X;   // N x 3 task positions (mm)
    Eigen::MatrixXd q;   // N x 3 joint heights (mm)
    double Ts = 1e-3;
    KinematicLimits limits;

    int size() const { return static_cast<int>(t.size()); }
};

enum class Shape { Butterfly, Square, Waypoints };

struct TrajectorySpec {
    Shape shape = Shape::Butterfly;
    KinematicLimits limits;
    double Ts = 1e-3;
    Eigen::Vector2d offset{0.0, 0.0};
    double z = 0.0;
    // Butterfly only: calibrate the feed so the path lasts this long;
    // <= 0 disables calibration.
    double target_duration = 5.0;
    double square_side = 60.0;
    std::vector<Eigen::Vector3d> waypoints;  // Shape::Waypoints
};

Trajectory gen_trajectory(const TrajectorySpec& spec, const DeltaGeometry& geometry);

Trajectory load_trajectory_csv(const std::string& path, const DeltaGeometry& geometry,
                               const KinematicLimits& limits);

}  // namespace dfbs
