#pragma once

#include <Eigen/Dense>
#include <array>

#include "deltafbs/errors.hpp"

namespace dfbs {

// Prismatic-joint delta: three vertical rails at radius R, angular placement
// carriage_angles about the machine axis; forearms of length L connect each
// carriage to the effector at horizontal offset r from the effector center.
// Units are mm / rad throughout.
struct DeltaGeometry {
    double forearm_length = 300.0;   // L
    double carriage_radius = 140.0;  // R
    double effector_radius = 40.0;   // r
    std::array<double, 3> carriage_angles = {M_PI / 2.0, M_PI * 7.0 / 6.0, M_PI * 11.0 / 6.0};
    Eigen::Vector2d build_x{-135.0, 135.0};
    Eigen::Vector2d build_y{-135.0, 135.0};
    Eigen::Vector2d build_z{0.0, 300.0};

    void validate() const;

    // Horizontal unit direction of rail i (its line of action).
    Eigen::Vector2d rail_dir(int i) const {
        return {std::cos(carriage_angles[static_cast<size_t>(i)]),
                std::sin(carriage_angles[static_cast<size_t>(i)])};
    }
    // Effective horizontal radius seen by the forearm (R - r).
    double radius() const { return carriage_radius - effector_radius; }

    bool inside_build_volume(const Eigen::Vector3d& X) const;
};

// A machine pose: task-space position and the consistent joint heights.
struct Configuration {
    Eigen::Vector3d X;  // [x y z]
    Eigen::Vector3d q;  // [q_A q_B q_C]
};

struct LinearizedJacobian {
    Eigen::Matrix3d J;  // dX/dq
    Eigen::Vector3d column(int i) const { return J.col(i); }
};

Eigen::Vector3d inverse_kinematics(const DeltaGeometry& g, const Eigen::Vector3d& X);
Eigen::Vector3d forward_kinematics(const DeltaGeometry& g, const Eigen::Vector3d& q);
Configuration make_configuration(const DeltaGeometry& g, const Eigen::Vector3d& X);
LinearizedJacobian jacobian(const DeltaGeometry& g, const Configuration& c);

}  // namespace dfbs
