#pragma once

#include <string>

#include "deltafbs/model.hpp"
#include "deltafbs/solvers.hpp"
#include "deltafbs/trajectory.hpp"

namespace dfbs {

enum class Variant { Baseline, A, B, C, D, E };
enum class Selector { Median, Mean, MinDist, PerPoint };
enum class SolverKind { Pinv, Qr };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& s);

struct ControllerParams {
    int degree = 5;             // B-spline degree m
    int window_len = 196;       // L_C (samples); <= 0 means auto from worst_case_settle
    int n_coeffs = 0;           // active coefficients per window; 0 => floor(L_C/4.5)+1
    int n_up = 0;               // committed per window; 0 => n/2
    double settle_tol = 1e-4;
    Selector selector = Selector::Median;
    bool switching = true;
    // Adds acceleration and jerk rows to the switching continuity
    // constraints (position and velocity only by default).
    bool switching_accel_jerk = false;
    SolverKind solver = SolverKind::Pinv;
    // Adjusted past coefficients per carriage. Must exceed 2 (the number of
    // continuity constraints per carriage); small spans keep the correction
    // spread over the boundary transient instead of collapsing into a
    // one-sample prediction spike that leaves the solve unchanged.
    int past_adjust_span = 3;
    DiscretizationMethod method = DiscretizationMethod::Zoh;
    double grid_pitch = 5.0;    // mm, for auto window length
};

struct ControllerReport {
    std::string variant;
    double wall_seconds = 0.0;
    std::int64_t flops = 0;
    int windows = 0;
    int model_evals_per_window = 0;
    int window_len = 0;   // resolved L_C
    int n = 0;
    int n_up = 0;
    int settle_len = 0;
    // Pre-compensation model-switch discontinuity (max over windows) and the
    // residual jump after compensation (zero when switching is off or moot).
    double max_boundary_pos_jump = 0.0;       // mm
    double max_boundary_vel_jump = 0.0;       // mm/s
    double max_residual_pos_jump = 0.0;       // mm
    double max_residual_vel_jump = 0.0;       // mm/s
    // Total switching objective: sum over windows of the squared prediction
    // change introduced by the compensation.
    double switch_objective = 0.0;
};

struct ControllerResult {
    Eigen::MatrixXd q_dm;  // same sample count as the input trajectory, 3 columns
    ControllerReport report;
};

ControllerResult run_controller(const Trajectory& traj, const DeltaGeometry& geometry,
                                const ModelBlocks& blocks, const InertialDistribution& P,
                                Variant variant, ControllerParams params);

// The variant wiring used by run_controller (exposed for tests/CLI).
ControllerParams variant_defaults(Variant v, ControllerParams base);

// Column-wise filtering of a basis matrix through a truncated impulse
// response (offline prefiltering with G_qd).
Eigen::MatrixXd prefilter_basis(const Eigen::MatrixXd& Phi, const Eigen::VectorXd& impulse);

// 3x3 block grid: block (i,l) is Phi filtered through model entry (i,l).
Eigen::MatrixXd filter_window(const Eigen::MatrixXd& Phi, const ImpulseSet& imps);

Configuration select_representative(const std::vector<Configuration>& window, Selector strategy,
                                    const DeltaGeometry& geometry);

}  // namespace dfbs
