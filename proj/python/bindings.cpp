#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "deltafbs/config.hpp"
#include "deltafbs/sim.hpp"

namespace py = pybind11;
using namespace dfbs;

PYBIND11_MODULE(_deltafbs, m) {
    m.doc() = "LPV filtered-B-splines feedforward for prismatic delta printers";

    py::register_exception<UnreachableError>(m, "UnreachableError");
    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<NotSettledError>(m, "NotSettledError");

    py::class_<DeltaGeometry>(m, "DeltaGeometry")
        .def(py::init<>())
        .def_readwrite("forearm_length", &DeltaGeometry::forearm_length)
        .def_readwrite("carriage_radius", &DeltaGeometry::carriage_radius)
        .def_readwrite("effector_radius", &DeltaGeometry::effector_radius)
        .def_readwrite("carriage_angles", &DeltaGeometry::carriage_angles)
        .def("radius", &DeltaGeometry::radius)
        .def("inside_build_volume", &DeltaGeometry::inside_build_volume);

    m.def("inverse_kinematics", &inverse_kinematics, py::arg("geometry"), py::arg("X"));
    m.def("forward_kinematics", &forward_kinematics, py::arg("geometry"), py::arg("q"));
    m.def(
        "jacobian",
        [](const DeltaGeometry& g, const Eigen::Vector3d& X) {
            return jacobian(g, make_configuration(g, X)).J;
        },
        py::arg("geometry"), py::arg("X"), "Linearized task-over-joint Jacobian at X");

    py::class_<ModelBlocks>(m, "ModelBlocks")
        .def_static("synthetic_default", &ModelBlocks::synthetic_default)
        .def_static("rigid_default", &ModelBlocks::rigid_default);

    py::class_<InertialDistribution>(m, "InertialDistribution")
        .def_static("thirds", &InertialDistribution::thirds);

    py::class_<MachineConfig>(m, "MachineConfig")
        .def_readwrite("geometry", &MachineConfig::geometry)
        .def_readwrite("blocks", &MachineConfig::blocks)
        .def_readwrite("distribution", &MachineConfig::distribution)
        .def_readwrite("sampling_time", &MachineConfig::sampling_time);
    m.def("default_machine", &default_machine);
    m.def("load_machine_config", &load_machine_config, py::arg("path"));
    m.def("write_default_machine_config", &write_default_machine_config, py::arg("path"));

    py::enum_<Shape>(m, "Shape")
        .value("Butterfly", Shape::Butterfly)
        .value("Square", Shape::Square)
        .value("Waypoints", Shape::Waypoints);

    py::class_<KinematicLimits>(m, "KinematicLimits")
        .def(py::init<>())
        .def_readwrite("v_max", &KinematicLimits::v_max)
        .def_readwrite("a_max", &KinematicLimits::a_max);

    py::class_<TrajectorySpec>(m, "TrajectorySpec")
        .def(py::init<>())
        .def_readwrite("shape", &TrajectorySpec::shape)
        .def_readwrite("limits", &TrajectorySpec::limits)
        .def_readwrite("Ts", &TrajectorySpec::Ts)
        .def_readwrite("offset", &TrajectorySpec::offset)
        .def_readwrite("z", &TrajectorySpec::z)
        .def_readwrite("target_duration", &TrajectorySpec::target_duration)
        .def_readwrite("square_side", &TrajectorySpec::square_side)
        .def_readwrite("waypoints", &TrajectorySpec::waypoints);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("t", &Trajectory::t)
        .def_readonly("X", &Trajectory::X)
        .def_readonly("q", &Trajectory::q)
        .def_readonly("Ts", &Trajectory::Ts)
        .def("__len__", &Trajectory::size);

    m.def("gen_trajectory", &gen_trajectory, py::arg("spec"), py::arg("geometry"));
    m.def("load_trajectory_csv", &load_trajectory_csv, py::arg("path"), py::arg("geometry"),
          py::arg("limits") = KinematicLimits{});

    py::enum_<Variant>(m, "Variant")
        .value("Baseline", Variant::Baseline)
        .value("A", Variant::A)
        .value("B", Variant::B)
        .value("C", Variant::C)
        .value("D", Variant::D)
        .value("E", Variant::E);
    m.def("parse_variant", &parse_variant, py::arg("name"));

    py::enum_<Selector>(m, "Selector")
        .value("Median", Selector::Median)
        .value("Mean", Selector::Mean)
        .value("MinDist", Selector::MinDist)
        .value("PerPoint", Selector::PerPoint);

    py::enum_<SolverKind>(m, "SolverKind")
        .value("Pinv", SolverKind::Pinv)
        .value("Qr", SolverKind::Qr);

    py::class_<ControllerParams>(m, "ControllerParams")
        .def(py::init<>())
        .def_readwrite("degree", &ControllerParams::degree)
        .def_readwrite("window_len", &ControllerParams::window_len)
        .def_readwrite("n_coeffs", &ControllerParams::n_coeffs)
        .def_readwrite("n_up", &ControllerParams::n_up)
        .def_readwrite("settle_tol", &ControllerParams::settle_tol)
        .def_readwrite("selector", &ControllerParams::selector)
        .def_readwrite("switching", &ControllerParams::switching)
        .def_readwrite("switching_accel_jerk", &ControllerParams::switching_accel_jerk)
        .def_readwrite("solver", &ControllerParams::solver)
        .def_readwrite("past_adjust_span", &ControllerParams::past_adjust_span)
        .def_readwrite("grid_pitch", &ControllerParams::grid_pitch);

    py::class_<ControllerReport>(m, "ControllerReport")
        .def_readonly("variant", &ControllerReport::variant)
        .def_readonly("wall_seconds", &ControllerReport::wall_seconds)
        .def_readonly("flops", &ControllerReport::flops)
        .def_readonly("windows", &ControllerReport::windows)
        .def_readonly("model_evals_per_window", &ControllerReport::model_evals_per_window)
        .def_readonly("window_len", &ControllerReport::window_len)
        .def_readonly("n", &ControllerReport::n)
        .def_readonly("n_up", &ControllerReport::n_up)
        .def_readonly("settle_len", &ControllerReport::settle_len)
        .def_readonly("max_boundary_pos_jump", &ControllerReport::max_boundary_pos_jump)
        .def_readonly("max_boundary_vel_jump", &ControllerReport::max_boundary_vel_jump)
        .def_readonly("max_residual_pos_jump", &ControllerReport::max_residual_pos_jump)
        .def_readonly("max_residual_vel_jump", &ControllerReport::max_residual_vel_jump)
        .def_readonly("switch_objective", &ControllerReport::switch_objective);

    py::class_<ControllerResult>(m, "ControllerResult")
        .def_readonly("q_dm", &ControllerResult::q_dm)
        .def_readonly("report", &ControllerResult::report);

    m.def("run_controller", &run_controller, py::arg("trajectory"), py::arg("geometry"),
          py::arg("blocks"), py::arg("distribution"), py::arg("variant"),
          py::arg("params") = ControllerParams{},
          py::call_guard<py::gil_scoped_release>());
    m.def("variant_defaults", &variant_defaults, py::arg("variant"), py::arg("base"));

    py::class_<PlantModel>(m, "PlantModel");
    m.def("build_plant", &build_plant, py::arg("trajectory"), py::arg("geometry"),
          py::arg("blocks"), py::arg("distribution"), py::arg("settle_tol") = 1e-4,
          py::arg("Ts") = 1e-3, py::call_guard<py::gil_scoped_release>());

    py::class_<SimResult>(m, "SimResult")
        .def_readonly("q", &SimResult::q)
        .def_readonly("X", &SimResult::X);
    m.def("simulate_plant", &simulate_plant, py::arg("q_dm"), py::arg("plant"),
          py::arg("geometry"), py::call_guard<py::gil_scoped_release>());

    py::class_<ContourErrorSeries>(m, "ContourErrorSeries")
        .def_readonly("e", &ContourErrorSeries::e)
        .def_readonly("rms", &ContourErrorSeries::rms)
        .def_readonly("max", &ContourErrorSeries::max)
        .def("improvement_vs", &ContourErrorSeries::improvement_vs, py::arg("ref"));
    m.def("contour_error", &contour_error, py::arg("desired"), py::arg("actual"),
          py::arg("window") = 250);

    py::class_<ComparisonRow>(m, "ComparisonRow")
        .def_readonly("report", &ComparisonRow::report)
        .def_readonly("contour", &ComparisonRow::contour)
        .def_readonly("improvement_pct", &ComparisonRow::improvement_pct)
        .def_readonly("q_dm", &ComparisonRow::q_dm);
    m.def("run_comparison", &run_comparison, py::arg("trajectory"), py::arg("geometry"),
          py::arg("blocks"), py::arg("distribution"), py::arg("variants"), py::arg("params"),
          py::call_guard<py::gil_scoped_release>());
}
