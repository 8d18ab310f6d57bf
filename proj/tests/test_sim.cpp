#include <doctest.h>

#include <cmath>

#include "deltafbs/sim.hpp"

using namespace dfbs;

TEST_CASE("butterfly trajectory hits the reference sample budget and limits") {
    DeltaGeometry g;
    TrajectorySpec spec;  // butterfly, 5 s target, default limits
    Trajectory traj = gen_trajectory(spec, g);
    CHECK(traj.size() >= 4950);
    CHECK(traj.size() <= 5050);
    CHECK(traj.Ts == doctest::Approx(1e-3));

    // Per-sample limit audit with 1% discretization slack.
    double vmax = 0.0, amax = 0.0;
    for (int k = 1; k + 1 < traj.size(); ++k) {
        Eigen::Vector3d v = (traj.X.row(k + 1) - traj.X.row(k)).transpose() / traj.Ts;
        Eigen::Vector3d a = (traj.X.row(k + 1) - 2.0 * traj.X.row(k) + traj.X.row(k - 1))
                                .transpose() /
                            (traj.Ts * traj.Ts);
        vmax = std::max(vmax, v.norm());
        amax = std::max(amax, a.norm());
    }
    CHECK(vmax <= traj.limits.v_max * 1.01);
    CHECK(amax <= traj.limits.a_max * 1.01);

    // Reference span: x in [-83, 83], y in [-77, 23].
    CHECK(traj.X.col(0).maxCoeff() == doctest::Approx(83.0).epsilon(0.01));
    CHECK(traj.X.col(0).minCoeff() == doctest::Approx(-83.0).epsilon(0.01));
    CHECK(traj.X.col(1).maxCoeff() == doctest::Approx(23.0).epsilon(0.05));
    CHECK(traj.X.col(1).minCoeff() == doctest::Approx(-77.0).epsilon(0.01));

    // Joint samples stay consistent with IK.
    for (int k = 0; k < traj.size(); k += 500)
        CHECK((traj.q.row(k).transpose() -
               inverse_kinematics(g, traj.X.row(k).transpose()))
                  .norm() < 1e-9);
}

TEST_CASE("zero-length path gives a single-sample trajectory at rest") {
    DeltaGeometry g;
    TrajectorySpec spec;
    spec.shape = Shape::Waypoints;
    spec.waypoints = {Eigen::Vector3d(10.0, 5.0, 0.0)};
    spec.z = 2.0;  // paths are planar at spec.z
    Trajectory traj = gen_trajectory(spec, g);
    CHECK(traj.size() == 1);
    CHECK((traj.X.row(0).transpose() - Eigen::Vector3d(10.0, 5.0, 2.0)).norm() < 1e-12);
}

TEST_CASE("square at the calibration offsets stays in the workspace") {
    DeltaGeometry g;
    for (Eigen::Vector2d off : {Eigen::Vector2d(40.0, 69.0), Eigen::Vector2d(40.0, -69.0),
                                Eigen::Vector2d(-80.0, 0.0), Eigen::Vector2d(0.0, 0.0)}) {
        TrajectorySpec spec;
        spec.shape = Shape::Square;
        spec.square_side = 60.0;
        spec.offset = off;
        Trajectory traj = gen_trajectory(spec, g);
        for (int k = 0; k < traj.size(); k += 37)
            CHECK(g.inside_build_volume(traj.X.row(k).transpose()));
        double vmax = 0.0;
        for (int k = 1; k < traj.size(); ++k)
            vmax = std::max(vmax,
                            ((traj.X.row(k) - traj.X.row(k - 1)) / traj.Ts).norm());
        CHECK(vmax <= traj.limits.v_max * 1.01);
    }
}

TEST_CASE("out-of-workspace trajectory request throws") {
    DeltaGeometry g;
    TrajectorySpec spec;
    spec.shape = Shape::Square;
    spec.square_side = 60.0;
    spec.offset = {120.0, 120.0};
    CHECK_THROWS_AS(gen_trajectory(spec, g), OutOfWorkspaceError);
}

TEST_CASE("identity plant returns the commands unchanged") {
    DeltaGeometry g;
    TrajectorySpec spec;
    spec.shape = Shape::Square;
    spec.square_side = 30.0;
    Trajectory traj = gen_trajectory(spec, g);
    PlantModel plant;
    plant.q_rest = traj.q.row(0);
    ImpulseSet id;
    for (int e = 0; e < 9; ++e) {
        Eigen::VectorXd h = Eigen::VectorXd::Zero(1);
        if (e % 4 == 0) h[0] = 1.0;  // diagonal entries
        id.h[static_cast<size_t>(e)] = h;
    }
    id.settle_len = 1;
    plant.impulses.assign(static_cast<size_t>(traj.size()), id);
    SimResult sim = simulate_plant(traj.q, plant, g);
    CHECK((sim.q - traj.q).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((sim.X - traj.X).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("LTI plant matches recursive filtering") {
    DeltaGeometry g;
    TrajectorySpec spec;
    spec.shape = Shape::Square;
    spec.square_side = 30.0;
    Trajectory traj = gen_trajectory(spec, g);
    ModelBlocks blocks = ModelBlocks::rigid_default();  // G = diag(G_qd) everywhere
    InertialDistribution P = InertialDistribution::thirds();
    // Tight truncation so the lifted tail cutoff stays below the tolerance.
    PlantModel plant = build_plant(traj, g, blocks, P, 1e-12, traj.Ts);
    SimResult sim = simulate_plant(traj.q, plant, g);

    DiscreteFilter f = discretize_zoh(blocks.g_qd, traj.Ts * blocks.omega0);
    for (int j = 0; j < 3; ++j) {
        Eigen::VectorXd dev = traj.q.col(j).array() - traj.q(0, j);
        Eigen::VectorXd y = f.filter(dev).array() + traj.q(0, j);
        CHECK((sim.q.col(j) - y).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("contour error trivia") {
    // actual == desired -> zero everywhere.
    Eigen::MatrixXd path(3, 3);
    path << 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 2.0, 0.0, 0.0;
    ContourErrorSeries z = contour_error(path, path, 0);
    CHECK(z.max == doctest::Approx(0.0));

    // Uniform lateral displacement of a straight segment.
    Eigen::MatrixXd actual = path;
    actual.col(1).array() += 0.010;  // 10 um
    ContourErrorSeries d = contour_error(path, actual, 0);
    CHECK(d.e.minCoeff() == doctest::Approx(0.010).epsilon(1e-12));
    CHECK(d.max == doctest::Approx(0.010).epsilon(1e-12));
    CHECK(d.rms <= d.max);
}

TEST_CASE("windowed contour search agrees with brute force on the butterfly") {
    DeltaGeometry g;
    TrajectorySpec spec;
    Trajectory traj = gen_trajectory(spec, g);
    // Perturb the path slightly to get nonzero errors.
    Eigen::MatrixXd actual = traj.X;
    for (int k = 0; k < actual.rows(); ++k)
        actual(k, 0) += 0.02 * std::sin(0.01 * k), actual(k, 1) += 0.015 * std::cos(0.013 * k);
    ContourErrorSeries fast = contour_error(traj.X, actual, 250);
    ContourErrorSeries brute = contour_error(traj.X, actual, 0);
    CHECK((fast.e - brute.e).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("uncompensated commands show at least 5x the compensated error") {
    DeltaGeometry g;
    ModelBlocks blocks = ModelBlocks::synthetic_default();
    InertialDistribution P = InertialDistribution::thirds();
    TrajectorySpec spec;  // smooth butterfly; square corners are spline-fit-limited
    Trajectory traj = gen_trajectory(spec, g);

    PlantModel plant = build_plant(traj, g, blocks, P);
    SimResult raw = simulate_plant(traj.q, plant, g);
    ContourErrorSeries raw_err = contour_error(traj.X, raw.X);

    ControllerResult comp = run_controller(traj, g, blocks, P, Variant::E, ControllerParams{});
    SimResult fixed = simulate_plant(comp.q_dm, plant, g);
    ContourErrorSeries fixed_err = contour_error(traj.X, fixed.X);

    CHECK(raw_err.max > 5.0 * fixed_err.max);
    CHECK(raw_err.rms > 5.0 * fixed_err.rms);
}

TEST_CASE("run_comparison reports improvements relative to baseline") {
    DeltaGeometry g;
    ModelBlocks blocks = ModelBlocks::synthetic_default();
    InertialDistribution P = InertialDistribution::thirds();
    TrajectorySpec spec;
    spec.shape = Shape::Square;
    spec.square_side = 50.0;
    spec.offset = {35.0, 0.0};
    Trajectory traj = gen_trajectory(spec, g);

    std::vector<ComparisonRow> rows = run_comparison(
        traj, g, blocks, P, {Variant::Baseline, Variant::C, Variant::E}, ControllerParams{});
    REQUIRE(rows.size() == 3);
    CHECK(std::isnan(rows[0].improvement_pct));  // baseline row
    CHECK(rows[1].improvement_pct > 0.0);
    CHECK(rows[2].improvement_pct > 0.0);
    CHECK(rows[2].contour.rms <= rows[1].contour.rms + 1e-12);
    CHECK(rows[1].contour.rms < rows[0].contour.rms);
}

TEST_CASE("single-variant comparison has no improvement reference") {
    DeltaGeometry g;
    ModelBlocks blocks = ModelBlocks::rigid_default();
    InertialDistribution P = InertialDistribution::thirds();
    TrajectorySpec spec;
    spec.shape = Shape::Square;
    spec.square_side = 20.0;
    Trajectory traj = gen_trajectory(spec, g);
    std::vector<ComparisonRow> rows =
        run_comparison(traj, g, blocks, P, {Variant::E}, ControllerParams{});
    REQUIRE(rows.size() == 1);
    CHECK(std::isnan(rows[0].improvement_pct));
}
