#include "deltafbs/sim.hpp"

#include <cmath>

#include "deltafbs/errors.hpp"

namespace dfbs {

PlantModel build_plant(const Trajectory& traj, const DeltaGeometry& geometry,
                       const ModelBlocks& blocks, const InertialDistribution& P,
                       double settle_tol, double Ts) {
    PlantModel plant;
    plant.q_rest = traj.q.row(0);
    plant.impulses.reserve(static_cast<size_t>(traj.size()));
    ParameterizedGJ param(blocks, geometry, P);
    for (int t = 0; t < traj.size(); ++t) {
        Configuration c{traj.X.row(t).transpose(), traj.q.row(t).transpose()};
        RationalMatrixModel mm = apply_gqd(blocks, param.evaluate(c));
        plant.impulses.push_back(impulse_responses(discretize_shared(mm, Ts), settle_tol));
    }
    return plant;
}

SimResult simulate_plant(const Eigen::MatrixXd& q_dm, const PlantModel& plant,
                         const DeltaGeometry& geometry) {
    const int N = static_cast<int>(q_dm.rows());
    if (N != static_cast<int>(plant.impulses.size()))
        throw DimensionMismatchError("command length does not match plant model");
    SimResult out;
    out.q = Eigen::MatrixXd::Zero(N, 3);
    // Point-by-point LSR: column k of the lifted plant is the impulse
    // response of the model at sample k, applied to the command deviation.
    for (int k = 0; k < N; ++k) {
        const ImpulseSet& hs = plant.impulses[static_cast<size_t>(k)];
        for (int l = 0; l < 3; ++l) {
            double u = q_dm(k, l) - plant.q_rest[l];
            if (u == 0.0) continue;
            for (int i = 0; i < 3; ++i) {
                const Eigen::VectorXd& hh = hs.entry(i, l);
                int r1 = std::min<int>(N, k + static_cast<int>(hh.size()));
                for (int r = k; r < r1; ++r) out.q(r, i) += u * hh[r - k];
            }
        }
    }
    out.q.rowwise() += plant.q_rest;
    out.X.resize(N, 3);
    for (int t = 0; t < N; ++t)
        out.X.row(t) = forward_kinematics(geometry, out.q.row(t).transpose()).transpose();
    return out;
}

namespace {
double point_segment_dist(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                          const Eigen::Vector3d& b) {
    Eigen::Vector3d d = b - a;
    double L2 = d.squaredNorm();
    if (L2 < 1e-30) return (p - a).norm();
    double t = std::clamp((p - a).dot(d) / L2, 0.0, 1.0);
    return (p - (a + t * d)).norm();
}
}  // namespace

ContourErrorSeries contour_error(const Eigen::MatrixXd& desired, const Eigen::MatrixXd& actual,
                                 int window) {
    const int Nd = static_cast<int>(desired.rows());
    const int Na = static_cast<int>(actual.rows());
    if (Nd < 1 || Na < 1) throw DomainError("contour_error needs nonempty series");
    ContourErrorSeries out;
    out.e.resize(Na);
    // Prune radius per segment: |p_x - a_x| > reach + best rules it out.
    std::vector<double> seg_reach;
    if (window > 0 && Nd > 1) {
        seg_reach.resize(static_cast<size_t>(Nd - 1));
        for (int i = 0; i < Nd - 1; ++i)
            seg_reach[static_cast<size_t>(i)] =
                std::abs(desired(i + 1, 0) - desired(i, 0));
    }
    int last = 0;
    for (int k = 0; k < Na; ++k) {
        Eigen::Vector3d p = actual.row(k).transpose();
        int lo = 0, hi = Nd - 1;
        if (window > 0) {
            lo = std::max(0, last - window);
            hi = std::min(Nd - 1, last + window);
        }
        double best = 1e300;
        int best_i = lo;
        if (Nd == 1) {
            best = (p - desired.row(0).transpose()).norm();
        } else {
            for (int i = lo; i < hi; ++i) {
                double d = point_segment_dist(p, desired.row(i).transpose(),
                                              desired.row(i + 1).transpose());
                if (d < best) {
                    best = d;
                    best_i = i;
                }
            }
            if (window > 0) {
                // The windowed pass only yields an upper bound (the path may
                // self-intersect); finish with a pruned global scan so the
                // result matches the brute-force minimum exactly.
                for (int i = 0; i < Nd - 1; ++i) {
                    if (i >= lo && i < hi) continue;
                    if (std::abs(p[0] - desired(i, 0)) - seg_reach[static_cast<size_t>(i)] > best)
                        continue;
                    double d = point_segment_dist(p, desired.row(i).transpose(),
                                                  desired.row(i + 1).transpose());
                    if (d < best) {
                        best = d;
                        best_i = i;
                    }
                }
            }
        }
        last = best_i;
        out.e[k] = best;
    }
    out.rms = std::sqrt(out.e.squaredNorm() / static_cast<double>(Na));
    out.max = out.e.cwiseAbs().maxCoeff();
    return out;
}

std::vector<ComparisonRow> run_comparison(const Trajectory& traj, const DeltaGeometry& geometry,
                                          const ModelBlocks& blocks, const InertialDistribution& P,
                                          const std::vector<Variant>& variants,
                                          const ControllerParams& params) {
    PlantModel plant = build_plant(traj, geometry, blocks, P, params.settle_tol, traj.Ts);
    std::vector<ComparisonRow> rows;
    const ContourErrorSeries* baseline = nullptr;
    for (Variant v : variants) {
        ComparisonRow row;
        ControllerResult res = run_controller(traj, geometry, blocks, P, v, params);
        row.report = res.report;
        row.q_dm = res.q_dm;
        row.sim = simulate_plant(res.q_dm, plant, geometry);
        row.contour = contour_error(traj.X, row.sim.X);
        rows.push_back(std::move(row));
    }
    for (auto& row : rows)
        if (row.report.variant == "baseline") baseline = &row.contour;
    for (auto& row : rows)
        row.improvement_pct =
            (baseline && &row.contour != baseline)
                ? row.contour.improvement_vs(*baseline)
                : std::numeric_limits<double>::quiet_NaN();
    return rows;
}

}  // namespace dfbs
