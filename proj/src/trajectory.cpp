#include "deltafbs/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "deltafbs/errors.hpp"

namespace dfbs {

namespace {

// Dense planar polyline in path parameter order.
struct Path {
    std::vector<Eigen::Vector2d> pts;
    std::vector<bool> stop;  // force v = 0 at this vertex (sharp corner)
};

Path butterfly_path(const Eigen::Vector2d& offset) {
    // Polar butterfly r = e^{sin t} - 1.2 cos(4t), scaled affinely to the
    // spans x in [-83, 83], y in [-77, 23] mm.
    const int N = 20000;
    Path p;
    p.pts.reserve(N + 1);
    double xmin = 1e30, xmax = -1e30, ymin = 1e30, ymax = -1e30;
    std::vector<Eigen::Vector2d> raw(N + 1);
    for (int i = 0; i <= N; ++i) {
        double th = 2.0 * M_PI * i / N + M_PI / 2.0;  // start at the top lobe
        double r = std::exp(std::sin(th)) - 1.2 * std::cos(4.0 * th);
        raw[static_cast<size_t>(i)] = {r * std::cos(th), r * std::sin(th)};
        xmin = std::min(xmin, raw[static_cast<size_t>(i)].x());
        xmax = std::max(xmax, raw[static_cast<size_t>(i)].x());
        ymin = std::min(ymin, raw[static_cast<size_t>(i)].y());
        ymax = std::max(ymax, raw[static_cast<size_t>(i)].y());
    }
    for (auto& v : raw) {
        double x = (v.x() - xmin) / (xmax - xmin) * 166.0 - 83.0 + offset.x();
        double y = (v.y() - ymin) / (ymax - ymin) * 100.0 - 77.0 + offset.y();
        p.pts.push_back({x, y});
    }
    p.stop.assign(p.pts.size(), false);
    return p;
}

Path square_path(double side, const Eigen::Vector2d& offset) {
    Path p;
    double hs = side / 2.0;
    std::vector<Eigen::Vector2d> corners = {
        {-hs, -hs}, {hs, -hs}, {hs, hs}, {-hs, hs}, {-hs, -hs}};
    const int per_edge = 400;
    for (size_t e = 0; e + 1 < corners.size(); ++e) {
        for (int i = 0; i < per_edge; ++i) {
            double a = static_cast<double>(i) / per_edge;
            p.pts.push_back(corners[e] * (1 - a) + corners[e + 1] * a + offset);
            p.stop.push_back(i == 0);
        }
    }
    p.pts.push_back(corners.back() + offset);
    p.stop.push_back(true);
    return p;
}

Path waypoint_path(const std::vector<Eigen::Vector3d>& wps) {
    Path p;
    const int per_edge = 400;
    if (wps.size() == 1) {
        p.pts.push_back(wps[0].head<2>());
        p.stop.push_back(true);
        return p;
    }
    for (size_t e = 0; e + 1 < wps.size(); ++e) {
        for (int i = 0; i < per_edge; ++i) {
            double a = static_cast<double>(i) / per_edge;
            p.pts.push_back((wps[e] * (1 - a) + wps[e + 1] * a).head<2>());
            p.stop.push_back(i == 0);
        }
    }
    p.pts.push_back(wps.back().head<2>());
    p.stop.push_back(true);
    return p;
}

struct PlannedPath {
    std::vector<double> s;       // cumulative arc length per vertex
    std::vector<double> v;       // planned speed per vertex
    const Path* path = nullptr;
    double duration = 0.0;
};

// Curvature-aware forward/backward speed planning.  Tangential and
// centripetal acceleration each get half the budget so the combined discrete
// acceleration stays within a_max.
PlannedPath plan_speeds(const Path& path, const KinematicLimits& lim, double v_cap) {
    const size_t N = path.pts.size();
    PlannedPath pp;
    pp.path = &path;
    pp.s.resize(N);
    pp.v.assign(N, v_cap);
    pp.s[0] = 0.0;
    const double a_tan = 0.5 * lim.a_max;
    const double a_lat = 0.5 * lim.a_max;
    for (size_t i = 1; i < N; ++i)
        pp.s[i] = pp.s[i - 1] + (path.pts[i] - path.pts[i - 1]).norm();
    // curvature cap
    for (size_t i = 1; i + 1 < N; ++i) {
        Eigen::Vector2d d1 = path.pts[i] - path.pts[i - 1];
        Eigen::Vector2d d2 = path.pts[i + 1] - path.pts[i];
        double l1 = d1.norm(), l2 = d2.norm();
        if (l1 < 1e-12 || l2 < 1e-12) continue;
        double cross = d1.x() * d2.y() - d1.y() * d2.x();
        double kappa = 2.0 * std::abs(cross) / (l1 * l2 * (d1 + d2).norm() + 1e-30);
        if (kappa > 1e-12) pp.v[i] = std::min(pp.v[i], std::sqrt(a_lat / kappa));
    }
    for (size_t i = 0; i < N; ++i)
        if (path.stop[i]) pp.v[i] = 0.0;
    pp.v[0] = 0.0;
    pp.v[N - 1] = 0.0;
    // forward/backward accel-limited passes
    for (size_t i = 1; i < N; ++i) {
        double ds = pp.s[i] - pp.s[i - 1];
        pp.v[i] = std::min(pp.v[i], std::sqrt(pp.v[i - 1] * pp.v[i - 1] + 2.0 * a_tan * ds));
    }
    for (size_t i = N - 1; i-- > 0;) {
        double ds = pp.s[i + 1] - pp.s[i];
        pp.v[i] = std::min(pp.v[i], std::sqrt(pp.v[i + 1] * pp.v[i + 1] + 2.0 * a_tan * ds));
    }
    // traversal time (trapezoidal per segment)
    double T = 0.0;
    for (size_t i = 1; i < N; ++i) {
        double ds = pp.s[i] - pp.s[i - 1];
        double vm = 0.5 * (pp.v[i] + pp.v[i - 1]);
        if (vm < 1e-9) vm = 1e-9;
        T += ds / vm;
    }
    pp.duration = T;
    return pp;
}

Eigen::Vector2d interp_at_s(const PlannedPath& pp, double s) {
    const auto& sv = pp.s;
    auto it = std::upper_bound(sv.begin(), sv.end(), s);
    size_t i = (it == sv.begin()) ? 1 : static_cast<size_t>(it - sv.begin());
    if (i >= sv.size()) i = sv.size() - 1;
    double s0 = sv[i - 1], s1 = sv[i];
    double a = (s1 > s0) ? (s - s0) / (s1 - s0) : 0.0;
    return pp.path->pts[i - 1] * (1 - a) + pp.path->pts[i] * a;
}

Trajectory sample_plan(const PlannedPath& pp, double Ts, double z,
                       const DeltaGeometry& geometry, const KinematicLimits& lim) {
    // integrate s(t) on the plan, then sample on the Ts grid
    std::vector<double> ts(pp.s.size());
    ts[0] = 0.0;
    for (size_t i = 1; i < pp.s.size(); ++i) {
        double ds = pp.s[i] - pp.s[i - 1];
        double vm = std::max(0.5 * (pp.v[i] + pp.v[i - 1]), 1e-9);
        ts[i] = ts[i - 1] + ds / vm;
    }
    int N = static_cast<int>(std::floor(ts.back() / Ts)) + 1;
    Trajectory traj;
    traj.Ts = Ts;
    traj.limits = lim;
    traj.t.resize(N);
    traj.X.resize(N, 3);
    traj.q.resize(N, 3);
    size_t seg = 1;
    for (int k = 0; k < N; ++k) {
        double tk = k * Ts;
        while (seg + 1 < ts.size() && ts[seg] < tk) ++seg;
        double t0 = ts[seg - 1], t1 = ts[seg];
        double a = (t1 > t0) ? std::clamp((tk - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
        double s = pp.s[seg - 1] * (1 - a) + pp.s[seg] * a;
        Eigen::Vector2d xy = interp_at_s(pp, s);
        Eigen::Vector3d X(xy.x(), xy.y(), z);
        if (!geometry.inside_build_volume(X))
            throw OutOfWorkspaceError("trajectory sample outside build volume");
        traj.t[k] = tk;
        traj.X.row(k) = X.transpose();
        traj.q.row(k) = inverse_kinematics(geometry, X).transpose();
    }
    return traj;
}

}  // namespace

Trajectory gen_trajectory(const TrajectorySpec& spec, const DeltaGeometry& geometry) {
    if (!(spec.limits.v_max > 0.0) || !(spec.limits.a_max > 0.0))
        throw InfeasibleLimitsError("velocity and acceleration limits must be positive");
    Path path;
    switch (spec.shape) {
        case Shape::Butterfly: path = butterfly_path(spec.offset); break;
        case Shape::Square: path = square_path(spec.square_side, spec.offset); break;
        case Shape::Waypoints:
            if (spec.waypoints.empty()) throw DomainError("waypoint trajectory needs waypoints");
            path = waypoint_path(spec.waypoints);
            break;
    }
    if (path.pts.size() == 1) {
        Trajectory traj;
        traj.Ts = spec.Ts;
        traj.limits = spec.limits;
        traj.t = Eigen::VectorXd::Zero(1);
        traj.X.resize(1, 3);
        traj.X.row(0) << path.pts[0].x(), path.pts[0].y(), spec.z;
        traj.q.resize(1, 3);
        traj.q.row(0) =
            inverse_kinematics(geometry, traj.X.row(0).transpose()).transpose();
        return traj;
    }
    double v_cap = spec.limits.v_max;
    if (spec.shape == Shape::Butterfly && spec.target_duration > 0.0) {
        // Calibrate the feed cap so the run lasts target_duration.
        double lo = 1.0, hi = spec.limits.v_max;
        if (plan_speeds(path, spec.limits, hi).duration > spec.target_duration) {
            v_cap = hi;  // already slower than target; run at the limit
        } else {
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                if (plan_speeds(path, spec.limits, mid).duration > spec.target_duration)
                    lo = mid;
                else
                    hi = mid;
            }
            v_cap = hi;
        }
    }
    PlannedPath pp = plan_speeds(path, spec.limits, v_cap);
    return sample_plan(pp, spec.Ts, spec.z, geometry, spec.limits);
}

Trajectory load_trajectory_csv(const std::string& path, const DeltaGeometry& geometry,
                               const KinematicLimits& limits) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trajectory file: " + path);
    std::vector<Eigen::Vector4d> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0])))
            continue;
        std::istringstream ls(line);
        Eigen::Vector4d r;
        char comma;
        if (!(ls >> r[0])) continue;
        for (int i = 1; i < 4; ++i)
            if (!(ls >> comma >> r[i])) throw ConfigError("trajectory row needs t,x,y,z: " + line);
        rows.push_back(r);
    }
    if (rows.empty()) throw ConfigError("trajectory file has no samples: " + path);
    Trajectory traj;
    traj.limits = limits;
    traj.Ts = rows.size() > 1 ? rows[1][0] - rows[0][0] : 1e-3;
    traj.t.resize(static_cast<Eigen::Index>(rows.size()));
    traj.X.resize(static_cast<Eigen::Index>(rows.size()), 3);
    traj.q.resize(static_cast<Eigen::Index>(rows.size()), 3);
    for (size_t k = 0; k < rows.size(); ++k) {
        traj.t[static_cast<Eigen::Index>(k)] = rows[k][0];
        Eigen::Vector3d X = rows[k].tail<3>();
        traj.X.row(static_cast<Eigen::Index>(k)) = X.transpose();
        traj.q.row(static_cast<Eigen::Index>(k)) = inverse_kinematics(geometry, X).transpose();
    }
    return traj;
}

}  // namespace dfbs
