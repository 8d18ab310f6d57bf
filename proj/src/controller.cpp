#include "deltafbs/controller.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <map>

#include "deltafbs/bsplines.hpp"
#include "deltafbs/errors.hpp"

namespace dfbs {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::Baseline: return "baseline";
        case Variant::A: return "a";
        case Variant::B: return "b";
        case Variant::C: return "c";
        case Variant::D: return "d";
        case Variant::E: return "e";
    }
    return "?";
}

Variant parse_variant(const std::string& s) {
    if (s == "baseline") return Variant::Baseline;
    if (s == "a") return Variant::A;
    if (s == "b") return Variant::B;
    if (s == "c") return Variant::C;
    if (s == "d") return Variant::D;
    if (s == "e") return Variant::E;
    throw ConfigError("unknown controller variant: " + s);
}

ControllerParams variant_defaults(Variant v, ControllerParams p) {
    switch (v) {
        case Variant::Baseline:
            p.switching = false;
            p.solver = SolverKind::Pinv;
            break;
        case Variant::A:
        case Variant::B:
            p.selector = Selector::PerPoint;
            p.switching = false;  // the per-point model is continuous across windows
            p.solver = SolverKind::Pinv;
            break;
        case Variant::C:
            p.selector = p.selector == Selector::PerPoint ? Selector::Median : p.selector;
            p.switching = false;
            p.solver = SolverKind::Pinv;
            break;
        case Variant::D:
            p.selector = p.selector == Selector::PerPoint ? Selector::Median : p.selector;
            p.switching = true;
            p.solver = SolverKind::Pinv;
            break;
        case Variant::E:
            p.selector = p.selector == Selector::PerPoint ? Selector::Median : p.selector;
            p.switching = true;
            p.solver = SolverKind::Qr;
            break;
    }
    return p;
}

Eigen::MatrixXd prefilter_basis(const Eigen::MatrixXd& Phi, const Eigen::VectorXd& impulse) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(Phi.rows(), Phi.cols());
    for (Eigen::Index c = 0; c < Phi.cols(); ++c)
        for (Eigen::Index k = 0; k < Phi.rows(); ++k) {
            double u = Phi(k, c);
            if (u == 0.0) continue;
            Eigen::Index r1 = std::min<Eigen::Index>(Phi.rows(), k + impulse.size());
            for (Eigen::Index r = k; r < r1; ++r) out(r, c) += u * impulse[r - k];
        }
    return out;
}

Eigen::MatrixXd filter_window(const Eigen::MatrixXd& Phi, const ImpulseSet& imps) {
    Eigen::MatrixXd out(3 * Phi.rows(), 3 * Phi.cols());
    for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l)
            out.block(i * Phi.rows(), l * Phi.cols(), Phi.rows(), Phi.cols()) =
                prefilter_basis(Phi, imps.entry(i, l));
    return out;
}

Configuration select_representative(const std::vector<Configuration>& window, Selector strategy,
                                    const DeltaGeometry& geometry) {
    if (window.empty()) throw DomainError("empty representative window");
    switch (strategy) {
        case Selector::Median:
            return window[window.size() / 2];
        case Selector::Mean: {
            Eigen::Vector3d Xm = Eigen::Vector3d::Zero();
            for (const auto& c : window) Xm += c.X;
            Xm /= static_cast<double>(window.size());
            return make_configuration(geometry, Xm);
        }
        case Selector::MinDist: {
            double best = 1e300;
            size_t bi = 0;
            for (size_t i = 0; i < window.size(); ++i) {
                double tot = 0.0;
                for (size_t k = 0; k < window.size(); ++k) tot += (window[i].X - window[k].X).norm();
                if (tot < best) {
                    best = tot;
                    bi = i;
                }
            }
            return window[bi];
        }
        case Selector::PerPoint: break;
    }
    throw DomainError("per-point strategy has no single representative");
}

namespace {

// Global uniform (unclamped) B-spline grid spanning the whole padded run.
// Basis function j has support [origin + (j-m)h, origin + (j+1)h) in sample
// units; window w's active functions are j in [m + w*n_up, m + w*n_up + n).
struct GlobalBasis {
    int m = 0;
    double h = 0.0;
    double origin = 0.0;
    int nfuncs = 0;
    std::vector<int> t0;  // first integer sample in support
    // nth[k][j]: order-k derivative of phi_j at integer samples (per-sample units)
    std::array<std::vector<Eigen::VectorXd>, 4> nth;

    GlobalBasis(int degree, double spacing, double orig, int count)
        : m(degree), h(spacing), origin(orig), nfuncs(count) {
        BSplineBasis basis = BSplineBasis::uniform_open(degree, count, orig, spacing);
        t0.resize(static_cast<size_t>(count));
        for (auto& v : nth) v.resize(static_cast<size_t>(count));
        for (int j = 0; j < count; ++j) {
            double lo = orig + (j - m) * h, hi = orig + (j + 1) * h;
            int a = static_cast<int>(std::ceil(lo - 1e-12));
            int b = static_cast<int>(std::ceil(hi - 1e-12));  // exclusive
            t0[static_cast<size_t>(j)] = a;
            for (auto& v : nth) v[static_cast<size_t>(j)].resize(b - a);
            for (int t = a; t < b; ++t) {
                double tt = std::min(std::max(static_cast<double>(t), basis.domain_lo()),
                                     basis.domain_hi());
                for (int k = 0; k < 4; ++k)
                    nth[static_cast<size_t>(k)][static_cast<size_t>(j)][t - a] =
                        basis.eval_dern_row(tt, k)[j];
            }
        }
    }
    double nvalue(int k, int j, int t) const {
        const Eigen::VectorXd& v = nth[static_cast<size_t>(k)][static_cast<size_t>(j)];
        int off = t - t0[static_cast<size_t>(j)];
        if (off < 0 || off >= v.size()) return 0.0;
        return v[off];
    }
    double value(int j, int t) const { return nvalue(0, j, t); }
    double dvalue(int j, int t) const { return nvalue(1, j, t); }
    const Eigen::VectorXd& bumpn(int k, int j) const {
        return nth[static_cast<size_t>(k)][static_cast<size_t>(j)];
    }
    // Range of functions whose support contains sample t.
    std::pair<int, int> touching(int t) const {
        int jhi = static_cast<int>(std::floor((t - origin) / h + 1e-12)) + m;
        int jlo = jhi - m;
        return {std::max(0, jlo), std::min(nfuncs - 1, jhi)};
    }
};

struct Tally {
    FlopCount fc;
    void conv(std::int64_t n) {
        fc.mul += n;
        fc.add += n;
    }
    void expm(std::int64_t order) {
        // scaling-and-squaring Pade estimate, documented in the report
        std::int64_t c = 25 * order * order * order;
        fc.mul += c;
        fc.add += c;
    }
};

// Per-point impulse cache for variants (a)/(b).
struct ImpulseCache {
    std::map<int, ImpulseSet> by_sample;
    const ImpulseSet& at(int t) const {
        auto it = by_sample.find(t);
        if (it == by_sample.end())
            throw DomainError("impulse cache miss at sample " + std::to_string(t));
        return it->second;
    }
    void evict_before(int t) {
        while (!by_sample.empty() && by_sample.begin()->first < t)
            by_sample.erase(by_sample.begin());
    }
};

}  // namespace

ControllerResult run_controller(const Trajectory& traj, const DeltaGeometry& geometry,
                                const ModelBlocks& blocks, const InertialDistribution& P,
                                Variant variant, ControllerParams user_params) {
    using clock = std::chrono::steady_clock;
    auto t_start = clock::now();
    ControllerParams params = variant_defaults(variant, user_params);

    const int E0 = traj.size();
    if (E0 < 1) throw DomainError("empty trajectory");
    const double Ts = traj.Ts;

    int L_C = params.window_len;
    if (L_C <= 0)
        L_C = worst_case_settle(geometry, blocks, P, params.grid_pitch, Ts, params.settle_tol,
                                traj.X(0, 2));
    const int m = params.degree;
    const int n = params.n_coeffs > 0 ? params.n_coeffs
                                      : static_cast<int>(std::floor(L_C / 4.5)) + 1;
    const int n_up = params.n_up > 0 ? params.n_up : n / 2;
    if (n != 2 * n_up)
        throw ConfigError("window scheme requires n = 2*n_up");
    const double h = static_cast<double>(L_C) / n_up;  // knot spacing, samples
    const int mh = static_cast<int>(std::floor(m * h));
    if (L_C <= mh) throw ConfigError("window length too small for spline degree");
    if (params.switching && params.past_adjust_span <= (params.switching_accel_jerk ? 4 : 2))
        throw ConfigError("past_adjust_span must exceed the continuity constraint count");
    const int R = 2 * L_C;  // fit rows per window

    // Window count: committed functions must cover every emitted sample.
    const int W = static_cast<int>(
        std::ceil(((E0 - 1) / h + m + 1) / n_up)) ;
    const int Epad = (W + 2) * L_C;

    // Padded desired trajectory (rest pose front/back), deviation coordinates.
    Eigen::RowVector3d q_rest = traj.q.row(0);
    Eigen::MatrixXd q_pad(Epad, 3), X_pad(Epad, 3);
    for (int t = 0; t < Epad; ++t) {
        int src = std::clamp(t - L_C, 0, E0 - 1);
        q_pad.row(t) = traj.q.row(src);
        X_pad.row(t) = traj.X.row(src);
    }
    Eigen::MatrixXd q_dev = q_pad.rowwise() - q_rest;

    // Global spline grid: basis index j = m + f for "committed order" f.
    const int F_committed = (W + 1) * n_up;
    const int FB = F_committed + 2 * m;
    const double origin = L_C - m * h;
    GlobalBasis gb(m, h, origin, FB);

    Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(FB, 3);

    const bool per_point = params.selector == Selector::PerPoint;
    ParameterizedGJ param_gj(blocks, geometry, P);

    Tally tally;
    FlopLedger solver_ledger;
    ControllerReport report;
    report.variant = variant_name(variant);
    report.window_len = L_C;
    report.n = n;
    report.n_up = n_up;
    report.model_evals_per_window = per_point ? R : 1;

    auto eval_model_at = [&](const Configuration& c, FlopCount* fc) {
        if (variant == Variant::A) {
            // from-scratch per-point assembly ("matrix form")
            Eigen::Matrix3d J = jacobian(geometry, c).J;
            return apply_gqd(blocks, gj_inverse_poly(blocks, J, P, fc), fc);
        }
        return apply_gqd(blocks, param_gj.evaluate(c, fc), fc);
    };

    auto impulses_for = [&](const RationalMatrixModel& mm) {
        if (variant == Variant::A) {
            // generic per-entry pipeline: each entry discretized and rolled
            // out independently (9 exponentials, 9 state recursions)
            ImpulseSet s;
            std::array<DiscreteFilter, 9> fs;
            int worst = 0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    RationalTF e = mm.entry(i, j);
                    DiscreteFilter f = discretize(e, Ts * mm.omega0, params.method);
                    tally.expm(f.order() + 1);
                    Eigen::VectorXd hh = impulse_response(f, params.settle_tol);
                    tally.conv(static_cast<std::int64_t>(hh.size()) * f.order() * f.order());
                    s.h[static_cast<size_t>(i * 3 + j)] = hh;
                    fs[static_cast<size_t>(i * 3 + j)] = std::move(f);
                    worst = std::max<int>(worst, static_cast<int>(hh.size()));
                }
            // Pad every entry to the joint settle length so the truncation
            // rule matches the shared-denominator route exactly (entries
            // sharing a denominator settle together).
            for (int e = 0; e < 9; ++e) {
                Eigen::VectorXd& hh = s.h[static_cast<size_t>(e)];
                if (static_cast<int>(hh.size()) == worst) continue;
                const DiscreteFilter& f = fs[static_cast<size_t>(e)];
                Eigen::VectorXd in = Eigen::VectorXd::Zero(worst);
                in[0] = 1.0;
                hh = f.filter(in);
            }
            s.settle_len = worst;
            return s;
        }
        MimoDiscrete d = discretize_shared(mm, Ts, params.method);
        tally.expm(d.Ad.rows() + 1);
        ImpulseSet s = impulse_responses(d, params.settle_tol);
        tally.conv(static_cast<std::int64_t>(s.settle_len) *
                   (d.Ad.rows() * d.Ad.rows() + 9 * d.Ad.rows()));
        return s;
    };

    auto config_at = [&](int t) {
        Configuration c;
        c.X = X_pad.row(t).transpose();
        c.q = q_pad.row(t).transpose();
        return c;
    };

    ImpulseCache cache;   // per-point variants
    ImpulseSet h_cur, h_old;  // window-LTI variants
    bool have_old = false;
    int max_settle = 0;
    // Running response of finalized committed samples (per-point variants).
    Eigen::MatrixXd acc;
    int final_done = 0;
    if (per_point) acc = Eigen::MatrixXd::Zero(Epad, 3);

    // Baseline: fixed LTI model at (x, y) = (0, 0); factorization cached.
    Eigen::MatrixXd baseline_pinv;

    // order-th derivative of the committed spline (functions j < jmax), carriage l
    auto committed_value = [&](int t, int l, int jmax, int order) {
        auto [jlo, jhi] = gb.touching(t);
        double acc = 0.0;
        for (int j = jlo; j <= std::min(jhi, jmax - 1); ++j)
            acc += coeff(j, l) * gb.nvalue(order, j, t);
        return acc;
    };

    for (int w = 0; w < W; ++w) {
        const int act0 = m + w * n_up;
        const int t_b = L_C + w * L_C;        // nominal window start
        const int t_lo = t_b - mh;            // first fit row
        if (t_lo + R > Epad) throw DomainError("padded trajectory too short");

        // --- model evaluation ---
        if (per_point) {
            for (int t = t_lo; t < t_lo + R; ++t) {
                FlopCount fc;
                RationalMatrixModel mm = eval_model_at(config_at(t), &fc);
                tally.fc.mul += fc.mul;
                tally.fc.add += fc.add;
                cache.by_sample[t] = impulses_for(mm);
                max_settle = std::max(max_settle, cache.by_sample[t].settle_len);
            }
        } else {
            Configuration rep;
            if (variant == Variant::Baseline) {
                if (w == 0) {
                    Eigen::Vector3d Xc(0.0, 0.0, traj.X(0, 2));
                    rep = make_configuration(geometry, Xc);
                }
            } else {
                // representative from the first L_C points of the window
                std::vector<Configuration> cfg;
                cfg.reserve(static_cast<size_t>(L_C));
                for (int t = t_b; t < t_b + L_C; ++t) cfg.push_back(config_at(t));
                rep = select_representative(cfg, params.selector, geometry);
            }
            if (variant != Variant::Baseline || w == 0) {
                FlopCount fc;
                RationalMatrixModel mm = eval_model_at(rep, &fc);
                tally.fc.mul += fc.mul;
                tally.fc.add += fc.add;
                if (w > 0) h_old = h_cur, have_old = true;
                h_cur = impulses_for(mm);
                max_settle = std::max(max_settle, h_cur.settle_len);
            } else {
                if (w == 1) h_old = h_cur, have_old = true;  // constant model
            }
        }

        auto imp_at = [&](int t) -> const ImpulseSet& {
            return per_point ? cache.at(t) : h_cur;
        };

        // --- filtered column of basis func j into the stacked matrix ---
        auto fill_column = [&](Eigen::MatrixXd& M, int col, int j, int l) {
            const Eigen::VectorXd& bj = gb.bumpn(0, j);
            int b0 = gb.t0[static_cast<size_t>(j)];
            for (int tau = 0; tau < bj.size(); ++tau) {
                double v = bj[tau];
                if (v == 0.0) continue;
                int gt = b0 + tau;
                if (gt >= t_lo + R) break;
                const ImpulseSet& use = imp_at(gt);
                for (int i = 0; i < 3; ++i) {
                    const Eigen::VectorXd& hh = use.entry(i, l);
                    int r0 = std::max(gt, t_lo);
                    int r1 = std::min<int>(gt + static_cast<int>(hh.size()), t_lo + R);
                    for (int r = r0; r < r1; ++r)
                        M(i * R + (r - t_lo), col) += v * hh[r - gt];
                    tally.conv(std::max(0, r1 - r0));
                }
            }
        };

        // --- past contribution and boundary values ---
        // Per-point variants stream the past: samples before t_lo are
        // outside every active support, so their committed value is final
        // and their response folds into `acc` while the impulse is cached.
        if (per_point) {
            for (int t = final_done; t < t_lo; ++t)
                for (int l = 0; l < 3; ++l) {
                    double v = committed_value(t, l, act0, 0);
                    if (v == 0.0) continue;
                    const ImpulseSet& hs = cache.at(t);
                    for (int i = 0; i < 3; ++i) {
                        const Eigen::VectorXd& hh = hs.entry(i, l);
                        int r1 = std::min<int>(t + static_cast<int>(hh.size()), Epad);
                        for (int r = t; r < r1; ++r) acc(r, i) += v * hh[r - t];
                        tally.conv(std::max(0, r1 - t));
                    }
                }
            final_done = std::max(final_done, t_lo);
            cache.evict_before(t_lo);
        }
        // committed spline signal per carriage over the reach of the filters
        int reach = per_point ? 0 : h_cur.settle_len;
        int tau0 = per_point ? t_lo : std::max(0, t_lo - reach + 1);
        int tau1 = t_b;  // committed functions vanish at and after t_b
        // Continuity constraint orders: position+velocity, plus acceleration
        // and jerk when requested.
        const int K = params.switching_accel_jerk ? 4 : 2;
        std::vector<Eigen::MatrixXd> u_ord(
            static_cast<size_t>(K), Eigen::MatrixXd(std::max(0, tau1 - tau0), 3));
        for (int t = tau0; t < tau1; ++t)
            for (int l = 0; l < 3; ++l)
                for (int k = 0; k < K; ++k)
                    u_ord[static_cast<size_t>(k)](t - tau0, l) = committed_value(t, l, act0, k);
        const Eigen::MatrixXd& u_past = u_ord[0];
        const Eigen::MatrixXd& du_past = u_ord[1];

        auto past_response = [&](const Eigen::MatrixXd& u, bool old_model) {
            Eigen::VectorXd pc = Eigen::VectorXd::Zero(3 * R);
            for (int t = tau0; t < tau1; ++t)
                for (int l = 0; l < 3; ++l) {
                    double v = u(t - tau0, l);
                    if (v == 0.0) continue;
                    const ImpulseSet& hs =
                        per_point ? cache.at(t) : (old_model ? h_old : h_cur);
                    for (int i = 0; i < 3; ++i) {
                        const Eigen::VectorXd& hh = hs.entry(i, l);
                        int r0 = std::max(t, t_lo);
                        int r1 = std::min<int>(t + static_cast<int>(hh.size()), t_lo + R);
                        for (int r = r0; r < r1; ++r) pc[i * R + (r - t_lo)] += v * hh[r - t];
                        tally.conv(std::max(0, r1 - r0));
                    }
                }
            return pc;
        };
        auto boundary_value = [&](const Eigen::MatrixXd& u, bool old_model) {
            Eigen::Vector3d y = Eigen::Vector3d::Zero();
            for (int t = tau0; t < tau1; ++t)
                for (int l = 0; l < 3; ++l) {
                    double v = u(t - tau0, l);
                    if (v == 0.0) continue;
                    const ImpulseSet& hs =
                        per_point ? cache.at(t) : (old_model ? h_old : h_cur);
                    for (int i = 0; i < 3; ++i) {
                        const Eigen::VectorXd& hh = hs.entry(i, l);
                        int k = t_lo - t;
                        if (k >= 0 && k < hh.size()) y[i] += v * hh[k];
                    }
                }
            return y;
        };

        Eigen::VectorXd pc = past_response(u_past, false);
        if (per_point)
            for (int i = 0; i < 3; ++i)
                for (int r = 0; r < R; ++r) pc[i * R + r] += acc(t_lo + r, i);

        // --- switching compensation / discontinuity bookkeeping ---
        bool track_switch = !per_point && variant != Variant::Baseline && w > 0 && have_old;
        if (track_switch) {
            Eigen::Vector3d y1 = boundary_value(u_past, true);
            Eigen::Vector3d y2 = boundary_value(u_past, false);
            Eigen::Vector3d v1 = boundary_value(du_past, true) / Ts;
            Eigen::Vector3d v2 = boundary_value(du_past, false) / Ts;
            report.max_boundary_pos_jump =
                std::max(report.max_boundary_pos_jump, (y2 - y1).cwiseAbs().maxCoeff());
            report.max_boundary_vel_jump =
                std::max(report.max_boundary_vel_jump, (v2 - v1).cwiseAbs().maxCoeff());
            if (params.switching) {
                const int n_adj = std::min(params.past_adjust_span, w * n_up);
                const int na3 = 3 * n_adj;
                // adjusted functions: trailing n_adj committed per carriage
                Eigen::MatrixXd A2 = Eigen::MatrixXd::Zero(3 * R, na3);
                Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3 * K, na3);
                Eigen::VectorXd p_old(na3);
                for (int l = 0; l < 3; ++l)
                    for (int k = 0; k < n_adj; ++k) {
                        int j = act0 - n_adj + k;
                        int col = l * n_adj + k;
                        fill_column(A2, col, j, l);
                        p_old[col] = coeff(j, l);
                        for (int i = 0; i < 3; ++i) {
                            const Eigen::VectorXd& hh = h_cur.entry(i, l);
                            int b0 = gb.t0[static_cast<size_t>(j)];
                            int len = static_cast<int>(gb.bumpn(0, j).size());
                            for (int tau = 0; tau < len; ++tau) {
                                int k2 = t_lo - (b0 + tau);
                                if (k2 < 0 || k2 >= hh.size()) continue;
                                double sc = 1.0;
                                for (int o = 0; o < K; ++o, sc /= Ts)
                                    C(3 * o + i, col) += gb.bumpn(o, j)[tau] * hh[k2] * sc;
                            }
                        }
                    }
                Eigen::VectorXd b2 = A2 * p_old;
                tally.conv(A2.rows() * A2.cols());
                Eigen::VectorXd d(3 * K);
                double sc = 1.0;
                for (int o = 0; o < K; ++o, sc /= Ts)
                    d.segment(3 * o, 3) =
                        (boundary_value(u_ord[static_cast<size_t>(o)], true) -
                         boundary_value(u_ord[static_cast<size_t>(o)], false)) * sc +
                        C.middleRows(3 * o, 3) * p_old;
                ConstrainedSolution sol = constrained_lsq_kkt(A2, b2, C, d, &solver_ledger);
                // correct the past response for the adjusted coefficients
                pc += A2 * (sol.x - p_old);
                tally.conv(A2.rows() * A2.cols());
                report.switch_objective += (A2 * (sol.x - p_old)).squaredNorm();
                Eigen::VectorXd resid = C * sol.x - d;
                report.max_residual_pos_jump =
                    std::max(report.max_residual_pos_jump, resid.head(3).cwiseAbs().maxCoeff());
                report.max_residual_vel_jump =
                    std::max(report.max_residual_vel_jump,
                             resid.segment(3, 3).cwiseAbs().maxCoeff());
            }
        }

        // --- assemble and solve the window least squares ---
        Eigen::VectorXd target(3 * R);
        for (int i = 0; i < 3; ++i)
            for (int r = 0; r < R; ++r) target[i * R + r] = q_dev(t_lo + r, i) - pc[i * R + r];

        Eigen::VectorXd x;
        if (variant == Variant::Baseline) {
            if (w == 0) {
                Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3 * R, 3 * n);
                for (int l = 0; l < 3; ++l)
                    for (int k = 0; k < n; ++k) fill_column(A, l * n + k, act0 + k, l);
                baseline_pinv = A.completeOrthogonalDecomposition().pseudoInverse();
            }
            x = baseline_pinv * target;
            tally.conv(baseline_pinv.rows() * baseline_pinv.cols());
        } else {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3 * R, 3 * n);
            for (int l = 0; l < 3; ++l)
                for (int k = 0; k < n; ++k) fill_column(A, l * n + k, act0 + k, l);
            x = params.solver == SolverKind::Qr ? lsq_qr(A, target, &solver_ledger)
                                                : lsq_pinv(A, target, &solver_ledger);
        }

        // --- commit ---
        int commit = (w == W - 1) ? n : n_up;
        for (int l = 0; l < 3; ++l)
            for (int k = 0; k < commit; ++k) coeff(act0 + k, l) = x[l * n + k];
    }

    // --- emit committed modified commands for the original samples ---
    ControllerResult result;
    result.q_dm.resize(E0, 3);
    for (int t = 0; t < E0; ++t)
        for (int l = 0; l < 3; ++l)
            result.q_dm(t, l) = q_rest[l] + committed_value(L_C + t, l, FB, 0);

    report.windows = W;
    report.settle_len = max_settle;
    report.flops = tally.fc.total() + solver_ledger.count.total();
    report.wall_seconds =
        std::chrono::duration<double>(clock::now() - t_start).count();
    result.report = report;
    return result;
}

}  // namespace dfbs
