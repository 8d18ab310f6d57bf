#include "deltafbs/model.hpp"

#include <cmath>

#include "deltafbs/errors.hpp"

namespace dfbs {

namespace {
RationalTF second_order_unity(double wn, double zeta) {
    Poly num(1), den(3);
    num << wn * wn;
    den << wn * wn, 2.0 * zeta * wn, 1.0;
    return RationalTF(num, den);
}
}  // namespace

ModelBlocks ModelBlocks::assemble(const RationalTF& g_qd_s, const RationalTF& g_fq_s,
                                  const std::array<RationalTF, 3>& flex_shapes,
                                  const std::array<double, 3>& masses, double omega0) {
    ModelBlocks mb;
    mb.omega0 = omega0;
    mb.g_qd = g_qd_s.scaled_arg(omega0);
    mb.g_fq = g_fq_s.scaled_arg(omega0);
    Poly s2(3);
    for (int k = 0; k < 3; ++k) {
        const RationalTF& h = flex_shapes[static_cast<size_t>(k)];
        // w_k(s) = mass * 1e-3 * s^2 * h(s); in sigma units s^2 -> omega0^2 sigma^2.
        s2 << 0.0, 0.0, masses[static_cast<size_t>(k)] * 1e-3 * omega0 * omega0;
        RationalTF hs = h.scaled_arg(omega0);
        RationalTF w(poly_mul(s2, hs.num), hs.den);
        (k == 0 ? mb.wx : k == 1 ? mb.wy : mb.wz) = w;
    }
    for (const RationalTF* tf : {&mb.g_qd, &mb.g_fq, &mb.wx, &mb.wy, &mb.wz})
        if (!tf->is_stable(0.0)) throw ConfigError("model block has an unstable denominator");
    return mb;
}

ModelBlocks ModelBlocks::synthetic_default() {
    const double omega0 = 2.0 * M_PI * 40.0;
    RationalTF g_qd = second_order_unity(2.0 * M_PI * 40.0, 0.3);
    // Compliance: 0.015 mm/N static gain through a well-damped 40 Hz pole
    // pair. The damping keeps the coupled closed-loop transients shorter
    // than a command window, which the single-configuration variants need
    // to stay useful (their model attribution of older transients is only
    // as good as the window-to-window drift).
    RationalTF g_fq = second_order_unity(2.0 * M_PI * 40.0, 0.5);
    g_fq.num *= 1.5e-2;
    std::array<RationalTF, 3> flex = {second_order_unity(2.0 * M_PI * 35.0, 0.5),
                                      second_order_unity(2.0 * M_PI * 35.0, 0.5),
                                      second_order_unity(2.0 * M_PI * 50.0, 0.5)};
    return assemble(g_qd, g_fq, flex, {0.3, 0.3, 0.3}, omega0);
}

ModelBlocks ModelBlocks::rigid_default() {
    ModelBlocks mb = synthetic_default();
    Poly zero = Poly::Zero(1), one = Poly::Ones(1);
    mb.wx = RationalTF(zero, one);
    mb.wy = RationalTF(zero, one);
    mb.wz = RationalTF(zero, one);
    return mb;
}

namespace {
// c[i][j][k] = (Jbar_i^T P_i)_k * Jbar(k, j)
std::array<std::array<std::array<double, 3>, 3>, 3> coupling_coeffs(
    const Eigen::Matrix3d& Jbar, const InertialDistribution& P, FlopCount* fc) {
    std::array<std::array<std::array<double, 3>, 3>, 3> c{};
    for (int i = 0; i < 3; ++i) {
        Eigen::RowVector3d r = Jbar.col(i).transpose() * P.P[static_cast<size_t>(i)];
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                c[static_cast<size_t>(i)][static_cast<size_t>(j)][static_cast<size_t>(k)] =
                    r[k] * Jbar(k, j);
    }
    if (fc) {
        fc->mul += 9 * 3 + 27;
        fc->add += 9 * 2;
    }
    return c;
}

// The adjugate/determinant expansion cancels by several decades when the
// degree-24 products are later evaluated near the lightly damped resonances,
// so the coefficient arithmetic runs in extended precision.  Flop accounting
// mirrors poly_mul/poly_axpy/poly_sub/poly_add exactly.
using LPoly = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

LPoly lift(const Poly& p, Eigen::Index len) {
    LPoly q = LPoly::Zero(std::max(len, p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) q[i] = p[i];
    return q;
}

Poly lower(const LPoly& p) {
    Poly q(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) q[i] = static_cast<double>(p[i]);
    return poly_trim(q, 1e-300);
}

LPoly lmul(const LPoly& a, const LPoly& b, FlopCount* fc) {
    LPoly c = LPoly::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    if (fc) {
        fc->mul += a.size() * b.size();
        fc->add += a.size() * b.size();
    }
    return c;
}

LPoly laxpy(long double alpha, const LPoly& x, const LPoly& y, FlopCount* fc) {
    LPoly c = LPoly::Zero(std::max(x.size(), y.size()));
    c.head(y.size()) = y;
    c.head(x.size()) += alpha * x;
    if (fc) {
        fc->mul += x.size();
        fc->add += x.size();
    }
    return c;
}

LPoly lsub(const LPoly& a, const LPoly& b, FlopCount* fc) {
    LPoly c = LPoly::Zero(std::max(a.size(), b.size()));
    c.head(a.size()) = a;
    c.head(b.size()) -= b;
    if (fc) fc->add += b.size();
    return c;
}

LPoly ladd(const LPoly& a, const LPoly& b, FlopCount* fc) {
    LPoly c = LPoly::Zero(std::max(a.size(), b.size()));
    c.head(a.size()) = a;
    c.head(b.size()) += b;
    if (fc) fc->add += b.size();
    return c;
}

RationalMatrixModel adjugate_over_det(
    const Poly& D, const std::array<Poly, 3>& E,
    const std::array<std::array<std::array<double, 3>, 3>, 3>& c, double omega0,
    FlopCount* fc) {
    LPoly Dl = lift(D, D.size());
    std::array<LPoly, 3> El = {lift(E[0], D.size()), lift(E[1], D.size()), lift(E[2], D.size())};
    // M_ij = delta_ij * D - sum_k c_ijk E_k, all padded to deg(D).
    std::array<std::array<LPoly, 3>, 3> M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            LPoly m = (i == j) ? Dl : LPoly(LPoly::Zero(Dl.size()));
            for (int k = 0; k < 3; ++k)
                m = laxpy(-static_cast<long double>(
                              c[static_cast<size_t>(i)][static_cast<size_t>(j)][static_cast<size_t>(k)]),
                          El[static_cast<size_t>(k)], m, fc);
            M[static_cast<size_t>(i)][static_cast<size_t>(j)] = m;
        }
    auto cof = [&](int i, int j) {
        int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
        // even permutation pairs keep the sign positive
        return lsub(lmul(M[static_cast<size_t>(i1)][static_cast<size_t>(j1)],
                         M[static_cast<size_t>(i2)][static_cast<size_t>(j2)], fc),
                    lmul(M[static_cast<size_t>(i1)][static_cast<size_t>(j2)],
                         M[static_cast<size_t>(i2)][static_cast<size_t>(j1)], fc), fc);
    };
    RationalMatrixModel out;
    out.omega0 = omega0;
    // det via the first row of cofactors.
    LPoly det = LPoly::Zero(1);
    for (int j = 0; j < 3; ++j) {
        LPoly term = lmul(M[0][static_cast<size_t>(j)], cof(0, j), fc);
        det = ladd(det, term, fc);
    }
    out.al = det;
    out.a = lower(det);
    // adj(M)_ij = cof(j, i); entries of G_J^{-1} = D * adj_ij / det.
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            out.bl[static_cast<size_t>(i)][static_cast<size_t>(j)] = lmul(Dl, cof(j, i), fc);
            out.b[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                lower(out.bl[static_cast<size_t>(i)][static_cast<size_t>(j)]);
        }
    return out;
}

std::complex<long double> lhorner(const LPoly& p, std::complex<long double> s) {
    std::complex<long double> acc(0.0L, 0.0L);
    for (Eigen::Index i = p.size() - 1; i >= 0; --i) acc = acc * s + p[i];
    return acc;
}
}  // namespace

RationalMatrixModel gj_inverse_poly(const ModelBlocks& blocks, const Eigen::Matrix3d& Jbar,
                                    const InertialDistribution& P, FlopCount* fc) {
    Poly D = poly_mul(poly_mul(blocks.g_fq.den, blocks.wx.den, fc),
                      poly_mul(blocks.wy.den, blocks.wz.den, fc), fc);
    std::array<Poly, 3> E;
    for (int k = 0; k < 3; ++k) {
        Poly others = Poly::Ones(1);
        for (int l = 0; l < 3; ++l)
            if (l != k) others = poly_mul(others, blocks.w(l).den, fc);
        E[static_cast<size_t>(k)] =
            poly_mul(poly_mul(blocks.g_fq.num, blocks.w(k).num, fc), others, fc);
    }
    auto c = coupling_coeffs(Jbar, P, fc);
    return adjugate_over_det(D, E, c, blocks.omega0, fc);
}

Eigen::Matrix3cd gj_inverse_freq(const ModelBlocks& blocks, const Eigen::Matrix3d& Jbar,
                                 const InertialDistribution& P, std::complex<double> sigma) {
    Eigen::Matrix3cd W = Eigen::Matrix3cd::Zero();
    for (int k = 0; k < 3; ++k) W(k, k) = blocks.w(k).eval(sigma);
    Eigen::Matrix3cd stack;
    for (int i = 0; i < 3; ++i)
        stack.row(i) = (Jbar.col(i).transpose() * P.P[static_cast<size_t>(i)]).cast<std::complex<double>>();
    Eigen::Matrix3cd M = Eigen::Matrix3cd::Identity() -
                         blocks.g_fq.eval(sigma) * stack * W * Jbar.cast<std::complex<double>>();
    return M.inverse();
}

Eigen::Matrix3cd RationalMatrixModel::eval(std::complex<double> sigma) const {
    const std::complex<long double> s(sigma.real(), sigma.imag());
    const std::complex<long double> av = al.size() ? lhorner(al, s) : lhorner(lift(a, a.size()), s);
    Eigen::Matrix3cd out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const LongPoly& p = bl[static_cast<size_t>(i)][static_cast<size_t>(j)];
            std::complex<long double> v =
                (p.size() ? lhorner(p, s)
                          : lhorner(lift(b[static_cast<size_t>(i)][static_cast<size_t>(j)],
                                         b[static_cast<size_t>(i)][static_cast<size_t>(j)].size()),
                                    s)) /
                av;
            out(i, j) = std::complex<double>(static_cast<double>(v.real()),
                                             static_cast<double>(v.imag()));
        }
    return out;
}

RationalMatrixModel apply_gqd(const ModelBlocks& blocks, RationalMatrixModel gj, FlopCount* fc) {
    RationalMatrixModel out;
    out.omega0 = gj.omega0;
    out.a = poly_mul(gj.a, blocks.g_qd.den, fc);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.b[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                poly_mul(gj.b[static_cast<size_t>(i)][static_cast<size_t>(j)], blocks.g_qd.num, fc);
    if (gj.al.size()) {
        out.al = lmul(gj.al, lift(blocks.g_qd.den, blocks.g_qd.den.size()), nullptr);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                out.bl[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    lmul(gj.bl[static_cast<size_t>(i)][static_cast<size_t>(j)],
                         lift(blocks.g_qd.num, blocks.g_qd.num.size()), nullptr);
    }
    return out;
}

RationalMatrixModel full_model(const ModelBlocks& blocks, const Eigen::Matrix3d& Jbar,
                               const InertialDistribution& P, FlopCount* fc) {
    RationalMatrixModel gj = gj_inverse_poly(blocks, Jbar, P, fc);
    if (gj.a.cwiseAbs().maxCoeff() == 0.0 || std::abs(gj.a[0]) < 1e-12 * gj.a.cwiseAbs().maxCoeff())
        throw SingularError("polynomial matrix determinant vanishes at DC");
    return apply_gqd(blocks, std::move(gj), fc);
}

ParameterizedGJ::ParameterizedGJ(const ModelBlocks& blocks, const DeltaGeometry& geometry,
                                 const InertialDistribution& P)
    : blocks_(blocks), geometry_(geometry), P_(P) {
    D_ = poly_mul(poly_mul(blocks.g_fq.den, blocks.wx.den), poly_mul(blocks.wy.den, blocks.wz.den));
    for (int k = 0; k < 3; ++k) {
        Poly others = Poly::Ones(1);
        for (int l = 0; l < 3; ++l)
            if (l != k) others = poly_mul(others, blocks.w(l).den);
        E_[static_cast<size_t>(k)] = poly_mul(poly_mul(blocks.g_fq.num, blocks.w(k).num), others);
    }
}

RationalMatrixModel ParameterizedGJ::evaluate(const Eigen::Matrix3d& Jbar, FlopCount* fc) const {
    auto c = coupling_coeffs(Jbar, P_, fc);
    return adjugate_over_det(D_, E_, c, blocks_.omega0, fc);
}

RationalMatrixModel ParameterizedGJ::evaluate(const Configuration& c, FlopCount* fc) const {
    return evaluate(jacobian(geometry_, c).J, fc);
}

void ParameterizedGJ::corrupt() { D_[D_.size() / 2] *= 1.01; }

MimoDiscrete discretize_shared(const RationalMatrixModel& m, double Ts,
                               DiscretizationMethod method) {
    // The nine entries share a denominator, so one controllable-canonical
    // companion (one matrix exponential, one input vector) serves all of
    // them; only the output rows differ.
    const Eigen::Index N = m.a.size() - 1;
    double lead = m.a[N];
    MimoDiscrete out;
    out.Ts = Ts;
    out.C.resize(9, N);
    out.D.resize(9);
    Poly den = m.a / lead;
    std::array<Poly, 9> nums;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const Poly& bij = m.b[static_cast<size_t>(i)][static_cast<size_t>(j)];
            Poly num = Poly::Zero(N + 1);
            num.head(bij.size()) = bij / lead;
            double Dterm = num[N];
            out.D[i * 3 + j] = Dterm;
            nums[static_cast<size_t>(i * 3 + j)] = (num.head(N) - Dterm * den.head(N)).eval();
        }
    // Discretize with the frequency-normalized step (sigma-domain model).
    Poly one = Poly::Ones(1);
    RationalTF proto(one, den);
    DiscreteFilter f = discretize(proto, Ts * m.omega0, method);
    out.Ad = f.A;
    out.Bd = f.B;
    // For ZOH the companion state is shared; each entry's C row is its
    // numerator coefficients (Tustin folds an extra term into D via the
    // per-entry path, so it routes through discretize() per entry).
    if (method == DiscretizationMethod::Zoh) {
        for (int e = 0; e < 9; ++e) out.C.row(e) = nums[static_cast<size_t>(e)].transpose();
    } else {
        for (int e = 0; e < 9; ++e) {
            RationalTF tf(poly_trim(nums[static_cast<size_t>(e)], 1e-300), den);
            DiscreteFilter fe = discretize(tf, Ts * m.omega0, method);
            out.C.row(e).setZero();
            out.C.row(e).head(fe.C.size()) = fe.C;
            out.D[e] += fe.D;
        }
    }
    return out;
}

ImpulseSet impulse_responses(const MimoDiscrete& d, double tol, int max_len) {
    const int N = static_cast<int>(d.Ad.rows());
    std::vector<Eigen::Matrix<double, 9, 1>> ys;
    ys.reserve(1024);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    Eigen::Matrix<double, 9, 1> peak = Eigen::Matrix<double, 9, 1>::Zero();
    int tail = 0;
    int settled_at = -1;
    for (int k = 0; k < max_len; ++k) {
        Eigen::Matrix<double, 9, 1> y = d.C * x;
        if (k == 0) y += d.D;
        if (N) x = d.Ad * x + (k == 0 ? d.Bd : Eigen::VectorXd::Zero(N).eval());
        ys.push_back(y);
        peak = peak.cwiseMax(y.cwiseAbs());
        bool below = true;
        for (int e = 0; e < 9; ++e)
            if (peak[e] > 0.0 && std::abs(y[e]) > tol * peak[e]) below = false;
        if (below && peak.maxCoeff() > 0.0)
            ++tail;
        else
            tail = 0;
        if (tail > std::max(4 * N, 8) && k > N) {
            settled_at = static_cast<int>(ys.size()) - tail + 1;
            break;
        }
    }
    if (settled_at < 0) throw NotSettledError("shared model impulse responses did not settle");
    ImpulseSet out;
    out.settle_len = settled_at;
    for (int e = 0; e < 9; ++e) {
        out.h[static_cast<size_t>(e)].resize(settled_at);
        for (int k = 0; k < settled_at; ++k) out.h[static_cast<size_t>(e)][k] = ys[static_cast<size_t>(k)][e];
    }
    return out;
}

int worst_case_settle(const DeltaGeometry& g, const ModelBlocks& blocks,
                      const InertialDistribution& P, double grid_pitch, double Ts,
                      double settle_tol, double z) {
    if (!(grid_pitch > 0.0)) throw DomainError("grid pitch must be positive");
    ParameterizedGJ param(blocks, g, P);
    int worst = 0;
    for (double x = g.build_x[0]; x <= g.build_x[1] + 1e-9; x += grid_pitch)
        for (double y = g.build_y[0]; y <= g.build_y[1] + 1e-9; y += grid_pitch) {
            Eigen::Vector3d X(x, y, z);
            Configuration c;
            try {
                c = make_configuration(g, X);
            } catch (const UnreachableError&) {
                continue;
            }
            RationalMatrixModel m = apply_gqd(blocks, param.evaluate(c));
            ImpulseSet s = impulse_responses(discretize_shared(m, Ts), settle_tol);
            worst = std::max(worst, s.settle_len);
        }
    if (worst == 0) throw DomainError("no reachable grid points");
    return worst;
}

}  // namespace dfbs
