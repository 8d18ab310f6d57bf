#pragma once

#include <array>

#include "deltafbs/geometry.hpp"
#include "deltafbs/lifted.hpp"
#include "deltafbs/tf.hpp"

namespace dfbs {

// Plant blocks, stored frequency-normalized: all polynomials are in
// sigma = s / omega0.  The scaling keeps the degree-24 shared denominator's
// coefficients O(1); raw-s coefficients span ~60 decades and destroy the
// adjugate/determinant arithmetic.
struct ModelBlocks {
    RationalTF g_qd;  // carriage position-to-position
    RationalTF g_fq;  // force-to-position compliance, mm/N
    RationalTF wx, wy, wz;  // inertial dynamics, N/mm (mass folded in)
    double omega0 = 0.0;

    const RationalTF& w(int k) const { return k == 0 ? wx : (k == 1 ? wy : wz); }

    // Build from physical-domain (plain s) blocks; w_k = mass_k * s^2 * h_k(s)
    // with h_k unity-DC flexibility shapes.  Masses in kg, positions in mm,
    // so the force unit is mN; the 1e-3 N/mN factor is applied here.
    static ModelBlocks assemble(const RationalTF& g_qd_s, const RationalTF& g_fq_s,
                                const std::array<RationalTF, 3>& flex_shapes,
                                const std::array<double, 3>& masses, double omega0);
    static ModelBlocks synthetic_default();
    // Rigid effector (W = 0): decouples the carriages.
    static ModelBlocks rigid_default();
};

struct InertialDistribution {
    std::array<Eigen::Matrix3d, 3> P;
    static InertialDistribution thirds() {
        return {{Eigen::Matrix3d::Identity() / 3.0, Eigen::Matrix3d::Identity() / 3.0,
                 Eigen::Matrix3d::Identity() / 3.0}};
    }
};

using LongPoly = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// 3x3 rational matrix with one shared denominator (sigma-domain).  The
// adjugate/determinant entries are degree ~24 and nearly vanish at the
// lightly damped resonances, so extended-precision coefficient masters are
// kept alongside the double copies; frequency evaluation goes through the
// masters while discretization uses the double coefficients.
struct RationalMatrixModel {
    Poly a;
    std::array<std::array<Poly, 3>, 3> b;
    LongPoly al;
    std::array<std::array<LongPoly, 3>, 3> bl;
    double omega0 = 0.0;

    RationalTF entry(int i, int j) const { return RationalTF(b[static_cast<size_t>(i)][static_cast<size_t>(j)], a); }

    // Frequency response at sigma via extended-precision Horner.
    Eigen::Matrix3cd eval(std::complex<double> sigma) const;
};

// G_J^{-1} = [I - G_Fq (Jbar_i^T P_i rows) W Jbar]^{-1}, assembled from
// scratch as a polynomial adjugate/determinant (the per-point "matrix form"
// route used by controller variant (a)).
RationalMatrixModel gj_inverse_poly(const ModelBlocks& blocks, const Eigen::Matrix3d& Jbar,
                                    const InertialDistribution& P, FlopCount* fc = nullptr);

// Numeric frequency-domain oracle: G_J^{-1}(sigma) by complex 3x3 inversion.
Eigen::Matrix3cd gj_inverse_freq(const ModelBlocks& blocks, const Eigen::Matrix3d& Jbar,
                                 const InertialDistribution& P, std::complex<double> sigma);

// Full plant G = G_J^{-1} G_qd.  Throws SingularError if the determinant is
// identically zero (or vanishes at DC).
RationalMatrixModel full_model(const ModelBlocks& blocks, const Eigen::Matrix3d& Jbar,
                               const InertialDistribution& P, FlopCount* fc = nullptr);
RationalMatrixModel apply_gqd(const ModelBlocks& blocks, RationalMatrixModel gj,
                              FlopCount* fc = nullptr);

// Offline parameterization: the configuration-independent polynomial factors
// are precomputed once; evaluation at a configuration costs O(1) in window
// length (it only assembles fixed-degree polynomials).
class ParameterizedGJ {
public:
    ParameterizedGJ(const ModelBlocks& blocks, const DeltaGeometry& geometry,
                    const InertialDistribution& P);

    RationalMatrixModel evaluate(const Configuration& c, FlopCount* fc = nullptr) const;
    RationalMatrixModel evaluate(const Eigen::Matrix3d& Jbar, FlopCount* fc = nullptr) const;

    const ModelBlocks& blocks() const { return blocks_; }
    const DeltaGeometry& geometry() const { return geometry_; }
    const InertialDistribution& distribution() const { return P_; }

    // Test hook: perturbs a cached factor so the numeric-vs-parameterized
    // check must fail (negative validation path).
    void corrupt();

private:
    ModelBlocks blocks_;
    DeltaGeometry geometry_;
    InertialDistribution P_;
    Poly D_;                  // g_fq.den * wx.den * wy.den * wz.den
    std::array<Poly, 3> E_;   // g_fq.num * w_k.num * prod_{l != k} w_l.den
};

// All nine entries of the shared-denominator model discretized at once:
// one companion matrix, one input vector, nine output rows (entries in
// row-major (i,j) order).
struct MimoDiscrete {
    Eigen::MatrixXd Ad;
    Eigen::VectorXd Bd;
    Eigen::MatrixXd C;  // 9 x order
    Eigen::VectorXd D;  // 9
    double Ts = 0.0;    // physical seconds
};

MimoDiscrete discretize_shared(const RationalMatrixModel& m, double Ts,
                               DiscretizationMethod method = DiscretizationMethod::Zoh);

// Nine truncated impulse responses (row-major entry order) plus the settle
// length (max over entries).
struct ImpulseSet {
    std::array<Eigen::VectorXd, 9> h;
    int settle_len = 0;
    const Eigen::VectorXd& entry(int i, int j) const { return h[static_cast<size_t>(i * 3 + j)]; }
};

ImpulseSet impulse_responses(const MimoDiscrete& d, double tol, int max_len = 200000);

// Worst-case settle length of the discretized full model over a horizontal
// grid of reachable positions (grid_pitch mm apart) at the given height.
int worst_case_settle(const DeltaGeometry& g, const ModelBlocks& blocks,
                      const InertialDistribution& P, double grid_pitch, double Ts,
                      double settle_tol, double z = 0.0);

}  // namespace dfbs
