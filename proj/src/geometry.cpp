#include "deltafbs/geometry.hpp"

#include <cmath>
#include <sstream>

namespace dfbs {

void DeltaGeometry::validate() const {
    if (!(forearm_length > 0.0)) throw ConfigError("forearm_length must be positive");
    if (!(carriage_radius > effector_radius) || effector_radius < 0.0)
        throw ConfigError("require carriage_radius > effector_radius >= 0");
    if (!(forearm_length > carriage_radius - effector_radius))
        throw ConfigError("forearm_length must exceed carriage_radius - effector_radius");
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            double d = std::remainder(carriage_angles[static_cast<size_t>(i)] -
                                          carriage_angles[static_cast<size_t>(j)],
                                      2.0 * M_PI);
            if (std::abs(d) < 1e-9) throw ConfigError("carriage angles must be distinct");
        }
    if (!(build_x[0] < build_x[1]) || !(build_y[0] < build_y[1]) || !(build_z[0] < build_z[1]))
        throw ConfigError("build volume bounds must be ordered");
}

bool DeltaGeometry::inside_build_volume(const Eigen::Vector3d& X) const {
    return X.x() >= build_x[0] && X.x() <= build_x[1] && X.y() >= build_y[0] &&
           X.y() <= build_y[1] && X.z() >= build_z[0] && X.z() <= build_z[1];
}

Eigen::Vector3d inverse_kinematics(const DeltaGeometry& g, const Eigen::Vector3d& X) {
    Eigen::Vector3d q;
    const double rho = g.radius();
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector2d anchor = rho * g.rail_dir(i);
        Eigen::Vector2d d = anchor - X.head<2>();
        double horiz2 = d.squaredNorm();
        double disc = g.forearm_length * g.forearm_length - horiz2;
        if (disc < 0.0) {
            std::ostringstream os;
            os << "arm " << i << " cannot reach point (" << X.x() << ", " << X.y() << ", "
               << X.z() << "): horizontal distance " << std::sqrt(horiz2)
               << " exceeds forearm length " << g.forearm_length;
            throw UnreachableError(os.str());
        }
        q[i] = X.z() + std::sqrt(disc);  // elbow-up: carriage above effector
    }
    return q;
}

Eigen::Vector3d forward_kinematics(const DeltaGeometry& g, const Eigen::Vector3d& q) {
    // Effector center lies on three spheres of radius L centered at the
    // carriage positions c_i = (rho*u_i, q_i).  Trilaterate and take the
    // lower-z root (effector below the carriages).
    const double rho = g.radius();
    std::array<Eigen::Vector3d, 3> c;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector2d a = rho * g.rail_dir(i);
        c[static_cast<size_t>(i)] = {a.x(), a.y(), q[i]};
    }
    // Subtracting sphere equations gives two planes; intersect with sphere 0.
    Eigen::Matrix<double, 2, 3> A;
    Eigen::Vector2d b;
    for (int k = 0; k < 2; ++k) {
        Eigen::Vector3d d = c[static_cast<size_t>(k + 1)] - c[0];
        A.row(k) = d.transpose();
        b[k] = 0.5 * (c[static_cast<size_t>(k + 1)].squaredNorm() - c[0].squaredNorm());
    }
    // Parameterize the line of plane intersection: X = p + t*v.
    Eigen::Vector3d v = A.row(0).transpose().cross(Eigen::Vector3d(A.row(1).transpose()));
    if (v.norm() < 1e-9) throw NoIntersectionError("degenerate carriage arrangement");
    // Particular point: least-squares solution of the 2x3 system.
    Eigen::Vector3d p = A.transpose() * (A * A.transpose()).ldlt().solve(b);
    // Intersect with |X - c0|^2 = L^2.
    Eigen::Vector3d w = p - c[0];
    double aa = v.squaredNorm();
    double bb = 2.0 * w.dot(v);
    double cc = w.squaredNorm() - g.forearm_length * g.forearm_length;
    double disc = bb * bb - 4.0 * aa * cc;
    if (disc < 0.0) {
        std::ostringstream os;
        os << "spheres do not intersect for q = (" << q.x() << ", " << q.y() << ", " << q.z()
           << ")";
        throw NoIntersectionError(os.str());
    }
    double sq = std::sqrt(disc);
    double t1 = (-bb + sq) / (2.0 * aa);
    double t2 = (-bb - sq) / (2.0 * aa);
    Eigen::Vector3d X1 = p + t1 * v;
    Eigen::Vector3d X2 = p + t2 * v;
    return (X1.z() < X2.z()) ? X1 : X2;
}

Configuration make_configuration(const DeltaGeometry& g, const Eigen::Vector3d& X) {
    return {X, inverse_kinematics(g, X)};
}

LinearizedJacobian jacobian(const DeltaGeometry& g, const Configuration& c) {
    // Constraint |X - c_i|^2 = L^2 differentiates to a_i^T dX = a_iz dq_i
    // with a_i = X - carriage_i, so dX/dq = M^{-1} diag(a_iz).
    const double rho = g.radius();
    Eigen::Matrix3d M;
    Eigen::Vector3d az;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector2d anchor = rho * g.rail_dir(i);
        Eigen::Vector3d a(c.X.x() - anchor.x(), c.X.y() - anchor.y(), c.X.z() - c.q[i]);
        M.row(i) = a.transpose();
        az[i] = a.z();
    }
    double det = M.determinant();
    if (std::abs(det) < 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff()))
        throw SingularError("kinematic Jacobian is singular at this pose");
    LinearizedJacobian out;
    out.J = M.inverse() * az.asDiagonal().toDenseMatrix();
    return out;
}

}  // namespace dfbs
