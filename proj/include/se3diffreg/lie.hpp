#pragma once

#include <utility>

#include "se3diffreg/types.hpp"

namespace se3diffreg {

/// Which SE(3) exponential chart to use. `coupled` is the group exponential:
/// the rotation couples into the translation through the left Jacobian
/// (V matrix). `decoupled` treats SO(3) x R^3 as a direct product instead.
/// `coupled` is the default everywhere; `decoupled` exists for ablations.
enum class ExpMap { coupled, decoupled };

/// 3x3 rotation matrix, kept orthonormal with det = +1. Construction through
/// from_matrix re-orthonormalizes (SVD polar projection) whenever the
/// orthonormality defect exceeds 1e-7, which stops drift over long
/// composition chains without touching healthy matrices.
struct Rotation {
    Mat3 m = Mat3::Identity();

    static Rotation identity() { return {}; }
    static Rotation from_matrix(const Mat3& m);

    /// Frobenius norm of m^T m - I.
    double orthonormality_defect() const;
};

/// Element of se(3): rotational part rho (radians * axis) and translational
/// part nu (length units). The linear workspace for interpolation and
/// posterior twist combination.
struct Twist {
    Vec3 rho = Vec3::Zero();
    Vec3 nu = Vec3::Zero();

    Vec6 vec() const {
        Vec6 v;
        v << rho, nu;
        return v;
    }
    static Twist from_vec(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }

    double angle() const { return rho.norm(); }
};

inline Twist operator+(const Twist& a, const Twist& b) { return {a.rho + b.rho, a.nu + b.nu}; }
inline Twist operator-(const Twist& a, const Twist& b) { return {a.rho - b.rho, a.nu - b.nu}; }
inline Twist operator*(double s, const Twist& x) { return {s * x.rho, s * x.nu}; }

/// Rigid transform in SE(3), equivalent to the 4x4 homogeneous matrix
/// [r t; 0 1].
struct RigidTransform {
    Rotation r;
    Vec3 t = Vec3::Zero();

    static RigidTransform identity() { return {}; }
    Mat4 matrix() const;
    /// Expects bottom row (0,0,0,1) and a proper rotation block.
    static RigidTransform from_matrix(const Mat4& m);
};

Mat3 hat(const Vec3& w);

/// Rotation angle in [0, pi] of a rotation matrix; total (no cut-locus
/// rejection), accurate near both 0 and pi.
double rotation_angle(const Mat3& r);

/// SE(3) exponential. Total on finite twists; switches Rodrigues/V formulas
/// to 2nd-order Taylor series below ||rho|| = 1e-8.
RigidTransform exp(const Twist& xi, ExpMap map = ExpMap::coupled);

/// SE(3) logarithm on the principal branch. Throws NearCutLocus when the
/// rotation angle is >= pi - 1e-6.
Twist log(const RigidTransform& h, ExpMap map = ExpMap::coupled);

RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& h);

Vec3 apply(const RigidTransform& h, const Vec3& p);
PointCloud apply(const RigidTransform& h, const PointCloud& cloud);

/// Geodesic endpoint map between the identity and h0: returns
/// Exp((1 - s) * Log(h0^-1)) * h0, so s = 1 gives h0 and s = 0 the identity.
/// s is the interpolation weight on h0. Throws NearCutLocus via log.
RigidTransform interpolate(double s, const RigidTransform& h0, ExpMap map = ExpMap::coupled);

/// (rotation angle of the relative transform, ||t_a - t_b||).
std::pair<double, double> geodesic_distance(const RigidTransform& a, const RigidTransform& b);

}  // namespace se3diffreg
