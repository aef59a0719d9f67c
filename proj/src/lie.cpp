#include "se3diffreg/lie.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "se3diffreg/errors.hpp"

namespace se3diffreg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSmallAngle = 1e-8;       // below: 2nd-order Taylor
constexpr double kRenormDefect = 1e-7;     // above: polar re-orthonormalization
constexpr double kCutLocusMargin = 1e-6;   // log rejects angle >= pi - margin

Mat3 polar_project(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Mat3 flip = Mat3::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

Mat3 rodrigues(const Vec3& rho) {
    const double theta = rho.norm();
    const Mat3 w = hat(rho);
    if (theta < kSmallAngle) {
        return Mat3::Identity() + w + 0.5 * w * w;
    }
    // 1 - cos(theta) via the half-angle form, stable at every angle.
    const double half_sin = std::sin(0.5 * theta);
    const double a = std::sin(theta) / theta;
    const double b = 2.0 * half_sin * half_sin / (theta * theta);
    return Mat3::Identity() + a * w + b * w * w;
}

/// Left Jacobian of SO(3): exp translation coupling, V * nu.
Mat3 v_matrix(const Vec3& rho) {
    const double theta = rho.norm();
    const Mat3 w = hat(rho);
    if (theta < kSmallAngle) {
        return Mat3::Identity() + 0.5 * w + w * w / 6.0;
    }
    const double half_sin = std::sin(0.5 * theta);
    const double b = 2.0 * half_sin * half_sin / (theta * theta);
    const double c = (theta - std::sin(theta)) / (theta * theta * theta);
    return Mat3::Identity() + b * w + c * w * w;
}

Mat3 v_matrix_inverse(const Vec3& rho) {
    const double theta = rho.norm();
    const Mat3 w = hat(rho);
    if (theta < kSmallAngle) {
        return Mat3::Identity() - 0.5 * w + w * w / 12.0;
    }
    // c = (1 - (theta/2) cot(theta/2)) / theta^2
    const double half = 0.5 * theta;
    const double c = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
    return Mat3::Identity() - 0.5 * w + c * w * w;
}

Vec3 vee_skew_part(const Mat3& r) {
    // vee((r - r^T) / 2) = sin(theta) * axis
    return Vec3(0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)), 0.5 * (r(1, 0) - r(0, 1)));
}

Vec3 so3_log(const Mat3& r) {
    const Vec3 w = vee_skew_part(r);
    const double s = w.norm();
    const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    const double theta = std::atan2(s, c);
    if (theta >= kPi - kCutLocusMargin) {
        throw NearCutLocus("rotation angle " + std::to_string(theta) +
                           " within 1e-6 of pi; logarithm rejected");
    }
    if (theta < kSmallAngle) {
        return w;
    }
    if (c > -0.99) {
        return (theta / s) * w;
    }
    // Near pi the skew part loses the axis; recover it from the symmetric
    // part, where n n^T = I + ((r + r^T)/2 - I) / (1 - cos theta).
    const Mat3 outer = Mat3::Identity() + (0.5 * (r + r.transpose()) - Mat3::Identity()) / (1.0 - c);
    int j = 0;
    outer.diagonal().maxCoeff(&j);
    Vec3 axis = outer.col(j) / std::sqrt(outer(j, j));
    if (w.dot(axis) < 0.0) {
        axis = -axis;
    }
    return theta * axis;
}

}  // namespace

Mat3 hat(const Vec3& w) {
    Mat3 m;
    m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
    return m;
}

double rotation_angle(const Mat3& r) {
    const double s = vee_skew_part(r).norm();
    const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    return std::atan2(s, c);
}

Rotation Rotation::from_matrix(const Mat3& m) {
    if (m.determinant() < 0.0) {
        throw std::invalid_argument("matrix is a reflection, not a rotation");
    }
    Rotation r;
    r.m = m;
    if (r.orthonormality_defect() > kRenormDefect) {
        r.m = polar_project(m);
    }
    return r;
}

double Rotation::orthonormality_defect() const {
    return (m.transpose() * m - Mat3::Identity()).norm();
}

Mat4 RigidTransform::matrix() const {
    Mat4 h = Mat4::Identity();
    h.topLeftCorner<3, 3>() = r.m;
    h.topRightCorner<3, 1>() = t;
    return h;
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
    const Eigen::RowVector4d bottom = m.row(3);
    if ((bottom - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("bottom row of a rigid transform must be (0,0,0,1)");
    }
    return {Rotation::from_matrix(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>()};
}

RigidTransform exp(const Twist& xi, ExpMap map) {
    Rotation r;
    r.m = rodrigues(xi.rho);
    if (map == ExpMap::decoupled) {
        return {r, xi.nu};
    }
    return {r, v_matrix(xi.rho) * xi.nu};
}

Twist log(const RigidTransform& h, ExpMap map) {
    const Vec3 rho = so3_log(h.r.m);
    if (map == ExpMap::decoupled) {
        return {rho, h.t};
    }
    return {rho, v_matrix_inverse(rho) * h.t};
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
    return {Rotation::from_matrix(a.r.m * b.r.m), a.r.m * b.t + a.t};
}

RigidTransform inverse(const RigidTransform& h) {
    const Mat3 rt = h.r.m.transpose();
    Rotation r;
    r.m = rt;
    return {r, -(rt * h.t)};
}

Vec3 apply(const RigidTransform& h, const Vec3& p) { return h.r.m * p + h.t; }

PointCloud apply(const RigidTransform& h, const PointCloud& cloud) {
    PointCloud out;
    out.points.reserve(cloud.size());
    for (const Vec3& p : cloud.points) {
        out.points.push_back(apply(h, p));
    }
    return out;
}

RigidTransform interpolate(double s, const RigidTransform& h0, ExpMap map) {
    const Twist rel = log(inverse(h0), map);
    return compose(exp((1.0 - s) * rel, map), h0);
}

std::pair<double, double> geodesic_distance(const RigidTransform& a, const RigidTransform& b) {
    const double rot = rotation_angle(a.r.m.transpose() * b.r.m);
    const double trans = (a.t - b.t).norm();
    return {rot, trans};
}

}  // namespace se3diffreg
