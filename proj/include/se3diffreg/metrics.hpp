#pragma once

#include <vector>

#include "se3diffreg/lie.hpp"

namespace se3diffreg {

struct PoseError {
    double re = 0.0;  // radians, in [0, pi]
    double te = 0.0;  // length units
};

/// Per-threshold success fractions: map_rot[i] is the fraction of pairs with
/// re below thresholds_rot[i] (degrees), independently map_trans over te.
struct MapReport {
    std::vector<double> thresholds_rot_deg;
    std::vector<double> thresholds_trans;
    std::vector<double> map_rot;
    std::vector<double> map_trans;
    std::size_t n_pairs = 0;
};

/// arccos((Tr(r_hat^T r_star) - 1) / 2), argument clamped to [-1, 1].
double rotation_error(const Rotation& r_hat, const Rotation& r_star);

/// Euclidean norm of the translation difference. Thresholds are lengths,
/// so the non-squared norm is the comparable quantity.
double translation_error(const Vec3& t_hat, const Vec3& t_star);

PoseError pose_error(const RigidTransform& h_hat, const RigidTransform& h_star);

inline const std::vector<double>& default_rot_thresholds_deg() {
    static const std::vector<double> v{5.0, 10.0};
    return v;
}
inline const std::vector<double>& default_trans_thresholds() {
    static const std::vector<double> v{0.01, 0.02};
    return v;
}

/// Throws EmptyList on an empty error list. Thresholds are sorted ascending
/// in the report.
MapReport map_summary(const std::vector<PoseError>& errors,
                      std::vector<double> thresholds_rot_deg = default_rot_thresholds_deg(),
                      std::vector<double> thresholds_trans = default_trans_thresholds());

}  // namespace se3diffreg
