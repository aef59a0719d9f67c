#include "se3diffreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "se3diffreg/errors.hpp"

namespace se3diffreg {

double rotation_error(const Rotation& r_hat, const Rotation& r_star) {
    const double tr = (r_hat.m.transpose() * r_star.m).trace();
    return std::acos(std::clamp(0.5 * (tr - 1.0), -1.0, 1.0));
}

double translation_error(const Vec3& t_hat, const Vec3& t_star) { return (t_hat - t_star).norm(); }

PoseError pose_error(const RigidTransform& h_hat, const RigidTransform& h_star) {
    return {rotation_error(h_hat.r, h_star.r), translation_error(h_hat.t, h_star.t)};
}

MapReport map_summary(const std::vector<PoseError>& errors, std::vector<double> thresholds_rot_deg,
                      std::vector<double> thresholds_trans) {
    if (errors.empty()) {
        throw EmptyList("map_summary needs at least one pose error");
    }
    std::sort(thresholds_rot_deg.begin(), thresholds_rot_deg.end());
    std::sort(thresholds_trans.begin(), thresholds_trans.end());

    MapReport report;
    report.thresholds_rot_deg = thresholds_rot_deg;
    report.thresholds_trans = thresholds_trans;
    report.n_pairs = errors.size();
    const double n = static_cast<double>(errors.size());
    for (double thr_deg : thresholds_rot_deg) {
        const double thr = thr_deg * std::numbers::pi / 180.0;
        const auto count = std::count_if(errors.begin(), errors.end(),
                                         [thr](const PoseError& e) { return e.re < thr; });
        report.map_rot.push_back(static_cast<double>(count) / n);
    }
    for (double thr : thresholds_trans) {
        const auto count = std::count_if(errors.begin(), errors.end(),
                                         [thr](const PoseError& e) { return e.te < thr; });
        report.map_trans.push_back(static_cast<double>(count) / n);
    }
    return report;
}

}  // namespace se3diffreg
