#include "se3diffreg/surrogate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "se3diffreg/errors.hpp"
#include "se3diffreg/kdtree.hpp"

namespace se3diffreg {

namespace {

constexpr double kDegenerateRatio = 1e-9;

double mean_pair_distance(const std::vector<Vec3>& src, const std::vector<Vec3>& dst,
                          const RigidTransform& h) {
    double total = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        total += (apply(h, src[i]) - dst[i]).norm();
    }
    return total / static_cast<double>(src.size());
}

RegistrationResult run_kabsch(const PointCloud& source, const PointCloud& model,
                              const RegistrationHints& hints) {
    if (hints.correspondences == nullptr) {
        throw MissingCorrespondences(
            "kabsch surrogate needs correspondence indices in the pair metadata");
    }
    const std::vector<int>& corr = *hints.correspondences;
    if (corr.size() != source.size()) {
        throw MissingCorrespondences("correspondence count " + std::to_string(corr.size()) +
                                     " does not match source size " +
                                     std::to_string(source.size()));
    }
    std::vector<Vec3> dst;
    dst.reserve(corr.size());
    for (int idx : corr) {
        if (idx < 0 || idx >= static_cast<int>(model.size())) {
            throw MissingCorrespondences("correspondence index " + std::to_string(idx) +
                                         " outside model");
        }
        dst.push_back(model.points[static_cast<std::size_t>(idx)]);
    }

    RegistrationResult result;
    result.h = kabsch_alignment(source.points, dst);
    result.residual = mean_pair_distance(source.points, dst, result.h);
    result.iterations = 1;
    result.converged = true;
    return result;
}

RegistrationResult run_trimmed_icp(const SurrogateKind& kind, const PointCloud& source,
                                   const PointCloud& model) {
    const std::size_t n = source.size();
    const std::size_t keep = std::max<std::size_t>(
        3, static_cast<std::size_t>(std::floor((1.0 - kind.trim_fraction) * static_cast<double>(n))));

    KdTree3 index(model.points);
    RigidTransform current = RigidTransform::identity();
    RegistrationResult result;
    result.converged = false;

    struct Match {
        double d2;
        int src;
        int dst;
    };
    std::vector<Match> matches(n);
    std::vector<Vec3> kept_src, kept_dst;
    kept_src.reserve(keep);
    kept_dst.reserve(keep);

    int iter = 0;
    for (; iter < kind.max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 p = apply(current, source.points[i]);
            const auto [j, d2] = index.nearest(p);
            matches[i] = {d2, static_cast<int>(i), j};
        }
        std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
            if (a.d2 != b.d2) {
                return a.d2 < b.d2;
            }
            return a.src < b.src;
        });

        kept_src.clear();
        kept_dst.clear();
        for (std::size_t i = 0; i < std::min(keep, n); ++i) {
            kept_src.push_back(apply(current, source.points[static_cast<std::size_t>(matches[i].src)]));
            kept_dst.push_back(model.points[static_cast<std::size_t>(matches[i].dst)]);
        }

        const RigidTransform update = kabsch_alignment(kept_src, kept_dst);
        current = compose(update, current);
        const double rot = rotation_angle(update.r.m);
        // A near-pi update cannot be a converged step; skip the twist norm
        // there instead of tripping the logarithm's cut-locus guard.
        if (rot < std::numbers::pi - 1e-3 && log(update).vec().norm() < kind.tol) {
            result.converged = true;
            ++iter;
            break;
        }
    }

    result.h = current;
    result.iterations = iter;
    // Residual over the kept matches of a final matching pass.
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 p = apply(current, source.points[i]);
        const auto [j, d2] = index.nearest(p);
        matches[i] = {d2, static_cast<int>(i), j};
    }
    std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
        if (a.d2 != b.d2) {
            return a.d2 < b.d2;
        }
        return a.src < b.src;
    });
    double total = 0.0;
    const std::size_t kept_n = std::min(keep, n);
    for (std::size_t i = 0; i < kept_n; ++i) {
        total += std::sqrt(matches[i].d2);
    }
    result.residual = total / static_cast<double>(kept_n);
    return result;
}

RegistrationResult run_noisy_oracle(const SurrogateKind& kind, const PointCloud& source,
                                    const RegistrationHints& hints, Rng& rng) {
    if (hints.truth == nullptr) {
        throw MissingTruth("noisy oracle surrogate needs the true relative transform");
    }
    const RigidTransform& truth = *hints.truth;

    double rot_scale = kind.rot_sigma_rad;
    double trans_scale = kind.trans_sigma;
    if (kind.error_scales_with_misalignment) {
        const auto [angle, offset] = geodesic_distance(RigidTransform::identity(), truth);
        rot_scale *= angle;
        trans_scale *= offset;
    }

    RegistrationResult result;
    if (rot_scale == 0.0 && trans_scale == 0.0) {
        result.h = truth;
    } else {
        Twist noise;
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 8) {
                throw PerturbationResampleExceeded("oracle noise twist stayed near the cut locus");
            }
            noise = Twist{rot_scale * normal3(rng), trans_scale * normal3(rng)};
            if (noise.angle() < std::numbers::pi - 1e-3) {
                break;
            }
        }
        result.h = compose(truth, exp(noise));
    }
    result.iterations = 1;
    result.converged = true;
    double total = 0.0;
    for (const Vec3& p : source.points) {
        total += (apply(result.h, p) - apply(truth, p)).norm();
    }
    result.residual = total / static_cast<double>(source.size());
    return result;
}

}  // namespace

SurrogateKind SurrogateKind::kabsch() {
    SurrogateKind k;
    k.type = Type::kabsch_known_correspondence;
    return k;
}

SurrogateKind SurrogateKind::icp(int max_iters, double trim_fraction, double tol) {
    SurrogateKind k;
    k.type = Type::trimmed_icp;
    k.max_iters = max_iters;
    k.trim_fraction = trim_fraction;
    k.tol = tol;
    return k;
}

SurrogateKind SurrogateKind::oracle(double rot_sigma_rad, double trans_sigma, bool scaled) {
    SurrogateKind k;
    k.type = Type::noisy_oracle;
    k.rot_sigma_rad = rot_sigma_rad;
    k.trans_sigma = trans_sigma;
    k.error_scales_with_misalignment = scaled;
    return k;
}

void SurrogateKind::validate() const {
    if (max_iters < 1) {
        throw ConfigError("icp max_iters must be >= 1");
    }
    if (!(trim_fraction >= 0.0 && trim_fraction < 1.0)) {
        throw ConfigError("trim_fraction must be in [0, 1)");
    }
    if (rot_sigma_rad < 0.0 || trans_sigma < 0.0) {
        throw ConfigError("oracle sigmas must be >= 0");
    }
    if (!(tol > 0.0)) {
        throw ConfigError("icp tol must be > 0");
    }
}

std::string SurrogateKind::name() const {
    switch (type) {
        case Type::kabsch_known_correspondence:
            return "kabsch";
        case Type::trimmed_icp:
            return "icp";
        default:
            return "oracle";
    }
}

RigidTransform kabsch_alignment(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
    if (src.size() != dst.size() || src.empty()) {
        throw DegenerateGeometry("kabsch needs equally sized, nonempty point sets");
    }
    const double n = static_cast<double>(src.size());
    Vec3 src_centroid = Vec3::Zero();
    Vec3 dst_centroid = Vec3::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) {
        src_centroid += src[i];
        dst_centroid += dst[i];
    }
    src_centroid /= n;
    dst_centroid /= n;

    Mat3 cross = Mat3::Zero();
    double src_spread = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Vec3 s = src[i] - src_centroid;
        cross += (dst[i] - dst_centroid) * s.transpose();
        src_spread = std::max(src_spread, s.squaredNorm());
    }

    Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec3 sigma = svd.singularValues();
    // Collinear or coincident sources leave the rotation underdetermined.
    if (sigma(1) <= kDegenerateRatio * std::max(sigma(0), src_spread)) {
        throw DegenerateGeometry("source points are collinear or coincident");
    }

    Mat3 correction = Mat3::Identity();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
        correction(2, 2) = -1.0;
    }
    Rotation r;
    r.m = svd.matrixU() * correction * svd.matrixV().transpose();

    RigidTransform h;
    h.r = r;
    h.t = dst_centroid - r.m * src_centroid;
    return h;
}

RegistrationResult register_clouds(const SurrogateKind& kind, const PointCloud& source,
                                   const PointCloud& model, const RegistrationHints& hints,
                                   Rng& rng) {
    kind.validate();
    if (source.empty()) {
        throw EmptyCloud("source cloud is empty");
    }
    switch (kind.type) {
        case SurrogateKind::Type::kabsch_known_correspondence:
            return run_kabsch(source, model, hints);
        case SurrogateKind::Type::trimmed_icp:
            if (model.empty()) {
                throw EmptyCloud("model cloud is empty");
            }
            return run_trimmed_icp(kind, source, model);
        default:
            return run_noisy_oracle(kind, source, hints, rng);
    }
}

RegistrationResult single_shot_baseline(const SurrogateKind& kind, const RegistrationPair& pair,
                                        Rng& rng) {
    RegistrationHints hints;
    hints.truth = &pair.h0;
    if (pair.correspondences) {
        hints.correspondences = &*pair.correspondences;
    }
    return register_clouds(kind, pair.source, pair.model, hints, rng);
}

}  // namespace se3diffreg
