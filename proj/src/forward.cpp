#include "se3diffreg/forward.hpp"

#include <cmath>
#include <numbers>

#include "se3diffreg/errors.hpp"

namespace se3diffreg {

namespace {
constexpr double kCutLocusRedrawMargin = 1e-3;
constexpr int kMaxRedraws = 8;
}  // namespace

RigidTransform sample_perturbation(const DiffusionConfig& cfg, int t, Rng& rng) {
    if (t < 1 || t > cfg.schedule.T) {
        throw StepOutOfRange("step " + std::to_string(t) + " outside [1, " +
                             std::to_string(cfg.schedule.T) + "]");
    }
    const double spread = std::sqrt(cfg.schedule.one_minus_alpha_bar[t]);
    const double rot_scale = cfg.gamma_rot.value_or(cfg.gamma) * spread;
    const double trans_scale = cfg.gamma_trans.value_or(cfg.gamma) * spread;

    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        const Vec6 eps = normal6(rng);
        const Twist noise{rot_scale * eps.head<3>(), trans_scale * eps.tail<3>()};
        if (noise.angle() < std::numbers::pi - kCutLocusRedrawMargin) {
            return exp(noise, cfg.exp_map);
        }
    }
    throw PerturbationResampleExceeded(
        "perturbation twist stayed near the cut locus after " + std::to_string(kMaxRedraws) +
        " draws; gamma is too large");
}

RigidTransform diffuse(const DiffusionConfig& cfg, const RigidTransform& h0, int t, Rng& rng) {
    const RigidTransform perturbation = sample_perturbation(cfg, t, rng);
    const RigidTransform base =
        interpolate(std::sqrt(coefficients_at(cfg.schedule, t).alpha_bar), h0, cfg.exp_map);
    return cfg.perturb_right ? compose(base, perturbation) : compose(perturbation, base);
}

TrainingEpisode make_episode(const DiffusionConfig& cfg, const RegistrationPair& pair, Rng& rng) {
    TrainingEpisode episode;
    episode.t = uniform_int(rng, 1, cfg.schedule.T);
    episode.h_t = diffuse(cfg, pair.h0, episode.t, rng);
    episode.xt_cloud = apply(episode.h_t, pair.source);
    episode.model_cloud = pair.model;
    episode.target = compose(pair.h0, inverse(episode.h_t));
    return episode;
}

double training_loss(const TrainingEpisode& episode, const RigidTransform& predicted) {
    if (episode.xt_cloud.empty()) {
        throw EmptyCloud("training_loss needs a nonempty episode cloud");
    }
    double total = 0.0;
    for (const Vec3& p : episode.xt_cloud.points) {
        total += (apply(episode.target, p) - apply(predicted, p)).cwiseAbs().sum();
    }
    return total / static_cast<double>(episode.xt_cloud.size());
}

}  // namespace se3diffreg
