#pragma once

#include <cstdint>
#include <optional>

#include "se3diffreg/data_synth.hpp"
#include "se3diffreg/lie.hpp"
#include "se3diffreg/rng.hpp"
#include "se3diffreg/schedule.hpp"

namespace se3diffreg {

/// Forward-process configuration. gamma scales the 6D tangent noise; the
/// optional per-block overrides expose rotation/translation scale asymmetry
/// (both default to the single gamma). perturb_right flips the perturbation
/// onto the right of the interpolated transform for ablation; the default is
/// left composition.
struct DiffusionConfig {
    Schedule schedule;
    double gamma = 0.1;
    std::optional<double> gamma_rot;
    std::optional<double> gamma_trans;
    std::uint64_t seed = 0;
    ExpMap exp_map = ExpMap::coupled;
    bool perturb_right = false;
};

struct TrainingEpisode {
    int t = 0;
    PointCloud xt_cloud;
    PointCloud model_cloud;
    RigidTransform h_t;
    /// Relative transform the surrogate should predict: compose(h0, inverse(h_t)).
    RigidTransform target;
};

/// exp(gamma * sqrt(1 - alpha_bar_t) * eps) with eps ~ N(0, I_6). Re-draws
/// (at most 8 times) whenever the scaled twist lands within 1e-3 of the
/// rotation cut locus; throws PerturbationResampleExceeded after that.
RigidTransform sample_perturbation(const DiffusionConfig& cfg, int t, Rng& rng);

/// One marginal forward sample: the perturbation composed onto
/// interpolate(sqrt(alpha_bar_t), h0).
RigidTransform diffuse(const DiffusionConfig& cfg, const RigidTransform& h0, int t, Rng& rng);

/// Draws t uniform in [1, T], diffuses the pair's ground truth and packages
/// the transformed source with its prediction target.
TrainingEpisode make_episode(const DiffusionConfig& cfg, const RegistrationPair& pair, Rng& rng);

/// Mean over the episode's source points of the L1 distance between the
/// target-transformed and prediction-transformed homogeneous points. Throws
/// EmptyCloud on an empty episode cloud.
double training_loss(const TrainingEpisode& episode, const RigidTransform& predicted);

}  // namespace se3diffreg
