#include "se3diffreg/reverse.hpp"

#include <cmath>
#include <limits>

#include "se3diffreg/metrics.hpp"

namespace se3diffreg {

InferenceMode inference_mode_from_string(const std::string& s) {
    if (s == "deterministic") {
        return InferenceMode::deterministic;
    }
    if (s == "random") {
        return InferenceMode::random;
    }
    throw ConfigError("unknown inference mode '" + s + "' (expected deterministic or random)");
}

const char* to_string(InferenceMode mode) {
    return mode == InferenceMode::deterministic ? "deterministic" : "random";
}

RigidTransform posterior_sample(const Schedule& sched, int t, const RigidTransform& h0,
                                const RigidTransform& ht, Rng& rng, bool noisy, ExpMap map) {
    if (t < 2) {
        throw StepOutOfRange("posterior_sample needs t >= 2, got " + std::to_string(t));
    }
    const Coefficients c = coefficients_at(sched, t);
    Twist xi = c.lambda0 * log(h0, map) + c.lambda1 * log(ht, map);
    if (noisy) {
        xi = xi + Twist::from_vec(std::sqrt(c.beta_tilde) * normal6(rng));
    }
    return exp(xi, map);
}

RigidTransform prior_mean(const Schedule& sched, int t, const RigidTransform& h_hat,
                          const RigidTransform& ht, ExpMap map) {
    const Coefficients c = coefficients_at(sched, t);
    const Twist xi = c.lambda0 * log(compose(h_hat, ht), map) + c.lambda1 * log(ht, map);
    return exp(xi, map);
}

std::pair<RigidTransform, RegistrationResult> reverse_step(
    const ReverseConfig& cfg, int t, const RigidTransform& ht, const PointCloud& source,
    const PointCloud& model, const RigidTransform* truth, const std::vector<int>* correspondences,
    Rng& rng) {
    const Coefficients c = coefficients_at(cfg.schedule, t);
    const PointCloud xt = apply(ht, source);

    RegistrationHints hints;
    hints.correspondences = correspondences;
    RigidTransform truth_rel;
    if (truth != nullptr) {
        truth_rel = compose(*truth, inverse(ht));
        hints.truth = &truth_rel;
    }
    const RegistrationResult result = register_clouds(cfg.surrogate, xt, model, hints, rng);

    Twist xi = c.lambda0 * log(compose(result.h, ht), cfg.exp_map) +
               c.lambda1 * log(ht, cfg.exp_map);
    if (cfg.mode == InferenceMode::random && t >= 2) {
        xi = xi + Twist::from_vec(std::sqrt(c.beta_tilde) * normal6(rng));
    }
    return {exp(xi, cfg.exp_map), result};
}

InferenceResult run_inference(const ReverseConfig& cfg, const PointCloud& source,
                              const PointCloud& model, const RigidTransform* truth,
                              const std::vector<int>* correspondences, Rng& rng) {
    if (source.empty() || model.empty()) {
        throw EmptyCloud("inference needs nonempty source and model clouds");
    }
    InferenceResult out;
    RigidTransform h = RigidTransform::identity();
    for (int t = cfg.schedule.T; t >= 1; --t) {
        RegistrationResult reg;
        try {
            auto [h_next, result] = reverse_step(cfg, t, h, source, model, truth,
                                                 correspondences, rng);
            h = h_next;
            reg = result;
        } catch (const NearCutLocus& e) {
            throw StepFailure(std::string("reverse step ") + std::to_string(t) +
                                  " hit the cut locus: " + e.what(),
                              std::move(out.trajectory), t);
        }
        if (cfg.record_trajectory) {
            TrajectoryStep step;
            step.t = t;
            step.source_t = cfg.schedule.source_step[t];
            step.h = h;
            step.h_hat_t_to_0 = reg.h;
            step.residual = reg.residual;
            if (truth != nullptr) {
                const PoseError err = pose_error(h, *truth);
                step.re_to_truth = err.re;
                step.te_to_truth = err.te;
            } else {
                step.re_to_truth = std::numeric_limits<double>::quiet_NaN();
                step.te_to_truth = std::numeric_limits<double>::quiet_NaN();
            }
            out.trajectory.steps.push_back(step);
        }
    }
    out.h0_estimate = h;
    return out;
}

}  // namespace se3diffreg
