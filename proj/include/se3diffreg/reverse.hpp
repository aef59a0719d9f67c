#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "se3diffreg/errors.hpp"
#include "se3diffreg/lie.hpp"
#include "se3diffreg/rng.hpp"
#include "se3diffreg/schedule.hpp"
#include "se3diffreg/surrogate.hpp"

namespace se3diffreg {

enum class InferenceMode { deterministic, random };

InferenceMode inference_mode_from_string(const std::string& s);
const char* to_string(InferenceMode mode);

struct ReverseConfig {
    Schedule schedule;  // possibly respaced
    InferenceMode mode = InferenceMode::deterministic;
    SurrogateKind surrogate;
    bool record_trajectory = true;
    std::uint64_t seed = 0;
    ExpMap exp_map = ExpMap::coupled;
};

/// One recorded reverse step: the step index within the (possibly respaced)
/// schedule, the original step it maps to, the transform produced by the
/// step, the surrogate's relative estimate, and errors against the ground
/// truth when one was supplied (NaN otherwise). Steps are ordered by
/// decreasing t; the last entry is the t = 1 output, i.e. the H0 estimate.
struct TrajectoryStep {
    int t = 0;
    int source_t = 0;
    RigidTransform h;
    RigidTransform h_hat_t_to_0;
    double re_to_truth = 0.0;
    double te_to_truth = 0.0;
    double residual = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
};

/// A reverse step hit the logarithm cut locus; carries whatever trajectory
/// had accumulated before the failure.
class StepFailure : public Error {
public:
    StepFailure(const std::string& what, Trajectory partial, int step)
        : Error(what), partial_(std::move(partial)), step_(step) {}
    const Trajectory& partial() const { return partial_; }
    int step() const { return step_; }

private:
    Trajectory partial_;
    int step_;
};

/// Sample of the posterior over the previous-step transform given the clean
/// and current transforms: exp(lambda0 Log(h0) + lambda1 Log(ht) [+ noise]).
/// Requires t >= 2. Throws NearCutLocus via log.
RigidTransform posterior_sample(const Schedule& sched, int t, const RigidTransform& h0,
                                const RigidTransform& ht, Rng& rng, bool noisy,
                                ExpMap map = ExpMap::coupled);

/// Prior mean rebuilt from a surrogate's relative estimate:
/// exp(lambda0 Log(h_hat * ht) + lambda1 Log(ht)). With a perfect relative
/// estimate h_hat = h0 * ht^-1 this collapses to the posterior mean.
RigidTransform prior_mean(const Schedule& sched, int t, const RigidTransform& h_hat,
                          const RigidTransform& ht, ExpMap map = ExpMap::coupled);

/// Registers the ht-transformed source against the model and combines the
/// estimate with ht through the prior mean; adds posterior noise inside the
/// exp in random mode for t >= 2 (never at t = 1). truth is required by the
/// noisy-oracle surrogate and is otherwise optional.
std::pair<RigidTransform, RegistrationResult> reverse_step(
    const ReverseConfig& cfg, int t, const RigidTransform& ht, const PointCloud& source,
    const PointCloud& model, const RigidTransform* truth, const std::vector<int>* correspondences,
    Rng& rng);

struct InferenceResult {
    RigidTransform h0_estimate;
    Trajectory trajectory;
};

/// Full reverse rollout: starts from the exact identity and applies
/// reverse_step for t = K..1. On a cut-locus failure at any step, throws
/// StepFailure carrying the partial trajectory.
InferenceResult run_inference(const ReverseConfig& cfg, const PointCloud& source,
                              const PointCloud& model, const RigidTransform* truth,
                              const std::vector<int>* correspondences, Rng& rng);

}  // namespace se3diffreg
