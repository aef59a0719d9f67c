#pragma once

#include <string>
#include <vector>

#include "se3diffreg/data_synth.hpp"
#include "se3diffreg/lie.hpp"
#include "se3diffreg/rng.hpp"

namespace se3diffreg {

/// Registration model slotted into the reverse process. kabsch needs
/// correspondence indices from the pair metadata; noisy_oracle needs the true
/// relative transform and perturbs it, with errors optionally proportional to
/// the current misalignment (the property that makes iterative denoising pay
/// off, since deep surrogates are out of scope here).
struct SurrogateKind {
    enum class Type { kabsch_known_correspondence, trimmed_icp, noisy_oracle };

    Type type = Type::trimmed_icp;

    // trimmed_icp
    int max_iters = 30;
    double trim_fraction = 0.25;
    double tol = 1e-6;

    // noisy_oracle
    double rot_sigma_rad = 0.0;
    double trans_sigma = 0.0;
    bool error_scales_with_misalignment = false;

    static SurrogateKind kabsch();
    static SurrogateKind icp(int max_iters = 30, double trim_fraction = 0.25, double tol = 1e-6);
    static SurrogateKind oracle(double rot_sigma_rad, double trans_sigma, bool scaled);

    /// Throws ConfigError on out-of-range fields.
    void validate() const;
    std::string name() const;
};

struct RegistrationResult {
    RigidTransform h;        // estimated relative transform, source -> model frame
    double residual = 0.0;   // mean point distance after alignment
    int iterations = 0;
    bool converged = false;
};

struct RegistrationHints {
    const RigidTransform* truth = nullptr;
    const std::vector<int>* correspondences = nullptr;
};

/// Least-squares rigid alignment of paired points via cross-covariance SVD
/// with reflection correction. Throws DegenerateGeometry when the points are
/// collinear or coincident.
RigidTransform kabsch_alignment(const std::vector<Vec3>& src, const std::vector<Vec3>& dst);

RegistrationResult register_clouds(const SurrogateKind& kind, const PointCloud& source,
                                   const PointCloud& model, const RegistrationHints& hints,
                                   Rng& rng);

/// One direct registration of the pair's raw source against its model, with
/// no diffusion machinery. The ablation baseline.
RegistrationResult single_shot_baseline(const SurrogateKind& kind, const RegistrationPair& pair,
                                        Rng& rng);

}  // namespace se3diffreg
