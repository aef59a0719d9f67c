#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "se3diffreg/lie.hpp"
#include "se3diffreg/rng.hpp"
#include "se3diffreg/types.hpp"

namespace se3diffreg {

enum class ShapeKind { sphere, box, torus, composite };

ShapeKind shape_kind_from_string(const std::string& s);
const char* to_string(ShapeKind kind);

/// Recipe for one synthetic registration pair. The analytic shapes stand in
/// for sampled mesh models; view culling by a random half-space approximates
/// a single-view partial scan.
struct GenSpec {
    ShapeKind shape = ShapeKind::torus;
    int n_source = 512;
    int n_model = 1024;
    double max_rot = 2.0;            // radians
    double max_trans = 0.3;          // length units
    double partial_fraction = 0.7;   // (0, 1]
    double noise_sigma = 0.005;      // length units
    int occlusion_patches = 1;
    std::uint64_t seed = 0;
};

/// One benchmark unit: a partial source scan, the full model cloud, the
/// ground-truth transform aligning source onto model, and (for synthetic
/// pairs) the source -> model correspondence indices.
struct RegistrationPair {
    std::string id;
    PointCloud source;
    PointCloud model;
    RigidTransform h0;
    std::optional<std::vector<int>> correspondences;
};

/// Uniform surface samples of the given analytic shape, exposed for tests.
PointCloud sample_shape(ShapeKind kind, int n, Rng& rng);

/// Samples a model cloud, culls it to a random view half-space keeping
/// partial_fraction of the points, punches out occlusion patches, adds
/// isotropic noise, subsamples to n_source and moves the result into the
/// source frame with a freshly drawn h0. Throws InsufficientPoints when
/// culling leaves fewer than n_source points.
RegistrationPair generate_pair(const GenSpec& spec, Rng& rng);

/// XYZ (three whitespace-separated floats per line) or ASCII PLY, chosen by
/// file extension. PLY vertices may carry extra properties; only x, y, z are
/// read. Throws ParseError (with line number), UnsupportedFormat,
/// MissingFile.
PointCloud load_cloud(const std::string& path);
void save_cloud(const PointCloud& cloud, const std::string& path);

/// Pair manifests are JSON documents {id, source_path, model_path,
/// h0: 16 row-major numbers, correspondences?}; cloud paths resolve relative
/// to the manifest location. save_pair writes the two cloud files next to
/// the manifest.
RegistrationPair load_pair(const std::string& path);
void save_pair(const RegistrationPair& pair, const std::string& path);

}  // namespace se3diffreg
