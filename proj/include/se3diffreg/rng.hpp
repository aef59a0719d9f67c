#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

#include "se3diffreg/types.hpp"

namespace se3diffreg {

using Rng = std::mt19937_64;

std::uint64_t fnv1a64(std::string_view s);

/// Mixes an arbitrary list of seed words into one stream seed, so that
/// (seed, pair_id, repeat, ...) tuples yield independent substreams.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

double normal(Rng& rng);
Vec3 normal3(Rng& rng);
Vec6 normal6(Rng& rng);

double uniform_real(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);  // inclusive bounds

Vec3 uniform_unit_vector(Rng& rng);
Vec3 uniform_in_ball(Rng& rng, double radius);

}  // namespace se3diffreg
