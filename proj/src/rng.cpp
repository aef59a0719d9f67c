#include "se3diffreg/rng.hpp"

#include <cmath>

namespace se3diffreg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::uint64_t w : words) {
        h = splitmix64(h ^ w);
    }
    return h;
}

double normal(Rng& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

Vec3 normal3(Rng& rng) { return Vec3(normal(rng), normal(rng), normal(rng)); }

Vec6 normal6(Rng& rng) {
    Vec6 v;
    for (int i = 0; i < 6; ++i) {
        v[i] = normal(rng);
    }
    return v;
}

double uniform_real(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
    std::uniform_int_distribution<int> dist(lo, hi);
    return dist(rng);
}

Vec3 uniform_unit_vector(Rng& rng) {
    for (;;) {
        const Vec3 v = normal3(rng);
        const double n = v.norm();
        if (n > 1e-12) {
            return v / n;
        }
    }
}

Vec3 uniform_in_ball(Rng& rng, double radius) {
    if (radius <= 0.0) {
        return Vec3::Zero();
    }
    for (;;) {
        const Vec3 v(uniform_real(rng, -radius, radius), uniform_real(rng, -radius, radius),
                     uniform_real(rng, -radius, radius));
        if (v.squaredNorm() <= radius * radius) {
            return v;
        }
    }
}

}  // namespace se3diffreg
