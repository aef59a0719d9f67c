// Independent reference implementations used to freeze expected values.
// Everything here deliberately avoids the library's own computation paths:
// long-double power series instead of closed-form Rodrigues/V formulas,
// ordinary least squares on a simulated scalar chain instead of the
// posterior coefficient formulas, plain double loops instead of Eigen.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "se3diffreg/lie.hpp"
#include "se3diffreg/rng.hpp"
#include "se3diffreg/schedule.hpp"

namespace oracles {

using Mat4L = std::array<std::array<long double, 4>, 4>;
using Mat3L = std::array<std::array<long double, 3>, 3>;

inline Mat4L mat4_identity() {
    Mat4L m{};
    for (int i = 0; i < 4; ++i) m[i][i] = 1.0L;
    return m;
}

inline Mat4L mat4_mul(const Mat4L& a, const Mat4L& b) {
    Mat4L c{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

inline Mat4L twist_matrix(const se3diffreg::Twist& xi) {
    Mat4L m{};
    m[0][1] = -xi.rho.z();
    m[0][2] = xi.rho.y();
    m[1][0] = xi.rho.z();
    m[1][2] = -xi.rho.x();
    m[2][0] = -xi.rho.y();
    m[2][1] = xi.rho.x();
    m[0][3] = xi.nu.x();
    m[1][3] = xi.nu.y();
    m[2][3] = xi.nu.z();
    return m;
}

/// exp of the 4x4 twist matrix by truncated power series in long double.
inline Mat4L expm_series(const se3diffreg::Twist& xi) {
    const Mat4L m = twist_matrix(xi);
    Mat4L result = mat4_identity();
    Mat4L term = mat4_identity();
    for (int k = 1; k <= 80; ++k) {
        term = mat4_mul(term, m);
        long double magnitude = 0.0L;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) term[i][j] /= k;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                result[i][j] += term[i][j];
                magnitude += std::fabs((double)term[i][j]);
            }
        if (magnitude < 1e-25L) break;
    }
    return result;
}

inline double max_abs_diff(const Mat4L& oracle, const se3diffreg::Mat4& actual) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            worst = std::max(worst, std::abs(static_cast<double>(oracle[i][j]) - actual(i, j)));
    return worst;
}

/// Recovers the rotation angle of a same-axis rotation by bisecting the
/// series exponential's trace against the target matrix, then the
/// translation twist by solving the series V matrix (Sum W^k/(k+1)!).
inline se3diffreg::Twist invert_exp_same_axis(const se3diffreg::Mat4& target,
                                              const se3diffreg::Vec3& axis) {
    long double lo = 0.0L, hi = 3.14159265358979323846L;
    const long double target_trace = target(0, 0) + target(1, 1) + target(2, 2);
    for (int iter = 0; iter < 200; ++iter) {
        const long double mid = 0.5L * (lo + hi);
        const se3diffreg::Twist probe{(double)mid * axis, se3diffreg::Vec3::Zero()};
        const Mat4L e = expm_series(probe);
        const long double trace = e[0][0] + e[1][1] + e[2][2];
        // trace = 1 + 2 cos(theta), decreasing on [0, pi]
        if (trace > target_trace) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double theta = static_cast<double>(0.5L * (lo + hi));
    const se3diffreg::Vec3 rho = theta * axis;

    // V = Sum_k W^k / (k+1)!
    Mat3L w{};
    w[0][1] = -rho.z();
    w[0][2] = rho.y();
    w[1][0] = rho.z();
    w[1][2] = -rho.x();
    w[2][0] = -rho.y();
    w[2][1] = rho.x();
    Mat3L v{};
    for (int i = 0; i < 3; ++i) v[i][i] = 1.0L;
    Mat3L power{};
    for (int i = 0; i < 3; ++i) power[i][i] = 1.0L;
    long double factorial = 1.0L;  // (k+1)! running
    for (int k = 1; k <= 60; ++k) {
        Mat3L next{};
        for (int i = 0; i < 3; ++i)
            for (int kk = 0; kk < 3; ++kk)
                for (int j = 0; j < 3; ++j) next[i][j] += power[i][kk] * w[kk][j];
        power = next;
        factorial *= (k + 1);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) v[i][j] += power[i][j] / factorial;
    }

    // Solve v * nu = t by Gaussian elimination with partial pivoting.
    long double a[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) a[i][j] = v[i][j];
        a[i][3] = target(i, 3);
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::fabs((double)a[row][col]) > std::fabs((double)a[pivot][col])) pivot = row;
        std::swap(a[col], a[pivot]);
        for (int row = col + 1; row < 3; ++row) {
            const long double f = a[row][col] / a[col][col];
            for (int j = col; j < 4; ++j) a[row][j] -= f * a[col][j];
        }
    }
    se3diffreg::Vec3 nu;
    for (int row = 2; row >= 0; --row) {
        long double acc = a[row][3];
        for (int j = row + 1; j < 3; ++j) acc -= a[row][j] * nu[j];
        nu[row] = static_cast<double>(acc / a[row][row]);
    }
    return {rho, nu};
}

/// Closed-form cosine alpha_bar in long double, including the 0.999 beta
/// clip; telescopes to f(t)/f(0) wherever the clip never engages.
inline long double cosine_alpha_bar(int t, int T) {
    const long double pi = 3.141592653589793238462643383279502884L;
    const long double offset = 0.008L;
    auto f = [&](long double step) {
        const long double x = ((step / T + offset) / (1.0L + offset)) * pi / 2.0L;
        const long double c = cosl(x);
        return c * c;
    };
    long double prev = f(0.0L);
    long double alpha_bar = 1.0L;
    for (int k = 1; k <= t; ++k) {
        const long double fk = f((long double)k);
        long double beta = 1.0L - fk / prev;
        if (beta > 0.999L) beta = 0.999L;
        alpha_bar *= (1.0L - beta);
        prev = fk;
    }
    return alpha_bar;
}

/// Empirical conditional distribution of x_{t-1} given (x0, x_t), estimated
/// by ordinary least squares over a simulated forward chain. Only the
/// forward quantities (alpha, beta, alpha_bar) drive the simulation; the
/// posterior formulas never enter. Since the true conditional is
/// linear-Gaussian, the intercept estimates lambda0 * x0, the slope lambda1
/// and the residual variance beta_tilde.
struct ChainRegression {
    double intercept = 0.0;
    double slope = 0.0;
    double resid_var = 0.0;
    double se_intercept = 0.0;
    double se_slope = 0.0;
    double se_resid_var = 0.0;
};

inline ChainRegression euclidean_chain_regression(const se3diffreg::Schedule& s, int t, double x0,
                                                  int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double mean_prev = std::sqrt(s.alpha_bar[t - 1]) * x0;
    const double sd_prev = std::sqrt(s.one_minus_alpha_bar[t - 1]);
    const double step_scale = std::sqrt(s.alpha[t]);
    const double step_sd = std::sqrt(s.beta[t]);

    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        const double x_prev = mean_prev + sd_prev * gauss(rng);
        const double x_t = step_scale * x_prev + step_sd * gauss(rng);
        ys[i] = x_prev;
        xs[i] = x_t;
    }

    double mean_x = 0.0, mean_y = 0.0;
    for (int i = 0; i < n; ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
        sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    }

    ChainRegression out;
    out.slope = sxy / sxx;
    out.intercept = mean_y - out.slope * mean_x;
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = ys[i] - out.intercept - out.slope * xs[i];
        rss += r * r;
    }
    out.resid_var = rss / (n - 2);
    out.se_slope = std::sqrt(out.resid_var / sxx);
    out.se_intercept = std::sqrt(out.resid_var * (1.0 / n + mean_x * mean_x / sxx));
    out.se_resid_var = out.resid_var * std::sqrt(2.0 / (n - 2));
    return out;
}

/// L1 training loss by plain double loops, no Eigen.
inline double naive_l1_loss(const std::vector<std::array<double, 3>>& points,
                            const double target[4][4], const double predicted[4][4]) {
    double total = 0.0;
    for (const auto& p : points) {
        for (int row = 0; row < 3; ++row) {
            double a = target[row][3];
            double b = predicted[row][3];
            for (int col = 0; col < 3; ++col) {
                a += target[row][col] * p[col];
                b += predicted[row][col] * p[col];
            }
            total += std::fabs(a - b);
        }
    }
    return total / static_cast<double>(points.size());
}

/// Minimal independent ASCII PLY vertex reader used to cross-check the
/// library parser on fixture files.
inline std::vector<std::array<double, 3>> reference_ply_vertices(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // "ply"
    long n_vertices = 0;
    std::vector<std::string> property_names;
    bool vertex_element = false;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string word;
        row >> word;
        if (word == "element") {
            std::string name;
            row >> name >> n_vertices;
            vertex_element = (name == "vertex");
        } else if (word == "property" && vertex_element) {
            std::string type, name;
            row >> type >> name;
            property_names.push_back(name);
        } else if (word == "end_header") {
            break;
        }
    }
    std::vector<std::array<double, 3>> out;
    for (long i = 0; i < n_vertices; ++i) {
        std::getline(in, line);
        std::istringstream row(line);
        std::array<double, 3> p{};
        double value;
        for (std::size_t j = 0; row >> value && j < property_names.size(); ++j) {
            if (property_names[j] == "x") p[0] = value;
            if (property_names[j] == "y") p[1] = value;
            if (property_names[j] == "z") p[2] = value;
        }
        out.push_back(p);
    }
    return out;
}

// Random element helpers shared by tests.

inline se3diffreg::Twist random_twist(se3diffreg::Rng& rng, double max_angle, double nu_scale) {
    const double angle = se3diffreg::uniform_real(rng, 0.0, max_angle);
    return {angle * se3diffreg::uniform_unit_vector(rng),
            nu_scale * se3diffreg::normal3(rng)};
}

inline se3diffreg::RigidTransform random_transform(se3diffreg::Rng& rng, double max_angle,
                                                   double trans_scale) {
    const double angle = se3diffreg::uniform_real(rng, 0.0, max_angle);
    se3diffreg::RigidTransform h =
        se3diffreg::exp({angle * se3diffreg::uniform_unit_vector(rng), se3diffreg::Vec3::Zero()});
    h.t = trans_scale * se3diffreg::normal3(rng);
    return h;
}

inline se3diffreg::RigidTransform z_rotation(double angle) {
    return se3diffreg::exp(
        {se3diffreg::Vec3(0.0, 0.0, angle), se3diffreg::Vec3::Zero()});
}

}  // namespace oracles
