#include "se3diffreg/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace se3diffreg {

namespace {

constexpr double kLinearBetaStart = 1e-4;
constexpr double kLinearBetaEnd = 0.02;
constexpr double kCosineOffset = 0.008;
constexpr double kBetaClip = 0.999;

double cosine_f(double t, double T) {
    const double x = ((t / T + kCosineOffset) / (1.0 + kCosineOffset)) * std::numbers::pi / 2.0;
    const double c = std::cos(x);
    return c * c;
}

void fill_derived(Schedule& s) {
    const int T = s.T;
    s.alpha.assign(T + 1, 1.0);
    s.alpha_bar.assign(T + 1, 1.0);
    s.one_minus_alpha_bar.assign(T + 1, 0.0);
    s.beta_tilde.assign(T + 1, 0.0);
    s.lambda0.assign(T + 1, 0.0);
    s.lambda1.assign(T + 1, 0.0);
    for (int t = 1; t <= T; ++t) {
        const double beta = s.beta[t];
        if (!(beta > 0.0 && beta < 1.0)) {
            throw Error("beta[" + std::to_string(t) + "] = " + std::to_string(beta) +
                        " outside (0,1)");
        }
        s.alpha[t] = 1.0 - beta;
        s.alpha_bar[t] = s.alpha_bar[t - 1] * s.alpha[t];
        s.one_minus_alpha_bar[t] = s.one_minus_alpha_bar[t - 1] + s.alpha_bar[t - 1] * beta;
        if (s.alpha_bar[t] >= s.alpha_bar[t - 1]) {
            throw Error("alpha_bar not strictly decreasing at t = " + std::to_string(t));
        }
        s.beta_tilde[t] = s.one_minus_alpha_bar[t - 1] / s.one_minus_alpha_bar[t] * beta;
        s.lambda0[t] = std::sqrt(s.alpha_bar[t - 1]) * beta / s.one_minus_alpha_bar[t];
        s.lambda1[t] =
            std::sqrt(s.alpha[t]) * s.one_minus_alpha_bar[t - 1] / s.one_minus_alpha_bar[t];
    }
}

}  // namespace

ScheduleKind schedule_kind_from_string(const std::string& s) {
    if (s == "linear") {
        return ScheduleKind::linear;
    }
    if (s == "cosine") {
        return ScheduleKind::cosine;
    }
    throw ConfigError("unknown schedule kind '" + s + "' (expected linear or cosine)");
}

const char* to_string(ScheduleKind kind) {
    return kind == ScheduleKind::linear ? "linear" : "cosine";
}

Schedule schedule_from_betas(ScheduleKind kind, std::vector<double> beta_1_to_T) {
    Schedule s;
    s.kind = kind;
    s.T = static_cast<int>(beta_1_to_T.size());
    if (s.T < 1) {
        throw InvalidStepCount("schedule needs at least one step");
    }
    s.beta.assign(s.T + 1, 0.0);
    std::copy(beta_1_to_T.begin(), beta_1_to_T.end(), s.beta.begin() + 1);
    s.source_step.resize(s.T + 1);
    for (int t = 0; t <= s.T; ++t) {
        s.source_step[t] = t;
    }
    fill_derived(s);
    return s;
}

Schedule make_schedule(ScheduleKind kind, int T) {
    if (T < 1) {
        throw InvalidStepCount("step count T must be >= 1, got " + std::to_string(T));
    }
    std::vector<double> beta(T);
    if (kind == ScheduleKind::linear) {
        for (int t = 1; t <= T; ++t) {
            const double frac = T > 1 ? static_cast<double>(t - 1) / (T - 1) : 0.0;
            beta[t - 1] = kLinearBetaStart + (kLinearBetaEnd - kLinearBetaStart) * frac;
        }
    } else {
        const double f0 = cosine_f(0.0, T);
        double prev = f0;
        for (int t = 1; t <= T; ++t) {
            const double ft = cosine_f(t, T);
            beta[t - 1] = std::min(1.0 - ft / prev, kBetaClip);
            prev = ft;
        }
    }
    return schedule_from_betas(kind, std::move(beta));
}

Coefficients coefficients_at(const Schedule& s, int t) {
    if (t < 1 || t > s.T) {
        throw StepOutOfRange("step " + std::to_string(t) + " outside [1, " + std::to_string(s.T) +
                             "]");
    }
    return {s.beta[t], s.alpha_bar[t], s.beta_tilde[t], s.lambda0[t], s.lambda1[t]};
}

Schedule respace(const Schedule& s, int K) {
    if (K < 1 || K > s.T) {
        throw InvalidStepCount("inference step count " + std::to_string(K) + " outside [1, " +
                               std::to_string(s.T) + "]");
    }
    if (K == s.T) {
        return s;
    }
    Schedule out;
    out.kind = s.kind;
    out.T = K;
    out.beta.assign(K + 1, 0.0);
    out.alpha.assign(K + 1, 1.0);
    out.alpha_bar.assign(K + 1, 1.0);
    out.one_minus_alpha_bar.assign(K + 1, 0.0);
    out.beta_tilde.assign(K + 1, 0.0);
    out.lambda0.assign(K + 1, 0.0);
    out.lambda1.assign(K + 1, 0.0);
    out.source_step.assign(K + 1, 0);
    for (int k = 1; k <= K; ++k) {
        const int tk = static_cast<int>(
            std::llround(static_cast<double>(k) * static_cast<double>(s.T) / K));
        out.source_step[k] = s.source_step[tk];
        out.alpha_bar[k] = s.alpha_bar[tk];
        out.alpha[k] = out.alpha_bar[k] / out.alpha_bar[k - 1];
        out.beta[k] = 1.0 - out.alpha[k];
        out.one_minus_alpha_bar[k] =
            out.one_minus_alpha_bar[k - 1] + out.alpha_bar[k - 1] * out.beta[k];
        out.beta_tilde[k] =
            out.one_minus_alpha_bar[k - 1] / out.one_minus_alpha_bar[k] * out.beta[k];
        out.lambda0[k] = std::sqrt(out.alpha_bar[k - 1]) * out.beta[k] / out.one_minus_alpha_bar[k];
        out.lambda1[k] = std::sqrt(out.alpha[k]) * out.one_minus_alpha_bar[k - 1] /
                         out.one_minus_alpha_bar[k];
    }
    return out;
}

}  // namespace se3diffreg
