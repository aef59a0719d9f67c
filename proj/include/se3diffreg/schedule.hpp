#pragma once

#include <string>
#include <vector>

#include "se3diffreg/errors.hpp"

namespace se3diffreg {

enum class ScheduleKind { linear, cosine };

ScheduleKind schedule_kind_from_string(const std::string& s);
const char* to_string(ScheduleKind kind);

/// Noise schedule plus every derived coefficient the forward and reverse
/// processes need. Arrays are sized T+1 and indexed directly by step t in
/// [1, T]; index 0 carries the t = 0 conventions (alpha_bar[0] = 1, the rest
/// zero) so that the t = 1 posterior coefficients are defined.
///
/// one_minus_alpha_bar is maintained as its own running sum,
///   one_minus_alpha_bar[t] = one_minus_alpha_bar[t-1] + alpha_bar[t-1] * beta[t],
/// which avoids cancellation for alpha_bar near 1 and makes lambda0(1) == 1
/// and lambda1(1) == 0 hold exactly.
struct Schedule {
    ScheduleKind kind = ScheduleKind::cosine;
    int T = 0;
    std::vector<double> beta;
    std::vector<double> alpha;
    std::vector<double> alpha_bar;
    std::vector<double> one_minus_alpha_bar;
    std::vector<double> beta_tilde;
    std::vector<double> lambda0;
    std::vector<double> lambda1;
    /// Original step index behind each entry; identity for fresh schedules,
    /// the selected subsequence after respacing.
    std::vector<int> source_step;
};

struct Coefficients {
    double beta;
    double alpha_bar;
    double beta_tilde;
    double lambda0;
    double lambda1;
};

/// Builds a schedule. Linear interpolates beta from 1e-4 to 0.02 over T
/// steps; cosine uses alpha_bar(t) = f(t)/f(0) with
/// f(t) = cos^2(((t/T + 0.008) / 1.008) * pi/2) and per-step beta clipped to
/// <= 0.999. Throws InvalidStepCount for T < 1.
Schedule make_schedule(ScheduleKind kind, int T);

/// Derives the remaining arrays from beta[1..T]; shared by make_schedule and
/// respace, and usable by tests building custom schedules.
Schedule schedule_from_betas(ScheduleKind kind, std::vector<double> beta_1_to_T);

/// Throws StepOutOfRange unless 1 <= t <= T.
Coefficients coefficients_at(const Schedule& s, int t);

/// DDIM-style subsetting: picks K indices uniformly spaced over [1, T]
/// (always including T), keeps their alpha_bar values and recomputes the
/// per-step coefficients on the subsequence. respace(s, T) returns s
/// unchanged. Throws InvalidStepCount unless 1 <= K <= T.
Schedule respace(const Schedule& s, int K);

}  // namespace se3diffreg
