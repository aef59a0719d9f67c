#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "se3diffreg/metrics.hpp"
#include "se3diffreg/reverse.hpp"
#include "se3diffreg/schedule.hpp"
#include "se3diffreg/surrogate.hpp"

namespace se3diffreg {

enum class BenchMethod { single_shot, diffusion_reverse };

BenchMethod bench_method_from_string(const std::string& s);
const char* to_string(BenchMethod method);

struct BenchConfig {
    std::string dataset_dir;
    SurrogateKind surrogate = SurrogateKind::icp();
    ScheduleKind schedule_kind = ScheduleKind::cosine;
    int train_steps = 200;
    double gamma = 0.1;
    int infer_steps = 5;
    InferenceMode mode = InferenceMode::deterministic;
    std::uint64_t seed = 0;
    int repeats = 1;
    std::vector<BenchMethod> methods{BenchMethod::single_shot, BenchMethod::diffusion_reverse};
    int jobs = 0;  // 0 = available parallelism
    ExpMap exp_map = ExpMap::coupled;
    std::vector<double> thresholds_rot_deg = default_rot_thresholds_deg();
    std::vector<double> thresholds_trans = default_trans_thresholds();
    std::string rows_out;
    std::string map_out;
    std::string timing_out;
};

struct BenchRow {
    std::string pair_id;
    std::string method;
    double re_deg = 0.0;
    double te = 0.0;
    int steps_used = 0;
    double wall_ms = 0.0;
    bool converged = false;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::map<std::string, MapReport> map_by_method;
};

/// Runs every configured method over every pair in the dataset, repeats
/// times each, on a bounded worker pool. Per-pair registration failures are
/// recorded as converged = false rows and the run continues; configuration
/// problems abort with ConfigError before any work. Output row order is
/// (pair index, method, repeat) regardless of scheduling, and every RNG
/// stream derives from (seed, pair_id, method, repeat), so results are
/// deterministic for a fixed config.
BenchResult run_bench(const BenchConfig& cfg);

/// Deterministic result columns only; wall-clock times go to
/// write_timing_csv so that equal-seed runs serialize byte-identically.
void write_rows_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_map_csv(std::ostream& out, const std::map<std::string, MapReport>& reports);
void write_timing_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void print_map_table(std::ostream& out, const std::map<std::string, MapReport>& reports);

}  // namespace se3diffreg
