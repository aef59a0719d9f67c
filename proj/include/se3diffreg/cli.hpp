#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "se3diffreg/bench.hpp"
#include "se3diffreg/data_synth.hpp"
#include "se3diffreg/forward.hpp"
#include "se3diffreg/reverse.hpp"

namespace se3diffreg {

enum class Command { none, gen, schedule, diffuse, register_pair, bench };

struct GenOptions {
    GenSpec spec;
    int n_pairs = 1;
    std::string out_dir;
};

struct ScheduleOptions {
    ScheduleKind kind = ScheduleKind::cosine;
    int steps = 200;
    std::string out;
};

struct DiffuseOptions {
    std::string pair_path;
    double gamma = 0.1;
    int steps = 200;
    ScheduleKind kind = ScheduleKind::cosine;
    std::uint64_t seed = 0;
    std::string out;
    bool decoupled_exp = false;
    bool perturb_right = false;
};

struct RegisterOptions {
    std::string source_path;
    std::string model_path;
    SurrogateKind surrogate = SurrogateKind::icp();
    int infer_steps = 5;
    int train_steps = 200;
    ScheduleKind kind = ScheduleKind::cosine;
    InferenceMode mode = InferenceMode::deterministic;
    std::uint64_t seed = 0;
    std::string truth_path;
    std::string trace_path;
    bool decoupled_exp = false;
};

/// Parsed command line. When help or version text was requested, exit_now
/// holds the process exit code and message the text to print; otherwise
/// exit_now is -1 and exactly one command is populated.
struct ParsedArgs {
    Command command = Command::none;
    GenOptions gen;
    ScheduleOptions schedule;
    DiffuseOptions diffuse;
    RegisterOptions register_pair;
    BenchConfig bench;
    int exit_now = -1;
    std::string message;
};

/// Parses without executing. Throws UsageError on unknown flags or missing
/// required options. The default seed may be overridden through the
/// SE3DIFFREG_SEED environment variable; explicit --seed wins.
ParsedArgs parse_args(const std::vector<std::string>& args);

/// Parses and dispatches. Exit codes: 0 success, 1 runtime failure, 2 usage
/// error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace se3diffreg
