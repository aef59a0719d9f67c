#include "se3diffreg/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "se3diffreg/errors.hpp"

namespace se3diffreg {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "se3diffreg 0.1.0";

struct SurrogateFlags {
    std::string kind = "icp";
    int icp_iters = 30;
    double trim = 0.25;
    double icp_tol = 1e-6;
    double oracle_rot_sigma = 0.0;
    double oracle_trans_sigma = 0.0;
    bool oracle_scaled = false;

    SurrogateKind build() const {
        if (kind == "kabsch") {
            return SurrogateKind::kabsch();
        }
        if (kind == "icp") {
            return SurrogateKind::icp(icp_iters, trim, icp_tol);
        }
        if (kind == "oracle") {
            return SurrogateKind::oracle(oracle_rot_sigma, oracle_trans_sigma, oracle_scaled);
        }
        throw UsageError("unknown surrogate '" + kind + "'");
    }
};

void add_surrogate_flags(CLI::App* cmd, SurrogateFlags& flags) {
    cmd->add_option("--surrogate", flags.kind, "Registration surrogate: kabsch, icp or oracle")
        ->check(CLI::IsMember({"kabsch", "icp", "oracle"}))
        ->capture_default_str();
    cmd->add_option("--icp-iters", flags.icp_iters, "Trimmed-ICP iteration cap")
        ->capture_default_str();
    cmd->add_option("--trim", flags.trim, "Trimmed-ICP trim fraction in [0,1)")
        ->capture_default_str();
    cmd->add_option("--icp-tol", flags.icp_tol, "Trimmed-ICP twist-norm stop tolerance")
        ->capture_default_str();
    cmd->add_option("--oracle-rot-sigma", flags.oracle_rot_sigma,
                    "Oracle rotation noise (radians, or fraction with --oracle-scaled)")
        ->capture_default_str();
    cmd->add_option("--oracle-trans-sigma", flags.oracle_trans_sigma,
                    "Oracle translation noise (length, or fraction with --oracle-scaled)")
        ->capture_default_str();
    cmd->add_flag("--oracle-scaled", flags.oracle_scaled,
                  "Scale oracle noise with the current misalignment");
}

std::string format_sig(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

void cmd_gen(const GenOptions& opts, std::ostream& out) {
    fs::create_directories(opts.out_dir);
    std::ofstream index(fs::path(opts.out_dir) / "index.txt");
    if (!index) {
        throw MissingFile("cannot write index in '" + opts.out_dir + "'");
    }
    for (int k = 0; k < opts.n_pairs; ++k) {
        GenSpec spec = opts.spec;
        spec.seed = opts.spec.seed + static_cast<std::uint64_t>(k);
        Rng rng = make_rng(spec.seed);
        const RegistrationPair pair = generate_pair(spec, rng);
        save_pair(pair, (fs::path(opts.out_dir) / (pair.id + ".json")).string());
        index << pair.id << '\n';
    }
    out << "wrote " << opts.n_pairs << " pairs to " << opts.out_dir << "\n";
}

void cmd_schedule(const ScheduleOptions& opts, std::ostream& out) {
    const Schedule s = make_schedule(opts.kind, opts.steps);
    std::ofstream file(opts.out);
    if (!file) {
        throw MissingFile("cannot open '" + opts.out + "' for writing");
    }
    file << "t,β_t,ᾱ_t,β̃_t,λ₀,λ₁\n";
    for (int t = 1; t <= s.T; ++t) {
        file << t << ',' << format_sig(s.beta[t], 9) << ',' << format_sig(s.alpha_bar[t], 9)
             << ',' << format_sig(s.beta_tilde[t], 9) << ',' << format_sig(s.lambda0[t], 9) << ','
             << format_sig(s.lambda1[t], 9) << '\n';
    }
    out << "wrote " << s.T << " steps to " << opts.out << "\n";
}

void cmd_diffuse(const DiffuseOptions& opts, std::ostream& out) {
    const RegistrationPair pair = load_pair(opts.pair_path);
    DiffusionConfig cfg;
    cfg.schedule = make_schedule(opts.kind, opts.steps);
    cfg.gamma = opts.gamma;
    cfg.seed = opts.seed;
    cfg.exp_map = opts.decoupled_exp ? ExpMap::decoupled : ExpMap::coupled;
    cfg.perturb_right = opts.perturb_right;

    std::ofstream file(opts.out);
    if (!file) {
        throw MissingFile("cannot open '" + opts.out + "' for writing");
    }
    file << "t,rot_angle,trans_norm,h00,h01,h02,h03,h10,h11,h12,h13,h20,h21,h22,h23\n";
    Rng rng = make_rng(opts.seed);
    const RigidTransform identity = RigidTransform::identity();
    for (int t = 1; t <= cfg.schedule.T; ++t) {
        const RigidTransform ht = diffuse(cfg, pair.h0, t, rng);
        const auto [rot, trans] = geodesic_distance(identity, ht);
        file << t << ',' << format_sig(rot, 9) << ',' << format_sig(trans, 9);
        const Mat4 m = ht.matrix();
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 4; ++c) {
                file << ',' << format_sig(m(r, c), 9);
            }
        }
        file << '\n';
    }
    out << "wrote " << cfg.schedule.T << " diffusion steps to " << opts.out << "\n";
}

void cmd_register(const RegisterOptions& opts, std::ostream& out) {
    const PointCloud source = load_cloud(opts.source_path);
    const PointCloud model = load_cloud(opts.model_path);

    RegistrationPair truth_pair;
    const RigidTransform* truth = nullptr;
    const std::vector<int>* correspondences = nullptr;
    if (!opts.truth_path.empty()) {
        truth_pair = load_pair(opts.truth_path);
        truth = &truth_pair.h0;
        if (truth_pair.correspondences) {
            correspondences = &*truth_pair.correspondences;
        }
    }

    ReverseConfig cfg;
    cfg.schedule = respace(make_schedule(opts.kind, opts.train_steps), opts.infer_steps);
    cfg.mode = opts.mode;
    cfg.surrogate = opts.surrogate;
    cfg.record_trajectory = true;
    cfg.seed = opts.seed;
    cfg.exp_map = opts.decoupled_exp ? ExpMap::decoupled : ExpMap::coupled;

    Rng rng = make_rng(opts.seed);
    const InferenceResult result = run_inference(cfg, source, model, truth, correspondences, rng);

    const Mat4 m = result.h0_estimate.matrix();
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            out << format_sig(m(r, c), 12) << (c == 3 ? "\n" : " ");
        }
    }

    if (!opts.trace_path.empty()) {
        std::ofstream trace(opts.trace_path);
        if (!trace) {
            throw MissingFile("cannot open '" + opts.trace_path + "' for writing");
        }
        trace << "step_index,t,re_deg,te,residual\n";
        int step_index = 1;
        for (const TrajectoryStep& step : result.trajectory.steps) {
            trace << step_index++ << ',' << step.source_t << ','
                  << format_sig(step.re_to_truth * 180.0 / std::numbers::pi, 9) << ','
                  << format_sig(step.te_to_truth, 9) << ',' << format_sig(step.residual, 9)
                  << '\n';
        }
    }
}

void cmd_bench(const BenchConfig& cfg, std::ostream& out) {
    const BenchResult result = run_bench(cfg);
    if (!cfg.rows_out.empty()) {
        std::ofstream file(cfg.rows_out);
        if (!file) {
            throw MissingFile("cannot open '" + cfg.rows_out + "' for writing");
        }
        write_rows_csv(file, result.rows);
    }
    if (!cfg.map_out.empty()) {
        std::ofstream file(cfg.map_out);
        if (!file) {
            throw MissingFile("cannot open '" + cfg.map_out + "' for writing");
        }
        write_map_csv(file, result.map_by_method);
    }
    if (!cfg.timing_out.empty()) {
        std::ofstream file(cfg.timing_out);
        if (!file) {
            throw MissingFile("cannot open '" + cfg.timing_out + "' for writing");
        }
        write_timing_csv(file, result.rows);
    }
    print_map_table(out, result.map_by_method);
}

}  // namespace

ParsedArgs parse_args(const std::vector<std::string>& args) {
    ParsedArgs parsed;

    CLI::App app{"SE(3) diffusion point-cloud registration toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic registration dataset");
    std::string gen_shape = "torus";
    gen->add_option("--shape", gen_shape, "sphere, box, torus or composite")
        ->check(CLI::IsMember({"sphere", "box", "torus", "composite"}))
        ->capture_default_str();
    gen->add_option("--n", parsed.gen.n_pairs, "Number of pairs")->capture_default_str();
    gen->add_option("--n-source", parsed.gen.spec.n_source, "Source cloud size")
        ->capture_default_str();
    gen->add_option("--n-model", parsed.gen.spec.n_model, "Model cloud size")
        ->capture_default_str();
    gen->add_option("--max-rot", parsed.gen.spec.max_rot, "Max rotation angle (radians)")
        ->capture_default_str();
    gen->add_option("--max-trans", parsed.gen.spec.max_trans, "Max translation norm")
        ->capture_default_str();
    gen->add_option("--partial", parsed.gen.spec.partial_fraction,
                    "View fraction kept in (0,1]")
        ->capture_default_str();
    gen->add_option("--noise", parsed.gen.spec.noise_sigma, "Isotropic noise sigma")
        ->capture_default_str();
    gen->add_option("--occlusion", parsed.gen.spec.occlusion_patches,
                    "Number of occlusion patches")
        ->capture_default_str();
    gen->add_option("--seed", parsed.gen.spec.seed, "Base RNG seed")
        ->envname("SE3DIFFREG_SEED")
        ->capture_default_str();
    gen->add_option("--out-dir", parsed.gen.out_dir, "Output dataset directory")->required();

    // schedule
    auto* sched = app.add_subcommand("schedule", "Dump schedule coefficients as CSV");
    std::string sched_kind = "cosine";
    sched->add_option("--kind", sched_kind, "linear or cosine")
        ->check(CLI::IsMember({"linear", "cosine"}))
        ->capture_default_str();
    sched->add_option("--steps", parsed.schedule.steps, "Step count T")->capture_default_str();
    sched->add_option("--out", parsed.schedule.out, "Output CSV path")->required();

    // diffuse
    auto* diff = app.add_subcommand("diffuse", "Sample the forward chain of a pair");
    std::string diff_kind = "cosine";
    diff->add_option("--pair", parsed.diffuse.pair_path, "Pair manifest (JSON)")->required();
    diff->add_option("--gamma", parsed.diffuse.gamma, "Perturbation scale")
        ->capture_default_str();
    diff->add_option("--steps", parsed.diffuse.steps, "Step count T")->capture_default_str();
    diff->add_option("--schedule", diff_kind, "linear or cosine")
        ->check(CLI::IsMember({"linear", "cosine"}))
        ->capture_default_str();
    diff->add_option("--seed", parsed.diffuse.seed, "RNG seed")
        ->envname("SE3DIFFREG_SEED")
        ->capture_default_str();
    diff->add_option("--out", parsed.diffuse.out, "Output CSV path")->required();
    diff->add_flag("--decoupled-exp", parsed.diffuse.decoupled_exp,
                   "Use the decoupled SO(3) x R^3 exponential");
    diff->add_flag("--perturb-right", parsed.diffuse.perturb_right,
                   "Compose the perturbation on the right");

    // register
    auto* reg = app.add_subcommand("register", "Reverse-process registration of two clouds");
    SurrogateFlags reg_surrogate;
    std::string reg_kind = "cosine";
    std::string reg_mode = "deterministic";
    reg->add_option("--source", parsed.register_pair.source_path, "Source cloud (.xyz/.ply)")
        ->required();
    reg->add_option("--model", parsed.register_pair.model_path, "Model cloud (.xyz/.ply)")
        ->required();
    add_surrogate_flags(reg, reg_surrogate);
    reg->add_option("--infer-steps", parsed.register_pair.infer_steps, "Reverse steps K")
        ->capture_default_str();
    reg->add_option("--train-steps", parsed.register_pair.train_steps, "Schedule steps T")
        ->capture_default_str();
    reg->add_option("--schedule", reg_kind, "linear or cosine")
        ->check(CLI::IsMember({"linear", "cosine"}))
        ->capture_default_str();
    reg->add_option("--mode", reg_mode, "deterministic or random")
        ->check(CLI::IsMember({"deterministic", "random"}))
        ->capture_default_str();
    reg->add_option("--seed", parsed.register_pair.seed, "RNG seed")
        ->envname("SE3DIFFREG_SEED")
        ->capture_default_str();
    reg->add_option("--truth", parsed.register_pair.truth_path,
                    "Pair manifest supplying ground truth and correspondences");
    reg->add_option("--trace", parsed.register_pair.trace_path, "Trajectory CSV path");
    reg->add_flag("--decoupled-exp", parsed.register_pair.decoupled_exp,
                  "Use the decoupled SO(3) x R^3 exponential");

    // bench
    auto* bench = app.add_subcommand("bench", "Benchmark methods over a dataset");
    bench->set_config("--config", "", "Read options from an INI/TOML config file");
    SurrogateFlags bench_surrogate;
    std::string bench_kind = "cosine";
    std::string bench_mode = "deterministic";
    std::vector<std::string> bench_methods{"single_shot", "reverse"};
    bench->add_option("--dataset", parsed.bench.dataset_dir, "Dataset directory")->required();
    add_surrogate_flags(bench, bench_surrogate);
    bench->add_option("--schedule", bench_kind, "linear or cosine")
        ->check(CLI::IsMember({"linear", "cosine"}))
        ->capture_default_str();
    bench->add_option("--train-steps", parsed.bench.train_steps, "Schedule steps T")
        ->capture_default_str();
    bench->add_option("--gamma", parsed.bench.gamma, "Forward perturbation scale")
        ->capture_default_str();
    bench->add_option("--infer-steps", parsed.bench.infer_steps, "Reverse steps K")
        ->capture_default_str();
    bench->add_option("--mode", bench_mode, "deterministic or random")
        ->check(CLI::IsMember({"deterministic", "random"}))
        ->capture_default_str();
    bench->add_option("--seed", parsed.bench.seed, "Base RNG seed")
        ->envname("SE3DIFFREG_SEED")
        ->capture_default_str();
    bench->add_option("--repeats", parsed.bench.repeats, "Runs per pair")->capture_default_str();
    bench->add_option("--methods", bench_methods, "Methods: single_shot, reverse")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--jobs", parsed.bench.jobs, "Worker threads (0 = hardware)")
        ->capture_default_str();
    bench->add_option("--thr-rot", parsed.bench.thresholds_rot_deg,
                      "Rotation mAP thresholds (degrees)")
        ->delimiter(',');
    bench->add_option("--thr-trans", parsed.bench.thresholds_trans,
                      "Translation mAP thresholds (length)")
        ->delimiter(',');
    bench->add_option("--out", parsed.bench.rows_out, "Per-pair result CSV path");
    bench->add_option("--map-out", parsed.bench.map_out, "mAP report CSV path");
    bench->add_option("--timing-out", parsed.bench.timing_out, "Wall-clock timing CSV path");
    bool bench_decoupled = false;
    bench->add_flag("--decoupled-exp", bench_decoupled,
                    "Use the decoupled SO(3) x R^3 exponential");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        parsed.exit_now = 0;
        parsed.message = app.help();
        return parsed;
    } catch (const CLI::CallForVersion&) {
        parsed.exit_now = 0;
        parsed.message = std::string(kVersion) + "\n";
        return parsed;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (gen->parsed()) {
        parsed.command = Command::gen;
        parsed.gen.spec.shape = shape_kind_from_string(gen_shape);
    } else if (sched->parsed()) {
        parsed.command = Command::schedule;
        parsed.schedule.kind = schedule_kind_from_string(sched_kind);
    } else if (diff->parsed()) {
        parsed.command = Command::diffuse;
        parsed.diffuse.kind = schedule_kind_from_string(diff_kind);
    } else if (reg->parsed()) {
        parsed.command = Command::register_pair;
        parsed.register_pair.surrogate = reg_surrogate.build();
        parsed.register_pair.kind = schedule_kind_from_string(reg_kind);
        parsed.register_pair.mode = inference_mode_from_string(reg_mode);
    } else if (bench->parsed()) {
        parsed.command = Command::bench;
        parsed.bench.surrogate = bench_surrogate.build();
        parsed.bench.schedule_kind = schedule_kind_from_string(bench_kind);
        parsed.bench.mode = inference_mode_from_string(bench_mode);
        parsed.bench.exp_map = bench_decoupled ? ExpMap::decoupled : ExpMap::coupled;
        parsed.bench.methods.clear();
        for (const std::string& m : bench_methods) {
            parsed.bench.methods.push_back(bench_method_from_string(m));
        }
    }
    return parsed;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        const ParsedArgs parsed = parse_args(args);
        if (parsed.exit_now >= 0) {
            out << parsed.message;
            return parsed.exit_now;
        }
        switch (parsed.command) {
            case Command::gen:
                cmd_gen(parsed.gen, out);
                break;
            case Command::schedule:
                cmd_schedule(parsed.schedule, out);
                break;
            case Command::diffuse:
                cmd_diffuse(parsed.diffuse, out);
                break;
            case Command::register_pair:
                cmd_register(parsed.register_pair, out);
                break;
            case Command::bench:
                cmd_bench(parsed.bench, out);
                break;
            case Command::none:
                throw UsageError("a subcommand is required");
        }
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace se3diffreg
