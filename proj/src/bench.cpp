#include "se3diffreg/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <thread>

#include "se3diffreg/data_synth.hpp"
#include "se3diffreg/errors.hpp"

namespace se3diffreg {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::vector<std::string> read_index(const std::string& dataset_dir) {
    const fs::path index_path = fs::path(dataset_dir) / "index.txt";
    std::ifstream in(index_path);
    if (!in) {
        throw ConfigError("dataset index '" + index_path.string() + "' is not readable");
    }
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (!line.empty()) {
            ids.push_back(line);
        }
    }
    if (ids.empty()) {
        throw ConfigError("dataset index '" + index_path.string() + "' lists no pairs");
    }
    return ids;
}

}  // namespace

BenchMethod bench_method_from_string(const std::string& s) {
    if (s == "single_shot") {
        return BenchMethod::single_shot;
    }
    if (s == "reverse" || s == "diffusion_reverse") {
        return BenchMethod::diffusion_reverse;
    }
    throw ConfigError("unknown method '" + s + "' (expected single_shot or reverse)");
}

const char* to_string(BenchMethod method) {
    return method == BenchMethod::single_shot ? "single_shot" : "reverse";
}

BenchResult run_bench(const BenchConfig& cfg) {
    if (cfg.methods.empty()) {
        throw ConfigError("no benchmark methods configured");
    }
    if (cfg.repeats < 1) {
        throw ConfigError("repeats must be >= 1");
    }
    if (cfg.infer_steps < 1 || cfg.infer_steps > cfg.train_steps) {
        throw ConfigError("infer_steps must lie in [1, train_steps]");
    }
    cfg.surrogate.validate();

    const std::vector<std::string> ids = read_index(cfg.dataset_dir);
    const Schedule full = make_schedule(cfg.schedule_kind, cfg.train_steps);
    const Schedule respaced = respace(full, cfg.infer_steps);

    struct Task {
        std::string id;
        RegistrationPair pair;
    };
    std::vector<Task> tasks;
    tasks.reserve(ids.size());
    for (const std::string& id : ids) {
        Task task;
        task.id = id;
        task.pair = load_pair((fs::path(cfg.dataset_dir) / (id + ".json")).string());
        tasks.push_back(std::move(task));
    }

    const int rows_per_pair = static_cast<int>(cfg.methods.size()) * cfg.repeats;
    std::vector<std::vector<BenchRow>> results(tasks.size());

    auto run_pair = [&](std::size_t pair_index) {
        const Task& task = tasks[pair_index];
        std::vector<BenchRow>& rows = results[pair_index];
        rows.reserve(static_cast<std::size_t>(rows_per_pair));
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            const BenchMethod method = cfg.methods[m];
            for (int repeat = 0; repeat < cfg.repeats; ++repeat) {
                BenchRow row;
                row.pair_id = task.id;
                row.method = to_string(method);
                Rng rng = make_rng(mix_seed({cfg.seed, fnv1a64(task.id),
                                             static_cast<std::uint64_t>(m),
                                             static_cast<std::uint64_t>(repeat)}));
                try {
                    const auto start = std::chrono::steady_clock::now();
                    RigidTransform estimate;
                    if (method == BenchMethod::single_shot) {
                        estimate = single_shot_baseline(cfg.surrogate, task.pair, rng).h;
                        row.steps_used = 1;
                    } else {
                        ReverseConfig rc;
                        rc.schedule = respaced;
                        rc.mode = cfg.mode;
                        rc.surrogate = cfg.surrogate;
                        rc.record_trajectory = false;
                        rc.exp_map = cfg.exp_map;
                        const std::vector<int>* corr =
                            task.pair.correspondences ? &*task.pair.correspondences : nullptr;
                        estimate = run_inference(rc, task.pair.source, task.pair.model,
                                                 &task.pair.h0, corr, rng)
                                       .h0_estimate;
                        row.steps_used = cfg.infer_steps;
                    }
                    const auto stop = std::chrono::steady_clock::now();
                    row.wall_ms =
                        std::chrono::duration<double, std::milli>(stop - start).count();
                    const PoseError err = pose_error(estimate, task.pair.h0);
                    row.re_deg = err.re * 180.0 / std::numbers::pi;
                    row.te = err.te;
                    row.converged = true;
                } catch (const Error&) {
                    row.re_deg = std::numeric_limits<double>::quiet_NaN();
                    row.te = std::numeric_limits<double>::quiet_NaN();
                    row.converged = false;
                }
                rows.push_back(std::move(row));
            }
        }
    };

    unsigned workers = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                                    : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            run_pair(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= tasks.size()) {
                        return;
                    }
                    run_pair(i);
                }
            });
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    BenchResult out;
    out.rows.reserve(tasks.size() * static_cast<std::size_t>(rows_per_pair));
    for (const auto& rows : results) {
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    }

    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        const std::string tag = to_string(cfg.methods[m]);
        std::vector<PoseError> errors;
        for (const BenchRow& row : out.rows) {
            if (row.method != tag) {
                continue;
            }
            if (row.converged) {
                errors.push_back({row.re_deg * std::numbers::pi / 180.0, row.te});
            } else {
                // Failed pairs count as misses at every threshold.
                errors.push_back({std::numbers::pi, std::numeric_limits<double>::infinity()});
            }
        }
        out.map_by_method[tag] =
            map_summary(errors, cfg.thresholds_rot_deg, cfg.thresholds_trans);
    }
    return out;
}

void write_rows_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "pair_id,method,re_deg,te,steps_used,converged\n";
    for (const BenchRow& row : rows) {
        out << row.pair_id << ',' << row.method << ',' << format_double(row.re_deg) << ','
            << format_double(row.te) << ',' << row.steps_used << ','
            << (row.converged ? "true" : "false") << '\n';
    }
}

void write_map_csv(std::ostream& out, const std::map<std::string, MapReport>& reports) {
    out << "method,axis,threshold,fraction\n";
    for (const auto& [method, report] : reports) {
        for (std::size_t i = 0; i < report.thresholds_rot_deg.size(); ++i) {
            out << method << ",rot_deg," << format_double(report.thresholds_rot_deg[i]) << ','
                << format_double(report.map_rot[i]) << '\n';
        }
        for (std::size_t i = 0; i < report.thresholds_trans.size(); ++i) {
            out << method << ",trans," << format_double(report.thresholds_trans[i]) << ','
                << format_double(report.map_trans[i]) << '\n';
        }
    }
}

void write_timing_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "pair_id,method,wall_ms\n";
    for (const BenchRow& row : rows) {
        out << row.pair_id << ',' << row.method << ',' << format_double(row.wall_ms) << '\n';
    }
}

void print_map_table(std::ostream& out, const std::map<std::string, MapReport>& reports) {
    for (const auto& [method, report] : reports) {
        out << method << " (n=" << report.n_pairs << ")\n";
        for (std::size_t i = 0; i < report.thresholds_rot_deg.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "  mAP@%g deg : %.4f\n",
                          report.thresholds_rot_deg[i], report.map_rot[i]);
            out << buf;
        }
        for (std::size_t i = 0; i < report.thresholds_trans.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "  mAP@%g    : %.4f\n", report.thresholds_trans[i],
                          report.map_trans[i]);
            out << buf;
        }
    }
}

}  // namespace se3diffreg
