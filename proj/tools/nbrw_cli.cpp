#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nbrw.h"

namespace {

int status_to_exit(nbrw_status st) {
    switch (st) {
    case NBRW_OK: return 0;
    case NBRW_ERR_USAGE: return 1;
    case NBRW_ERR_COUNTEREXAMPLE: return 2;
    case NBRW_ERR_CAPACITY: return 3;
    case NBRW_ERR_PARSE: return 1;
    default: return 1;
    }
}

int fail(nbrw_status st, const std::string& what) {
    std::cerr << "nbrw: " << what << ": " << nbrw_last_error() << "\n";
    return status_to_exit(st);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string default_out_dir() {
    const char* env = std::getenv("NBRW_OUT_DIR");
    return env && *env ? env : "nbrw-out";
}

// Append-only run log: command, config digest, seed, version, timestamps,
// outputs. Kept out of the deterministic data files on purpose.
void append_manifest(const std::string& dir, const std::string& command,
                     const std::string& digest, std::uint64_t seed,
                     const std::vector<std::string>& outputs, std::time_t start,
                     std::time_t end) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream m(dir + "/manifest.jsonl", std::ios::app | std::ios::binary);
    m << "{\"command\":\"" << command << "\",\"digest\":\"" << digest << "\",\"seed\":" << seed
      << ",\"version\":\"" << nbrw_version() << "\",\"start\":" << start << ",\"end\":" << end
      << ",\"outputs\":[";
    for (std::size_t i = 0; i < outputs.size(); ++i)
        m << (i ? "," : "") << '"' << outputs[i] << '"';
    m << "]}\n";
}

struct ScheduleArgs {
    std::string file;
    double eta = 0.0;
    bool relaxed = false;
    double alpha = 1.0;

    nbrw_status make(nbrw_schedule** out) const {
        if (!file.empty()) return nbrw_schedule_parse(read_file(file).c_str(), out);
        if (eta > 0.0)
            return relaxed ? nbrw_schedule_relaxed(eta, alpha, out)
                           : nbrw_schedule_from_eta(eta, alpha, out);
        return nbrw_schedule_relaxed(1.0, alpha, out);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"N-particle branching random walk: simulate, verify, experiment, report"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "run the particle system and write a trajectory");
    std::string sim_law = "pareto", sim_out = "trajectory.jsonl", sim_engine = "direct";
    double sim_alpha = 1.0;
    long sim_n = 2;
    int sim_t = -1;
    double sim_t_mult = 0.0;
    std::uint64_t sim_seed = 1, sim_replicate = 0;
    sim->add_option("--law", sim_law, "jump law family: pareto | pareto_log");
    sim->add_option("--alpha", sim_alpha, "regular-variation index")->required();
    sim->add_option("--n", sim_n, "number of particles (>= 2)")->required();
    sim->add_option("--t", sim_t, "number of steps");
    sim->add_option("--t-mult", sim_t_mult, "t = ceil(k * ell_N) instead of --t");
    sim->add_option("--seed", sim_seed, "stream seed");
    sim->add_option("--replicate", sim_replicate, "replicate substream index");
    sim->add_option("--engine", sim_engine, "direct | brw | both");
    sim->add_option("--out", sim_out, "output trajectory path (.bin = binary)");

    // ---- verify ----
    auto* ver = app.add_subcommand("verify", "event table and implication checkers");
    std::string ver_traj;
    ScheduleArgs ver_sched;
    int ver_t = -1;
    int ver_m = 4;
    double ver_rho = 0.0;
    std::uint64_t ver_sample_seed = 1;
    bool ver_json_only = false;
    ver->add_option("--traj", ver_traj, "trajectory file")->required();
    ver->add_option("--schedule", ver_sched.file, "schedule JSON file");
    ver->add_option("--eta", ver_sched.eta, "derive the schedule from eta");
    ver->add_flag("--relaxed", ver_sched.relaxed, "use the relaxed legal schedule for eta");
    ver->add_option("--alpha", ver_sched.alpha, "alpha for --eta (default 1)");
    ver->add_option("--t", ver_t, "reference time (default: trajectory length)");
    ver->add_option("--m", ver_m, "uniform sample size for the genealogy events");
    ver->add_option("--rho-probe", ver_rho, "override rho for the record machinery");
    ver->add_option("--sample-seed", ver_sample_seed, "seed of the sampling stream");
    ver->add_flag("--json", ver_json_only, "print JSON only (no table)");

    // ---- experiment ----
    auto* exp = app.add_subcommand("experiment", "run a replicate ladder from a config file");
    std::string exp_config, exp_out;
    int exp_jobs = 0;
    exp->add_option("--config", exp_config, "config file (key=value or JSON)")->required();
    exp->add_option("--out", exp_out, "output directory (default $NBRW_OUT_DIR or ./nbrw-out)");
    exp->add_option("--jobs", exp_jobs, "replicate parallelism (output is jobs-independent)");

    // ---- report ----
    auto* rep = app.add_subcommand("report", "tidy per-figure CSVs from a summary.csv");
    std::string rep_summary, rep_out;
    rep->add_option("--summary", rep_summary, "summary.csv produced by experiment")->required();
    rep->add_option("--out", rep_out, "output directory");

    // ---- fixture ----
    auto* fix = app.add_subcommand("fixture", "build a synthetic scenario trajectory");
    std::string fix_kind, fix_out = "fixture.jsonl";
    ScheduleArgs fix_sched;
    long fix_n = 2048;
    int fix_t = -1;
    std::uint64_t fix_seed = 7;
    fix->add_option("--kind", fix_kind,
                    "propC_case1 | propC_case2a | G_event | star | big-jump-leftmost | noRecord")
        ->required();
    fix->add_option("--schedule", fix_sched.file, "schedule JSON file");
    fix->add_option("--eta", fix_sched.eta, "relaxed schedule eta (default 1.0)");
    fix->add_option("--alpha", fix_sched.alpha, "alpha (default 1)");
    fix->add_option("--n", fix_n, "particles");
    fix->add_option("--t", fix_t, "steps (default 5*ell)");
    fix->add_option("--seed", fix_seed, "base-stream seed");
    fix->add_option("--out", fix_out, "output trajectory path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            nbrw_law* law = nullptr;
            nbrw_status st = nbrw_law_create(sim_law.c_str(), sim_alpha, &law);
            if (st != NBRW_OK) return fail(st, "law");
            if (sim_t < 0 && sim_t_mult > 0.0) {
                int ell = 0;
                st = nbrw_time_scale(sim_n, &ell);
                if (st != NBRW_OK) return fail(st, "time scale");
                sim_t = static_cast<int>(std::ceil(sim_t_mult * ell));
            }
            if (sim_t < 0) {
                std::cerr << "nbrw: simulate needs --t or --t-mult\n";
                return 1;
            }
            const std::time_t start = std::time(nullptr);
            nbrw_sim_options opts{sim_n, sim_t, sim_seed, sim_replicate, 0};
            std::vector<std::string> outputs;
            int exit_code = 0;
            if (sim_engine == "direct" || sim_engine == "brw") {
                opts.engine = sim_engine == "brw" ? 1 : 0;
                nbrw_trajectory* traj = nullptr;
                st = nbrw_simulate(law, &opts, &traj);
                if (st != NBRW_OK) return fail(st, "simulate");
                st = nbrw_trajectory_save(traj, sim_out.c_str());
                nbrw_trajectory_free(traj);
                if (st != NBRW_OK) return fail(st, "save");
                outputs.push_back(sim_out);
            } else if (sim_engine == "both") {
                nbrw_trajectory *a = nullptr, *b = nullptr;
                opts.engine = 0;
                st = nbrw_simulate(law, &opts, &a);
                if (st != NBRW_OK) return fail(st, "simulate (direct)");
                opts.engine = 1;
                st = nbrw_simulate(law, &opts, &b);
                if (st != NBRW_OK) return fail(st, "simulate (brw)");
                const std::string out_a = sim_out;
                std::string out_b = sim_out;
                const auto dot = out_b.rfind('.');
                out_b.insert(dot == std::string::npos ? out_b.size() : dot, ".brw");
                nbrw_status sa = nbrw_trajectory_save(a, out_a.c_str());
                nbrw_status sb = nbrw_trajectory_save(b, out_b.c_str());
                const bool equal = nbrw_trajectory_equal(a, b) == 1;
                nbrw_trajectory_free(a);
                nbrw_trajectory_free(b);
                if (sa != NBRW_OK || sb != NBRW_OK) return fail(NBRW_ERR_PARSE, "save");
                outputs.push_back(out_a);
                outputs.push_back(out_b);
                if (!equal) {
                    std::cerr << "nbrw: the two constructions disagree\n";
                    exit_code = 2;
                } else {
                    std::cout << "constructions agree\n";
                }
            } else {
                std::cerr << "nbrw: --engine must be direct, brw, or both\n";
                return 1;
            }
            nbrw_law_free(law);
            append_manifest(default_out_dir(), "simulate", "-", sim_seed, outputs, start,
                            std::time(nullptr));
            return exit_code;
        }

        if (*ver) {
            nbrw_trajectory* traj = nullptr;
            nbrw_status st = nbrw_trajectory_load(ver_traj.c_str(), &traj);
            if (st != NBRW_OK) return fail(st, "load");
            nbrw_schedule* sched = nullptr;
            st = ver_sched.make(&sched);
            if (st != NBRW_OK) {
                nbrw_trajectory_free(traj);
                return fail(st, "schedule");
            }
            const int t = ver_t > 0 ? ver_t : nbrw_trajectory_t(traj);
            const long n = nbrw_trajectory_n(traj);
            const int m = ver_m > n ? static_cast<int>(n) : ver_m;

            nbrw_report* report = nullptr;
            st = nbrw_evaluate(traj, sched, t, m, ver_sample_seed, ver_rho, &report);
            if (st != NBRW_OK) return fail(st, "evaluate");
            char* table = nullptr;
            char* report_json = nullptr;
            nbrw_report_table(report, &table);
            nbrw_report_to_json(report, &report_json);
            char* verdicts = nullptr;
            const nbrw_status verify_st = nbrw_verify(traj, sched, t, ver_rho, &verdicts);
            if (verify_st != NBRW_OK && verify_st != NBRW_ERR_COUNTEREXAMPLE)
                return fail(verify_st, "verify");

            if (ver_json_only) {
                std::cout << "{\"report\":" << report_json << ",\"verdicts\":" << verdicts
                          << "}\n";
            } else {
                std::cout << table << "\nverdicts:\n" << verdicts << "\n";
            }
            nbrw_string_free(table);
            nbrw_string_free(report_json);
            nbrw_string_free(verdicts);
            nbrw_report_free(report);
            nbrw_schedule_free(sched);
            nbrw_trajectory_free(traj);
            return verify_st == NBRW_ERR_COUNTEREXAMPLE ? 2 : 0;
        }

        if (*exp) {
            const std::string config_text = read_file(exp_config);
            const std::string out_dir = !exp_out.empty() ? exp_out : default_out_dir();
            const std::time_t start = std::time(nullptr);
            char* digest = nullptr;
            nbrw_status st = nbrw_config_digest(config_text.c_str(), &digest);
            if (st != NBRW_OK) return fail(st, "config");
            st = nbrw_run_experiment(config_text.c_str(), out_dir.c_str(), exp_jobs);
            if (st != NBRW_OK) {
                nbrw_string_free(digest);
                return fail(st, "experiment");
            }
            append_manifest(out_dir, "experiment", digest, 0,
                            {out_dir + "/records.jsonl", out_dir + "/summary.csv"}, start,
                            std::time(nullptr));
            std::cout << "wrote " << out_dir << "/records.jsonl and summary.csv (digest "
                      << digest << ")\n";
            nbrw_string_free(digest);
            return 0;
        }

        if (*rep) {
            const std::string out_dir = !rep_out.empty() ? rep_out : default_out_dir();
            const nbrw_status st = nbrw_make_report(rep_summary.c_str(), out_dir.c_str());
            if (st != NBRW_OK) return fail(st, "report");
            std::cout << "wrote per-figure CSVs under " << out_dir << "\n";
            return 0;
        }

        if (*fix) {
            nbrw_schedule* sched = nullptr;
            if (fix_sched.file.empty() && fix_sched.eta == 0.0) fix_sched.eta = 1.0;
            fix_sched.relaxed = true;
            nbrw_status st = fix_sched.make(&sched);
            if (st != NBRW_OK) return fail(st, "schedule");
            if (fix_t < 0) {
                int ell = 0;
                nbrw_time_scale(fix_n, &ell);
                fix_t = 5 * ell;
            }
            nbrw_trajectory* traj = nullptr;
            char* info = nullptr;
            st = nbrw_build_fixture(fix_kind.c_str(), sched, fix_n, fix_t, fix_seed, &traj,
                                    &info);
            if (st != NBRW_OK) return fail(st, "fixture");
            st = nbrw_trajectory_save(traj, fix_out.c_str());
            std::cout << info << "\n";
            nbrw_string_free(info);
            nbrw_trajectory_free(traj);
            nbrw_schedule_free(sched);
            if (st != NBRW_OK) return fail(st, "save");
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "nbrw: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
