#include "nbrw.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "core/engine.hpp"
#include "core/events.hpp"
#include "core/experiments.hpp"
#include "core/fixtures.hpp"
#include "core/genealogy.hpp"
#include "core/serialize.hpp"
#include "core/verify.hpp"

using namespace nbrw;

struct nbrw_law {
    TailLaw law;
};
struct nbrw_trajectory {
    Trajectory traj;
};
struct nbrw_schedule {
    ConstantSchedule sched;
};
struct nbrw_report {
    EventReport report;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn> nbrw_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const domain_error& e) {
        g_last_error = e.what();
        return NBRW_ERR_USAGE;
    } catch (const capacity_error& e) {
        g_last_error = e.what();
        return NBRW_ERR_CAPACITY;
    } catch (const parse_error& e) {
        g_last_error = e.what();
        return NBRW_ERR_PARSE;
    } catch (const scale_infeasible_error& e) {
        g_last_error = e.what();
        return NBRW_ERR_USAGE;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return NBRW_ERR_INTERNAL;
    }
}

} // namespace

extern "C" {

const char* nbrw_version(void) { return "0.1.0"; }

const char* nbrw_last_error(void) { return g_last_error.c_str(); }

void nbrw_string_free(char* s) { std::free(s); }

nbrw_status nbrw_law_create(const char* family, double alpha, nbrw_law** out) {
    return guarded([&] {
        *out = new nbrw_law{TailLaw(tail_family_from_string(family ? family : ""), alpha)};
        return NBRW_OK;
    });
}

void nbrw_law_free(nbrw_law* law) { delete law; }

nbrw_status nbrw_law_survival(const nbrw_law* law, double x, double* out) {
    return guarded([&] {
        *out = law->law.survival(x);
        return NBRW_OK;
    });
}

nbrw_status nbrw_law_h(const nbrw_law* law, double x, double* out) {
    return guarded([&] {
        *out = law->law.h(x);
        return NBRW_OK;
    });
}

nbrw_status nbrw_law_h_inverse(const nbrw_law* law, double y, double* out) {
    return guarded([&] {
        *out = law->law.h_inverse(y);
        return NBRW_OK;
    });
}

nbrw_status nbrw_law_sample_jump(const nbrw_law* law, double u, double* out) {
    return guarded([&] {
        *out = law->law.sample(u);
        return NBRW_OK;
    });
}

nbrw_status nbrw_time_scale(long n, int* out) {
    return guarded([&] {
        *out = time_scale(n);
        return NBRW_OK;
    });
}

nbrw_status nbrw_space_scale(const nbrw_law* law, long n, double* out) {
    return guarded([&] {
        *out = space_scale(law->law, n);
        return NBRW_OK;
    });
}

nbrw_status nbrw_epsilon_schedule(int ell, int* out) {
    return guarded([&] {
        *out = epsilon_schedule(ell);
        return NBRW_OK;
    });
}

nbrw_status nbrw_simulate(const nbrw_law* law, const nbrw_sim_options* opts,
                          nbrw_trajectory** out) {
    return guarded([&] {
        EngineConfig cfg;
        cfg.law = law->law;
        cfg.n = opts->n;
        cfg.t = opts->t;
        cfg.seed = opts->seed;
        cfg.replicate = opts->replicate;
        cfg.keep_labels = false;
        *out = new nbrw_trajectory{opts->engine == 1 ? run_brw_construction(cfg)
                                                     : run_direct(cfg)};
        return NBRW_OK;
    });
}

nbrw_status nbrw_trajectory_save(const nbrw_trajectory* traj, const char* path) {
    return guarded([&] {
        save_trajectory(traj->traj, path);
        return NBRW_OK;
    });
}

nbrw_status nbrw_trajectory_load(const char* path, nbrw_trajectory** out) {
    return guarded([&] {
        *out = new nbrw_trajectory{load_trajectory(path)};
        return NBRW_OK;
    });
}

int nbrw_trajectory_equal(const nbrw_trajectory* a, const nbrw_trajectory* b) {
    return identical(a->traj, b->traj) ? 1 : 0;
}

long nbrw_trajectory_n(const nbrw_trajectory* traj) { return traj->traj.n_particles(); }

int nbrw_trajectory_t(const nbrw_trajectory* traj) { return traj->traj.duration(); }

double nbrw_trajectory_position(const nbrw_trajectory* traj, int rank, int time) {
    return traj->traj.position(rank, time);
}

void nbrw_trajectory_free(nbrw_trajectory* traj) { delete traj; }

nbrw_status nbrw_schedule_from_eta(double eta, double alpha, nbrw_schedule** out) {
    return guarded([&] {
        *out = new nbrw_schedule{schedule_from_eta(eta, alpha)};
        return NBRW_OK;
    });
}

nbrw_status nbrw_schedule_relaxed(double eta, double alpha, nbrw_schedule** out) {
    return guarded([&] {
        *out = new nbrw_schedule{relaxed_schedule(eta, alpha)};
        return NBRW_OK;
    });
}

nbrw_status nbrw_schedule_parse(const char* json_text, nbrw_schedule** out) {
    return guarded([&] {
        *out = new nbrw_schedule{schedule_from_json_text(json_text ? json_text : "")};
        return NBRW_OK;
    });
}

nbrw_status nbrw_schedule_to_json(const nbrw_schedule* sched, char** out) {
    return guarded([&] {
        *out = dup_string(schedule_to_json_text(sched->sched));
        return NBRW_OK;
    });
}

void nbrw_schedule_free(nbrw_schedule* sched) { delete sched; }

nbrw_status nbrw_evaluate(const nbrw_trajectory* traj, const nbrw_schedule* sched, int t,
                          int m_sample, uint64_t sample_seed, double rho_probe,
                          nbrw_report** out) {
    return guarded([&] {
        const auto sample = sample_uniform(traj->traj, t, m_sample, sample_seed);
        EventParams params;
        params.rho_probe = rho_probe;
        *out = new nbrw_report{evaluate_events(traj->traj, sched->sched, t, sample,
                                               traj->traj.scales.eps_ell, params)};
        return NBRW_OK;
    });
}

nbrw_status nbrw_report_to_json(const nbrw_report* report, char** out) {
    return guarded([&] {
        *out = dup_string(event_report_to_json(report->report));
        return NBRW_OK;
    });
}

nbrw_status nbrw_report_table(const nbrw_report* report, char** out) {
    return guarded([&] {
        *out = dup_string(event_report_table(report->report));
        return NBRW_OK;
    });
}

void nbrw_report_free(nbrw_report* report) { delete report; }

nbrw_status nbrw_verify(const nbrw_trajectory* traj, const nbrw_schedule* sched, int t,
                        double rho_probe, char** json_out) {
    return guarded([&] {
        EventParams params;
        params.rho_probe = rho_probe;
        std::vector<ImplicationVerdict> verdicts = check_basic(traj->traj);
        verdicts.push_back(check_prop_B(traj->traj, sched->sched, t, params));
        verdicts.push_back(check_prop_C(traj->traj, sched->sched, t, params));
        const auto lemmas = check_support_lemmas(traj->traj, sched->sched, t, params);
        verdicts.insert(verdicts.end(), lemmas.begin(), lemmas.end());
        if (json_out) *json_out = dup_string(verdicts_to_json(verdicts));
        return any_counterexample(verdicts) ? NBRW_ERR_COUNTEREXAMPLE : NBRW_OK;
    });
}

nbrw_status nbrw_build_fixture(const char* kind, const nbrw_schedule* sched, long n, int t,
                               uint64_t seed, nbrw_trajectory** traj_out, char** json_out) {
    return guarded([&] {
        FixtureResult res =
            build_fixture(fixture_kind_from_string(kind ? kind : ""), sched->sched, n, t, seed);
        if (json_out) {
            std::ostringstream os;
            os << "{\"kind\":\"" << (kind ? kind : "") << "\",\"satisfied\":[";
            for (std::size_t i = 0; i < res.satisfied.size(); ++i)
                os << (i ? "," : "") << '"' << res.satisfied[i] << '"';
            os << "],\"missing\":[";
            for (std::size_t i = 0; i < res.missing.size(); ++i)
                os << (i ? "," : "") << '"' << res.missing[i] << '"';
            os << "],\"note\":\"" << res.note << "\"}";
            *json_out = dup_string(os.str());
        }
        *traj_out = new nbrw_trajectory{std::move(res.traj)};
        return NBRW_OK;
    });
}

nbrw_status nbrw_run_experiment(const char* config_text, const char* out_dir, int jobs) {
    return guarded([&] {
        ExperimentConfig cfg = config_from_text(config_text ? config_text : "");
        if (out_dir && *out_dir) cfg.out_dir = out_dir;
        if (jobs > 0) cfg.jobs = jobs;
        if (cfg.out_dir.empty()) throw domain_error("experiment needs an output directory");
        run_experiment(cfg);
        return NBRW_OK;
    });
}

nbrw_status nbrw_config_digest(const char* config_text, char** out) {
    return guarded([&] {
        *out = dup_string(config_digest(config_from_text(config_text ? config_text : "")));
        return NBRW_OK;
    });
}

nbrw_status nbrw_make_report(const char* summary_csv_path, const char* out_dir) {
    return guarded([&] {
        std::ifstream in(summary_csv_path);
        if (!in) throw parse_error(std::string("cannot open ") + summary_csv_path);
        std::stringstream ss;
        ss << in.rdbuf();
        const auto rows = summary_from_csv_text(ss.str());
        const ReportFiles files = make_report(rows);
        std::filesystem::create_directories(out_dir);
        const std::string dir(out_dir);
        std::ofstream(dir + "/coalescence_hist.csv", std::ios::binary)
            << files.coalescence_hist_csv;
        std::ofstream(dir + "/l_over_n.csv", std::ios::binary) << files.l_over_n_csv;
        std::ofstream(dir + "/diameter_tail.csv", std::ios::binary) << files.diameter_tail_csv;
        return NBRW_OK;
    });
}

} // extern "C"
