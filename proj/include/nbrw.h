/* nbrw: N-particle branching random walk toolkit - C interface.
 *
 * All functions return nbrw_status; on failure nbrw_last_error() carries a
 * thread-local message. Strings returned through char** are heap-allocated
 * and must be released with nbrw_string_free.
 */
#ifndef NBRW_H
#define NBRW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nbrw_status {
    NBRW_OK = 0,
    NBRW_ERR_USAGE = 1,          /* bad arguments or configuration */
    NBRW_ERR_COUNTEREXAMPLE = 2, /* verification found a counterexample */
    NBRW_ERR_CAPACITY = 3,       /* resource limit refused the run */
    NBRW_ERR_PARSE = 4,          /* malformed input file */
    NBRW_ERR_INTERNAL = 5
} nbrw_status;

typedef struct nbrw_law nbrw_law;
typedef struct nbrw_trajectory nbrw_trajectory;
typedef struct nbrw_schedule nbrw_schedule;
typedef struct nbrw_report nbrw_report;

const char* nbrw_version(void);
const char* nbrw_last_error(void);
void nbrw_string_free(char* s);

/* ---- tail laws and scales ---- */
nbrw_status nbrw_law_create(const char* family, double alpha, nbrw_law** out);
void nbrw_law_free(nbrw_law* law);
nbrw_status nbrw_law_survival(const nbrw_law* law, double x, double* out);
nbrw_status nbrw_law_h(const nbrw_law* law, double x, double* out);
nbrw_status nbrw_law_h_inverse(const nbrw_law* law, double y, double* out);
nbrw_status nbrw_law_sample_jump(const nbrw_law* law, double u, double* out);
nbrw_status nbrw_time_scale(long n, int* out);
nbrw_status nbrw_space_scale(const nbrw_law* law, long n, double* out);
nbrw_status nbrw_epsilon_schedule(int ell, int* out);

/* ---- simulation ---- */
typedef struct nbrw_sim_options {
    long n;
    int t;
    uint64_t seed;
    uint64_t replicate;
    int engine; /* 0 = direct branch-and-select, 1 = N-independent-BRW construction */
} nbrw_sim_options;

nbrw_status nbrw_simulate(const nbrw_law* law, const nbrw_sim_options* opts,
                          nbrw_trajectory** out);
nbrw_status nbrw_trajectory_save(const nbrw_trajectory* traj, const char* path);
nbrw_status nbrw_trajectory_load(const char* path, nbrw_trajectory** out);
int nbrw_trajectory_equal(const nbrw_trajectory* a, const nbrw_trajectory* b);
long nbrw_trajectory_n(const nbrw_trajectory* traj);
int nbrw_trajectory_t(const nbrw_trajectory* traj);
double nbrw_trajectory_position(const nbrw_trajectory* traj, int rank, int time);
void nbrw_trajectory_free(nbrw_trajectory* traj);

/* ---- constant schedules ---- */
nbrw_status nbrw_schedule_from_eta(double eta, double alpha, nbrw_schedule** out);
nbrw_status nbrw_schedule_relaxed(double eta, double alpha, nbrw_schedule** out);
nbrw_status nbrw_schedule_parse(const char* json_text, nbrw_schedule** out);
nbrw_status nbrw_schedule_to_json(const nbrw_schedule* sched, char** out);
void nbrw_schedule_free(nbrw_schedule* sched);

/* ---- event evaluation and verification ---- */
nbrw_status nbrw_evaluate(const nbrw_trajectory* traj, const nbrw_schedule* sched, int t,
                          int m_sample, uint64_t sample_seed, double rho_probe,
                          nbrw_report** out);
nbrw_status nbrw_report_to_json(const nbrw_report* report, char** out);
nbrw_status nbrw_report_table(const nbrw_report* report, char** out);
void nbrw_report_free(nbrw_report* report);

/* Runs every checker (basic laws, the two propositions, the support
 * lemmas); *json_out receives the verdict list. Returns
 * NBRW_ERR_COUNTEREXAMPLE when any verdict carries a counterexample. */
nbrw_status nbrw_verify(const nbrw_trajectory* traj, const nbrw_schedule* sched, int t,
                        double rho_probe, char** json_out);

/* ---- synthetic fixtures ---- */
nbrw_status nbrw_build_fixture(const char* kind, const nbrw_schedule* sched, long n, int t,
                               uint64_t seed, nbrw_trajectory** traj_out, char** json_out);

/* ---- experiments ---- */
/* config_text: flat key=value lines or a JSON object (same keys). Writes
 * records.jsonl and summary.csv under out_dir. jobs <= 0 keeps the config's
 * value. */
nbrw_status nbrw_run_experiment(const char* config_text, const char* out_dir, int jobs);
nbrw_status nbrw_config_digest(const char* config_text, char** out);

/* summary.csv -> tidy per-figure CSVs under out_dir. */
nbrw_status nbrw_make_report(const char* summary_csv_path, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* NBRW_H */
