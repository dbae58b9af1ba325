#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/events.hpp"
#include "core/genealogy.hpp"
#include "core/schedule.hpp"

namespace nbrw {

struct ExperimentConfig {
    TailLaw law{TailFamily::pareto, 1.0};
    std::vector<long> n_list{256};
    double t_mult = 5.0; // t = ceil(t_mult * ell_N); must give t > 4 ell_N
    int replicates = 100;
    int m_sample = 4;
    double eta = 0.5;                          // relaxed-schedule eta when no schedule given
    std::optional<ConstantSchedule> schedule;  // explicit schedule overrides eta
    double rho_probe = 0.25; // operative rho for the record statistics at desk scale
    std::vector<double> r_grid{0.05, 0.5, 5.0};
    double path_lambda = 0.5;  // x_N = N^lambda (1+1e-9) for the path statistic
    double path_r = 0.0;       // 0 = lambda * min(1,alpha) / 96
    std::uint64_t seed = 1;
    std::string out_dir;
    int jobs = 1;

    void validate() const;
};

ExperimentConfig config_from_text(const std::string& text); // key=value or JSON
std::string config_to_json_text(const ExperimentConfig& cfg);
std::string config_digest(const ExperimentConfig& cfg); // stable hex digest

// Per-replicate reduction; trajectories are discarded once this is filled.
struct ReplicateRecord {
    long n = 0;
    int replicate = 0;
    int t = 0;
    int ell = 0;
    double a = 0.0;
    int eps_ell = 1;
    std::optional<int> mrca_time;
    std::optional<int> star_spread;
    bool mrca_in_window = false; // MRCA in [t - 2 ell, t - ell]
    int T = 0;                   // probe-rho record time
    double t_minus_T_over_ell = 0.0;
    bool sample_descends_from_t = false;
    std::vector<double> l_over_n;      // per r in r_grid, at time t
    double d_over_a_t = 0.0;
    double d_over_a_t1 = 0.0;
    bool a1 = false, a2 = false, a3 = false;
    std::optional<bool> a4;
    bool path_violation = false; // truncated displacement >= x_N somewhere in [t4, t]
};

struct SummaryRow {
    long n = 0;
    int t = 0;
    std::string statistic;
    double estimate = 0.0;
    double se = 0.0;
    long count = 0;
};

// Runs all replicates for every N in the ladder. Replicates use keyed
// substreams indexed by their replicate number, so results are independent of
// scheduling and of `jobs`; the sink (if any) is invoked in replicate order.
std::vector<ReplicateRecord> run_replicates(
    const ExperimentConfig& cfg,
    const std::function<void(const ReplicateRecord&)>& sink = nullptr);

std::vector<SummaryRow> coalescence_statistics(const std::vector<ReplicateRecord>& records);
std::vector<SummaryRow> spatial_statistics(const std::vector<ReplicateRecord>& records,
                                           const std::vector<double>& r_grid);
SummaryRow corollary_path_statistic(const std::vector<ReplicateRecord>& records);
std::vector<SummaryRow> event_frequency_statistics(const std::vector<ReplicateRecord>& records);

std::string record_to_json_line(const ReplicateRecord& rec);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> summary_from_csv_text(const std::string& text);

// Runs the experiment end to end and writes records.jsonl, summary.csv and an
// append-only manifest.jsonl under cfg.out_dir.
struct ExperimentOutput {
    std::vector<ReplicateRecord> records;
    std::vector<SummaryRow> summary;
    std::string records_path;
    std::string summary_path;
};
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Tidy per-figure CSVs from a summary table (report subcommand).
struct ReportFiles {
    std::string coalescence_hist_csv;
    std::string l_over_n_csv;
    std::string diameter_tail_csv;
};
ReportFiles make_report(const std::vector<SummaryRow>& rows);

double binomial_se(double p, long n);

} // namespace nbrw
