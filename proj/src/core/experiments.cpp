#include "core/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace nbrw {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (n_list.empty()) throw domain_error("n_list must be non-empty");
    for (long n : n_list) {
        if (n < 2) throw domain_error("N >= 2 required");
        const int ell = time_scale(n);
        const int t = static_cast<int>(std::ceil(t_mult * ell));
        if (t <= 4 * ell) throw domain_error("t rule must give t > 4*ell_N (t_mult > 4)");
    }
    if (replicates < 1) throw domain_error("replicates >= 1 required");
    if (m_sample < 1) throw domain_error("m_sample >= 1 required");
    for (long n : n_list)
        if (m_sample > n) throw domain_error("m_sample must not exceed N");
    if (!(rho_probe > 0.0)) throw domain_error("rho_probe > 0 required");
    if (jobs < 1) throw domain_error("jobs >= 1 required");
}

namespace {

std::vector<long> parse_long_list(const std::string& s) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stol(item));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    if (j.contains("law"))
        cfg.law = TailLaw(tail_family_from_string(j.at("law").at("family").get<std::string>()),
                          j.at("law").at("alpha").get<double>());
    if (j.contains("n_list")) cfg.n_list = j.at("n_list").get<std::vector<long>>();
    cfg.t_mult = j.value("t_mult", cfg.t_mult);
    cfg.replicates = j.value("replicates", cfg.replicates);
    cfg.m_sample = j.value("m_sample", cfg.m_sample);
    cfg.eta = j.value("eta", cfg.eta);
    if (j.contains("schedule"))
        cfg.schedule = schedule_from_json_text(j.at("schedule").dump());
    cfg.rho_probe = j.value("rho_probe", cfg.rho_probe);
    if (j.contains("r_grid")) cfg.r_grid = j.at("r_grid").get<std::vector<double>>();
    cfg.path_lambda = j.value("path_lambda", cfg.path_lambda);
    cfg.path_r = j.value("path_r", cfg.path_r);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.jobs = j.value("jobs", cfg.jobs);
    return cfg;
}

} // namespace

ExperimentConfig config_from_text(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            return config_from_json(json::parse(text));
        } catch (const json::exception& e) {
            throw parse_error(std::string("config: ") + e.what());
        }
    }
    // Flat key = value lines.
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string family = "pareto";
    double alpha = 1.0;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "law.family") family = val;
            else if (key == "law.alpha") alpha = std::stod(val);
            else if (key == "n_list") cfg.n_list = parse_long_list(val);
            else if (key == "t_mult") cfg.t_mult = std::stod(val);
            else if (key == "replicates") cfg.replicates = std::stoi(val);
            else if (key == "m_sample") cfg.m_sample = std::stoi(val);
            else if (key == "eta") cfg.eta = std::stod(val);
            else if (key == "rho_probe") cfg.rho_probe = std::stod(val);
            else if (key == "r_grid") cfg.r_grid = parse_double_list(val);
            else if (key == "path_lambda") cfg.path_lambda = std::stod(val);
            else if (key == "path_r") cfg.path_r = std::stod(val);
            else if (key == "seed") cfg.seed = std::stoull(val);
            else if (key == "out_dir") cfg.out_dir = val;
            else if (key == "jobs") cfg.jobs = std::stoi(val);
            else throw parse_error("config line " + std::to_string(lineno) + ": unknown key " + key);
        } catch (const std::invalid_argument&) {
            throw parse_error("config line " + std::to_string(lineno) + ": bad value for " + key);
        }
    }
    cfg.law = TailLaw(tail_family_from_string(family), alpha);
    return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    json j{{"law", {{"family", to_string(cfg.law.family)}, {"alpha", cfg.law.alpha}}},
           {"n_list", cfg.n_list},
           {"t_mult", cfg.t_mult},
           {"replicates", cfg.replicates},
           {"m_sample", cfg.m_sample},
           {"eta", cfg.eta},
           {"rho_probe", cfg.rho_probe},
           {"r_grid", cfg.r_grid},
           {"path_lambda", cfg.path_lambda},
           {"path_r", cfg.path_r},
           {"seed", cfg.seed},
           {"jobs", cfg.jobs}};
    if (cfg.schedule) j["schedule"] = json::parse(schedule_to_json_text(*cfg.schedule));
    return j.dump();
}

std::string config_digest(const ExperimentConfig& cfg) {
    // FNV-1a over the canonical JSON (out_dir and jobs excluded from the
    // canonical form would change results? jobs does not affect results, but
    // the digest documents the full invocation minus the output location).
    json j = json::parse(config_to_json_text(cfg));
    j.erase("jobs");
    const std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

double binomial_se(double p, long n) {
    if (n <= 0) return 0.0;
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

namespace {

ReplicateRecord reduce_one(const ExperimentConfig& cfg, const ConstantSchedule& sched, long n,
                           int replicate) {
    const int ell = time_scale(n);
    const int t = static_cast<int>(std::ceil(cfg.t_mult * ell));

    EngineConfig ecfg;
    ecfg.law = cfg.law;
    ecfg.n = n;
    ecfg.t = t;
    ecfg.seed = cfg.seed;
    ecfg.replicate = static_cast<std::uint64_t>(replicate);
    ecfg.keep_labels = false;
    const Trajectory traj = run_direct(ecfg);

    const auto sample = sample_uniform(traj, t, cfg.m_sample, cfg.seed);
    const auto profile = coalescence_profile(traj, sample, t);

    EventParams params;
    params.rho_probe = cfg.rho_probe;
    const EventReport rep = evaluate_events(traj, sched, t, sample, traj.scales.eps_ell, params);

    ReplicateRecord rec;
    rec.n = n;
    rec.replicate = replicate;
    rec.t = t;
    rec.ell = ell;
    rec.a = traj.scales.a;
    rec.eps_ell = traj.scales.eps_ell;
    rec.mrca_time = profile.mrca_time;
    rec.star_spread = profile.star_spread;
    rec.mrca_in_window =
        profile.mrca_time && *profile.mrca_time >= t - 2 * ell && *profile.mrca_time <= t - ell;
    rec.T = rep.T;
    rec.t_minus_T_over_ell = rep.T > 0 ? static_cast<double>(t - rep.T) / ell : -1.0;
    rec.sample_descends_from_t = rep.sample_descends_from_t;
    rec.l_over_n.reserve(cfg.r_grid.size());
    for (double r : cfg.r_grid) {
        const auto st = population_stats(traj, t, r, r);
        rec.l_over_n.push_back(static_cast<double>(st.L) / static_cast<double>(n));
    }
    rec.d_over_a_t = traj.diameter(t) / traj.scales.a;
    rec.d_over_a_t1 = traj.diameter(t - ell) / traj.scales.a;
    rec.a1 = rep.a1.is_true();
    rec.a2 = rep.a2.is_true();
    rec.a3 = rep.a3.is_true();
    rec.a4 = rep.a4.value;

    // Truncated-displacement statistic: does any lineage move >= x_N within
    // [t4, t] after discarding jumps > r x_N?
    {
        const double x_n = std::pow(static_cast<double>(n), cfg.path_lambda) * (1.0 + 1e-9);
        const double r_cut =
            (cfg.path_r > 0.0 ? cfg.path_r : cfg.path_lambda * std::min(1.0, cfg.law.alpha) / 96.0) *
            x_n;
        const int t4 = t - 4 * ell;
        std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
        std::vector<double> next(sum);
        bool violated = false;
        for (int s = t4; s < t && !violated; ++s) {
            for (long c = 1; c <= n; ++c) {
                const int p = traj.parent_of(static_cast<int>(c), s + 1);
                const int b = traj.branch_of(static_cast<int>(c), s + 1);
                const double x = traj.jump(p, b, s);
                next[static_cast<std::size_t>(c - 1)] =
                    sum[static_cast<std::size_t>(p - 1)] + (x <= r_cut ? x : 0.0);
                if (next[static_cast<std::size_t>(c - 1)] >= x_n) violated = true;
            }
            sum = next;
        }
        rec.path_violation = violated;
    }
    return rec;
}

} // namespace

std::vector<ReplicateRecord> run_replicates(
    const ExperimentConfig& cfg, const std::function<void(const ReplicateRecord&)>& sink) {
    cfg.validate();
    const ConstantSchedule sched =
        cfg.schedule ? *cfg.schedule : relaxed_schedule(cfg.eta, cfg.law.alpha);

    std::vector<ReplicateRecord> all;
    for (long n : cfg.n_list) {
        std::vector<ReplicateRecord> rung(static_cast<std::size_t>(cfg.replicates));
        std::atomic<int> counter{0};
        auto worker = [&]() {
            while (true) {
                const int rep = counter.fetch_add(1);
                if (rep >= cfg.replicates) break;
                rung[static_cast<std::size_t>(rep)] = reduce_one(cfg, sched, n, rep);
            }
        };
        const int threads = std::max(1, std::min(cfg.jobs, cfg.replicates));
        if (threads == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(threads));
            for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        for (auto& rec : rung) {
            if (sink) sink(rec);
            all.push_back(std::move(rec));
        }
    }
    return all;
}

namespace {

std::vector<long> rungs(const std::vector<ReplicateRecord>& records) {
    std::vector<long> ns;
    for (const auto& r : records)
        if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
    return ns;
}

int rung_t(const std::vector<ReplicateRecord>& records, long n) {
    for (const auto& r : records)
        if (r.n == n) return r.t;
    return 0;
}

} // namespace

std::vector<SummaryRow> coalescence_statistics(const std::vector<ReplicateRecord>& records) {
    std::vector<SummaryRow> rows;
    for (long n : rungs(records)) {
        long total = 0, in_window = 0, none_count = 0, with_mrca = 0, star = 0;
        long t_pos = 0, desc = 0;
        std::vector<long> bins(12, 0); // (t - MRCA)/ell in 0.25 bins over [0, 3)
        long binned = 0;
        std::vector<long> t_bins(12, 0); // (t - T)/ell, same binning
        int t_here = 0;
        for (const auto& r : records) {
            if (r.n != n) continue;
            t_here = r.t;
            ++total;
            if (r.mrca_in_window) ++in_window;
            if (!r.mrca_time) {
                ++none_count;
            } else {
                ++with_mrca;
                if (r.star_spread && *r.star_spread <= r.eps_ell) ++star;
                const double x = static_cast<double>(r.t - *r.mrca_time) / r.ell;
                if (x >= 0.0 && x < 3.0) {
                    ++bins[static_cast<std::size_t>(x / 0.25)];
                    ++binned;
                }
            }
            if (r.T > 0) {
                ++t_pos;
                if (r.sample_descends_from_t) ++desc;
                const double x = r.t_minus_T_over_ell;
                if (x >= 0.0 && x < 3.0) ++t_bins[static_cast<std::size_t>(x / 0.25)];
            }
        }
        auto push_freq = [&](const std::string& name, long hits, long denom) {
            SummaryRow row;
            row.n = n;
            row.t = t_here;
            row.statistic = name;
            row.count = denom;
            row.estimate = denom > 0 ? static_cast<double>(hits) / denom : 0.0;
            row.se = binomial_se(row.estimate, denom);
            rows.push_back(row);
        };
        push_freq("freq_mrca_in_window", in_window, total);
        push_freq("freq_mrca_none", none_count, total);
        push_freq("freq_star_spread_le_eps_ell", star, with_mrca);
        push_freq("freq_sample_descends_from_T", desc, t_pos);
        push_freq("freq_T_positive", t_pos, total);
        for (int b = 0; b < 12; ++b) {
            std::ostringstream name;
            name << "hist_mrca_age_" << 0.25 * b << "_" << 0.25 * (b + 1);
            push_freq(name.str(), bins[static_cast<std::size_t>(b)], binned);
        }
        for (int b = 0; b < 12; ++b) {
            std::ostringstream name;
            name << "hist_T_age_" << 0.25 * b << "_" << 0.25 * (b + 1);
            push_freq(name.str(), t_bins[static_cast<std::size_t>(b)], t_pos);
        }
    }
    return rows;
}

std::vector<SummaryRow> spatial_statistics(const std::vector<ReplicateRecord>& records,
                                           const std::vector<double>& r_grid) {
    std::vector<SummaryRow> rows;
    for (long n : rungs(records)) {
        std::vector<double> l_sum(r_grid.size(), 0.0), l_sumsq(r_grid.size(), 0.0);
        std::vector<long> d_ge(r_grid.size(), 0);
        std::vector<double> d_vals;
        long total = 0;
        int t_here = rung_t(records, n);
        for (const auto& r : records) {
            if (r.n != n) continue;
            ++total;
            for (std::size_t i = 0; i < r_grid.size() && i < r.l_over_n.size(); ++i) {
                l_sum[i] += r.l_over_n[i];
                l_sumsq[i] += r.l_over_n[i] * r.l_over_n[i];
            }
            for (std::size_t i = 0; i < r_grid.size(); ++i)
                if (r.d_over_a_t >= r_grid[i]) ++d_ge[i];
            d_vals.push_back(r.d_over_a_t);
        }
        for (std::size_t i = 0; i < r_grid.size(); ++i) {
            SummaryRow row;
            row.n = n;
            row.t = t_here;
            row.count = total;
            {
                std::ostringstream name;
                name << "mean_L_over_N_r_" << r_grid[i];
                row.statistic = name.str();
                row.estimate = total > 0 ? l_sum[i] / total : 0.0;
                const double var =
                    total > 1 ? std::max(0.0, l_sumsq[i] / total - row.estimate * row.estimate)
                              : 0.0;
                row.se = total > 0 ? std::sqrt(var / total) : 0.0;
                rows.push_back(row);
            }
            {
                SummaryRow row2;
                row2.n = n;
                row2.t = t_here;
                row2.count = total;
                std::ostringstream name;
                name << "p_d_ge_r_" << r_grid[i];
                row2.statistic = name.str();
                row2.estimate = total > 0 ? static_cast<double>(d_ge[i]) / total : 0.0;
                row2.se = binomial_se(row2.estimate, total);
                rows.push_back(row2);
            }
        }
        {
            SummaryRow row;
            row.n = n;
            row.t = t_here;
            row.count = total;
            row.statistic = "median_d_over_a";
            std::sort(d_vals.begin(), d_vals.end());
            row.estimate = d_vals.empty() ? 0.0 : d_vals[d_vals.size() / 2];
            row.se = 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

SummaryRow corollary_path_statistic(const std::vector<ReplicateRecord>& records) {
    SummaryRow row;
    row.statistic = "freq_path_move_ge_xN";
    long hits = 0;
    for (const auto& r : records) {
        row.n = r.n;
        row.t = r.t;
        ++row.count;
        if (r.path_violation) ++hits;
    }
    row.estimate = row.count > 0 ? static_cast<double>(hits) / row.count : 0.0;
    row.se = binomial_se(row.estimate, row.count);
    return row;
}

std::vector<SummaryRow> event_frequency_statistics(const std::vector<ReplicateRecord>& records) {
    std::vector<SummaryRow> rows;
    for (long n : rungs(records)) {
        long total = 0, a1 = 0, a2c = 0, a3c = 0, a4c = 0, path = 0;
        int t_here = rung_t(records, n);
        for (const auto& r : records) {
            if (r.n != n) continue;
            ++total;
            if (r.a1) ++a1;
            if (!r.a2) ++a2c;
            if (!r.a3) ++a3c;
            if (!r.a4.has_value() || !*r.a4) ++a4c; // undefined counted as failure
            if (r.path_violation) ++path;
        }
        auto push = [&](const std::string& name, long hits) {
            SummaryRow row;
            row.n = n;
            row.t = t_here;
            row.statistic = name;
            row.count = total;
            row.estimate = total > 0 ? static_cast<double>(hits) / total : 0.0;
            row.se = binomial_se(row.estimate, total);
            rows.push_back(row);
        };
        push("freq_a1", a1);
        push("freq_a2c", a2c);
        push("freq_a3c", a3c);
        push("freq_a4c_or_undefined", a4c);
        push("freq_path_move_ge_xN", path);
    }
    return rows;
}

std::string record_to_json_line(const ReplicateRecord& rec) {
    json j{{"n", rec.n},
           {"replicate", rec.replicate},
           {"t", rec.t},
           {"ell", rec.ell},
           {"a_N", rec.a},
           {"eps_ell", rec.eps_ell},
           {"mrca_time", rec.mrca_time ? json(*rec.mrca_time) : json("none")},
           {"star_spread", rec.star_spread ? json(*rec.star_spread) : json("none")},
           {"mrca_in_window", rec.mrca_in_window},
           {"T", rec.T},
           {"t_minus_T_over_ell", rec.t_minus_T_over_ell},
           {"sample_descends_from_T", rec.sample_descends_from_t},
           {"L_over_N", rec.l_over_n},
           {"d_over_a_t", rec.d_over_a_t},
           {"d_over_a_t1", rec.d_over_a_t1},
           {"A1", rec.a1},
           {"A2", rec.a2},
           {"A3", rec.a3},
           {"A4", rec.a4.has_value() ? json(*rec.a4) : json("undefined")},
           {"path_violation", rec.path_violation}};
    return j.dump();
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream os;
    os << "# nbrw-summary v1\n";
    os << "n,t,statistic,estimate,se,count\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.t << ',' << r.statistic << ',';
        os.precision(17);
        os << r.estimate << ',' << r.se << ',' << r.count << '\n';
    }
    return os.str();
}

std::vector<SummaryRow> summary_from_csv_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# nbrw-summary", 0) != 0)
        throw parse_error("summary CSV missing '# nbrw-summary v1' header");
    if (line != "# nbrw-summary v1")
        throw parse_error("summary CSV schema mismatch: got '" + line +
                          "', expected '# nbrw-summary v1'");
    std::getline(in, line); // column header
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string field;
        SummaryRow row;
        std::getline(ss, field, ',');
        row.n = std::stol(field);
        std::getline(ss, field, ',');
        row.t = std::stoi(field);
        std::getline(ss, row.statistic, ',');
        std::getline(ss, field, ',');
        row.estimate = std::stod(field);
        std::getline(ss, field, ',');
        row.se = std::stod(field);
        std::getline(ss, field, ',');
        row.count = std::stol(field);
        rows.push_back(row);
    }
    return rows;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentOutput out;
    std::ofstream records_file;
    const bool writing = !cfg.out_dir.empty();
    if (writing) {
        std::filesystem::create_directories(cfg.out_dir);
        out.records_path = cfg.out_dir + "/records.jsonl";
        records_file.open(out.records_path, std::ios::binary);
        if (!records_file) throw parse_error("cannot open " + out.records_path);
        json header{{"format", "nbrw-records"},
                    {"version", 1},
                    {"config", json::parse(config_to_json_text(cfg))},
                    {"digest", config_digest(cfg)}};
        records_file << header.dump() << '\n';
    }

    out.records = run_replicates(cfg, writing ? std::function<void(const ReplicateRecord&)>(
                                                    [&](const ReplicateRecord& rec) {
                                                        records_file << record_to_json_line(rec)
                                                                     << '\n';
                                                    })
                                              : std::function<void(const ReplicateRecord&)>());

    auto coal = coalescence_statistics(out.records);
    auto spat = spatial_statistics(out.records, cfg.r_grid);
    auto ev = event_frequency_statistics(out.records);
    out.summary.insert(out.summary.end(), coal.begin(), coal.end());
    out.summary.insert(out.summary.end(), spat.begin(), spat.end());
    out.summary.insert(out.summary.end(), ev.begin(), ev.end());

    if (writing) {
        out.summary_path = cfg.out_dir + "/summary.csv";
        std::ofstream sf(out.summary_path, std::ios::binary);
        sf << summary_csv(out.summary);
    }
    return out;
}

ReportFiles make_report(const std::vector<SummaryRow>& rows) {
    ReportFiles out;
    {
        std::ostringstream os;
        os << "# nbrw-report coalescence-hist v1\n";
        os << "n,t,bin_lo,bin_hi,freq,se,count\n";
        for (const auto& r : rows) {
            if (r.statistic.rfind("hist_mrca_age_", 0) != 0) continue;
            std::string rest = r.statistic.substr(std::string("hist_mrca_age_").size());
            const auto us = rest.find('_');
            os.precision(17);
            os << r.n << ',' << r.t << ',' << rest.substr(0, us) << ',' << rest.substr(us + 1)
               << ',' << r.estimate << ',' << r.se << ',' << r.count << '\n';
        }
        out.coalescence_hist_csv = os.str();
    }
    {
        std::ostringstream os;
        os << "# nbrw-report l-over-n v1\n";
        os << "n,t,r,mean,se,count\n";
        for (const auto& r : rows) {
            if (r.statistic.rfind("mean_L_over_N_r_", 0) != 0) continue;
            os.precision(17);
            os << r.n << ',' << r.t << ',' << r.statistic.substr(std::string("mean_L_over_N_r_").size())
               << ',' << r.estimate << ',' << r.se << ',' << r.count << '\n';
        }
        out.l_over_n_csv = os.str();
    }
    {
        std::ostringstream os;
        os << "# nbrw-report diameter-tail v1\n";
        os << "n,t,r,p,se,count\n";
        for (const auto& r : rows) {
            if (r.statistic.rfind("p_d_ge_r_", 0) != 0) continue;
            os.precision(17);
            os << r.n << ',' << r.t << ',' << r.statistic.substr(std::string("p_d_ge_r_").size())
               << ',' << r.estimate << ',' << r.se << ',' << r.count << '\n';
        }
        out.diameter_tail_csv = os.str();
    }
    return out;
}

} // namespace nbrw
