#include "core/events.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace nbrw {

using nlohmann::json;

namespace {

std::string jump_str(const JumpRef& j) {
    std::ostringstream os;
    os << "(k=" << j.rank << ",b=" << int(j.branch) << ",s=" << j.time << ",x=" << j.value << ")";
    return os.str();
}

int clip_lo(int s, int lo) { return std::max(s, lo); }
int clip_hi(int s, int hi) { return std::min(s, hi); }

void require_event_frame(const Trajectory& traj, int t) {
    const int ell = traj.scales.ell;
    if (t <= 4 * ell) throw domain_error("event evaluation requires t > 4*ell_N");
    if (t > traj.duration()) throw domain_error("trajectory does not cover time t");
}

} // namespace

std::vector<std::int32_t> ancestor_ranks(const Trajectory& traj, int from, int to) {
    const long n = traj.n_particles();
    std::vector<std::int32_t> anc(static_cast<std::size_t>(n));
    for (long j = 0; j < n; ++j) anc[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(j + 1);
    for (int s = from; s > to; --s)
        for (long j = 0; j < n; ++j)
            anc[static_cast<std::size_t>(j)] =
                static_cast<std::int32_t>(traj.parent_of(anc[static_cast<std::size_t>(j)], s));
    return anc;
}

std::vector<JumpRef> big_jumps(const Trajectory& traj, double rho, int s_lo, int s_hi) {
    const double threshold = rho * traj.scales.a;
    const long n = traj.n_particles();
    std::vector<JumpRef> out;
    s_lo = clip_lo(s_lo, 0);
    s_hi = clip_hi(s_hi, traj.duration() - 1);
    for (int s = s_lo; s <= s_hi; ++s)
        for (long k = 1; k <= n; ++k)
            for (int b = 1; b <= 2; ++b) {
                const double x = traj.jump(static_cast<int>(k), b, s);
                if (x > threshold)
                    out.push_back(JumpRef{static_cast<std::int32_t>(k),
                                          static_cast<std::uint8_t>(b), s, x});
            }
    return out;
}

std::vector<int> record_times(const Trajectory& traj, double rho, int s_lo, int s_hi) {
    const double threshold = rho * traj.scales.a;
    const int n = static_cast<int>(traj.n_particles());
    std::vector<int> out;
    s_lo = clip_lo(s_lo, 0);
    s_hi = clip_hi(s_hi, traj.duration() - 1);
    for (int s = s_lo; s <= s_hi; ++s) {
        const int p = traj.parent_of(n, s + 1);
        const int b = traj.branch_of(n, s + 1);
        if (traj.jump(p, b, s) > threshold) out.push_back(s);
    }
    return out;
}

std::vector<int> surpass_times(const Trajectory& traj, double rho, int s_lo, int s_hi) {
    const double threshold = rho * traj.scales.a;
    const long n = traj.n_particles();
    std::vector<int> out;
    s_lo = clip_lo(s_lo, 0);
    s_hi = clip_hi(s_hi, traj.duration() - 1);
    for (int s = s_lo; s <= s_hi; ++s) {
        const double leader = traj.leader(s);
        bool hit = false;
        for (long k = 1; k <= n && !hit; ++k) {
            const double pos = traj.position(static_cast<int>(k), s);
            for (int b = 1; b <= 2 && !hit; ++b) {
                const double x = traj.jump(static_cast<int>(k), b, s);
                if (x > threshold && pos + x > leader) hit = true;
            }
        }
        if (hit) out.push_back(s);
    }
    return out;
}

int last_record_time(const Trajectory& traj, double rho, int t) {
    require_event_frame(traj, t);
    const int ell = traj.scales.ell;
    const auto recs = record_times(traj, rho, t - 4 * ell, t - ell - 1);
    return recs.empty() ? 0 : recs.back() + 1;
}

PopulationStats population_stats(const Trajectory& traj, int n, double r, double eps) {
    if (n < 0 || n > traj.duration()) throw domain_error("time out of range");
    const auto& pos = traj.gens[n].positions;
    PopulationStats st;
    st.d = pos.back() - pos.front();
    const double a = traj.scales.a;
    // L = max{i : X_i <= X_1 + r a}; positions are sorted, so a prefix count.
    st.L = static_cast<int>(std::upper_bound(pos.begin(), pos.end(), pos.front() + r * a) -
                            pos.begin());
    // R = max{i : X_{N-i+1} >= X_N - eps a}; a suffix count.
    st.R = static_cast<int>(pos.end() -
                            std::lower_bound(pos.begin(), pos.end(), pos.back() - eps * a));
    st.z.resize(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) st.z[i] = pos.back() - pos[i];
    return st;
}

Landmarks landmark_times(const Trajectory& traj, const ConstantSchedule& sched, int t,
                         double rho_probe) {
    require_event_frame(traj, t);
    const int ell = traj.scales.ell;
    const double a = traj.scales.a;
    const int t2 = t - 2 * ell, t4 = t - 4 * ell;
    const double rho = rho_probe > 0.0 ? rho_probe : sched.rho;

    Landmarks lm;
    for (int s = t2 + 1; s <= t; ++s) {
        const auto& pos = traj.gens[s].positions;
        if (pos[pos.size() - 1] > pos[pos.size() - 2] + 2.0 * sched.c3 * a) {
            lm.tau1 = s;
            break;
        }
    }
    for (int s = t2; s <= t; ++s)
        if (traj.diameter(s) <= 1.5 * sched.c4 * a) {
            lm.tau2 = s;
            break;
        }
    const auto surps = surpass_times(traj, rho, t4, traj.duration() - 1);
    const std::set<int> surp_set(surps.begin(), surps.end());
    const int lo = std::max(t4, t2 - static_cast<int>(std::ceil(sched.c5 * ell)));
    std::optional<int> tau3;
    for (int s = t2; s >= lo; --s) {
        if (surp_set.count(s)) break;
        tau3 = s;
    }
    lm.tau3 = tau3;
    return lm;
}

std::vector<int> stopping_times(const Trajectory& traj, const ConstantSchedule& sched, int t,
                                double rho_probe) {
    require_event_frame(traj, t);
    const int ell = traj.scales.ell;
    const int t1 = t - ell, t2 = t - 2 * ell, t4 = t - 4 * ell;
    const double rho = rho_probe > 0.0 ? rho_probe : sched.rho;
    const int margin = static_cast<int>(std::ceil(sched.delta * ell));
    const auto recs = record_times(traj, rho, t4, traj.duration() - 1);

    std::vector<int> out;
    int prev = t2 + margin - 1; // T_0
    while (true) {
        int tn = t1;
        for (int s : recs)
            if (s >= prev && s <= t1 - margin - 1) {
                tn = s + 1;
                break;
            }
        out.push_back(tn);
        if (tn == t1) break;
        prev = tn;
    }
    return out;
}

MediumJumpDiagnostics medium_jump_diagnostics(const Trajectory& traj,
                                              const ConstantSchedule& sched, int t, int n,
                                              double delta1, double delta2, double rho_probe) {
    require_event_frame(traj, t);
    if (n < 1) throw domain_error("stopping-time index n >= 1 required");
    if (!(delta1 > 0.0 && delta1 < sched.delta / 8.0))
        throw domain_error("delta1 must lie in (0, delta/8)");
    if (!(delta2 > 0.0 && delta2 < sched.delta * sched.delta))
        throw domain_error("delta2 must lie in (0, delta^2)");
    const int ell = traj.scales.ell;
    const int t1 = t - ell, t2 = t - 2 * ell;
    const auto ts = stopping_times(traj, sched, t, rho_probe);
    const int tn = n <= static_cast<int>(ts.size()) ? ts[static_cast<std::size_t>(n - 1)] : t1;

    MediumJumpDiagnostics diag;
    diag.theta = static_cast<double>(t1 - tn) / ell;
    diag.a_hat = traj.law.h_inverse(
        delta1 * std::pow(static_cast<double>(traj.n_particles()), diag.theta) * ell);
    const double threshold = delta2 * diag.a_hat;
    const long nN = traj.n_particles();
    for (int s = t2; s <= std::min(t - 1, traj.duration() - 1); ++s)
        for (long k = 1; k <= nN; ++k)
            for (int b = 1; b <= 2; ++b) {
                const double x = traj.jump(static_cast<int>(k), b, s);
                if (x > threshold)
                    diag.medium.push_back(
                        JumpRef{static_cast<std::int32_t>(k), static_cast<std::uint8_t>(b), s, x});
            }
    return diag;
}

namespace {

struct Frame {
    int t, t1, t2, t3, t4, ell;
    long n;
    double a;
    double big; // rho_used * a
};

// C3 by a forward sweep. lastbig[r] tracks the most recent time s' >= t4 at
// which the ancestral path of the current particle r contains a big jump; a
// violation is a surviving offspring whose incoming jump is big while the
// parent's path already carries a big jump within the last ell steps.
bool check_c3(const Trajectory& traj, const Frame& f, std::string& witness) {
    const long n = f.n;
    constexpr int kNever = -(1 << 28);
    std::vector<int> lastbig(static_cast<std::size_t>(n), kNever);
    std::vector<int> next(static_cast<std::size_t>(n));
    bool ok = true;
    for (int s = f.t4; s <= f.t - 1; ++s) {
        for (long c = 1; c <= n; ++c) {
            const int p = traj.parent_of(static_cast<int>(c), s + 1);
            const int b = traj.branch_of(static_cast<int>(c), s + 1);
            const double x = traj.jump(p, b, s);
            const int lb = lastbig[static_cast<std::size_t>(p - 1)];
            if (x > f.big) {
                if (ok && lb >= std::max(s - f.ell, f.t4)) {
                    std::ostringstream os;
                    os << "big jump at s=" << lb << " followed within ell by (k=" << p
                       << ",b=" << b << ",s=" << s << ",x=" << x << ")";
                    witness = os.str();
                    ok = false;
                }
                next[static_cast<std::size_t>(c - 1)] = s;
            } else {
                next[static_cast<std::size_t>(c - 1)] = lb;
            }
        }
        lastbig = next;
    }
    return ok;
}

// C4 by the same sweep: with non-negative jumps the maximal truncated path
// sum over all ancestor/descendant pairs equals the maximal full sum from
// the window start t4.
bool check_c4(const Trajectory& traj, const Frame& f, double c1, std::string& witness) {
    const long n = f.n;
    std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
    std::vector<double> next(static_cast<std::size_t>(n));
    double worst = 0.0;
    int worst_s = f.t4;
    long worst_k = 1;
    for (int s = f.t4; s <= f.t - 1; ++s) {
        for (long c = 1; c <= n; ++c) {
            const int p = traj.parent_of(static_cast<int>(c), s + 1);
            const int b = traj.branch_of(static_cast<int>(c), s + 1);
            const double x = traj.jump(p, b, s);
            const double v = sum[static_cast<std::size_t>(p - 1)] + (x <= f.big ? x : 0.0);
            next[static_cast<std::size_t>(c - 1)] = v;
            if (v > worst) {
                worst = v;
                worst_s = s + 1;
                worst_k = c;
            }
        }
        sum = next;
    }
    std::ostringstream os;
    os << "max truncated displacement " << worst << " at (k=" << worst_k << ",s=" << worst_s
       << "), bound " << c1 * f.a;
    witness = os.str();
    return worst <= c1 * f.a;
}

} // namespace

EventReport evaluate_events(const Trajectory& traj, const ConstantSchedule& sched, int t,
                            const std::vector<std::int32_t>& sample, int eps_ell,
                            const EventParams& params) {
    require_event_frame(traj, t);
    const long n = traj.n_particles();
    if (sample.empty()) throw domain_error("sample must be non-empty");
    for (auto r : sample)
        if (r < 1 || r > n) throw domain_error("sample rank out of range");
    if (eps_ell < 1 || eps_ell > traj.scales.ell)
        throw domain_error("eps_ell must lie in [1, ell]");

    Frame f;
    f.t = t;
    f.ell = traj.scales.ell;
    f.t1 = t - f.ell;
    f.t2 = t - 2 * f.ell;
    f.t3 = t - 3 * f.ell;
    f.t4 = t - 4 * f.ell;
    f.n = n;
    f.a = traj.scales.a;
    const double rho_used = params.rho_probe > 0.0 ? params.rho_probe : sched.rho;
    f.big = rho_used * f.a;

    EventReport rep;
    rep.t = t;
    rep.t1 = f.t1;
    rep.t2 = f.t2;
    rep.t3 = f.t3;
    rep.t4 = f.t4;
    rep.ell = f.ell;
    rep.a = f.a;
    rep.rho_used = rho_used;
    rep.big_threshold = f.big;
    rep.eps_ell = eps_ell;
    rep.sample = sample;

    rep.big_jump_set = big_jumps(traj, rho_used, f.t4, f.t - 1);
    rep.record_set = record_times(traj, rho_used, f.t4, f.t - 1);
    rep.surpass_set = surpass_times(traj, rho_used, f.t4, f.t - 1);
    {
        int T = 0;
        for (int s : rep.record_set)
            if (s <= f.t1 - 1) T = s + 1;
        rep.T = T;
    }
    rep.landmarks = landmark_times(traj, sched, t, rho_used);
    rep.diameter_series.reserve(static_cast<std::size_t>(t - f.t4 + 1));
    for (int s = f.t4; s <= t; ++s) rep.diameter_series.push_back(traj.diameter(s));

    const int margin = static_cast<int>(std::ceil(sched.delta * f.ell));
    const double n_pow_gamma = std::pow(static_cast<double>(n), 1.0 - sched.gamma);
    const double n_pow_delta = std::pow(static_cast<double>(n), 1.0 - sched.delta);

    // ---- A1 -----------------------------------------------------------
    {
        const auto st = population_stats(traj, t, sched.eta, sched.eta);
        rep.a1.value = st.L >= static_cast<double>(n) - n_pow_gamma;
        rep.a1.witness = "L_{eta,N}(t)=" + std::to_string(st.L);
    }

    // ---- sample lineages (rank of each sampled particle at every time) --
    const int m_sample = static_cast<int>(sample.size());
    std::vector<std::vector<int>> line(static_cast<std::size_t>(m_sample));
    for (int i = 0; i < m_sample; ++i) {
        auto& v = line[static_cast<std::size_t>(i)];
        v.assign(static_cast<std::size_t>(t - f.t4 + 1), 0);
        int r = sample[static_cast<std::size_t>(i)];
        v[static_cast<std::size_t>(t - f.t4)] = r;
        for (int s = t; s > f.t4; --s) {
            r = traj.parent_of(r, s);
            v[static_cast<std::size_t>(s - 1 - f.t4)] = r;
        }
    }
    auto rank_at = [&](int i, int s) { return line[static_cast<std::size_t>(i)][static_cast<std::size_t>(s - f.t4)]; };

    auto scan_a2 = [&](int w_lo, int w_hi, EventFlag& flag) {
        flag.value = false;
        flag.witness = "no admissible T in [" + std::to_string(w_lo) + "," + std::to_string(w_hi) + "]";
        for (int T = std::max(w_lo, f.t4); T <= w_hi && T + eps_ell <= t; ++T) {
            bool all_leader = true;
            for (int i = 0; i < m_sample && all_leader; ++i)
                if (rank_at(i, T) != n) all_leader = false;
            if (!all_leader) continue;
            bool distinct = true;
            for (int i = 0; i < m_sample && distinct; ++i)
                for (int j = i + 1; j < m_sample && distinct; ++j)
                    if (rank_at(i, T + eps_ell) == rank_at(j, T + eps_ell)) distinct = false;
            if (distinct) {
                flag.value = true;
                flag.witness = "T=" + std::to_string(T);
                return;
            }
        }
    };

    // ---- A2 / A2' -------------------------------------------------------
    scan_a2(f.t2 + margin, f.t1 - margin, rep.a2);
    scan_a2(f.t2 + static_cast<int>(std::ceil(params.s1 * f.ell)),
            f.t2 + static_cast<int>(std::ceil(params.s2 * f.ell)), rep.a2prime);

    // ---- A3 --------------------------------------------------------------
    const bool t_in_window = rep.T >= f.t2 + margin && rep.T <= f.t1 - margin;
    if (rep.T > 0) {
        const auto anc = ancestor_ranks(traj, t, rep.T);
        long tribe = 0;
        for (long j = 0; j < n; ++j)
            if (anc[static_cast<std::size_t>(j)] == n) ++tribe;
        rep.tribe_size_t = tribe;
        bool sample_desc = m_sample > 0;
        for (int i = 0; i < m_sample; ++i)
            if (rank_at(i, rep.T) != n) sample_desc = false;
        rep.sample_descends_from_t = sample_desc;
        rep.a3.value = t_in_window && static_cast<double>(tribe) >= static_cast<double>(n) - n_pow_gamma;
        rep.a3.witness = "T=" + std::to_string(rep.T) + ", |N_{N,T}(t)|=" + std::to_string(tribe);
    } else {
        rep.a3.value = false;
        rep.a3.witness = "T=0 (no record in [t4, t1-1])";
    }

    // ---- A4 --------------------------------------------------------------
    const double nu = params.nu > 0.0 ? params.nu : sched.nu;
    if (rep.T == 0) {
        rep.a4.value = std::nullopt;
        rep.a4.witness = "undefined: T=0";
    } else {
        const int teps = rep.T + eps_ell;
        const auto anc_eps = ancestor_ranks(traj, teps, rep.T); // rank at T of each time-teps particle
        const auto anc_t = ancestor_ranks(traj, t, teps);       // rank at teps of each time-t particle
        std::vector<long> d_count(static_cast<std::size_t>(n), 0);
        for (long j = 0; j < n; ++j) ++d_count[static_cast<std::size_t>(anc_t[static_cast<std::size_t>(j)] - 1)];
        long max_d = 0;
        long arg = 0;
        for (long i = 0; i < n; ++i)
            if (anc_eps[static_cast<std::size_t>(i)] == n && d_count[static_cast<std::size_t>(i)] > max_d) {
                max_d = d_count[static_cast<std::size_t>(i)];
                arg = i + 1;
            }
        rep.a4.value = static_cast<double>(max_d) <= nu * static_cast<double>(n);
        std::ostringstream os;
        os << "max D_i=" << max_d << " at i=" << arg << " (nu*N=" << nu * static_cast<double>(n)
           << ")";
        rep.a4.witness = os.str();
    }

    // ---- B1 / B2 ---------------------------------------------------------
    {
        const auto st1 = population_stats(traj, f.t1, sched.c1, sched.c1);
        const int R = st1.R;
        rep.r_count_c1_t1 = R;
        const auto& pos1 = traj.gens[f.t1].positions;
        bool ok = R <= std::min(static_cast<double>(n - 1), 2.0 * n_pow_delta);
        std::string why = "R_{c1,N}(t1)=" + std::to_string(R);
        if (ok && R < n) {
            if (!(pos1[static_cast<std::size_t>(n - R - 1)] <=
                  pos1[static_cast<std::size_t>(n - R)] - sched.c2 * f.a)) {
                ok = false;
                why += ", no c2 a_N gap behind the tribe";
            }
        }
        if (ok && !t_in_window) {
            ok = false;
            why += ", T outside [t2+ceil(delta ell), t1-ceil(delta ell)]";
        }
        if (ok) {
            const auto anc1 = ancestor_ranks(traj, f.t1, rep.T);
            for (long j = 1; j <= n && ok; ++j) {
                const bool in_tribe = anc1[static_cast<std::size_t>(j - 1)] == n;
                if (in_tribe != (j > n - R)) {
                    ok = false;
                    why += ", N_{N,T}(t1) != top-R ranks (rank " + std::to_string(j) + ")";
                }
            }
        }
        rep.b1.value = ok;
        rep.b1.witness = why;

        const auto anc_t1 = ancestor_ranks(traj, t, f.t1);
        long outside = 0;
        for (long j = 0; j < n; ++j)
            if (anc_t1[static_cast<std::size_t>(j)] <= n - R) ++outside;
        rep.b2.value = static_cast<double>(outside) <= n_pow_gamma;
        rep.b2.witness = "sum |N_{j,t1}(t)| over j<=N-R = " + std::to_string(outside);
    }

    // ---- C1 ---------------------------------------------------------------
    rep.c[0].value = rep.landmarks.tau1.has_value() && *rep.landmarks.tau1 <= f.t1;
    rep.c[0].witness = rep.landmarks.tau1 ? "tau1=" + std::to_string(*rep.landmarks.tau1)
                                          : "no 2 c3 a_N gap by time t";

    // ---- C2 ----------------------------------------------------------------
    {
        rep.c[1].value = true;
        rep.c[1].witness = "";
        for (int s = f.t3; s <= f.t - 1 && rep.c[1].is_true(); ++s) {
            const double leader = traj.leader(s);
            for (long k = 1; k <= n && rep.c[1].is_true(); ++k) {
                const double z = leader - traj.position(static_cast<int>(k), s);
                if (z < sched.c3 * f.a) continue;
                for (int b = 1; b <= 2; ++b) {
                    const double x = traj.jump(static_cast<int>(k), b, s);
                    if (x > z - 2.0 * sched.c2 * f.a && x <= z + 2.0 * sched.c2 * f.a) {
                        rep.c[1].value = false;
                        rep.c[1].witness =
                            jump_str(JumpRef{static_cast<std::int32_t>(k),
                                             static_cast<std::uint8_t>(b), s, x}) +
                            " lands within 2 c2 a_N of the leader gap Z=" + std::to_string(z);
                        break;
                    }
                }
            }
        }
    }

    // ---- C3 / C4 -----------------------------------------------------------
    rep.c[2].value = check_c3(traj, f, rep.c[2].witness);
    rep.c[3].value = check_c4(traj, f, sched.c1, rep.c[3].witness);

    // ---- C5 ----------------------------------------------------------------
    {
        rep.c[4].value = true;
        std::vector<int> per_time(static_cast<std::size_t>(f.t - f.t4), 0);
        for (const auto& bj : rep.big_jump_set) {
            auto& cnt = per_time[static_cast<std::size_t>(bj.time - f.t4)];
            if (++cnt > 1 && rep.c[4].is_true()) {
                rep.c[4].value = false;
                rep.c[4].witness = "two big jumps at s=" + std::to_string(bj.time);
            }
        }
    }

    // ---- C6 ----------------------------------------------------------------
    {
        rep.c[5].value = true;
        for (const auto& bj : rep.big_jump_set) {
            const bool dead1 = bj.time >= f.t2 && bj.time <= f.t2 + margin;
            const bool dead2 = bj.time >= f.t1 - margin && bj.time <= f.t1 + margin;
            if (dead1 || dead2) {
                rep.c[5].value = false;
                rep.c[5].witness = jump_str(bj) + " inside a forbidden window";
                break;
            }
        }
    }

    // ---- C7 ----------------------------------------------------------------
    rep.c[6].value = static_cast<double>(rep.big_jump_set.size()) <= sched.K;
    rep.c[6].witness = "|B_N|=" + std::to_string(rep.big_jump_set.size());

    // ---- D1 ----------------------------------------------------------------
    {
        rep.d[0].value = true;
        for (int s = f.t3; s <= f.t - 1 && rep.d[0].is_true(); ++s) {
            const double leader = traj.leader(s);
            for (long k = 1; k <= n && rep.d[0].is_true(); ++k) {
                const double z = leader - traj.position(static_cast<int>(k), s);
                if (z < sched.c4 * f.a) continue;
                for (int b = 1; b <= 2; ++b) {
                    const double x = traj.jump(static_cast<int>(k), b, s);
                    if (x > z - 3.0 * sched.c3 * f.a && x <= z + 3.0 * sched.c3 * f.a) {
                        rep.d[0].value = false;
                        rep.d[0].witness =
                            jump_str(JumpRef{static_cast<std::int32_t>(k),
                                             static_cast<std::uint8_t>(b), s, x}) +
                            " lands within 3 c3 a_N of the leader gap Z=" + std::to_string(z);
                        break;
                    }
                }
            }
        }
    }

    // ---- D2 ----------------------------------------------------------------
    {
        // For every integer s in [t3, t1 - c5 ell]: a jump > 2 c4 a_N in
        // [s, s + c5 ell]. Precompute, per time, whether such a jump exists.
        const double w = sched.c5 * f.ell;
        const int wlen = static_cast<int>(std::floor(w));
        std::vector<char> has(static_cast<std::size_t>(f.t - f.t4), 0);
        for (int s = f.t4; s <= f.t - 1; ++s) {
            for (long k = 1; k <= n && !has[static_cast<std::size_t>(s - f.t4)]; ++k)
                for (int b = 1; b <= 2; ++b)
                    if (traj.jump(static_cast<int>(k), b, s) > 2.0 * sched.c4 * f.a) {
                        has[static_cast<std::size_t>(s - f.t4)] = 1;
                        break;
                    }
        }
        rep.d[1].value = true;
        const int s_hi = static_cast<int>(std::floor(static_cast<double>(f.t1) - w));
        for (int s = f.t3; s <= s_hi; ++s) {
            bool found = false;
            for (int u = s; u <= std::min(s + wlen, f.t - 1) && !found; ++u)
                if (has[static_cast<std::size_t>(u - f.t4)]) found = true;
            if (!found) {
                rep.d[1].value = false;
                rep.d[1].witness = "window [" + std::to_string(s) + "," +
                                   std::to_string(s + wlen) + "] has no jump > 2 c4 a_N";
                break;
            }
        }
    }

    // ---- D3 ----------------------------------------------------------------
    {
        rep.d[2].value = false;
        rep.d[2].witness = "no jump > 2 c6 a_N in [t2, t2+ceil(ell/2)]";
        const int hi = std::min(f.t2 + (f.ell + 1) / 2, f.t - 1);
        for (int s = f.t2; s <= hi && !rep.d[2].is_true(); ++s)
            for (long k = 1; k <= n && !rep.d[2].is_true(); ++k)
                for (int b = 1; b <= 2; ++b) {
                    const double x = traj.jump(static_cast<int>(k), b, s);
                    if (x > 2.0 * sched.c6 * f.a) {
                        rep.d[2].value = true;
                        rep.d[2].witness = jump_str(
                            JumpRef{static_cast<std::int32_t>(k), static_cast<std::uint8_t>(b), s, x});
                        break;
                    }
                }
    }

    // ---- D4 ----------------------------------------------------------------
    {
        rep.d[3].value = true;
        const int lo_raw = f.t2 - static_cast<int>(std::ceil(sched.c5 * f.ell));
        const int lo = std::max(lo_raw, f.t4);
        if (lo_raw < f.t4)
            rep.d[3].witness = "look-back clipped at t4; ";
        for (int s = lo; s <= f.t2 && rep.d[3].is_true(); ++s)
            for (long k = 1; k <= n && rep.d[3].is_true(); ++k)
                for (int b = 1; b <= 2; ++b) {
                    const double x = traj.jump(static_cast<int>(k), b, s);
                    if (x > sched.c6 * f.a) {
                        rep.d[3].value = false;
                        rep.d[3].witness += jump_str(JumpRef{static_cast<std::int32_t>(k),
                                                             static_cast<std::uint8_t>(b), s, x}) +
                                            " exceeds c6 a_N shortly before t2";
                        break;
                    }
                }
    }

    // ---- D5 ----------------------------------------------------------------
    {
        rep.d[4].value = true;
        if (rep.landmarks.tau2) {
            const int lo = *rep.landmarks.tau2;
            const int hi = std::min(lo + static_cast<int>(std::floor(sched.c5 * f.ell)), f.t - 1);
            for (int s = lo; s <= hi && rep.d[4].is_true(); ++s)
                for (long k = 1; k <= n && rep.d[4].is_true(); ++k)
                    for (int b = 1; b <= 2; ++b) {
                        const double x = traj.jump(static_cast<int>(k), b, s);
                        if (x > 2.0 * sched.c4 * f.a && x <= (2.0 * sched.c4 + 3.0 * sched.c3) * f.a) {
                            rep.d[4].value = false;
                            rep.d[4].witness =
                                jump_str(JumpRef{static_cast<std::int32_t>(k),
                                                 static_cast<std::uint8_t>(b), s, x}) +
                                " in the forbidden band after tau2=" + std::to_string(lo);
                            break;
                        }
                    }
        } else {
            rep.d[4].witness = "tau2 undefined in window (vacuous)";
        }
    }

    // ---- G ------------------------------------------------------------------
    {
        const int w_lo = f.t2 + static_cast<int>(std::ceil(params.s1 * f.ell));
        const int w_hi = f.t2 + static_cast<int>(std::ceil(params.s2 * f.ell)) - 1;
        const double big_prime = (params.r_g + 3.0) * f.a;
        int count = 0;
        JumpRef witness{};
        bool others_small = true;
        std::string offender;
        for (int s = f.t3; s <= std::min(f.t1 - 1, f.t - 1); ++s)
            for (long k = 1; k <= n; ++k)
                for (int b = 1; b <= 2; ++b) {
                    const double x = traj.jump(static_cast<int>(k), b, s);
                    const bool in_prime_window = s >= w_lo && s <= w_hi;
                    if (in_prime_window && x > big_prime) {
                        ++count;
                        witness = JumpRef{static_cast<std::int32_t>(k),
                                          static_cast<std::uint8_t>(b), s, x};
                    } else if (x > f.a && others_small) {
                        others_small = false;
                        offender = jump_str(JumpRef{static_cast<std::int32_t>(k),
                                                    static_cast<std::uint8_t>(b), s, x});
                    }
                }
        rep.g.value = count == 1 && others_small;
        if (rep.g.is_true())
            rep.g.witness = jump_str(witness);
        else if (count != 1)
            rep.g.witness = "|B_N'|=" + std::to_string(count);
        else
            rep.g.witness = "jump above a_N outside B_N': " + offender;
    }

    return rep;
}

std::vector<std::pair<std::string, const EventFlag*>> EventReport::flags() const {
    std::vector<std::pair<std::string, const EventFlag*>> out;
    out.emplace_back("A1", &a1);
    out.emplace_back("A2", &a2);
    out.emplace_back("A2prime", &a2prime);
    out.emplace_back("A3", &a3);
    out.emplace_back("A4", &a4);
    out.emplace_back("B1", &b1);
    out.emplace_back("B2", &b2);
    for (int i = 0; i < 7; ++i) out.emplace_back("C" + std::to_string(i + 1), &c[i]);
    for (int i = 0; i < 5; ++i) out.emplace_back("D" + std::to_string(i + 1), &d[i]);
    out.emplace_back("G", &g);
    return out;
}

namespace {

json flag_json(const EventFlag& f) {
    json j;
    if (f.value.has_value())
        j["value"] = *f.value;
    else
        j["value"] = "undefined";
    j["witness"] = f.witness;
    return j;
}

json jumps_json(const std::vector<JumpRef>& js) {
    json arr = json::array();
    for (const auto& j : js)
        arr.push_back(json{{"k", j.rank}, {"b", j.branch}, {"s", j.time}, {"x", j.value}});
    return arr;
}

} // namespace

std::string event_report_to_json(const EventReport& rep) {
    json j;
    j["t"] = rep.t;
    j["t1"] = rep.t1;
    j["t2"] = rep.t2;
    j["t3"] = rep.t3;
    j["t4"] = rep.t4;
    j["ell"] = rep.ell;
    j["a_N"] = rep.a;
    j["rho_used"] = rep.rho_used;
    j["big_threshold"] = rep.big_threshold;
    j["eps_ell"] = rep.eps_ell;
    j["sample"] = rep.sample;
    j["T"] = rep.T;
    j["tau1"] = rep.landmarks.tau1 ? json(*rep.landmarks.tau1) : json("none");
    j["tau2"] = rep.landmarks.tau2 ? json(*rep.landmarks.tau2) : json("none");
    j["tau3"] = rep.landmarks.tau3 ? json(*rep.landmarks.tau3) : json("none");
    j["big_jumps"] = jumps_json(rep.big_jump_set);
    j["record_times"] = rep.record_set;
    j["surpass_times"] = rep.surpass_set;
    j["diameter_series"] = rep.diameter_series;
    j["tribe_size_t"] = rep.tribe_size_t;
    j["R_c1_t1"] = rep.r_count_c1_t1;
    j["sample_descends_from_T"] = rep.sample_descends_from_t;
    json flags;
    for (const auto& [name, flag] : rep.flags()) flags[name] = flag_json(*flag);
    j["events"] = flags;
    return j.dump(2);
}

std::string event_report_table(const EventReport& rep) {
    std::ostringstream os;
    os << "event     value      witness\n";
    for (const auto& [name, flag] : rep.flags()) {
        std::string v = !flag->value.has_value() ? "undefined" : (*flag->value ? "true" : "false");
        os << name;
        for (std::size_t i = name.size(); i < 10; ++i) os << ' ';
        os << v;
        for (std::size_t i = v.size(); i < 11; ++i) os << ' ';
        os << flag->witness << '\n';
    }
    os << "T" << std::string(9, ' ') << rep.T << '\n';
    return os.str();
}

} // namespace nbrw
