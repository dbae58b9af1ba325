#include "core/schedule.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace nbrw {

using nlohmann::json;

namespace {

bool is_normal_positive(double x) {
    return std::isfinite(x) && x >= std::numeric_limits<double>::min();
}

} // namespace

void ConstantSchedule::validate_chain() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("eta must lie in (0, 1]");
    if (!(0.0 < gamma && gamma < delta && delta < rho))
        throw domain_error("need 0 < gamma < delta < rho");
    if (!(10.0 * rho < c1)) throw domain_error("need 10*rho < c1");
    const double cs[6] = {c1, c2, c3, c4, c5, c6};
    for (int j = 0; j < 5; ++j)
        if (!(10.0 * cs[j] < cs[j + 1] && cs[j + 1] < eta))
            throw domain_error("need 10*c_j < c_{j+1} < eta along the chain");
    if (!(c1 < eta)) throw domain_error("need c1 < eta");
    if (!(K > std::pow(rho, -alpha))) throw domain_error("need K > rho^-alpha");
    if (!(nu > 0.0)) throw domain_error("need nu > 0");
}

ScheduleDerivationLog schedule_derivation_log(double eta, double alpha) {
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("eta must lie in (0, 1]");
    if (!(alpha > 0.0)) throw domain_error("alpha must be positive");

    const double amax = std::max(1.0, alpha);
    const double amin = std::min(1.0, alpha);
    const double lg2 = std::log10(2.0);
    const double leta = std::log10(eta);

    ScheduleDerivationLog d;
    d.eta = eta;
    d.alpha = alpha;
    d.log10_c6 = 2.0 * leta;
    d.log10_c5 = 6.0 * amax * leta;
    d.log10_c4 = (4.0 / amin) * d.log10_c5;

    // Halving search for the largest cap / 2^k (k >= 1) meeting the curvature
    // condition (1 - a x)^alpha >= 1 - 2 a alpha x at x = c / base. At the
    // magnitudes the chain produces, x is far below any representable scale
    // and the condition holds identically; it is checked exactly whenever x
    // is representable.
    auto search = [&](double cap_log, double base_log, double mult_in, double mult_out) {
        for (int k = 1; k < 64; ++k) {
            const double c_log = cap_log - k * lg2;
            const double x_log = std::log10(mult_in) + c_log - base_log;
            if (x_log < -18.0) return c_log; // condition true to first order
            const double x = std::pow(10.0, x_log);
            if (x < 1.0 &&
                std::pow(1.0 - x, alpha) >=
                    1.0 - mult_out * alpha * std::pow(10.0, c_log - base_log))
                return c_log;
        }
        throw scale_infeasible_error("halving search failed to satisfy the curvature condition");
    };

    d.log10_c3 = search(4.0 * amax * d.log10_c4, d.log10_c4, 6.0, 12.0);
    d.log10_c2 = search(4.0 * amax * d.log10_c3, d.log10_c3, 4.0, 8.0);
    d.log10_c1 = 2.0 * d.log10_c2;
    d.log10_rho = d.log10_c1 + 2.0 * std::log10(amin) - std::log10(100.0 * alpha);
    d.log10_delta = (alpha + 1.0) * d.log10_rho;
    d.log10_gamma = d.log10_delta - lg2;
    d.log10_K = -(alpha + 1.0) * d.log10_rho;

    const double cond = std::min(
        std::pow(std::pow(2.0, alpha + 2.0) * std::log(1000.0 / eta), -1.0 / alpha),
        eta / (1000.0 * std::pow(2.0, alpha)));
    d.eta_condition_holds = eta * eta < cond;
    return d;
}

ConstantSchedule schedule_from_eta(double eta, double alpha) {
    const ScheduleDerivationLog d = schedule_derivation_log(eta, alpha);

    ConstantSchedule s;
    s.eta = eta;
    s.alpha = alpha;
    s.derived = true;
    s.eta_condition_holds = d.eta_condition_holds;
    s.nu = eta / 32.0;

    struct Field {
        const char* name;
        double* slot;
        double log10;
    };
    Field fields[] = {{"c6", &s.c6, d.log10_c6},       {"c5", &s.c5, d.log10_c5},
                      {"c4", &s.c4, d.log10_c4},       {"c3", &s.c3, d.log10_c3},
                      {"c2", &s.c2, d.log10_c2},       {"c1", &s.c1, d.log10_c1},
                      {"rho", &s.rho, d.log10_rho},    {"delta", &s.delta, d.log10_delta},
                      {"gamma", &s.gamma, d.log10_gamma}};
    for (auto& f : fields) {
        *f.slot = std::pow(10.0, f.log10);
        if (!is_normal_positive(*f.slot)) {
            std::ostringstream os;
            os << "scale-infeasible: derived constant " << f.name << " = 10^" << f.log10
               << " leaves the normal double range (the full derivation chain bottoms out near "
                  "10^"
               << d.log10_delta << "); use a relaxed schedule for desk-scale evaluation";
            throw scale_infeasible_error(os.str());
        }
    }
    s.K = std::pow(10.0, d.log10_K);
    if (!std::isfinite(s.K)) throw scale_infeasible_error("scale-infeasible: K overflowed");

    s.validate_chain();
    return s;
}

ConstantSchedule relaxed_schedule(double eta, double alpha) {
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("eta must lie in (0, 1]");
    if (!(alpha > 0.0)) throw domain_error("alpha must be positive");
    ConstantSchedule s;
    s.eta = eta;
    s.alpha = alpha;
    s.derived = false;

    // Just under one decade between consecutive constants, rho just below
    // c1/10 and delta just below rho: this maximises delta - gamma under the
    // chain (gamma = delta/2 as in the derived recipe).
    s.c6 = 0.96 * eta;
    s.c5 = 0.095 * eta;
    s.c4 = 0.009 * eta;
    s.c3 = 0.00085 * eta;
    s.c2 = 0.00008 * eta;
    s.c1 = 0.0000075 * eta;
    s.rho = 0.0000007 * eta;
    s.delta = 0.00000065 * eta;
    s.gamma = s.delta / 2.0;
    s.K = std::pow(s.rho, -alpha) * 1.5;
    s.nu = eta / 32.0;
    s.eta_condition_holds = false;
    s.validate_chain();
    return s;
}

double prop_b_min_n(const ConstantSchedule& s) {
    // 2 K N^-delta < N^-gamma  <=>  N^(delta-gamma) > 2K.
    return std::exp(std::log(2.0 * s.K) / (s.delta - s.gamma));
}

ConstantSchedule schedule_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("schedule: ") + e.what());
    }
    if (j.contains("eta") && !j.contains("c1")) {
        if (j.value("relaxed", false))
            return relaxed_schedule(j.at("eta").get<double>(), j.at("alpha").get<double>());
        return schedule_from_eta(j.at("eta").get<double>(), j.at("alpha").get<double>());
    }
    ConstantSchedule s;
    s.eta = j.at("eta").get<double>();
    s.gamma = j.at("gamma").get<double>();
    s.delta = j.at("delta").get<double>();
    s.rho = j.at("rho").get<double>();
    s.c1 = j.at("c1").get<double>();
    s.c2 = j.at("c2").get<double>();
    s.c3 = j.at("c3").get<double>();
    s.c4 = j.at("c4").get<double>();
    s.c5 = j.at("c5").get<double>();
    s.c6 = j.at("c6").get<double>();
    s.K = j.at("K").get<double>();
    s.alpha = j.at("alpha").get<double>();
    s.nu = j.value("nu", s.eta / 32.0);
    s.derived = j.value("derived", false);
    s.eta_condition_holds = j.value("eta_condition_holds", false);
    s.validate_chain();
    return s;
}

std::string schedule_to_json_text(const ConstantSchedule& s) {
    json j{{"eta", s.eta},   {"gamma", s.gamma}, {"delta", s.delta},
           {"rho", s.rho},   {"c1", s.c1},       {"c2", s.c2},
           {"c3", s.c3},     {"c4", s.c4},       {"c5", s.c5},
           {"c6", s.c6},     {"K", s.K},         {"nu", s.nu},
           {"alpha", s.alpha}, {"derived", s.derived},
           {"eta_condition_holds", s.eta_condition_holds}};
    return j.dump(2);
}

} // namespace nbrw
