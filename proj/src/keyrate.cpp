#include "qan/keyrate.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "qan/link_analytics.hpp"

namespace qan {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

double level_gain(const LevelTally& t) {
    // Sifting keeps matching-basis events (probability 1/2 for every cause).
    return t.pulses_sent > 0.0 ? 2.0 * t.sifted_bits / t.pulses_sent : 0.0;
}

}  // namespace

nlohmann::json report_to_json(const KeyRateReport& r) {
    return nlohmann::json{{"user", r.user},
                          {"q_sifted", r.q_sifted},
                          {"q1", r.q1},
                          {"q0", r.q0},
                          {"qber", r.qber},
                          {"e1", r.e1},
                          {"delta", r.delta},
                          {"secure_bits", r.secure_bits},
                          {"rate_bps", r.rate_bps},
                          {"session_seconds", r.session_seconds},
                          {"no_key", r.no_key},
                          {"estimation_failed", r.estimation_failed}};
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy requires x in [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

SinglePhotonEstimate estimate_single_photon(const LevelTallies& tallies,
                                            const DecoyProtocol& decoy) {
    SinglePhotonEstimate est;
    const double mu = decoy.mu;
    const double nu = decoy.nu;
    if (mu <= nu) return est;  // division-by-zero guard, mu > nu required

    for (const LevelTally& t : tallies) {
        if (t.pulses_sent <= 0.0) return est;
        if (t.sifted_errors > t.sifted_bits || t.sifted_bits > t.pulses_sent) return est;
    }

    const LevelTally& sig = tallies[static_cast<int>(Level::signal)];
    const LevelTally& dec = tallies[static_cast<int>(Level::decoy)];
    const LevelTally& vac = tallies[static_cast<int>(Level::vacuum)];

    const double q_mu = level_gain(sig);
    const double q_nu = level_gain(dec);
    const double y0 = level_gain(vac);
    if (q_mu <= 0.0 || q_nu <= 0.0) return est;
    const double e_nu = dec.sifted_bits > 0.0 ? dec.sifted_errors / dec.sifted_bits : 0.0;

    const double y1 = mu / (mu * nu - nu * nu) *
                      (q_nu * std::exp(nu) - q_mu * std::exp(mu) * nu * nu / (mu * mu) -
                       (mu * mu - nu * nu) / (mu * mu) * y0);
    if (y1 <= 0.0) return est;

    est.y1_lower = clamp01(y1);
    est.e1_upper = clamp01((e_nu * q_nu * std::exp(nu) - 0.5 * y0) / (est.y1_lower * nu));
    est.y0 = clamp01(y0);
    est.ok = true;
    return est;
}

double finite_size_penalty(double q_sifted, double epsilon, double c) {
    if (q_sifted < 0.0) throw ValidationError("q_sifted must be nonnegative");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must be in (0,1)");
    if (c < 0.0) throw ValidationError("finite_size_c must be nonnegative");
    if (q_sifted == 0.0) return 0.0;
    return std::ceil(c * std::sqrt(q_sifted) * std::log2(1.0 / epsilon));
}

KeyRateReport secure_key_rate(double q_sifted, double q1, double q0, double qber, double e1,
                              double f_ec, double delta, double session_seconds) {
    if (session_seconds <= 0.0) throw ValidationError("session time must be positive");
    KeyRateReport r;
    r.q_sifted = q_sifted;
    r.q0 = std::min(q0, q_sifted);
    r.q1 = std::min(q1, q_sifted - r.q0);
    r.qber = qber;
    r.e1 = e1;
    r.delta = delta;
    r.session_seconds = session_seconds;
    const double bits =
        r.q1 * (1.0 - binary_entropy(e1)) - q_sifted * f_ec * binary_entropy(qber) + r.q0 - delta;
    r.secure_bits = std::max(0.0, bits);
    r.rate_bps = r.secure_bits / session_seconds;
    r.no_key = r.secure_bits <= 0.0;
    return r;
}

LevelTallies analytic_level_tallies(const NetworkScenario& sc, int user_index,
                                    double pulses_per_user) {
    LevelTallies tallies;
    for (Level level : kLevels) {
        const GateStatistics stats = network_gate_statistics(sc, user_index, level);
        LevelTally& t = tallies[static_cast<int>(level)];
        t.pulses_sent = pulses_per_user * sc.decoy.probability(level);
        t.sifted_bits = t.pulses_sent * stats.gain_per_gate * 0.5;
        t.sifted_errors = t.pulses_sent * stats.error_per_gate * 0.5;
    }
    return tallies;
}

KeyRateReport report_from_tallies(const LevelTallies& tallies, const NetworkScenario& sc,
                                  int user_index, double session_seconds) {
    const SinglePhotonEstimate est = estimate_single_photon(tallies, sc.decoy);
    const LevelTally& sig = tallies[static_cast<int>(Level::signal)];

    KeyRateReport r;
    r.user = user_index;
    r.session_seconds = session_seconds;
    r.q_sifted = sig.sifted_bits;
    r.qber = sig.sifted_bits > 0.0 ? sig.sifted_errors / sig.sifted_bits : 0.0;

    if (!est.ok || est.e1_upper > 0.5) {
        r.estimation_failed = true;
        r.no_key = true;
        r.e1 = est.e1_upper;
        return r;
    }

    const double mu = sc.decoy.mu;
    const double q_mu = level_gain(sig);
    const double q1 = sig.sifted_bits * mu * std::exp(-mu) * est.y1_lower / q_mu;
    const double q0 = sig.sifted_bits * std::exp(-mu) * est.y0 / q_mu;
    const double delta = finite_size_penalty(sig.sifted_bits, sc.epsilon, sc.finite_size_c);

    r = secure_key_rate(sig.sifted_bits, q1, q0, r.qber, est.e1_upper, sc.f_ec, delta,
                        session_seconds);
    r.user = user_index;
    return r;
}

KeyRateReport analytic_session_rate(const NetworkScenario& sc, int user_index) {
    const double pulses = sc.transmitter_clock_hz() * sc.session_seconds;
    return report_from_tallies(analytic_level_tallies(sc, user_index, pulses), sc, user_index,
                               sc.session_seconds);
}

}  // namespace qan
