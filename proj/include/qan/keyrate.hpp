#pragma once

#include <array>

#include <json.hpp>

#include "qan/model.hpp"

namespace qan {

/// Raw per-level session counts for one user. Counts are doubles so the same
/// type carries integer Monte Carlo tallies and expectation-mode tallies;
/// integer counts stay exact below 2^53.
struct LevelTally {
    double pulses_sent = 0.0;
    double sifted_bits = 0.0;
    double sifted_errors = 0.0;
};

using LevelTallies = std::array<LevelTally, 3>;  // indexed by Level

/// Vacuum+weak-decoy bounds estimated from the three level tallies.
struct SinglePhotonEstimate {
    double y1_lower = 0.0;
    double e1_upper = 0.0;
    double y0 = 0.0;
    bool ok = false;  // false: estimation failure (degenerate tallies or y1 <= 0)
};

struct KeyRateReport {
    int user = 0;
    double q_sifted = 0.0;   // sifted signal-level bits
    double q1 = 0.0;         // estimated sifted bits from single-photon pulses
    double q0 = 0.0;         // estimated sifted bits of vacuum origin
    double qber = 0.0;       // signal-level sifted error rate
    double e1 = 0.0;         // single-photon error upper bound
    double delta = 0.0;      // finite-size penalty, bits
    double secure_bits = 0.0;
    double rate_bps = 0.0;
    double session_seconds = 0.0;
    bool no_key = true;
    bool estimation_failed = false;
};

nlohmann::json report_to_json(const KeyRateReport& report);

/// H(x) = -x log2 x - (1-x) log2(1-x), H(0) = H(1) = 0.
/// Throws std::domain_error outside [0,1].
double binary_entropy(double x);

/// Single-photon yield lower bound, error upper bound, and vacuum yield from
/// per-level gains. ok=false when any level is empty, the protocol is
/// degenerate, or the yield bound is nonpositive.
SinglePhotonEstimate estimate_single_photon(const LevelTallies& tallies,
                                            const DecoyProtocol& decoy);

/// Finite-size key deduction: ceil(c * sqrt(Q) * log2(1/epsilon)) bits.
double finite_size_penalty(double q_sifted, double epsilon, double c);

/// Secure session output: max(0, Q1(1-H(e1)) - Q f_ec H(e) + Q0 - delta),
/// as bits and as a rate over the session time.
KeyRateReport secure_key_rate(double q_sifted, double q1, double q0, double qber, double e1,
                              double f_ec, double delta, double session_seconds);

/// Expected per-level tallies of one user over pulses_per_user pulses,
/// from the closed-form gate statistics (expectation values, no fluctuations).
LevelTallies analytic_level_tallies(const NetworkScenario& scenario, int user_index,
                                    double pulses_per_user);

/// The single estimation routine applied to any tally source (measured,
/// simulated, or expected counts): decoy bounds, finite-size penalty, rate.
KeyRateReport report_from_tallies(const LevelTallies& tallies, const NetworkScenario& scenario,
                                  int user_index, double session_seconds);

/// Full-session secure key rate of one user from the closed-form model.
KeyRateReport analytic_session_rate(const NetworkScenario& scenario, int user_index);

}  // namespace qan
