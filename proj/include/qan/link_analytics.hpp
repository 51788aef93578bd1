#pragma once

#include "qan/model.hpp"

namespace qan {

/// Per-gate detection statistics for one user at one intensity level.
/// gain_per_gate is the probability of any count in the user's gate;
/// error_per_gate is the error-weighted part; both are unsifted (sifting
/// halves counts and errors alike, leaving the QBER unchanged).
struct GateStatistics {
    double gain_per_gate = 0.0;
    double error_per_gate = 0.0;
    double qber = 0.0;
    bool degenerate = false;  // gain is zero, qber undefined
};

/// Probability that a pulse of mean photon number mu produces a count:
/// mu * 10^(-loss_db/10) * eta_bob, clamped to [0,1].
double detection_probability(double mu, const LinkModel& link, double eta_bob);

/// Error-count probability for a single transmitter in an otherwise empty
/// network: eta*(e_opt + p_a/(2N)) + p_d/2.
double single_user_error_probability(double eta, double e_opt, double p_a, double p_d,
                                     int capacity);

/// Average count increase per added user: base_excess/(N-1) + p_a/N.
/// Undefined (throws) for capacity < 2.
double crosstalk_per_user(const CrossTalkModel& model, int capacity, double p_a);
double crosstalk_per_user(int capacity, double p_a);

/// Gain, error rate, and QBER of one user's gates at a given intensity,
/// including self-afterpulsing, dark counts, and cross-talk from the other
/// active users. Cross-talk terms use the aggressors' mean detection
/// probability at the same level (equal to the victim's own for the
/// homogeneous networks of the closed-form model).
GateStatistics network_gate_statistics(const NetworkScenario& scenario, int user_index,
                                       double mu_level);
GateStatistics network_gate_statistics(const NetworkScenario& scenario, int user_index,
                                       Level level);

/// Gate gain averaged over the decoy-level mix, i.e. the expected raw count
/// probability per gate of one user. Matches what a counter on the user's
/// gates measures.
double mean_gate_gain(const NetworkScenario& scenario, int user_index);

}  // namespace qan
