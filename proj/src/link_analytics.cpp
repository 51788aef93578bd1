#include "qan/link_analytics.hpp"

#include <cassert>
#include <cmath>

namespace qan {

namespace {

double clamp01(double p) {
    // Physical parameter ranges never reach the clamp.
    assert(p >= -1e-12 && p <= 1.0 + 1e-12);
    if (p < 0.0) return 0.0;
    if (p > 1.0) return 1.0;
    return p;
}

// Mean detection probability of the other active users at the given level.
double aggressor_mean_eta(const NetworkScenario& sc, int user_index, double mu_level) {
    if (sc.active_users < 2) return 0.0;
    double sum = 0.0;
    for (int j = 0; j < sc.active_users; ++j) {
        if (j == user_index) continue;
        sum += detection_probability(mu_level, sc.users[j], sc.detector.eta_bob);
    }
    return sum / (sc.active_users - 1);
}

}  // namespace

double detection_probability(double mu, const LinkModel& link, double eta_bob) {
    if (mu < 0.0) throw ValidationError("mean photon number must be nonnegative");
    return clamp01(mu * link.transmittance() * eta_bob);
}

double single_user_error_probability(double eta, double e_opt, double p_a, double p_d,
                                     int capacity) {
    return eta * (e_opt + p_a / (2.0 * capacity)) + p_d / 2.0;
}

double crosstalk_per_user(const CrossTalkModel& model, int capacity, double p_a) {
    if (capacity < 2)
        throw ValidationError("cross-talk is undefined for capacity < 2");
    return model.base_excess / (capacity - 1) + p_a / capacity;
}

double crosstalk_per_user(int capacity, double p_a) {
    return crosstalk_per_user(CrossTalkModel{}, capacity, p_a);
}

GateStatistics network_gate_statistics(const NetworkScenario& sc, int user_index,
                                       double mu_level) {
    if (user_index < 0 || user_index >= sc.active_users)
        throw ValidationError("user_index must address an active user");

    const DetectorModel& det = sc.detector;
    const LinkModel& link = sc.users[static_cast<std::size_t>(user_index)];
    const int n = sc.active_users;
    const int capacity = sc.capacity;

    const double eta = detection_probability(mu_level, link, det.eta_bob);
    const double eta_err = single_user_error_probability(eta, link.e_opt, det.afterpulse,
                                                         det.dark_per_gate, capacity);

    double crosstalk_counts = 0.0;
    if (n >= 2) {
        const double p_x = crosstalk_per_user(sc.crosstalk, capacity, det.afterpulse);
        crosstalk_counts = p_x * (n - 1) * aggressor_mean_eta(sc, user_index, mu_level);
    }

    GateStatistics stats;
    stats.gain_per_gate =
        clamp01(eta * (1.0 + det.afterpulse / capacity) + det.dark_per_gate + crosstalk_counts);
    stats.error_per_gate = clamp01(eta_err + 0.5 * crosstalk_counts);
    if (stats.gain_per_gate > 0.0) {
        stats.qber = stats.error_per_gate / stats.gain_per_gate;
    } else {
        stats.degenerate = true;
        stats.qber = std::numeric_limits<double>::quiet_NaN();
    }
    return stats;
}

GateStatistics network_gate_statistics(const NetworkScenario& sc, int user_index, Level level) {
    return network_gate_statistics(sc, user_index, sc.decoy.intensity(level));
}

double mean_gate_gain(const NetworkScenario& sc, int user_index) {
    double gain = 0.0;
    for (Level level : kLevels)
        gain += sc.decoy.probability(level) *
                network_gate_statistics(sc, user_index, level).gain_per_gate;
    return gain;
}

}  // namespace qan
