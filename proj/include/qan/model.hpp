#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qan {

/// Thrown when a scenario file or parameter set violates a model invariant.
/// The message names the violated invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

enum class Level : int { signal = 0, decoy = 1, vacuum = 2 };
inline constexpr std::array<Level, 3> kLevels{Level::signal, Level::decoy, Level::vacuum};
const char* level_name(Level level);

/// Gated single-photon receiver. dark_per_gate is the combined rate of the
/// two detectors (twice the per-detector rate).
struct DetectorModel {
    double eta_bob = 0.0904;
    double dark_per_gate = 1.6e-5;
    double afterpulse = 0.045;
    double gate_rate_hz = 1e9;
};

/// Three-intensity decoy protocol: mean photon numbers and send probabilities.
struct DecoyProtocol {
    double mu = 0.5;
    double nu = 0.1;
    double vacuum = 0.0002;
    double p_signal = 0.9883;
    double p_decoy = 0.0078;
    double p_vacuum = 0.0039;

    double intensity(Level level) const;
    double probability(Level level) const;
};

/// One transmitter's optical path to the receiver. When total_loss_db is set
/// it overrides fibre + splitter loss (measured end-to-end loss).
struct LinkModel {
    double fibre_km = 0.0;
    double fibre_loss_db_per_km = 0.2;
    double splitter_db = 0.0;
    std::optional<double> total_loss_db;
    double e_opt = 0.005;

    double channel_loss_db() const;
    /// Linear power transmission of fibre + splitter (no detector efficiency).
    double transmittance() const;
};

/// Spurious counts one active transmitter induces in another transmitter's
/// gates. base_excess is the gate-separation-averaged excess beyond the
/// afterpulse floor; profile, when set, resolves it per separation 1..N-1
/// and must sum to base_excess.
struct CrossTalkModel {
    double base_excess = 0.019;
    std::optional<std::vector<double>> profile;

    /// Excess spill probability for a given gate separation in a capacity-N
    /// frame (flat base_excess/(N-1) unless a profile is configured).
    double spill_probability(int separation, int capacity) const;
};

struct NetworkScenario {
    int capacity = 1;
    int active_users = 1;
    std::vector<LinkModel> users;  // one per active user
    DetectorModel detector;
    DecoyProtocol decoy;
    CrossTalkModel crosstalk;
    double session_seconds = 1200.0;
    double epsilon = 1e-10;
    double f_ec = 1.1;
    double finite_size_c = 1.0;

    /// Each transmitter runs at the receiver gate rate divided by capacity.
    double transmitter_clock_hz() const { return detector.gate_rate_hz / capacity; }

    /// Checks every invariant; throws ValidationError naming the first violation.
    void validate() const;
};

struct SplitterLoss {
    double db = 0.0;
    bool extrapolated = false;
};

/// Measured splitter losses for 1x8/16/32/64; other power-of-two ratios use
/// the ideal log loss plus 0.6 dB excess and are flagged as extrapolated.
SplitterLoss splitter_loss_for_ratio(int ratio);

NetworkScenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const NetworkScenario& scenario);
NetworkScenario load_scenario(const std::string& path);

}  // namespace qan
