#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qan/keyrate.hpp"
#include "qan/model.hpp"

namespace qan {

enum class Cause : int { photon = 0, crosstalk = 1, afterpulse = 2, dark = 3 };
const char* cause_name(Cause cause);

/// One emitted pulse. basis 0 = Z (phases 0/pi), 1 = X (phases pi/2, 3pi/2).
struct PulseRecord {
    std::uint64_t gate_index = 0;
    int user_id = 0;
    Level level = Level::signal;
    int basis = 0;
    int bit = 0;
};

/// One recorded click. The cause tag is diagnostic only and never feeds the
/// tallies used for key estimation.
struct DetectionEvent {
    std::uint64_t gate_index = 0;
    int detector = 0;
    Cause cause = Cause::dark;
};

struct SessionTally {
    int capacity = 0;
    int active_users = 0;
    std::uint64_t total_gates = 0;
    std::uint64_t seed = 0;
    bool expectation_mode = false;

    std::vector<LevelTallies> per_user;  // indexed by active user id

    // Diagnostics.
    std::array<std::uint64_t, 4> cause_counts{};  // indexed by Cause
    std::vector<std::uint64_t> user_clicks;       // raw clicks per active user, all levels
    std::uint64_t empty_gate_clicks = 0;
    std::uint64_t total_clicks = 0;

    bool operator==(const SessionTally&) const = default;
};

/// Gates are owned round-robin: gate_index mod capacity.
int assign_gate(std::uint64_t gate_index, int capacity);

/// Reference implementation: one pass over the gates, single thread.
SessionTally run_session_serial(const NetworkScenario& scenario, std::uint64_t seed,
                                std::uint64_t total_gates);

/// OpenMP implementation over fixed-size gate blocks; each block replays a
/// short warm-up prefix to recover afterpulse and cross-talk state crossing
/// its boundary. Output is identical to run_session_serial for every jobs
/// value (0 = all available threads).
SessionTally run_session(const NetworkScenario& scenario, std::uint64_t seed,
                         std::uint64_t total_gates, int jobs = 0);

/// Records the individual detection events of a (short) session, for
/// inspection of the click resolution and cause tagging. One event per
/// clicked gate at most.
std::vector<DetectionEvent> trace_session(const NetworkScenario& scenario, std::uint64_t seed,
                                          std::uint64_t total_gates);

/// Non-stochastic tallies from the closed-form gate statistics (expectation
/// values); flagged via SessionTally::expectation_mode.
SessionTally expected_session_tally(const NetworkScenario& scenario, std::uint64_t total_gates);

/// Runs every user's tallies through the measurement key-rate routine.
/// Session time is taken from the simulated gate count, not the configured
/// session length, so reduced-scale runs are scored consistently.
std::vector<KeyRateReport> tally_to_reports(const SessionTally& tally,
                                            const NetworkScenario& scenario);

void write_tally_csv(std::ostream& out, const SessionTally& tally);

}  // namespace qan
