#include "qan/montecarlo.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <ostream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qan/gate_rng.hpp"
#include "qan/io_util.hpp"
#include "qan/link_analytics.hpp"

namespace qan {

const char* cause_name(Cause cause) {
    switch (cause) {
        case Cause::photon: return "photon";
        case Cause::crosstalk: return "crosstalk";
        case Cause::afterpulse: return "afterpulse";
        case Cause::dark: return "dark";
    }
    return "?";
}

int assign_gate(std::uint64_t gate_index, int capacity) {
    if (capacity < 1) throw ValidationError("capacity must be >= 1");
    return static_cast<int>(gate_index % static_cast<std::uint64_t>(capacity));
}

namespace {

// Gate counts live in doubles downstream; keep them exactly representable.
constexpr std::uint64_t kMaxGates = 1ULL << 53;

struct SimParams {
    int capacity = 1;
    int active_users = 1;
    double dark = 0.0;
    double afterpulse = 0.0;
    double p_signal = 0.0;
    double p_signal_decoy = 0.0;                // P(signal) + P(decoy)
    std::vector<std::array<double, 3>> eta;     // [user][level]
    std::vector<double> e_opt;                  // [user]
    double spill_total = 0.0;                   // sum of the cross-talk profile
    std::vector<double> spill_cdf;              // cumulative spill over separations 1..N-1

    explicit SimParams(const NetworkScenario& sc) {
        capacity = sc.capacity;
        active_users = sc.active_users;
        dark = sc.detector.dark_per_gate;
        afterpulse = sc.detector.afterpulse;
        p_signal = sc.decoy.p_signal;
        p_signal_decoy = sc.decoy.p_signal + sc.decoy.p_decoy;
        eta.resize(static_cast<std::size_t>(active_users));
        e_opt.resize(static_cast<std::size_t>(active_users));
        for (int u = 0; u < active_users; ++u) {
            for (Level level : kLevels)
                eta[u][static_cast<int>(level)] = detection_probability(
                    sc.decoy.intensity(level), sc.users[static_cast<std::size_t>(u)],
                    sc.detector.eta_bob);
            e_opt[u] = sc.users[static_cast<std::size_t>(u)].e_opt;
        }
        if (capacity >= 2) {
            spill_cdf.resize(static_cast<std::size_t>(capacity - 1));
            double acc = 0.0;
            for (int s = 1; s < capacity; ++s) {
                acc += sc.crosstalk.spill_probability(s, capacity);
                spill_cdf[static_cast<std::size_t>(s - 1)] = acc;
            }
            spill_total = acc;
        }
    }
};

// Pending-arrival rings sized to the maximum scheduling lookahead (N gates
// for afterpulses, N-1 for cross-talk spill). A slot is read and cleared
// when its gate is processed, so the ring never aliases live entries.
struct ArrivalRings {
    explicit ArrivalRings(int capacity)
        : size(static_cast<std::uint64_t>(capacity) + 1),
          crosstalk(size, 0),
          afterpulse(size, 0) {}

    void clear() {
        std::fill(crosstalk.begin(), crosstalk.end(), 0);
        std::fill(afterpulse.begin(), afterpulse.end(), 0);
    }

    std::uint64_t size;
    std::vector<std::uint8_t> crosstalk;
    std::vector<std::uint8_t> afterpulse;
};

struct SimContext {
    const SimParams& params;
    const GateRng& rng;
    ArrivalRings& rings;
    SessionTally* tally = nullptr;               // null while warming up
    std::vector<DetectionEvent>* trace = nullptr;

    // Simulates one gate: owner emission, channel loss, noise arrivals,
    // click resolution, sifting tallies, and scheduling of the afterpulse /
    // cross-talk this gate may cause downstream. Every random draw is a pure
    // function of (seed, gate, channel), so any contiguous replay reproduces
    // the same stream.
    void step(std::uint64_t g) {
        const SimParams& P = params;
        const std::uint64_t slot = g % rings.size;
        const bool xt_arrival = rings.crosstalk[slot];
        const bool ap_arrival = rings.afterpulse[slot];
        rings.crosstalk[slot] = 0;
        rings.afterpulse[slot] = 0;

        const int owner = static_cast<int>(g % static_cast<std::uint64_t>(P.capacity));
        const bool active = owner < P.active_users;

        PulseRecord pulse;
        bool photon = false;
        if (active) {
            pulse.gate_index = g;
            pulse.user_id = owner;
            const double u = rng.uniform(g, GateRng::kLevel);
            pulse.level = u < P.p_signal ? Level::signal
                                         : (u < P.p_signal_decoy ? Level::decoy : Level::vacuum);
            photon = rng.uniform(g, GateRng::kPhoton) <
                     P.eta[static_cast<std::size_t>(owner)][static_cast<int>(pulse.level)];
            if (tally) tally->per_user[static_cast<std::size_t>(owner)]
                            [static_cast<int>(pulse.level)].pulses_sent += 1.0;
        }
        const bool dark = rng.uniform(g, GateRng::kDark) < P.dark;

        if (!(photon || xt_arrival || ap_arrival || dark)) return;

        // Single-generation afterpulsing: avalanches of photon, cross-talk,
        // or dark origin may seed one afterpulse, uniform over the next N
        // gates; a pure afterpulse click seeds nothing further.
        if (photon || xt_arrival || dark) {
            if (rng.uniform(g, GateRng::kAfterpulseFire) < P.afterpulse) {
                const std::uint64_t offset =
                    1 + static_cast<std::uint64_t>(rng.uniform(g, GateRng::kAfterpulseTarget) *
                                                   P.capacity);
                rings.afterpulse[(g + offset) % rings.size] = 1;
            }
        }
        // Detected pulses spill into a later gate (late arrival / ringing),
        // with separation distributed per the cross-talk profile.
        if (photon && P.spill_total > 0.0) {
            if (rng.uniform(g, GateRng::kSpillFire) < P.spill_total) {
                const double u = rng.uniform(g, GateRng::kSpillSeparation) * P.spill_total;
                const auto it = std::upper_bound(P.spill_cdf.begin(), P.spill_cdf.end(), u);
                const std::uint64_t sep = static_cast<std::uint64_t>(
                    std::min<std::ptrdiff_t>(it - P.spill_cdf.begin(),
                                             static_cast<std::ptrdiff_t>(P.spill_cdf.size()) - 1) +
                    1);
                rings.crosstalk[(g + sep) % rings.size] = 1;
            }
        }

        if (!tally && !trace) return;

        // First cause wins; the label is diagnostic only.
        const Cause cause = photon         ? Cause::photon
                            : xt_arrival   ? Cause::crosstalk
                            : ap_arrival   ? Cause::afterpulse
                                           : Cause::dark;
        if (tally) {
            tally->cause_counts[static_cast<int>(cause)] += 1;
            tally->total_clicks += 1;
        }

        int detected_bit = 0;
        bool sifted = false;
        bool error = false;
        if (active) {
            pulse.basis = rng.uniform(g, GateRng::kBasis) < 0.5 ? 0 : 1;
            pulse.bit = rng.uniform(g, GateRng::kBit) < 0.5 ? 0 : 1;
            const int rx_basis = rng.uniform(g, GateRng::kRxBasis) < 0.5 ? 0 : 1;
            if (cause == Cause::photon) {
                if (rx_basis == pulse.basis) {
                    error = rng.uniform(g, GateRng::kPhotonError) <
                            P.e_opt[static_cast<std::size_t>(owner)];
                    detected_bit = error ? 1 - pulse.bit : pulse.bit;
                    sifted = true;
                } else {
                    detected_bit = rng.uniform(g, GateRng::kNoiseBit) < 0.5 ? 0 : 1;
                }
            } else {
                detected_bit = rng.uniform(g, GateRng::kNoiseBit) < 0.5 ? 0 : 1;
                if (rx_basis == pulse.basis) {
                    sifted = true;
                    error = detected_bit != pulse.bit;
                }
            }
            if (tally) {
                tally->user_clicks[static_cast<std::size_t>(owner)] += 1;
                if (sifted) {
                    LevelTally& lt = tally->per_user[static_cast<std::size_t>(owner)]
                                                    [static_cast<int>(pulse.level)];
                    lt.sifted_bits += 1.0;
                    if (error) lt.sifted_errors += 1.0;
                }
            }
        } else {
            detected_bit = rng.uniform(g, GateRng::kNoiseBit) < 0.5 ? 0 : 1;
            if (tally) tally->empty_gate_clicks += 1;
        }
        if (trace) trace->push_back(DetectionEvent{g, detected_bit, cause});
    }
};

SessionTally make_tally(const NetworkScenario& sc, std::uint64_t seed, std::uint64_t total_gates) {
    SessionTally tally;
    tally.capacity = sc.capacity;
    tally.active_users = sc.active_users;
    tally.total_gates = total_gates;
    tally.seed = seed;
    tally.per_user.resize(static_cast<std::size_t>(sc.active_users));
    tally.user_clicks.assign(static_cast<std::size_t>(sc.active_users), 0);
    return tally;
}

void check_run_args(const NetworkScenario& sc, std::uint64_t total_gates) {
    sc.validate();
    if (total_gates < static_cast<std::uint64_t>(sc.capacity))
        throw ValidationError("total_gates must be at least capacity");
    if (total_gates % static_cast<std::uint64_t>(sc.capacity) != 0)
        throw ValidationError(
            "total_gates must be a multiple of capacity (partial frames bias per-user counts)");
    if (total_gates > kMaxGates) throw ValidationError("total_gates exceeds the supported range");
}

void merge_into(SessionTally& into, const SessionTally& part) {
    for (std::size_t u = 0; u < into.per_user.size(); ++u) {
        for (int l = 0; l < 3; ++l) {
            into.per_user[u][l].pulses_sent += part.per_user[u][l].pulses_sent;
            into.per_user[u][l].sifted_bits += part.per_user[u][l].sifted_bits;
            into.per_user[u][l].sifted_errors += part.per_user[u][l].sifted_errors;
        }
        into.user_clicks[u] += part.user_clicks[u];
    }
    for (int c = 0; c < 4; ++c) into.cause_counts[c] += part.cause_counts[c];
    into.empty_gate_clicks += part.empty_gate_clicks;
    into.total_clicks += part.total_clicks;
}

// Simulates [begin, end); replays the 2N gates before begin (without
// tallying) to rebuild the afterpulse/cross-talk arrivals that cross the
// boundary, so any block partition reproduces the serial gate stream.
void simulate_block(const SimParams& params, const GateRng& rng, std::uint64_t begin,
                    std::uint64_t end, ArrivalRings& rings, SessionTally& tally) {
    rings.clear();
    const std::uint64_t lookback = 2 * static_cast<std::uint64_t>(params.capacity);
    const std::uint64_t warm_start = begin > lookback ? begin - lookback : 0;

    SimContext warm{params, rng, rings, nullptr, nullptr};
    for (std::uint64_t g = warm_start; g < begin; ++g) warm.step(g);

    SimContext ctx{params, rng, rings, &tally, nullptr};
    for (std::uint64_t g = begin; g < end; ++g) ctx.step(g);
}

}  // namespace

SessionTally run_session_serial(const NetworkScenario& sc, std::uint64_t seed,
                                std::uint64_t total_gates) {
    check_run_args(sc, total_gates);
    const SimParams params(sc);
    const GateRng rng(seed);
    SessionTally tally = make_tally(sc, seed, total_gates);
    ArrivalRings rings(sc.capacity);
    SimContext ctx{params, rng, rings, &tally, nullptr};
    for (std::uint64_t g = 0; g < total_gates; ++g) ctx.step(g);
    return tally;
}

SessionTally run_session(const NetworkScenario& sc, std::uint64_t seed, std::uint64_t total_gates,
                         int jobs) {
    check_run_args(sc, total_gates);
    const SimParams params(sc);
    const GateRng rng(seed);
    SessionTally tally = make_tally(sc, seed, total_gates);

    // Fixed block size: the partition (and with it every random draw and
    // tally term) is independent of the worker count.
    const std::uint64_t block = std::max<std::uint64_t>(
        1ULL << 16, 64ULL * static_cast<std::uint64_t>(sc.capacity));
    const std::uint64_t num_blocks = (total_gates + block - 1) / block;

#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
    const int threads = jobs > 0 ? std::min(jobs, max_threads) : max_threads;
#pragma omp parallel num_threads(threads)
    {
        SessionTally local = make_tally(sc, seed, total_gates);
        ArrivalRings rings(sc.capacity);
#pragma omp for schedule(dynamic, 1)
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(num_blocks); ++b) {
            const std::uint64_t begin = static_cast<std::uint64_t>(b) * block;
            const std::uint64_t end = std::min(begin + block, total_gates);
            simulate_block(params, rng, begin, end, rings, local);
        }
#pragma omp critical
        merge_into(tally, local);
    }
#else
    (void)jobs;
    ArrivalRings rings(sc.capacity);
    for (std::uint64_t b = 0; b < num_blocks; ++b) {
        const std::uint64_t begin = b * block;
        const std::uint64_t end = std::min(begin + block, total_gates);
        simulate_block(params, rng, begin, end, rings, tally);
    }
#endif
    return tally;
}

std::vector<DetectionEvent> trace_session(const NetworkScenario& sc, std::uint64_t seed,
                                          std::uint64_t total_gates) {
    check_run_args(sc, total_gates);
    const SimParams params(sc);
    const GateRng rng(seed);
    std::vector<DetectionEvent> events;
    ArrivalRings rings(sc.capacity);
    SimContext ctx{params, rng, rings, nullptr, &events};
    for (std::uint64_t g = 0; g < total_gates; ++g) ctx.step(g);
    return events;
}

SessionTally expected_session_tally(const NetworkScenario& sc, std::uint64_t total_gates) {
    check_run_args(sc, total_gates);
    SessionTally tally = make_tally(sc, 0, total_gates);
    tally.expectation_mode = true;
    const double pulses_per_user =
        static_cast<double>(total_gates) / static_cast<double>(sc.capacity);
    for (int u = 0; u < sc.active_users; ++u)
        tally.per_user[static_cast<std::size_t>(u)] = analytic_level_tallies(sc, u, pulses_per_user);
    return tally;
}

std::vector<KeyRateReport> tally_to_reports(const SessionTally& tally,
                                            const NetworkScenario& sc) {
    if (tally.active_users != sc.active_users || tally.capacity != sc.capacity)
        throw ValidationError("tally does not match the scenario layout");
    const double seconds = static_cast<double>(tally.total_gates) / sc.detector.gate_rate_hz;
    std::vector<KeyRateReport> reports;
    reports.reserve(tally.per_user.size());
    for (int u = 0; u < tally.active_users; ++u)
        reports.push_back(
            report_from_tallies(tally.per_user[static_cast<std::size_t>(u)], sc, u, seconds));
    return reports;
}

void write_tally_csv(std::ostream& out, const SessionTally& tally) {
    out << "user,level,pulses_sent,sifted_bits,sifted_errors\n";
    for (std::size_t u = 0; u < tally.per_user.size(); ++u) {
        for (Level level : kLevels) {
            const LevelTally& t = tally.per_user[u][static_cast<int>(level)];
            out << u << ',' << level_name(level) << ',' << format_number(t.pulses_sent) << ','
                << format_number(t.sifted_bits) << ',' << format_number(t.sifted_errors) << '\n';
        }
    }
    out << "# diagnostics\n";
    out << "key,count\n";
    for (int c = 0; c < 4; ++c)
        out << cause_name(static_cast<Cause>(c)) << ',' << tally.cause_counts[c] << '\n';
    for (std::size_t u = 0; u < tally.user_clicks.size(); ++u)
        out << "user_" << u << "_clicks," << tally.user_clicks[u] << '\n';
    out << "empty_gate_clicks," << tally.empty_gate_clicks << '\n';
    out << "total_clicks," << tally.total_clicks << '\n';
    out << "total_gates," << tally.total_gates << '\n';
    out << "seed," << tally.seed << '\n';
    out << "expectation_mode," << (tally.expectation_mode ? 1 : 0) << '\n';
}

}  // namespace qan
