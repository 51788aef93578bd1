#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qan/keyrate.hpp"
#include "qan/model.hpp"

namespace qan {

/// Per-user secure rate over a distance x active-users grid for one network
/// capacity.
struct SweepGrid {
    int capacity = 0;
    std::vector<double> distances_km;
    std::vector<int> active_users;
    std::vector<double> rates_bps;  // row-major: [distance][users]

    double& at(std::size_t d, std::size_t u) { return rates_bps[d * active_users.size() + u]; }
    double at(std::size_t d, std::size_t u) const {
        return rates_bps[d * active_users.size() + u];
    }
};

/// Template parameters shared by every cell of a capacity/distance sweep;
/// defaults are the reference system values.
struct SweepConfig {
    std::vector<int> capacities{8, 16, 32, 64};
    double distance_min_km = 0.0;
    double distance_max_km = 30.0;
    double distance_step_km = 1.0;
    DetectorModel detector;
    DecoyProtocol decoy;
    CrossTalkModel crosstalk;
    double e_opt = 0.005;
    double fibre_loss_db_per_km = 0.2;
    double epsilon = 1e-10;
    double f_ec = 1.1;
    double finite_size_c = 1.0;
};

SweepConfig sweep_config_from_json(const nlohmann::json& j);

/// Session length schedule: 20 min up to 16 users, 2 h at 32, 12 h beyond,
/// compensating the slower per-transmitter clocks at higher capacity.
double session_seconds_for_capacity(int capacity);

/// Homogeneous scenario for one sweep cell: n active users, all at the given
/// distance, splitter loss from the capacity's splitting ratio.
NetworkScenario sweep_cell_scenario(const SweepConfig& config, int capacity, double distance_km,
                                    int active_users);

/// Full-grid closed-form rate per user for one capacity (cells are
/// independent and evaluated in parallel).
SweepGrid sweep_capacity(const SweepConfig& config, int capacity);
std::vector<SweepGrid> sweep_grids(const SweepConfig& config);

/// Largest grid distance with a nonzero rate at full occupancy (-1 if none).
double full_occupancy_reach_km(const SweepGrid& grid);

struct SessionPoint {
    int session = 0;
    int user = 0;
    double qber = 0.0;
    double rate_bps = 0.0;
};

enum class SeriesMode { analytic, montecarlo };

/// Repeated key sessions for every user of a scenario. Monte Carlo mode
/// varies the seed per session; analytic mode is deterministic. Both are
/// scored over gates_per_session gates (0 = the full configured session).
std::vector<SessionPoint> session_series(const NetworkScenario& scenario, int n_sessions,
                                         SeriesMode mode, std::uint64_t seed,
                                         std::uint64_t gates_per_session = 0, int jobs = 0);

/// Per-user rate estimate for a capacity-N network from a fully-occupying
/// two-transmitter measurement: (r1 + r2) / N.
double per_user_estimate(const KeyRateReport& r1, const KeyRateReport& r2, int capacity);

void write_grid_csv(std::ostream& out, const SweepGrid& grid);
void write_grid_matrix(std::ostream& out, const SweepGrid& grid);
void write_series_csv(std::ostream& out, const std::vector<SessionPoint>& series);

}  // namespace qan
