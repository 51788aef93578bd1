#include "qan/sweep.hpp"

#include <cmath>
#include <ostream>

#include "qan/io_util.hpp"
#include "qan/montecarlo.hpp"

namespace qan {

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
    SweepConfig cfg;
    try {
        if (j.contains("capacities")) cfg.capacities = j.at("capacities").get<std::vector<int>>();
        cfg.distance_min_km = j.value("distance_min_km", cfg.distance_min_km);
        cfg.distance_max_km = j.value("distance_max_km", cfg.distance_max_km);
        cfg.distance_step_km = j.value("distance_step_km", cfg.distance_step_km);
        if (j.contains("detector")) {
            const auto& det = j.at("detector");
            cfg.detector.eta_bob = det.value("eta_bob", cfg.detector.eta_bob);
            cfg.detector.dark_per_gate = det.value("dark_per_gate", cfg.detector.dark_per_gate);
            cfg.detector.afterpulse = det.value("afterpulse", cfg.detector.afterpulse);
            cfg.detector.gate_rate_hz = det.value("gate_rate_hz", cfg.detector.gate_rate_hz);
        }
        if (j.contains("decoy")) {
            const auto& dec = j.at("decoy");
            cfg.decoy.mu = dec.value("mu", cfg.decoy.mu);
            cfg.decoy.nu = dec.value("nu", cfg.decoy.nu);
            cfg.decoy.vacuum = dec.value("vacuum", cfg.decoy.vacuum);
            cfg.decoy.p_signal = dec.value("p_signal", cfg.decoy.p_signal);
            cfg.decoy.p_decoy = dec.value("p_decoy", cfg.decoy.p_decoy);
            cfg.decoy.p_vacuum = dec.value("p_vacuum", cfg.decoy.p_vacuum);
        }
        if (j.contains("crosstalk"))
            cfg.crosstalk.base_excess = j.at("crosstalk").value("base_excess", 0.019);
        cfg.e_opt = j.value("e_opt", cfg.e_opt);
        cfg.fibre_loss_db_per_km = j.value("fibre_loss_db_per_km", cfg.fibre_loss_db_per_km);
        cfg.epsilon = j.value("epsilon", cfg.epsilon);
        cfg.f_ec = j.value("f_ec", cfg.f_ec);
        cfg.finite_size_c = j.value("finite_size_c", cfg.finite_size_c);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("sweep config parse error: ") + e.what());
    }
    if (cfg.capacities.empty()) throw ValidationError("sweep capacities must not be empty");
    if (cfg.distance_step_km <= 0.0) throw ValidationError("distance_step_km must be positive");
    if (cfg.distance_max_km < cfg.distance_min_km)
        throw ValidationError("distance_max_km must be >= distance_min_km");
    return cfg;
}

double session_seconds_for_capacity(int capacity) {
    if (capacity <= 16) return 1200.0;
    if (capacity <= 32) return 7200.0;
    return 43200.0;
}

NetworkScenario sweep_cell_scenario(const SweepConfig& cfg, int capacity, double distance_km,
                                    int active_users) {
    NetworkScenario sc;
    sc.capacity = capacity;
    sc.active_users = active_users;
    LinkModel link;
    link.fibre_km = distance_km;
    link.fibre_loss_db_per_km = cfg.fibre_loss_db_per_km;
    link.splitter_db = splitter_loss_for_ratio(capacity).db;
    link.e_opt = cfg.e_opt;
    sc.users.assign(static_cast<std::size_t>(active_users), link);
    sc.detector = cfg.detector;
    sc.decoy = cfg.decoy;
    sc.crosstalk = cfg.crosstalk;
    sc.session_seconds = session_seconds_for_capacity(capacity);
    sc.epsilon = cfg.epsilon;
    sc.f_ec = cfg.f_ec;
    sc.finite_size_c = cfg.finite_size_c;
    sc.validate();
    return sc;
}

SweepGrid sweep_capacity(const SweepConfig& cfg, int capacity) {
    SweepGrid grid;
    grid.capacity = capacity;
    for (double d = cfg.distance_min_km; d <= cfg.distance_max_km + 1e-9;
         d += cfg.distance_step_km)
        grid.distances_km.push_back(d);
    for (int n = 1; n <= capacity; ++n) grid.active_users.push_back(n);
    grid.rates_bps.assign(grid.distances_km.size() * grid.active_users.size(), 0.0);

    const std::int64_t cells =
        static_cast<std::int64_t>(grid.distances_km.size() * grid.active_users.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t cell = 0; cell < cells; ++cell) {
        const std::size_t d = static_cast<std::size_t>(cell) / grid.active_users.size();
        const std::size_t u = static_cast<std::size_t>(cell) % grid.active_users.size();
        const NetworkScenario sc =
            sweep_cell_scenario(cfg, capacity, grid.distances_km[d], grid.active_users[u]);
        grid.rates_bps[static_cast<std::size_t>(cell)] = analytic_session_rate(sc, 0).rate_bps;
    }
    return grid;
}

std::vector<SweepGrid> sweep_grids(const SweepConfig& cfg) {
    std::vector<SweepGrid> grids;
    grids.reserve(cfg.capacities.size());
    for (int capacity : cfg.capacities) grids.push_back(sweep_capacity(cfg, capacity));
    return grids;
}

double full_occupancy_reach_km(const SweepGrid& grid) {
    double reach = -1.0;
    const std::size_t full = grid.active_users.size() - 1;
    for (std::size_t d = 0; d < grid.distances_km.size(); ++d)
        if (grid.at(d, full) > 0.0) reach = grid.distances_km[d];
    return reach;
}

std::vector<SessionPoint> session_series(const NetworkScenario& sc, int n_sessions,
                                         SeriesMode mode, std::uint64_t seed,
                                         std::uint64_t gates_per_session, int jobs) {
    sc.validate();
    if (n_sessions < 1) throw ValidationError("n_sessions must be >= 1");
    std::uint64_t gates = gates_per_session;
    if (gates == 0) {
        const double full = sc.detector.gate_rate_hz * sc.session_seconds;
        gates = static_cast<std::uint64_t>(full);
    }
    gates -= gates % static_cast<std::uint64_t>(sc.capacity);

    std::vector<SessionPoint> series;
    for (int s = 0; s < n_sessions; ++s) {
        std::vector<KeyRateReport> reports;
        if (mode == SeriesMode::analytic) {
            const SessionTally tally = expected_session_tally(sc, gates);
            reports = tally_to_reports(tally, sc);
        } else {
            const SessionTally tally =
                run_session(sc, seed + static_cast<std::uint64_t>(s), gates, jobs);
            reports = tally_to_reports(tally, sc);
        }
        for (const KeyRateReport& r : reports)
            series.push_back(SessionPoint{s, r.user, r.qber, r.rate_bps});
    }
    return series;
}

double per_user_estimate(const KeyRateReport& r1, const KeyRateReport& r2, int capacity) {
    if (capacity < 1) throw ValidationError("capacity must be >= 1");
    return (r1.rate_bps + r2.rate_bps) / capacity;
}

void write_grid_csv(std::ostream& out, const SweepGrid& grid) {
    out << "distance_km";
    for (int n : grid.active_users) out << ",u=" << n;
    out << '\n';
    for (std::size_t d = 0; d < grid.distances_km.size(); ++d) {
        out << format_number(grid.distances_km[d]);
        for (std::size_t u = 0; u < grid.active_users.size(); ++u)
            out << ',' << format_number(grid.at(d, u));
        out << '\n';
    }
}

void write_grid_matrix(std::ostream& out, const SweepGrid& grid) {
    // gnuplot nonuniform matrix: first row = column coordinates (active
    // users), first column = row coordinates (distance).
    out << grid.active_users.size();
    for (int n : grid.active_users) out << ' ' << n;
    out << '\n';
    for (std::size_t d = 0; d < grid.distances_km.size(); ++d) {
        out << format_number(grid.distances_km[d]);
        for (std::size_t u = 0; u < grid.active_users.size(); ++u)
            out << ' ' << format_number(grid.at(d, u));
        out << '\n';
    }
}

void write_series_csv(std::ostream& out, const std::vector<SessionPoint>& series) {
    out << "session,user,qber,rate_bps\n";
    for (const SessionPoint& p : series)
        out << p.session << ',' << p.user << ',' << format_number(p.qber) << ','
            << format_number(p.rate_bps) << '\n';
}

}  // namespace qan
