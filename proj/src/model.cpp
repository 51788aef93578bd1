#include "qan/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qan {

namespace {

void require(bool ok, const std::string& invariant) {
    if (!ok) throw ValidationError(invariant);
}

void require_probability(double p, const std::string& name) {
    require(p >= 0.0 && p <= 1.0, name + " must be in [0,1]");
}

bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

}  // namespace

const char* level_name(Level level) {
    switch (level) {
        case Level::signal: return "signal";
        case Level::decoy: return "decoy";
        case Level::vacuum: return "vacuum";
    }
    return "?";
}

double DecoyProtocol::intensity(Level level) const {
    switch (level) {
        case Level::signal: return mu;
        case Level::decoy: return nu;
        case Level::vacuum: return vacuum;
    }
    return 0.0;
}

double DecoyProtocol::probability(Level level) const {
    switch (level) {
        case Level::signal: return p_signal;
        case Level::decoy: return p_decoy;
        case Level::vacuum: return p_vacuum;
    }
    return 0.0;
}

double LinkModel::channel_loss_db() const {
    if (total_loss_db) return *total_loss_db;
    return fibre_km * fibre_loss_db_per_km + splitter_db;
}

double LinkModel::transmittance() const {
    return std::pow(10.0, -channel_loss_db() / 10.0);
}

double CrossTalkModel::spill_probability(int separation, int capacity) const {
    if (capacity < 2 || separation < 1 || separation > capacity - 1) return 0.0;
    if (profile) return (*profile)[static_cast<std::size_t>(separation - 1)];
    return base_excess / (capacity - 1);
}

void NetworkScenario::validate() const {
    require(capacity >= 1, "capacity must be >= 1");
    require(active_users >= 1 && active_users <= capacity,
            "active_users must satisfy 1 <= active_users <= capacity");
    require(users.size() == static_cast<std::size_t>(active_users),
            "users must hold exactly one link per active user");
    for (std::size_t i = 0; i < users.size(); ++i) {
        const LinkModel& u = users[i];
        const std::string who = "users[" + std::to_string(i) + "].";
        require(u.fibre_km >= 0.0, who + "fibre_km must be nonnegative");
        require(u.fibre_loss_db_per_km >= 0.0, who + "fibre_loss_db_per_km must be nonnegative");
        require(u.splitter_db >= 0.0, who + "splitter_db must be nonnegative");
        if (u.total_loss_db) require(*u.total_loss_db >= 0.0, who + "total_loss_db must be nonnegative");
        require(u.e_opt >= 0.0 && u.e_opt <= 0.5, who + "e_opt must be in [0,0.5]");
    }
    require_probability(detector.eta_bob, "detector.eta_bob");
    require_probability(detector.dark_per_gate, "detector.dark_per_gate");
    require_probability(detector.afterpulse, "detector.afterpulse");
    require(detector.gate_rate_hz > 0.0, "detector.gate_rate_hz must be positive");

    require(decoy.mu > decoy.nu && decoy.nu > decoy.vacuum && decoy.vacuum >= 0.0,
            "decoy intensities must satisfy mu > nu > vacuum >= 0");
    require_probability(decoy.p_signal, "decoy.p_signal");
    require_probability(decoy.p_decoy, "decoy.p_decoy");
    require_probability(decoy.p_vacuum, "decoy.p_vacuum");
    require(std::abs(decoy.p_signal + decoy.p_decoy + decoy.p_vacuum - 1.0) <= 1e-12,
            "decoy send probabilities must sum to 1");

    require(crosstalk.base_excess >= 0.0, "crosstalk.base_excess must be nonnegative");
    if (crosstalk.profile) {
        require(capacity >= 2, "crosstalk.profile requires capacity >= 2");
        require(crosstalk.profile->size() == static_cast<std::size_t>(capacity - 1),
                "crosstalk.profile must have capacity-1 entries (separations 1..N-1)");
        double sum = 0.0;
        for (double p : *crosstalk.profile) {
            require(p >= 0.0, "crosstalk.profile entries must be nonnegative");
            sum += p;
        }
        require(std::abs(sum - crosstalk.base_excess) <= 1e-9,
                "crosstalk.profile must sum to base_excess");
    }

    require(session_seconds > 0.0, "session_s must be positive");
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must be in (0,1)");
    require(f_ec >= 1.0, "f_ec must be >= 1");
    require(finite_size_c >= 0.0, "finite_size_c must be nonnegative");
}

SplitterLoss splitter_loss_for_ratio(int ratio) {
    switch (ratio) {
        case 8: return {9.7, false};
        case 16: return {13.0, false};
        case 32: return {16.1, false};
        case 64: return {19.5, false};
        default: break;
    }
    if (ratio < 2 || !is_power_of_two(ratio))
        throw ValidationError("splitter ratio must be a power of two >= 2");
    return {10.0 * std::log10(static_cast<double>(ratio)) + 0.6, true};
}

namespace {

using nlohmann::json;

LinkModel link_from_json(const json& j) {
    LinkModel link;
    link.fibre_km = j.at("fibre_km").get<double>();
    link.splitter_db = j.at("splitter_db").get<double>();
    link.fibre_loss_db_per_km = j.value("fibre_loss_db_per_km", 0.2);
    if (j.contains("total_loss_db") && !j.at("total_loss_db").is_null())
        link.total_loss_db = j.at("total_loss_db").get<double>();
    link.e_opt = j.value("e_opt", 0.005);
    return link;
}

json link_to_json(const LinkModel& link) {
    json j{{"fibre_km", link.fibre_km},
           {"fibre_loss_db_per_km", link.fibre_loss_db_per_km},
           {"splitter_db", link.splitter_db},
           {"e_opt", link.e_opt}};
    if (link.total_loss_db) j["total_loss_db"] = *link.total_loss_db;
    return j;
}

}  // namespace

NetworkScenario scenario_from_json(const nlohmann::json& j) {
    NetworkScenario sc;
    try {
        sc.capacity = j.at("capacity").get<int>();
        sc.active_users = j.at("active_users").get<int>();
        for (const auto& u : j.at("users")) sc.users.push_back(link_from_json(u));

        const auto& det = j.at("detector");
        sc.detector.eta_bob = det.at("eta_bob").get<double>();
        sc.detector.dark_per_gate = det.at("dark_per_gate").get<double>();
        sc.detector.afterpulse = det.at("afterpulse").get<double>();
        sc.detector.gate_rate_hz = det.at("gate_rate_hz").get<double>();

        const auto& dec = j.at("decoy");
        sc.decoy.mu = dec.at("mu").get<double>();
        sc.decoy.nu = dec.at("nu").get<double>();
        sc.decoy.vacuum = dec.at("vacuum").get<double>();
        sc.decoy.p_signal = dec.at("p_signal").get<double>();
        sc.decoy.p_decoy = dec.at("p_decoy").get<double>();
        sc.decoy.p_vacuum = dec.at("p_vacuum").get<double>();

        if (j.contains("crosstalk")) {
            const auto& xt = j.at("crosstalk");
            sc.crosstalk.base_excess = xt.value("base_excess", 0.019);
            if (xt.contains("profile") && !xt.at("profile").is_null())
                sc.crosstalk.profile = xt.at("profile").get<std::vector<double>>();
        }

        sc.session_seconds = j.at("session_s").get<double>();
        sc.epsilon = j.value("epsilon", 1e-10);
        sc.f_ec = j.value("f_ec", 1.1);
        sc.finite_size_c = j.value("finite_size_c", 1.0);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scenario parse error: ") + e.what());
    }
    sc.validate();
    return sc;
}

nlohmann::json scenario_to_json(const NetworkScenario& sc) {
    json users = json::array();
    for (const auto& u : sc.users) users.push_back(link_to_json(u));
    json xt{{"base_excess", sc.crosstalk.base_excess}};
    if (sc.crosstalk.profile) xt["profile"] = *sc.crosstalk.profile;
    return json{{"capacity", sc.capacity},
                {"active_users", sc.active_users},
                {"users", users},
                {"detector",
                 {{"eta_bob", sc.detector.eta_bob},
                  {"dark_per_gate", sc.detector.dark_per_gate},
                  {"afterpulse", sc.detector.afterpulse},
                  {"gate_rate_hz", sc.detector.gate_rate_hz}}},
                {"decoy",
                 {{"mu", sc.decoy.mu},
                  {"nu", sc.decoy.nu},
                  {"vacuum", sc.decoy.vacuum},
                  {"p_signal", sc.decoy.p_signal},
                  {"p_decoy", sc.decoy.p_decoy},
                  {"p_vacuum", sc.decoy.p_vacuum}}},
                {"crosstalk", xt},
                {"session_s", sc.session_seconds},
                {"epsilon", sc.epsilon},
                {"f_ec", sc.f_ec},
                {"finite_size_c", sc.finite_size_c}};
}

NetworkScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("scenario parse error: ") + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace qan
