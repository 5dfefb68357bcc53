#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedrdma/federation.hpp"
#include "fedrdma/transports.hpp"

namespace fedrdma {

// Scenario files are JSON. Unknown keys are hard errors so a typo can never
// silently run with defaults.

struct ConfigParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingleBlobWorkload {
    std::uint64_t bytes = 0;
};

struct FederationWorkload {
    std::uint32_t rounds = 1;
    std::uint32_t clients = 1;
    std::uint64_t model_bytes = 0;
    double compute_time_per_round_s = 0.0;
    bool parallel_clients = false;
};

struct SweepWorkload {
    std::string axis;  // "bandwidth_bps" | "chunk_bytes"
    std::vector<std::uint64_t> values;
    std::uint64_t bytes = 0;
};

struct Scenario {
    std::string id;
    std::uint32_t repetitions = 1;
    std::uint64_t seed = 1;
    PathConfig path;
    TransportParams transport;
    std::optional<SingleBlobWorkload> single;
    std::optional<FederationWorkload> federation;
    std::optional<SweepWorkload> sweep;
};

namespace detail {

using json = nlohmann::json;

inline void require_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigParseError("unknown key \"" + it.key() + "\" in " + where);
        }
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigParseError(std::string("bad value for key \"") + key + "\"");
    }
}

inline PathConfig parse_path(const json& j) {
    require_keys(j,
                 {"sender_rate_bps", "rtt_s", "bottleneck_drain_rate_bps",
                  "bottleneck_buffer_bytes", "cold_buffer_bytes", "mtu_bytes", "ack_timeout_s",
                  "per_chunk_overhead_s", "seed"},
                 "path");
    PathConfig cfg;
    cfg.sender_rate_bps = get_or<double>(j, "sender_rate_bps", cfg.sender_rate_bps);
    cfg.rtt_s = get_or<double>(j, "rtt_s", cfg.rtt_s);
    cfg.bottleneck_drain_rate_bps =
        get_or<double>(j, "bottleneck_drain_rate_bps", cfg.bottleneck_drain_rate_bps);
    cfg.bottleneck_buffer_bytes =
        get_or<std::uint64_t>(j, "bottleneck_buffer_bytes", cfg.bottleneck_buffer_bytes);
    cfg.cold_buffer_bytes = get_or<std::uint64_t>(j, "cold_buffer_bytes", cfg.cold_buffer_bytes);
    cfg.mtu_bytes = get_or<std::uint32_t>(j, "mtu_bytes", cfg.mtu_bytes);
    cfg.ack_timeout_s = get_or<double>(j, "ack_timeout_s", 3.0 * cfg.rtt_s);
    cfg.per_chunk_overhead_s = get_or<double>(j, "per_chunk_overhead_s", cfg.per_chunk_overhead_s);
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigParseError(std::string("invalid path config: ") + e.what());
    }
    return cfg;
}

inline TransportKind parse_kind(const std::string& s) {
    if (s == "naive_rdma") return TransportKind::NaiveRdma;
    if (s == "tcp_like") return TransportKind::TcpLike;
    if (s == "fedrdma_v1") return TransportKind::FedRdmaV1;
    if (s == "fedrdma_e") return TransportKind::FedRdmaE;
    throw ConfigParseError("unknown transport kind \"" + s + "\"");
}

inline LinkEnablePolicy parse_policy(const std::string& s) {
    if (s == "auto") return LinkEnablePolicy::Auto;
    if (s == "force") return LinkEnablePolicy::Force;
    if (s == "off") return LinkEnablePolicy::Off;
    throw ConfigParseError("unknown link_enable policy \"" + s + "\"");
}

inline TransportParams parse_transport(const json& j) {
    require_keys(j,
                 {"kind", "base_chunk_size_bytes", "artificial_delay_s", "tcp_window_bytes",
                  "link_enable", "retry_limit", "pool_regions", "poll_period_s", "nic_power_w",
                  "tcp_smoothed", "primer_rate_threshold_bps", "primer_chunk_threshold_bytes"},
                 "transport");
    TransportParams p;
    p.kind = parse_kind(get_or<std::string>(j, "kind", "fedrdma_e"));
    p.base_chunk_size = get_or<std::uint64_t>(j, "base_chunk_size_bytes", p.base_chunk_size);
    p.artificial_delay_s = get_or<double>(j, "artificial_delay_s", p.artificial_delay_s);
    p.tcp_window_bytes = get_or<std::uint64_t>(j, "tcp_window_bytes", p.tcp_window_bytes);
    p.link_enable = parse_policy(get_or<std::string>(j, "link_enable", "auto"));
    p.retry_limit = get_or<std::uint32_t>(j, "retry_limit", p.retry_limit);
    p.pool_regions = get_or<std::size_t>(j, "pool_regions", p.pool_regions);
    p.poll_period_s = get_or<double>(j, "poll_period_s", p.poll_period_s);
    p.nic_power_w = get_or<double>(j, "nic_power_w", p.nic_power_w);
    p.tcp_smoothed = get_or<bool>(j, "tcp_smoothed", p.tcp_smoothed);
    p.primer_rate_threshold_bps =
        get_or<double>(j, "primer_rate_threshold_bps", p.primer_rate_threshold_bps);
    p.primer_chunk_threshold_bytes =
        get_or<std::uint64_t>(j, "primer_chunk_threshold_bytes", p.primer_chunk_threshold_bytes);
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigParseError(std::string("invalid transport config: ") + e.what());
    }
    return p;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
    using detail::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigParseError(std::string("not valid JSON: ") + e.what());
    }
    detail::require_keys(j, {"id", "repetitions", "seed", "path", "transport", "workload"},
                         "scenario");

    Scenario sc;
    sc.id = detail::get_or<std::string>(j, "id", "");
    if (sc.id.empty()) throw ConfigParseError("missing or empty key \"id\"");
    sc.repetitions = detail::get_or<std::uint32_t>(j, "repetitions", 1);
    if (sc.repetitions < 1) throw ConfigParseError("\"repetitions\" must be >= 1");
    sc.seed = detail::get_or<std::uint64_t>(j, "seed", 1);
    if (j.contains("path")) sc.path = detail::parse_path(j.at("path"));
    if (j.contains("transport")) sc.transport = detail::parse_transport(j.at("transport"));

    if (!j.contains("workload")) throw ConfigParseError("missing key \"workload\"");
    const json& w = j.at("workload");
    const std::string type = detail::get_or<std::string>(w, "type", "");
    if (type == "single_blob") {
        detail::require_keys(w, {"type", "bytes"}, "workload");
        SingleBlobWorkload sb;
        sb.bytes = detail::get_or<std::uint64_t>(w, "bytes", 0);
        sc.single = sb;
    } else if (type == "federation") {
        detail::require_keys(w,
                             {"type", "rounds", "clients", "model_bytes",
                              "compute_time_per_round_s", "parallel_clients"},
                             "workload");
        FederationWorkload f;
        f.rounds = detail::get_or<std::uint32_t>(w, "rounds", 1);
        f.clients = detail::get_or<std::uint32_t>(w, "clients", 1);
        f.model_bytes = detail::get_or<std::uint64_t>(w, "model_bytes", 0);
        f.compute_time_per_round_s = detail::get_or<double>(w, "compute_time_per_round_s", 0.0);
        f.parallel_clients = detail::get_or<bool>(w, "parallel_clients", false);
        sc.federation = f;
    } else if (type == "sweep") {
        detail::require_keys(w, {"type", "axis", "values", "bytes"}, "workload");
        SweepWorkload sw;
        sw.axis = detail::get_or<std::string>(w, "axis", "");
        if (sw.axis != "bandwidth_bps" && sw.axis != "chunk_bytes") {
            throw ConfigParseError("sweep axis must be \"bandwidth_bps\" or \"chunk_bytes\"");
        }
        if (!w.contains("values") || !w.at("values").is_array() || w.at("values").empty()) {
            throw ConfigParseError("sweep needs a non-empty \"values\" array");
        }
        for (const auto& v : w.at("values")) {
            if (!v.is_number()) throw ConfigParseError("sweep values must be numbers");
            sw.values.push_back(v.get<std::uint64_t>());
        }
        sw.bytes = detail::get_or<std::uint64_t>(w, "bytes", 0);
        sc.sweep = sw;
    } else if (type.empty()) {
        throw ConfigParseError("workload missing \"type\"");
    } else {
        throw ConfigParseError("unknown workload type \"" + type + "\"");
    }
    return sc;
}

}  // namespace fedrdma
