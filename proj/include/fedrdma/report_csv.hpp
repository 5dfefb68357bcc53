#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedrdma/transports.hpp"

namespace fedrdma {

// One benchmark result row. Fixed column order; latencies and other seconds
// values carry 3 decimals, byte counts are plain integers.
struct CsvRow {
    std::string scenario_id;
    std::uint32_t repetition = 0;
    std::string transport;
    std::uint64_t bandwidth_bps = 0;
    double rtt_s = 0.0;
    std::uint64_t data_bytes = 0;
    std::uint64_t chunk_bytes = 0;
    std::uint32_t num_chunks = 0;
    bool link_enable = false;
    std::string result;
    double latency_s = 0.0;
    std::uint64_t bytes_on_wire = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t header_ops = 0;
    std::uint64_t peak_extra_memory_bytes = 0;
    double power_w = 0.0;
    double energy_j = 0.0;
    std::uint64_t seed = 0;
};

inline const char* csv_header() {
    return "scenario_id,repetition,transport,bandwidth_bps,rtt_s,data_bytes,chunk_bytes,"
           "num_chunks,link_enable,result,latency_s,bytes_on_wire,retransmissions,header_ops,"
           "peak_extra_memory_bytes,power_w,energy_j,seed";
}

inline std::string format_seconds(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

inline std::string to_csv(const CsvRow& r) {
    std::ostringstream os;
    os << r.scenario_id << ',' << r.repetition << ',' << r.transport << ',' << r.bandwidth_bps
       << ',' << format_seconds(r.rtt_s) << ',' << r.data_bytes << ',' << r.chunk_bytes << ','
       << r.num_chunks << ',' << (r.link_enable ? "yes" : "no") << ',' << r.result << ','
       << format_seconds(r.latency_s) << ',' << r.bytes_on_wire << ',' << r.retransmissions
       << ',' << r.header_ops << ',' << r.peak_extra_memory_bytes << ','
       << format_seconds(r.power_w) << ',' << format_seconds(r.energy_j) << ',' << r.seed;
    return os.str();
}

struct CsvParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses one data row produced by to_csv. Self-consumable output: every row
// this library writes must come back through here unchanged.
inline CsvRow parse_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    if (fields.size() != 18) throw CsvParseError("expected 18 columns, got " +
                                                 std::to_string(fields.size()));

    auto u64 = [&](const std::string& s, const char* what) -> std::uint64_t {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw CsvParseError(std::string("bad integer in column ") + what);
        return v;
    };
    auto f64 = [&](const std::string& s, const char* what) -> double {
        try {
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw CsvParseError(std::string("bad number in column ") + what);
        }
    };

    CsvRow r;
    r.scenario_id = fields[0];
    r.repetition = static_cast<std::uint32_t>(u64(fields[1], "repetition"));
    r.transport = fields[2];
    r.bandwidth_bps = u64(fields[3], "bandwidth_bps");
    r.rtt_s = f64(fields[4], "rtt_s");
    r.data_bytes = u64(fields[5], "data_bytes");
    r.chunk_bytes = u64(fields[6], "chunk_bytes");
    r.num_chunks = static_cast<std::uint32_t>(u64(fields[7], "num_chunks"));
    if (fields[8] != "yes" && fields[8] != "no") throw CsvParseError("bad link_enable flag");
    r.link_enable = fields[8] == "yes";
    r.result = fields[9];
    r.latency_s = f64(fields[10], "latency_s");
    r.bytes_on_wire = u64(fields[11], "bytes_on_wire");
    r.retransmissions = u64(fields[12], "retransmissions");
    r.header_ops = u64(fields[13], "header_ops");
    r.peak_extra_memory_bytes = u64(fields[14], "peak_extra_memory_bytes");
    r.power_w = f64(fields[15], "power_w");
    r.energy_j = f64(fields[16], "energy_j");
    r.seed = u64(fields[17], "seed");
    return r;
}

inline CsvRow make_row(const std::string& scenario_id, std::uint32_t repetition,
                       TransportKind kind, const PathConfig& path, const TransferReport& rep,
                       std::uint64_t seed) {
    CsvRow r;
    r.scenario_id = scenario_id;
    r.repetition = repetition;
    r.transport = to_string(kind);
    r.bandwidth_bps = static_cast<std::uint64_t>(path.sender_rate_bps);
    r.rtt_s = path.rtt_s;
    r.data_bytes = rep.data_bytes;
    r.chunk_bytes = rep.chunk_bytes;
    r.num_chunks = rep.num_chunks;
    r.link_enable = rep.primer_used;
    r.result = rep.result == TransferResult::Success ? "success" : "transmission_failure";
    r.latency_s = rep.latency_s;
    r.bytes_on_wire = rep.bytes_on_wire;
    r.retransmissions = rep.retransmissions;
    r.header_ops = rep.header_ops;
    r.peak_extra_memory_bytes = rep.peak_extra_memory;
    r.power_w = rep.power_w;
    r.energy_j = rep.energy_j;
    r.seed = seed;
    return r;
}

}  // namespace fedrdma
