#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include "fedrdma/chunk.hpp"

namespace fedrdma {

// Deterministic model of one WAN path: a rate-limited sender, a single
// buffer-limited bottleneck node, and symmetric propagation delay.
//
// The bottleneck is a fluid queue used for the drop decision only: it fills
// at (sender_rate - drain_rate) while a burst is being injected, drains at
// drain_rate otherwise, and tail-drops bytes that arrive while it sits at its
// capacity. Forwarding latency is cut-through: delivered bytes reach the far
// end one propagation delay after they finish serializing at the sender.
//
// The path starts cold: until a burst has transited cleanly, only
// cold_buffer bytes of absorption are available. A clean burst warms the
// path and raises the absorption limit to bottleneck_buffer.

struct PathConfig {
    double sender_rate_bps = 10e9;
    double rtt_s = 0.020;
    double bottleneck_drain_rate_bps = 3.5e9;
    std::uint64_t bottleneck_buffer_bytes = 4'000'000;
    std::uint64_t cold_buffer_bytes = 1'000'000;
    std::uint32_t mtu_bytes = 1500;
    double ack_timeout_s = 0.060;  // 3 x rtt
    double per_chunk_overhead_s = 0.00015;
    std::uint64_t seed = 1;

    double one_way_s() const { return rtt_s / 2.0; }

    void validate() const {
        if (sender_rate_bps <= 0) throw std::invalid_argument("sender_rate must be > 0");
        if (bottleneck_drain_rate_bps <= 0) throw std::invalid_argument("drain rate must be > 0");
        if (mtu_bytes < 64) throw std::invalid_argument("mtu must be >= 64");
        if (bottleneck_buffer_bytes < cold_buffer_bytes || cold_buffer_bytes < mtu_bytes)
            throw std::invalid_argument("require bottleneck_buffer >= cold_buffer >= mtu");
        if (rtt_s < 0 || ack_timeout_s < 0 || per_chunk_overhead_s < 0)
            throw std::invalid_argument("negative time constant");
    }
};

// Calibrated defaults at a given sender rate. ack_timeout tracks 3 x rtt.
inline PathConfig default_path(double sender_rate_bps, double rtt_s = 0.020) {
    PathConfig cfg;
    cfg.sender_rate_bps = sender_rate_bps;
    cfg.rtt_s = rtt_s;
    cfg.ack_timeout_s = 3.0 * rtt_s;
    return cfg;
}

struct PathState {
    double clock_s = 0.0;            // sender-side simulation time
    double queue_bytes = 0.0;        // bottleneck occupancy, valid as of queue_asof_s
    double queue_asof_s = 0.0;
    bool warmed = false;
    std::uint64_t drops = 0;         // dropped bytes, cumulative
    std::uint64_t delivered_bytes = 0;
};

// MTU-level slice of a transfer, used by the packet-granular transport.
struct Segment {
    std::uint64_t offset = 0;  // byte offset into the destination region
    std::uint32_t len = 0;     // <= mtu, > 0
    std::uint64_t seq = 0;     // packet sequence number
};

inline double effective_buffer(const PathConfig& cfg, const PathState& st) {
    return static_cast<double>(st.warmed ? cfg.bottleneck_buffer_bytes : cfg.cold_buffer_bytes);
}

// Decays the queue to time t (no arrivals in between).
inline void decay_queue_to(const PathConfig& cfg, PathState& st, double t) {
    if (t <= st.queue_asof_s) return;
    const double drained = (t - st.queue_asof_s) * cfg.bottleneck_drain_rate_bps / 8.0;
    st.queue_bytes = std::max(0.0, st.queue_bytes - drained);
    st.queue_asof_s = t;
}

struct BurstResult {
    std::uint64_t dropped = 0;        // bytes tail-dropped at the bottleneck
    double completion_s = 0.0;        // arrival of the last delivered byte at the far end
    double injection_end_s = 0.0;     // sender free again
    double peak_queue_bytes = 0.0;
};

// Injects `burst_len` bytes at sender_rate starting at st.clock_s and evolves
// the fluid queue. Drops are data, not errors; the caller decides what a
// drop means for its protocol.
inline BurstResult path_burst(const PathConfig& cfg, PathState& st, std::uint64_t burst_len) {
    const double r_in = cfg.sender_rate_bps / 8.0;   // bytes/s
    const double r_out = cfg.bottleneck_drain_rate_bps / 8.0;
    const double t0 = st.clock_s;
    const double t_inj = static_cast<double>(burst_len) / r_in;

    decay_queue_to(cfg, st, t0);
    const double buffer = effective_buffer(cfg, st);
    const double q0 = st.queue_bytes;

    BurstResult res;
    double q_end;
    if (r_in <= r_out) {
        q_end = std::max(0.0, q0 - (r_out - r_in) * t_inj);
        res.peak_queue_bytes = q0;
    } else {
        const double growth = r_in - r_out;  // bytes/s while injecting
        const double t_full = q0 >= buffer ? 0.0 : (buffer - q0) / growth;
        if (t_full >= t_inj) {
            q_end = q0 + growth * t_inj;
            res.peak_queue_bytes = q_end;
        } else {
            res.dropped = static_cast<std::uint64_t>((t_inj - t_full) * growth + 0.5);
            res.dropped = std::min(res.dropped, burst_len);
            q_end = buffer;
            res.peak_queue_bytes = buffer;
        }
    }

    res.injection_end_s = t0 + t_inj;
    res.completion_s = res.injection_end_s + cfg.one_way_s();
    st.clock_s = res.injection_end_s;
    st.queue_bytes = q_end;
    st.queue_asof_s = res.injection_end_s;
    st.drops += res.dropped;
    st.delivered_bytes += burst_len - res.dropped;
    return res;
}

// Sends a priming burst. A clean transit warms the path; any drop leaves it
// cold and the loss is reported to the caller.
inline BurstResult warm_up(const PathConfig& cfg, PathState& st, std::uint64_t primer_len) {
    BurstResult res = path_burst(cfg, st, primer_len);
    if (res.dropped == 0) st.warmed = true;
    return res;
}

// Closed-form latency of an ACK-gated chunked transfer with no pipelining:
// every chunk costs its serialization, one RTT of gating, and the fixed
// per-chunk overhead; the last chunk is prorated to its true size. Companion
// oracle for the event-driven transports.
inline double analytic_chunked_latency(std::uint64_t total_bytes, std::uint64_t chunk_bytes,
                                       double bandwidth_bps, double rtt_s,
                                       double per_chunk_overhead_s) {
    if (chunk_bytes == 0) throw ZeroChunkSizeError();
    if (bandwidth_bps <= 0) throw std::invalid_argument("bandwidth must be > 0");
    const ChunkPlan plan = plan_chunks(total_bytes, chunk_bytes);
    const double full = 8.0 * static_cast<double>(plan.base_chunk_size) / bandwidth_bps;
    const double last = 8.0 * static_cast<double>(plan.last_chunk_size) / bandwidth_bps;
    const double per_chunk_fixed = rtt_s + per_chunk_overhead_s;
    return (plan.num_chunks - 1) * (full + per_chunk_fixed) + last + per_chunk_fixed;
}

}  // namespace fedrdma
