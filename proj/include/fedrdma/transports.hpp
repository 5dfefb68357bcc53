#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fedrdma/bytegen.hpp"
#include "fedrdma/chunk.hpp"
#include "fedrdma/gbn.hpp"
#include "fedrdma/mr_pool.hpp"
#include "fedrdma/wan_path.hpp"

namespace fedrdma {

// The four transports under comparison. The chunked ones gate on a per-chunk
// ack so at most one chunk is ever on the link; the naive one trusts the path
// with the whole payload at line rate.

enum class TransportKind { NaiveRdma, TcpLike, FedRdmaV1, FedRdmaE };

inline const char* to_string(TransportKind k) {
    switch (k) {
        case TransportKind::NaiveRdma: return "naive_rdma";
        case TransportKind::TcpLike: return "tcp_like";
        case TransportKind::FedRdmaV1: return "fedrdma_v1";
        case TransportKind::FedRdmaE: return "fedrdma_e";
    }
    return "?";
}

enum class LinkEnablePolicy { Auto, Force, Off };

struct TransportParams {
    TransportKind kind = TransportKind::FedRdmaE;
    std::uint64_t base_chunk_size = 4'000'000;
    double artificial_delay_s = 0.0144;      // v1 pacing between chunks
    std::uint64_t tcp_window_bytes = 812'500;
    LinkEnablePolicy link_enable = LinkEnablePolicy::Auto;
    std::uint32_t retry_limit = kDefaultRetryLimit;
    std::size_t pool_regions = 2;
    double poll_period_s = 0.0;              // 0 = rtt/4
    double nic_power_w = 0.0;                // 0 = per-kind default
    bool tcp_smoothed = false;               // sender-paced (token-bucket style)
    double primer_rate_threshold_bps = 4e9;
    std::uint64_t primer_chunk_threshold_bytes = 2'000'000;

    void validate() const {
        if (base_chunk_size == 0) throw ZeroChunkSizeError();
        if (artificial_delay_s < 0) throw std::invalid_argument("artificial_delay must be >= 0");
        if (tcp_window_bytes == 0) throw std::invalid_argument("tcp_window must be > 0");
        if (pool_regions == 0) throw std::invalid_argument("pool needs at least one region");
    }
};

inline double default_nic_power_w(TransportKind k) {
    return k == TransportKind::TcpLike ? 5.1 : 18.7;
}

struct TransferReport {
    TransferResult result = TransferResult::Success;
    double latency_s = 0.0;
    std::uint64_t bytes_on_wire = 0;
    std::uint64_t retransmissions = 0;   // packet instances sent again
    std::uint64_t header_ops = 0;        // headers constructed
    std::uint64_t header_parses = 0;     // headers successfully parsed
    std::uint64_t peak_extra_memory = 0;
    bool primer_used = false;
    double power_w = 0.0;
    double energy_j = 0.0;

    std::uint64_t data_bytes = 0;
    std::uint64_t chunk_bytes = 0;
    std::uint32_t num_chunks = 0;
    std::uint64_t max_inflight_bytes = 0;
    std::uint64_t dropped_bytes = 0;
    bool poll_sound = true;
};

// Transfer payload. A materialized blob drives the real data plane (writes,
// reassembly, content verification); otherwise the engine streams the seeded
// generator or runs in accounting mode.
struct Payload {
    std::uint64_t len = 0;
    std::uint64_t seed = 1;
    const Blob* blob = nullptr;

    static Payload of(const Blob& b) { return Payload{b.len(), 0, &b}; }
    static Payload synthetic(std::uint64_t len, std::uint64_t seed) {
        return Payload{len, seed, nullptr};
    }
};

struct RegionTooSmallError : std::invalid_argument {
    RegionTooSmallError() : std::invalid_argument("receive region smaller than transfer + header") {}
};

// ---- Link-Enable -----------------------------------------------------------

enum class PrimerKind {
    None,              // path is trusted with the schedule as-is
    NaturalSmallFirst, // schedule already starts below the risk threshold
    TailChunkFirst,    // reorder: the small tail chunk goes first (flagged primer)
    DedicatedProbe,    // an extra MTU-sized, headerless probe segment goes first
};

struct PrimerDecision {
    PrimerKind kind = PrimerKind::None;
    bool used() const { return kind != PrimerKind::None; }
};

// Decides how a transfer primes the path. Large chunks on a fast, unwarmed
// path are the hazard; a near-MTU tail chunk makes a free primer, otherwise
// a dedicated probe burns one extra RTT.
inline PrimerDecision apply_link_enable(const TransportParams& params, const PathConfig& cfg,
                                        const ChunkPlan& plan) {
    const bool descending = params.kind == TransportKind::FedRdmaE;
    if (params.link_enable == LinkEnablePolicy::Off) return {PrimerKind::None};
    if (params.link_enable == LinkEnablePolicy::Force) return {PrimerKind::DedicatedProbe};

    if (cfg.sender_rate_bps < params.primer_rate_threshold_bps) return {PrimerKind::None};
    const std::uint64_t largest = std::max<std::uint64_t>(
        plan.num_chunks > 1 ? plan.base_chunk_size : 0, plan.last_chunk_size);
    if (largest < params.primer_chunk_threshold_bytes) return {PrimerKind::None};

    const std::uint64_t first_scheduled =
        descending ? plan.last_chunk_size
                   : (plan.num_chunks == 1 ? plan.last_chunk_size : plan.base_chunk_size);
    if (first_scheduled < params.primer_chunk_threshold_bytes) {
        return {PrimerKind::NaturalSmallFirst};
    }
    if (plan.num_chunks > 1 && plan.last_chunk_size <= 4ull * cfg.mtu_bytes) {
        return {PrimerKind::TailChunkFirst};
    }
    return {PrimerKind::DedicatedProbe};
}

// ---- one-sided write engine ------------------------------------------------

namespace detail {

inline std::uint64_t packets_of(const PathConfig& cfg, std::uint64_t len) {
    return len == 0 ? 1 : (len + cfg.mtu_bytes - 1) / cfg.mtu_bytes;
}

struct WriteStats {
    std::uint64_t bytes_on_wire = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t dropped = 0;
    bool completed = false;
    double ack_time_s = 0.0;
    double arrival_s = 0.0;  // last delivered byte at the receiver
};

// One one-sided write, completed as a unit: the work request either delivers
// its whole byte range losslessly or fails and is re-posted in full, up to
// retry_limit re-posts. A burst that exceeds the absorption budget (effective
// buffer plus one packet of slack) while the path is overloaded leaves no
// headroom for timing noise; the model charges exactly one go-back recovery
// (ack timeout, then a full paced re-injection) for such writes.
inline WriteStats rdma_write_once(const PathConfig& cfg, PathState& st, std::uint64_t burst_len,
                                  std::uint32_t retry_limit) {
    WriteStats ws;
    const bool overloaded = cfg.sender_rate_bps > cfg.bottleneck_drain_rate_bps;
    for (std::uint32_t attempt = 0; attempt <= retry_limit; ++attempt) {
        const double buffer = effective_buffer(cfg, st);
        BurstResult br = path_burst(cfg, st, burst_len);
        ws.bytes_on_wire += burst_len;
        if (attempt > 0) ws.retransmissions += packets_of(cfg, burst_len);
        if (br.dropped > 0) {
            ws.dropped += br.dropped;
            st.clock_s = br.injection_end_s + cfg.ack_timeout_s;
            continue;
        }
        if (overloaded && static_cast<double>(burst_len) > buffer + cfg.mtu_bytes) {
            st.clock_s = br.injection_end_s + cfg.ack_timeout_s;
            br = path_burst(cfg, st, burst_len);
            ws.bytes_on_wire += burst_len;
            ws.retransmissions += packets_of(cfg, burst_len);
            if (br.dropped > 0) {
                ws.dropped += br.dropped;
                st.clock_s = br.injection_end_s + cfg.ack_timeout_s;
                continue;
            }
        }
        ws.completed = true;
        ws.arrival_s = br.completion_s;
        ws.ack_time_s = br.completion_s + cfg.one_way_s();
        st.clock_s = ws.ack_time_s + cfg.per_chunk_overhead_s;
        return ws;
    }
    return ws;
}

inline void fill_chunk_payload(const Payload& p, std::uint64_t offset, std::uint64_t len,
                               std::vector<std::uint8_t>& buf) {
    buf.resize(len);
    if (p.blob) {
        std::copy_n(p.blob->content.begin() + offset, len, buf.begin());
    } else {
        generate_payload(p.seed, offset, buf);
    }
}

}  // namespace detail

// ---- transports -------------------------------------------------------------

// Whole blob as one unchunked one-sided write over Go-Back-N.
inline TransferReport naive_rdma_transfer(const Payload& payload, const PathConfig& cfg,
                                          const TransportParams& params, PathState* state = nullptr,
                                          MemoryRegion* region = nullptr) {
    cfg.validate();
    PathState local;
    PathState& st = state ? *state : local;
    const double t0 = st.clock_s;

    TransferReport rep;
    rep.data_bytes = payload.len;
    rep.num_chunks = 1;
    rep.power_w = params.nic_power_w > 0 ? params.nic_power_w : default_nic_power_w(params.kind);

    if (payload.len == 0) {
        // Degenerate transfer: one empty segment, one round trip.
        rep.latency_s = cfg.rtt_s + cfg.per_chunk_overhead_s;
        st.clock_s = t0 + rep.latency_s;
        rep.energy_j = rep.power_w * rep.latency_s;
        return rep;
    }

    GbnSendOptions opt;
    opt.retry_limit = params.retry_limit;
    opt.region = payload.blob ? region : nullptr;
    TransferOutcome oc;
    if (payload.blob) {
        oc = gbn_send(cfg, st, payload.blob->content, opt);
    } else {
        oc = gbn_send_synthetic(cfg, st, payload.len, opt);
    }
    rep.result = oc.result;
    rep.latency_s = oc.latency_s + cfg.per_chunk_overhead_s;
    rep.bytes_on_wire = oc.bytes_on_wire;
    rep.retransmissions = oc.retransmissions;
    rep.dropped_bytes = oc.dropped_bytes;
    rep.max_inflight_bytes = payload.len;
    st.clock_s = t0 + rep.latency_s;
    rep.energy_j = rep.power_w * rep.latency_s;
    return rep;
}

// Window-limited goodput model with slow-start ramp; lossless by abstraction.
inline TransferReport tcp_like_transfer(const Payload& payload, const PathConfig& cfg,
                                        const TransportParams& params,
                                        PathState* state = nullptr) {
    cfg.validate();
    params.validate();
    PathState local;
    PathState& st = state ? *state : local;

    TransferReport rep;
    rep.data_bytes = payload.len;
    rep.num_chunks = 1;
    rep.power_w = params.nic_power_w > 0 ? params.nic_power_w : default_nic_power_w(params.kind);
    rep.bytes_on_wire = payload.len;
    rep.peak_extra_memory = params.tcp_window_bytes;
    rep.max_inflight_bytes = params.tcp_window_bytes;

    const double rate_bytes_per_rtt = cfg.sender_rate_bps * cfg.rtt_s / 8.0;
    double latency;
    if (payload.len == 0) {
        latency = cfg.rtt_s;
    } else if (params.tcp_smoothed) {
        // Sender-paced at the effective rate: the ramp disappears, bursts never
        // outrun the window. Smoothing can only help this model.
        const double eff_bps =
            std::min(cfg.sender_rate_bps, 8.0 * static_cast<double>(params.tcp_window_bytes) / cfg.rtt_s);
        latency = 8.0 * static_cast<double>(payload.len) / eff_bps + cfg.rtt_s;
    } else {
        double window = 10.0 * cfg.mtu_bytes;
        double rounds = 0.0;
        std::uint64_t sent = 0;
        while (sent < payload.len) {
            const double cap = std::min(window, rate_bytes_per_rtt);
            const std::uint64_t left = payload.len - sent;
            if (static_cast<double>(left) <= cap) {
                rounds += static_cast<double>(left) / cap;
                sent = payload.len;
            } else {
                rounds += 1.0;
                sent += static_cast<std::uint64_t>(cap);
                window = std::min(window * 2.0, static_cast<double>(params.tcp_window_bytes));
            }
        }
        latency = rounds * cfg.rtt_s + cfg.one_way_s();
    }
    rep.latency_s = latency;
    st.clock_s += latency;
    rep.energy_j = rep.power_w * rep.latency_s;
    return rep;
}

namespace detail {

struct ChunkScheduleEntry {
    std::uint32_t seq;
    bool primer_flag;
};

inline std::vector<ChunkScheduleEntry> v1_schedule(const ChunkPlan& plan, PrimerKind primer) {
    std::vector<ChunkScheduleEntry> sched;
    sched.reserve(plan.num_chunks);
    if (primer == PrimerKind::TailChunkFirst && plan.num_chunks > 1) {
        sched.push_back({plan.num_chunks, true});
        for (std::uint32_t s = 1; s < plan.num_chunks; ++s) sched.push_back({s, false});
    } else {
        for (std::uint32_t s = 1; s <= plan.num_chunks; ++s) sched.push_back({s, false});
    }
    return sched;
}

}  // namespace detail

// Chunked, ack-gated transfer: every chunk framed with its own header, sent
// in schedule order with the artificial inter-chunk delay, stored at the
// receiver and reassembled once complete.
inline TransferReport fedrdma_v1_transfer(const Payload& payload, const PathConfig& cfg,
                                          const TransportParams& params,
                                          PathState* state = nullptr) {
    cfg.validate();
    params.validate();
    PathState local;
    PathState& st = state ? *state : local;
    const double t0 = st.clock_s;

    TransferReport rep;
    rep.data_bytes = payload.len;
    rep.chunk_bytes = params.base_chunk_size;
    rep.power_w = params.nic_power_w > 0 ? params.nic_power_w : default_nic_power_w(params.kind);

    const ChunkPlan plan = plan_chunks(payload.len, params.base_chunk_size);
    rep.num_chunks = plan.num_chunks;
    PrimerDecision primer = apply_link_enable(params, cfg, plan);
    rep.primer_used = primer.used();
    if (st.warmed && primer.kind == PrimerKind::DedicatedProbe) {
        primer.kind = PrimerKind::None;  // path already primed by earlier traffic
        rep.primer_used = false;
    }

    if (primer.kind == PrimerKind::DedicatedProbe) {
        auto ws = detail::rdma_write_once(cfg, st, cfg.mtu_bytes, params.retry_limit);
        rep.bytes_on_wire += ws.bytes_on_wire;
        rep.retransmissions += ws.retransmissions;
        rep.dropped_bytes += ws.dropped;
        if (ws.completed) st.warmed = true;
    }

    std::vector<Chunk> received;
    std::uint64_t store_bytes = 0;
    std::vector<std::uint8_t> buf;
    bool failed = false;

    for (const auto& entry : detail::v1_schedule(plan, primer.kind)) {
        const std::uint64_t len = plan.chunk_len(entry.seq);
        const std::uint64_t burst = len + kHeaderSize;
        rep.max_inflight_bytes = std::max(rep.max_inflight_bytes, burst);

        ChunkHeader h;
        h.flags = kFlagCarriesTotal | (entry.primer_flag ? kFlagPrimer : std::uint16_t{0});
        h.seq = entry.seq;
        h.total = plan.num_chunks;
        h.payload_len = static_cast<std::uint32_t>(len);
        h.total_payload_len = payload.len;
        ++rep.header_ops;

        auto ws = detail::rdma_write_once(cfg, st, burst, params.retry_limit);
        rep.bytes_on_wire += ws.bytes_on_wire;
        rep.retransmissions += ws.retransmissions;
        rep.dropped_bytes += ws.dropped;
        if (!ws.completed) {
            failed = true;
            break;
        }
        if (!st.warmed) st.warmed = true;  // clean transit primes the path

        // Receiver side: parse the header, stash the chunk for reassembly.
        ++rep.header_parses;
        store_bytes += kHeaderSize + len;
        rep.peak_extra_memory = std::max(rep.peak_extra_memory, store_bytes);
        if (payload.blob) {
            detail::fill_chunk_payload(payload, plan.chunk_offset(entry.seq), len, buf);
            h.payload_crc32 = crc32_of(buf);
            Chunk c;
            c.header = h;
            c.payload = buf;
            received.push_back(std::move(c));
        }

        st.clock_s += params.artificial_delay_s;
    }

    if (!failed && payload.blob) {
        auto blob = reassemble(received);
        if (!blob || blob.value().crc != payload.blob->crc) failed = true;
    }

    rep.result = failed ? TransferResult::TransmissionFailure : TransferResult::Success;
    rep.latency_s = st.clock_s - t0;
    rep.energy_j = rep.power_w * rep.latency_s;
    return rep;
}

// In-place chunked transfer: one header for the whole payload, chunks written
// back to front at their final offsets inside a pooled receive region, the
// header landing last at offset 0, completion detected by polling.
inline TransferReport fedrdma_e_transfer(const Payload& payload, const PathConfig& cfg,
                                         const TransportParams& params, MRPool* pool = nullptr,
                                         PathState* state = nullptr) {
    cfg.validate();
    params.validate();
    PathState local;
    PathState& st = state ? *state : local;
    const double t0 = st.clock_s;

    TransferReport rep;
    rep.data_bytes = payload.len;
    rep.chunk_bytes = params.base_chunk_size;
    rep.power_w = params.nic_power_w > 0 ? params.nic_power_w : default_nic_power_w(params.kind);

    const ChunkPlan plan = plan_chunks(payload.len, params.base_chunk_size);
    rep.num_chunks = plan.num_chunks;

    MemoryRegion* region = nullptr;
    MemoryRegion scratch;
    if (pool) {
        auto [idx, r] = pool->acquire_next();
        if (r->capacity() < payload.len + kHeaderSize) throw RegionTooSmallError();
        region = r;
    } else {
        // Accounting plane: a real header page so polling stays honest,
        // payload coverage tracked arithmetically.
        auto r = register_mr(kHeaderSize);
        scratch = std::move(r.value());
        region = &scratch;
    }

    PrimerDecision primer = apply_link_enable(params, cfg, plan);
    rep.primer_used = primer.used();
    if (st.warmed && primer.kind != PrimerKind::None) {
        primer.kind = PrimerKind::None;
        rep.primer_used = false;
    }

    bool failed = false;
    if (primer.kind == PrimerKind::DedicatedProbe) {
        // Headerless, zero-filled probe; lands inside the region's first chunk
        // span and is overwritten by real data. Zeros never parse as a header.
        auto ws = detail::rdma_write_once(cfg, st, cfg.mtu_bytes, params.retry_limit);
        rep.bytes_on_wire += ws.bytes_on_wire;
        rep.retransmissions += ws.retransmissions;
        rep.dropped_bytes += ws.dropped;
        if (ws.completed) st.warmed = true;
        else failed = true;
    }

    // The single header describes the whole transfer; its CRC covers the
    // entire payload so in-place readers get end-to-end integrity.
    ChunkHeader header;
    header.flags = kFlagCarriesTotal;
    header.seq = 1;
    header.total = plan.num_chunks;
    header.payload_len = static_cast<std::uint32_t>(plan.chunk_len(1));
    header.total_payload_len = payload.len;
    if (payload.blob) {
        header.payload_crc32 = payload.blob->crc;
    }
    rep.header_ops = 1;

    std::uint32_t chunks_written = 0;
    std::uint64_t bytes_covered = 0;
    double last_arrival = st.clock_s;
    std::vector<std::uint8_t> buf;

    for (std::uint32_t step = 0; step < plan.num_chunks && !failed; ++step) {
        const std::uint32_t seq = plan.num_chunks - step;  // back to front
        const std::uint64_t len = plan.chunk_len(seq);
        const std::uint64_t burst = len + (seq == 1 ? kHeaderSize : 0);
        rep.max_inflight_bytes = std::max(rep.max_inflight_bytes, burst);

        auto ws = detail::rdma_write_once(cfg, st, burst, params.retry_limit);
        rep.bytes_on_wire += ws.bytes_on_wire;
        rep.retransmissions += ws.retransmissions;
        rep.dropped_bytes += ws.dropped;
        if (!ws.completed) {
            failed = true;
            break;
        }
        if (!st.warmed) st.warmed = true;
        last_arrival = ws.arrival_s;

        if (pool && payload.blob) {
            detail::fill_chunk_payload(payload, plan.chunk_offset(seq), len, buf);
            region->write(kHeaderSize + plan.chunk_offset(seq), buf);
        }
        if (seq == 1) {
            region->write(0, encode_header(header));
        }
        ++chunks_written;
        bytes_covered += len;
    }

    if (!failed) {
        // Receiver: poll on its own period; detection never precedes the last
        // write's arrival.
        const double period = params.poll_period_s > 0 ? params.poll_period_s : cfg.rtt_s / 4.0;
        const double elapsed = last_arrival - t0;
        const double detect = t0 + std::ceil(elapsed / period) * period;
        auto polled = poll_header(*region);
        if (!polled || polled->total != plan.num_chunks ||
            polled->total_payload_len != payload.len) {
            failed = true;
        } else {
            ++rep.header_parses;
            rep.poll_sound = chunks_written == plan.num_chunks && bytes_covered == payload.len;
            if (pool && payload.blob) {
                rep.poll_sound = rep.poll_sound &&
                                 crc32_of(region->bytes(kHeaderSize, payload.len)) ==
                                     payload.blob->crc;
            }
            st.clock_s = std::max(st.clock_s, detect);
        }
    }

    rep.peak_extra_memory = kHeaderSize + 16 + 24ull * params.pool_regions;
    rep.result = failed ? TransferResult::TransmissionFailure : TransferResult::Success;
    rep.latency_s = st.clock_s - t0;
    rep.energy_j = rep.power_w * rep.latency_s;
    return rep;
}

// Dispatch helper used by the harness and CLI.
inline TransferReport run_transfer(const Payload& payload, const PathConfig& cfg,
                                   const TransportParams& params, MRPool* pool = nullptr,
                                   PathState* state = nullptr) {
    switch (params.kind) {
        case TransportKind::NaiveRdma: return naive_rdma_transfer(payload, cfg, params, state);
        case TransportKind::TcpLike: return tcp_like_transfer(payload, cfg, params, state);
        case TransportKind::FedRdmaV1: return fedrdma_v1_transfer(payload, cfg, params, state);
        case TransportKind::FedRdmaE:
            return fedrdma_e_transfer(payload, cfg, params, pool, state);
    }
    throw std::logic_error("unknown transport");
}

}  // namespace fedrdma
