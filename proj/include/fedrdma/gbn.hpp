#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <span>
#include <vector>

#include "fedrdma/mr_pool.hpp"
#include "fedrdma/result.hpp"
#include "fedrdma/wan_path.hpp"

namespace fedrdma {

// Go-Back-N reliable delivery of a byte range to a remote offset, MTU packets,
// cumulative ACKs, no selective repeat. This is the transport under the
// unchunked one-sided write: when the bottleneck overflows mid-stream the
// rewinds re-feed the queue and the retry budget burns down.

inline constexpr std::uint32_t kDefaultRetryLimit = 7;
inline constexpr std::uint64_t kUnboundedWindow = std::numeric_limits<std::uint64_t>::max();

struct GbnState {
    std::uint64_t base = 0;       // oldest unacked packet
    std::uint64_t next_seq = 0;   // next packet to transmit
    std::uint64_t window = kUnboundedWindow;  // packets
    std::uint64_t total_packets = 0;
    std::uint32_t retries_remaining = kDefaultRetryLimit;
    double timer_deadline = 0.0;  // maintained by the driver
};

enum class GbnEventType { Ack, Timeout, SendCredit };

struct GbnEvent {
    GbnEventType type;
    std::uint64_t ack_seq = 0;  // cumulative: highest delivered packet
};

struct GbnActions {
    bool send = false;          // transmit packet `send_seq`
    std::uint64_t send_seq = 0;
    bool rewound = false;       // resume transmission from base
    bool progressed = false;    // base advanced (restart timer)
    bool complete = false;
    bool failed = false;
};

enum class GbnError { ProtocolViolation };

// Pure transition function. Ack(k) acknowledges every packet <= k; a
// duplicate of the last acknowledged packet (k == base-1) is a no-op, any
// older or not-yet-sent ack is a protocol violation. Timeout rewinds to base
// and burns one retry from the transfer's total budget; it fails when the
// budget is already gone.
inline Result<GbnActions, GbnError> gbn_step(GbnState& st, const GbnEvent& ev) {
    using R = Result<GbnActions, GbnError>;
    GbnActions a;
    switch (ev.type) {
        case GbnEventType::Ack: {
            if (ev.ack_seq + 1 == st.base) return R::ok(a);  // duplicate cumulative ack
            if (ev.ack_seq + 1 < st.base || ev.ack_seq >= st.next_seq)
                return R::err(GbnError::ProtocolViolation);
            st.base = ev.ack_seq + 1;
            a.progressed = true;
            if (st.base == st.total_packets) a.complete = true;
            return R::ok(a);
        }
        case GbnEventType::Timeout: {
            if (st.retries_remaining == 0) {
                a.failed = true;
                return R::ok(a);
            }
            --st.retries_remaining;
            st.next_seq = st.base;
            a.rewound = true;
            return R::ok(a);
        }
        case GbnEventType::SendCredit: {
            if (st.next_seq < st.total_packets && st.next_seq - st.base < st.window) {
                a.send = true;
                a.send_seq = st.next_seq++;
            }
            return R::ok(a);
        }
    }
    return R::ok(a);
}

enum class TransferResult { Success, TransmissionFailure };

struct TransferOutcome {
    TransferResult result = TransferResult::Success;
    double latency_s = 0.0;
    std::uint64_t bytes_on_wire = 0;      // payload bytes transmitted, incl. re-sends
    std::uint64_t retransmissions = 0;    // re-sent packet instances
    std::uint64_t timeouts = 0;
    std::uint64_t dropped_bytes = 0;
};

// Optional event trace for the replay oracle in tests.
struct GbnTraceEvent {
    enum class Kind { Send, QueueDrop, ForcedDrop, Progress, Timeout } kind;
    double time_s = 0.0;
    std::uint64_t seq = 0;        // packet involved (Send/Drop) or new base (Progress)
    std::uint64_t base = 0;       // sender state at the event (Timeout)
    std::uint64_t next_seq = 0;
    std::uint32_t len = 0;
};

struct GbnSendOptions {
    std::uint64_t window_packets = kUnboundedWindow;
    std::uint32_t retry_limit = kDefaultRetryLimit;
    // Packet transmission ordinals (0-based, counted over every send instance)
    // that are forcibly lost on the wire, independent of queue state. Test hook.
    std::span<const std::uint64_t> forced_losses = {};
    // Destination for delivered bytes; accounting-only when null.
    MemoryRegion* region = nullptr;
    std::uint64_t dest_offset = 0;
    std::vector<GbnTraceEvent>* trace = nullptr;
};

namespace detail {

// Core Go-Back-N loop over the fluid path. `data` may be empty while `len`
// is not: accounting runs drive the same packet dynamics without a data
// plane. The receiver accepts only the in-order packet; everything behind a
// gap is discarded and eventually re-sent.
inline TransferOutcome gbn_run(const PathConfig& cfg, PathState& st, std::uint64_t len,
                               std::span<const std::uint8_t> data, const GbnSendOptions& opt) {
    TransferOutcome out;
    const double start = st.clock_s;
    const std::uint64_t mtu = cfg.mtu_bytes;
    const std::uint64_t total_packets = len == 0 ? 0 : (len + mtu - 1) / mtu;
    if (total_packets == 0) {
        out.latency_s = cfg.rtt_s;
        st.clock_s += cfg.rtt_s;
        return out;
    }

    GbnState gbn;
    gbn.window = opt.window_packets;
    gbn.total_packets = total_packets;
    gbn.retries_remaining = opt.retry_limit;

    const double r_in = cfg.sender_rate_bps / 8.0;
    auto pkt_len = [&](std::uint64_t seq) -> std::uint32_t {
        const std::uint64_t off = seq * mtu;
        return static_cast<std::uint32_t>(std::min(mtu, len - off));
    };

    std::deque<std::pair<double, std::uint64_t>> acks;  // (arrival time, cumulative seq)
    std::uint64_t expected = 0;        // receiver: next in-order packet
    std::uint64_t high_water = 0;      // packets sent at least once
    std::uint64_t sends = 0;           // transmission instances
    std::size_t forced_idx = 0;
    double timer = st.clock_s + cfg.ack_timeout_s;
    double finish = st.clock_s;
    bool done = false, failed = false;

    auto trace_push = [&](GbnTraceEvent ev) {
        if (opt.trace) opt.trace->push_back(ev);
    };

    auto handle_ack = [&](double t, std::uint64_t cum) {
        GbnEvent ev{GbnEventType::Ack, cum};
        auto r = gbn_step(gbn, ev);
        const GbnActions& a = r.value();
        if (a.progressed) {
            timer = t + cfg.ack_timeout_s;
            trace_push({GbnTraceEvent::Kind::Progress, t, gbn.base, 0, 0, 0});
        }
        if (a.complete) {
            done = true;
            finish = t;
        }
    };

    auto fire_timeout = [&](double t) {
        trace_push({GbnTraceEvent::Kind::Timeout, t, 0, gbn.base, gbn.next_seq, 0});
        GbnEvent ev{GbnEventType::Timeout, 0};
        auto r = gbn_step(gbn, ev);
        const GbnActions& a = r.value();
        if (a.failed) {
            failed = true;
            finish = t;
            return;
        }
        ++out.timeouts;
        timer = t + cfg.ack_timeout_s;
    };

    while (!done && !failed) {
        // Deliver acks that have already arrived.
        while (!acks.empty() && acks.front().first <= st.clock_s && !done) {
            handle_ack(acks.front().first, acks.front().second);
            acks.pop_front();
        }
        if (done) break;
        if (timer <= st.clock_s) {
            fire_timeout(timer);
            continue;
        }

        GbnEvent credit{GbnEventType::SendCredit, 0};
        auto cr = gbn_step(gbn, credit);
        if (cr.value().send) {
            const std::uint64_t seq = cr.value().send_seq;
            const std::uint32_t plen = pkt_len(seq);
            const double slot_end = st.clock_s + static_cast<double>(plen) / r_in;
            // Acks and timeouts that land inside this slot are handled at the
            // slot boundary; serialization is never preempted.
            ++sends;
            if (seq < high_water) ++out.retransmissions;
            high_water = std::max(high_water, seq + 1);
            out.bytes_on_wire += plen;
            trace_push({GbnTraceEvent::Kind::Send, st.clock_s, seq, 0, 0, plen});

            st.clock_s = slot_end;
            decay_queue_to(cfg, st, slot_end);

            bool forced = false;
            if (forced_idx < opt.forced_losses.size() && opt.forced_losses[forced_idx] == sends - 1) {
                forced = true;
                ++forced_idx;
            }
            if (forced) {
                out.dropped_bytes += plen;
                st.drops += plen;
                trace_push({GbnTraceEvent::Kind::ForcedDrop, slot_end, seq, 0, 0, plen});
                continue;
            }
            const double buffer = effective_buffer(cfg, st);
            if (st.queue_bytes + plen > buffer) {
                out.dropped_bytes += plen;
                st.drops += plen;
                trace_push({GbnTraceEvent::Kind::QueueDrop, slot_end, seq, 0, 0, plen});
                continue;
            }
            st.queue_bytes += plen;
            st.delivered_bytes += plen;
            if (seq == expected) {
                if (opt.region && !data.empty()) {
                    const std::uint64_t off = opt.dest_offset + seq * mtu;
                    opt.region->write(off, data.subspan(seq * mtu, plen));
                }
                ++expected;
                acks.emplace_back(slot_end + cfg.rtt_s, expected - 1);
            }
            // Behind a gap: the receiver discards it, no ack progress.
            continue;
        }

        // No credit: idle until the next ack or the timer.
        const double next_ack = acks.empty() ? std::numeric_limits<double>::infinity()
                                             : acks.front().first;
        const double t = std::min(next_ack, timer);
        st.clock_s = t;
        decay_queue_to(cfg, st, t);
        if (!acks.empty() && acks.front().first <= t) {
            handle_ack(acks.front().first, acks.front().second);
            acks.pop_front();
        } else {
            fire_timeout(t);
        }
    }

    out.result = failed ? TransferResult::TransmissionFailure : TransferResult::Success;
    out.latency_s = finish - start;
    st.clock_s = std::max(st.clock_s, finish);
    return out;
}

}  // namespace detail

// Reliable delivery of `data` to [dest_offset, dest_offset + data.size()).
inline TransferOutcome gbn_send(const PathConfig& cfg, PathState& st,
                                std::span<const std::uint8_t> data,
                                const GbnSendOptions& opt = {}) {
    return detail::gbn_run(cfg, st, data.size(), data, opt);
}

// Same dynamics without a data plane; used for large accounting-only runs.
inline TransferOutcome gbn_send_synthetic(const PathConfig& cfg, PathState& st, std::uint64_t len,
                                          const GbnSendOptions& opt = {}) {
    return detail::gbn_run(cfg, st, len, {}, opt);
}

}  // namespace fedrdma
