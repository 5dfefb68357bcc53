#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fedrdma/transports.hpp"

namespace fedrdma {

// FedAvg-shaped communication workload: every round, every client downloads
// the model and uploads its update over the shared path. Aggregation is
// instantaneous; local training enters as a fixed compute time per round.

struct FederationConfig {
    std::uint32_t rounds = 1;
    std::uint32_t clients = 1;
    std::uint64_t model_bytes = 0;
    double compute_time_per_round_s = 0.0;
    TransportParams transport;
    PathConfig path;
    double nic_power_w = 0.0;       // 0 = transport default
    bool parallel_clients = false;  // clients on independent paths, round waits for the slowest
    std::uint64_t seed = 1;

    void validate() const {
        if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
        if (clients < 1) throw std::invalid_argument("clients must be >= 1");
        path.validate();
        transport.validate();
    }
};

struct ClientRoundTransfers {
    std::uint32_t round = 0;
    std::uint32_t client = 0;
    TransferReport download;
    TransferReport upload;
};

struct FederationReport {
    bool failed = false;
    std::uint64_t total_traffic = 0;  // rounds x clients x 2 x model_bytes
    double comm_time_s = 0.0;
    double compute_time_s = 0.0;
    double comm_fraction = 0.0;
    double energy_j = 0.0;
    std::vector<ClientRoundTransfers> per_round;
};

inline double energy(double power_w, double duration_s) {
    if (power_w < 0 || duration_s < 0) throw std::invalid_argument("energy wants nonnegative inputs");
    return power_w * duration_s;
}

struct UnknownRankError {
    std::uint32_t rank = 0;
};

// Update payload per round at a given LoRA rank; exact measured sizes in
// decimal MB, no interpolation outside the table.
inline Result<std::uint64_t, UnknownRankError> lora_payload_bytes(std::uint32_t rank) {
    using R = Result<std::uint64_t, UnknownRankError>;
    switch (rank) {
        case 4: return R::ok(1'100'000);
        case 8: return R::ok(2'300'000);
        case 16: return R::ok(4'500'000);
        case 32: return R::ok(9'000'000);
        case 64: return R::ok(18'000'000);
        case 128: return R::ok(36'000'000);
        case 256: return R::ok(72'000'000);
        case 512: return R::ok(144'000'000);
        case 1024: return R::ok(288'000'000);
        default: return R::err({rank});
    }
}

inline FederationReport run_federation(const FederationConfig& cfg) {
    cfg.validate();
    FederationReport rep;
    rep.total_traffic =
        static_cast<std::uint64_t>(cfg.rounds) * cfg.clients * 2 * cfg.model_bytes;
    rep.compute_time_s = static_cast<double>(cfg.rounds) * cfg.compute_time_per_round_s;

    const double power = cfg.nic_power_w > 0 ? cfg.nic_power_w
                                             : (cfg.transport.nic_power_w > 0
                                                    ? cfg.transport.nic_power_w
                                                    : default_nic_power_w(cfg.transport.kind));

    std::vector<PathState> client_paths(cfg.parallel_clients ? cfg.clients : 1);

    for (std::uint32_t round = 0; round < cfg.rounds && !rep.failed; ++round) {
        double round_comm = 0.0;
        for (std::uint32_t client = 0; client < cfg.clients && !rep.failed; ++client) {
            PathState& st = client_paths[cfg.parallel_clients ? client : 0];
            const std::uint64_t seed =
                cfg.seed + (static_cast<std::uint64_t>(round) * cfg.clients + client) * 2;

            ClientRoundTransfers entry;
            entry.round = round;
            entry.client = client;
            entry.download = run_transfer(Payload::synthetic(cfg.model_bytes, seed), cfg.path,
                                          cfg.transport, nullptr, &st);
            const double down = entry.download.latency_s;
            double up = 0.0;
            if (entry.download.result == TransferResult::Success) {
                entry.upload = run_transfer(Payload::synthetic(cfg.model_bytes, seed + 1), cfg.path,
                                            cfg.transport, nullptr, &st);
                up = entry.upload.latency_s;
                if (entry.upload.result != TransferResult::Success) rep.failed = true;
            } else {
                rep.failed = true;
            }
            if (cfg.parallel_clients) {
                round_comm = std::max(round_comm, down + up);
            } else {
                round_comm += down + up;
            }
            rep.per_round.push_back(std::move(entry));
        }
        rep.comm_time_s += round_comm;
    }

    rep.comm_fraction = (rep.comm_time_s + rep.compute_time_s) > 0
                            ? rep.comm_time_s / (rep.comm_time_s + rep.compute_time_s)
                            : 0.0;
    rep.energy_j = energy(power, rep.comm_time_s);
    return rep;
}

}  // namespace fedrdma
