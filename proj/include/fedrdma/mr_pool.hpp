#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "fedrdma/result.hpp"
#include "fedrdma/wire.hpp"

namespace fedrdma {

// Registered receive memory with one-sided write semantics: the writer places
// bytes at an offset, no receiver-side code runs, and the only receiver-side
// signal is polling the first bytes for a valid header.

enum class MrError {
    CapacityTooSmall,
    OutOfBounds,
    Unregistered,
};

inline const char* to_string(MrError e) {
    switch (e) {
        case MrError::CapacityTooSmall: return "CapacityTooSmall";
        case MrError::OutOfBounds: return "OutOfBounds";
        case MrError::Unregistered: return "Unregistered";
    }
    return "?";
}

class MemoryRegion {
public:
    MemoryRegion() = default;

    std::uint64_t capacity() const { return storage_.size(); }
    bool registered() const { return registered_; }

    Result<std::monostate, MrError> write(std::uint64_t offset,
                                          std::span<const std::uint8_t> data) {
        using R = Result<std::monostate, MrError>;
        if (!registered_) return R::err(MrError::Unregistered);
        if (offset > capacity() || data.size() > capacity() - offset)
            return R::err(MrError::OutOfBounds);
        std::memcpy(storage_.data() + offset, data.data(), data.size());
        return R::ok({});
    }

    std::span<const std::uint8_t> bytes(std::uint64_t offset, std::uint64_t len) const {
        return {storage_.data() + offset, len};
    }

    void zero_prefix(std::uint64_t n) {
        std::memset(storage_.data(), 0, std::min<std::uint64_t>(n, storage_.size()));
    }

private:
    friend Result<MemoryRegion, MrError> register_mr(std::uint64_t capacity);
    std::vector<std::uint8_t> storage_;
    bool registered_ = false;
};

// Zero-initialized region; needs at least room for one header.
inline Result<MemoryRegion, MrError> register_mr(std::uint64_t capacity) {
    using R = Result<MemoryRegion, MrError>;
    if (capacity < kHeaderSize) return R::err(MrError::CapacityTooSmall);
    MemoryRegion mr;
    mr.storage_.assign(capacity, 0);
    mr.registered_ = true;
    return R::ok(std::move(mr));
}

inline Result<std::monostate, MrError> remote_write(MemoryRegion& mr, std::uint64_t offset,
                                                    std::span<const std::uint8_t> data) {
    return mr.write(offset, data);
}

// Completion probe: a fully valid header at offset 0, or nothing. Zeroed and
// partially written prefixes fail the magic/consistency checks and read as
// "no completion yet".
inline std::optional<ChunkHeader> poll_header(const MemoryRegion& mr) {
    if (!mr.registered() || mr.capacity() < kHeaderSize) return std::nullopt;
    auto r = decode_header(mr.bytes(0, kHeaderSize));
    if (!r) return std::nullopt;
    return r.value();
}

// Receive-region pool with a rotating cursor. Reusing a region zeroes its
// header prefix first; a stale header from transfer t would otherwise signal
// completion of transfer t+k.
class MRPool {
public:
    MRPool(std::size_t regions, std::uint64_t capacity_each) {
        for (std::size_t i = 0; i < regions; ++i) {
            auto r = register_mr(capacity_each);
            if (!r) throw std::invalid_argument("region capacity too small");
            regions_.push_back(std::move(r.value()));
        }
        if (regions_.empty()) throw std::invalid_argument("pool needs at least one region");
    }

    std::size_t size() const { return regions_.size(); }
    std::size_t cursor() const { return cursor_; }
    std::uint64_t acquisitions() const { return acquisitions_; }
    MemoryRegion& region(std::size_t i) { return regions_[i]; }

    std::pair<std::size_t, MemoryRegion*> acquire_next() {
        const std::size_t idx = cursor_;
        MemoryRegion& r = regions_[idx];
        r.zero_prefix(kHeaderSize);
        cursor_ = (cursor_ + 1) % regions_.size();
        ++acquisitions_;
        return {idx, &r};
    }

private:
    std::vector<MemoryRegion> regions_;
    std::size_t cursor_ = 0;
    std::uint64_t acquisitions_ = 0;
};

}  // namespace fedrdma
