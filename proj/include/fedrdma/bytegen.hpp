#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "fedrdma/crc32.hpp"

namespace fedrdma {

// Position-addressable deterministic payload generator. Byte i of stream
// `seed` depends only on (seed, i), so any window of a large payload can be
// produced without materializing the whole thing.
namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

// Fills `out` with bytes [stream_offset, stream_offset + out.size()) of the
// stream identified by `seed`.
inline void generate_payload(std::uint64_t seed, std::uint64_t stream_offset,
                             std::span<std::uint8_t> out) {
    std::uint64_t pos = stream_offset;
    std::size_t i = 0;
    while (i < out.size()) {
        const std::uint64_t block = pos / 8;
        const std::uint64_t word = detail::splitmix64(seed ^ (block * 0xA24BAED4963EE407ull + 1));
        for (std::uint64_t b = pos % 8; b < 8 && i < out.size(); ++b, ++i, ++pos) {
            out[i] = static_cast<std::uint8_t>(word >> (8 * b));
        }
    }
}

// CRC of a generated stream, computed in bounded windows.
inline std::uint32_t payload_stream_crc(std::uint64_t seed, std::uint64_t len) {
    constexpr std::size_t kWindow = 1 << 20;
    std::vector<std::uint8_t> buf(std::min<std::uint64_t>(kWindow, len));
    Crc32 crc;
    std::uint64_t off = 0;
    while (off < len) {
        const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kWindow, len - off));
        generate_payload(seed, off, std::span<std::uint8_t>(buf.data(), n));
        crc.update(std::span<const std::uint8_t>(buf.data(), n));
        off += n;
    }
    return crc.finish();
}

}  // namespace fedrdma
