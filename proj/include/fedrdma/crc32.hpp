#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace fedrdma {

// CRC-32, reflected form, polynomial 0xEDB88320 (the zlib/IEEE 802.3 variant).
// Slicing-by-8 so GB-scale payload digests stay cheap.
namespace detail {

constexpr std::array<std::array<std::uint32_t, 256>, 8> make_crc32_tables() {
    std::array<std::array<std::uint32_t, 256>, 8> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1u) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
        }
        t[0][i] = c;
    }
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = t[0][i];
        for (std::size_t s = 1; s < 8; ++s) {
            c = t[0][c & 0xFFu] ^ (c >> 8);
            t[s][i] = c;
        }
    }
    return t;
}

inline constexpr auto crc32_tables = make_crc32_tables();

}  // namespace detail

// Incremental CRC-32 over a byte stream.
class Crc32 {
public:
    void update(std::span<const std::uint8_t> data) {
        const auto& t = detail::crc32_tables;
        std::uint32_t c = state_;
        std::size_t i = 0;
        const std::size_t n = data.size();
        for (; i + 8 <= n; i += 8) {
            c ^= static_cast<std::uint32_t>(data[i]) |
                 (static_cast<std::uint32_t>(data[i + 1]) << 8) |
                 (static_cast<std::uint32_t>(data[i + 2]) << 16) |
                 (static_cast<std::uint32_t>(data[i + 3]) << 24);
            c = t[7][c & 0xFFu] ^ t[6][(c >> 8) & 0xFFu] ^ t[5][(c >> 16) & 0xFFu] ^
                t[4][(c >> 24) & 0xFFu] ^ t[3][data[i + 4]] ^ t[2][data[i + 5]] ^
                t[1][data[i + 6]] ^ t[0][data[i + 7]];
        }
        for (; i < n; ++i) {
            c = t[0][(c ^ data[i]) & 0xFFu] ^ (c >> 8);
        }
        state_ = c;
    }

    std::uint32_t finish() const { return state_ ^ 0xFFFFFFFFu; }

private:
    std::uint32_t state_ = 0xFFFFFFFFu;
};

inline std::uint32_t crc32_of(std::span<const std::uint8_t> data) {
    Crc32 c;
    c.update(data);
    return c.finish();
}

}  // namespace fedrdma
