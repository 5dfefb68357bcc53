#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fedrdma/bytegen.hpp"
#include "fedrdma/crc32.hpp"
#include "fedrdma/wire.hpp"

namespace fedrdma {

// Opaque transfer payload (model-weight stand-in).
struct Blob {
    std::vector<std::uint8_t> content;
    std::uint32_t crc = 0;

    std::uint64_t len() const { return content.size(); }
};

inline Blob make_blob(std::span<const std::uint8_t> content) {
    Blob b;
    b.content.assign(content.begin(), content.end());
    b.crc = crc32_of(b.content);
    return b;
}

inline Blob make_blob(std::uint64_t len, std::uint64_t seed) {
    Blob b;
    b.content.resize(len);
    generate_payload(seed, 0, b.content);
    b.crc = crc32_of(b.content);
    return b;
}

struct Chunk {
    std::optional<ChunkHeader> header;  // absent for in-place transfers past the first chunk
    std::vector<std::uint8_t> payload;
};

// How a payload of `total_len` splits at base chunk size `base_chunk_size`.
struct ChunkPlan {
    std::uint64_t base_chunk_size = 0;
    std::uint32_t num_chunks = 0;
    std::uint64_t last_chunk_size = 0;

    // Payload bytes of 1-based chunk `seq`.
    std::uint64_t chunk_len(std::uint32_t seq) const {
        return seq == num_chunks ? last_chunk_size : base_chunk_size;
    }
    // Payload offset of 1-based chunk `seq` within the whole transfer.
    std::uint64_t chunk_offset(std::uint32_t seq) const {
        return (seq - 1) * base_chunk_size;
    }
};

struct ZeroChunkSizeError : std::invalid_argument {
    ZeroChunkSizeError() : std::invalid_argument("chunk size must be > 0") {}
};

// ceil(total_len / base_chunk_size) chunks; an empty payload still yields one
// zero-length chunk so completion detection stays uniform.
inline ChunkPlan plan_chunks(std::uint64_t total_len, std::uint64_t base_chunk_size) {
    if (base_chunk_size == 0) throw ZeroChunkSizeError();
    ChunkPlan p;
    p.base_chunk_size = base_chunk_size;
    if (total_len == 0) {
        p.num_chunks = 1;
        p.last_chunk_size = 0;
        return p;
    }
    const std::uint64_t n = (total_len + base_chunk_size - 1) / base_chunk_size;
    p.num_chunks = static_cast<std::uint32_t>(n);
    p.last_chunk_size = total_len - (n - 1) * base_chunk_size;
    return p;
}

struct SplitResult {
    ChunkPlan plan;
    std::vector<Chunk> chunks;
};

// Splits a blob into framed chunks: chunks 1..n-1 carry exactly the base size,
// chunk n the remainder; every header carries seq/total/lengths and the
// per-chunk payload CRC.
inline SplitResult split_blob(const Blob& blob, std::uint64_t base_chunk_size) {
    SplitResult r;
    r.plan = plan_chunks(blob.len(), base_chunk_size);
    r.chunks.reserve(r.plan.num_chunks);
    for (std::uint32_t seq = 1; seq <= r.plan.num_chunks; ++seq) {
        const std::uint64_t off = r.plan.chunk_offset(seq);
        const std::uint64_t len = r.plan.chunk_len(seq);
        Chunk c;
        c.payload.assign(blob.content.begin() + off, blob.content.begin() + off + len);
        ChunkHeader h;
        h.flags = kFlagCarriesTotal;
        h.seq = seq;
        h.total = r.plan.num_chunks;
        h.payload_len = static_cast<std::uint32_t>(len);
        h.total_payload_len = blob.len();
        h.payload_crc32 = crc32_of(c.payload);
        c.header = h;
        r.chunks.push_back(std::move(c));
    }
    return r;
}

enum class ReassembleErrorKind {
    MissingChunk,
    DuplicateSeq,
    CrcMismatch,
    TotalMismatch,
    MissingHeader,
};

struct ReassembleError {
    ReassembleErrorKind kind;
    std::uint32_t seq = 0;  // offending sequence number where applicable
};

inline const char* to_string(ReassembleErrorKind k) {
    switch (k) {
        case ReassembleErrorKind::MissingChunk: return "MissingChunk";
        case ReassembleErrorKind::DuplicateSeq: return "DuplicateSeq";
        case ReassembleErrorKind::CrcMismatch: return "CrcMismatch";
        case ReassembleErrorKind::TotalMismatch: return "TotalMismatch";
        case ReassembleErrorKind::MissingHeader: return "MissingHeader";
    }
    return "?";
}

// Rebuilds the blob from an unordered chunk set. Succeeds iff exactly the
// seqs 1..total are present, each payload matches its CRC, and the field
// views of the transfer agree across headers.
inline Result<Blob, ReassembleError> reassemble(std::span<const Chunk> chunks) {
    using R = Result<Blob, ReassembleError>;
    std::map<std::uint32_t, const Chunk*> by_seq;
    std::uint32_t total = 0;
    std::uint64_t total_payload = 0;
    bool first = true;
    for (const Chunk& c : chunks) {
        if (!c.header) return R::err({ReassembleErrorKind::MissingHeader});
        const ChunkHeader& h = *c.header;
        if (h.total == 0 || !header_fields_consistent(h)) {
            return R::err({ReassembleErrorKind::TotalMismatch, h.seq});
        }
        if (first) {
            total = h.total;
            total_payload = h.total_payload_len;
            first = false;
        } else if (h.total != total || h.total_payload_len != total_payload) {
            return R::err({ReassembleErrorKind::TotalMismatch, h.seq});
        }
        if (h.payload_len != c.payload.size()) {
            return R::err({ReassembleErrorKind::TotalMismatch, h.seq});
        }
        if (!by_seq.emplace(h.seq, &c).second) {
            return R::err({ReassembleErrorKind::DuplicateSeq, h.seq});
        }
    }
    if (first || by_seq.size() != total) {
        for (std::uint32_t s = 1; s <= total; ++s) {
            if (!by_seq.count(s)) return R::err({ReassembleErrorKind::MissingChunk, s});
        }
        return R::err({ReassembleErrorKind::MissingChunk, 0});
    }
    Blob out;
    out.content.reserve(total_payload);
    Crc32 whole;
    for (auto& [seq, c] : by_seq) {
        if (crc32_of(c->payload) != c->header->payload_crc32) {
            return R::err({ReassembleErrorKind::CrcMismatch, seq});
        }
        whole.update(c->payload);
        out.content.insert(out.content.end(), c->payload.begin(), c->payload.end());
    }
    if (out.content.size() != total_payload) {
        return R::err({ReassembleErrorKind::TotalMismatch, 0});
    }
    out.crc = whole.finish();
    return R::ok(std::move(out));
}

}  // namespace fedrdma
