/*
Copyright 2026 the pjpeg authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pjpeg/bitstream.hpp"
#include "pjpeg/common.hpp"
#include "pjpeg/huffman.hpp"
#include "pjpeg/parser.hpp"
#include "pjpeg/thread_pool.hpp"

namespace pjpeg {

struct PartitionConfig {
    uint64_t subsequence_bits = 1024;  // must be a positive multiple of 32
    uint32_t sequence_length_b = 256;  // subsequences per sequence
};

struct ScanPartition {
    uint64_t subsequence_bits = 0;
    uint32_t b = 1;
    uint64_t N = 0;  // total subsequences
    uint64_t B = 0;  // sequence count, ceil(N / b)
    uint64_t bit_length = 0;

    uint64_t boundary(uint64_t i) const { return i * subsequence_bits; }
    uint64_t end_bit(uint64_t i) const {
        uint64_t e = (i + 1) * subsequence_bits;
        return e < bit_length ? e : bit_length;
    }
};

inline ScanPartition partition(const EntropySegment& segment, const PartitionConfig& config) {
    if (config.subsequence_bits == 0 || config.subsequence_bits % 32 != 0)
        throw Error(Errc::ConsistencyFailure, "subsequence_bits must be a positive multiple of 32");
    if (config.sequence_length_b == 0)
        throw Error(Errc::ConsistencyFailure, "sequence_length_b must be >= 1");
    ScanPartition p;
    p.subsequence_bits = config.subsequence_bits;
    p.b = config.sequence_length_b;
    p.bit_length = segment.bit_length;
    p.N = (segment.bit_length + config.subsequence_bits - 1) / config.subsequence_bits;
    p.B = (p.N + p.b - 1) / p.b;
    return p;
}

/// Decoder state at a symbol boundary: bit position, produced coefficient
/// count, data-unit slot within the MCU, zig-zag index.
struct SyncState {
    uint64_t p = 0;
    uint64_t n = 0;
    uint32_t c = 0;
    uint32_t z = 0;
};

/// One s_info entry. A divergent entry records where a speculative decode
/// failed (invalid code or truncated read); it never satisfies the
/// synchronization comparison against a clean entry.
struct SyncEntry {
    SyncState state;
    bool divergent = false;
};

inline bool sync_equal(const SyncEntry& a, const SyncEntry& b) {
    return a.divergent == b.divergent && a.state.p == b.state.p && a.state.c == b.state.c &&
           a.state.z == b.state.z;
}

struct SyncInfoArray {
    std::vector<SyncEntry> entries;          // one per subsequence
    std::vector<uint8_t> sequence_synced;    // one per sequence boundary (B-1)
    uint64_t inter_passes = 0;
};

/// Read-only per-scan context shared by all workers.
struct ScanContext {
    const EntropySegment* segment = nullptr;
    const FrameInfo* frame = nullptr;
    std::vector<const HuffmanTable*> dc;  // per component
    std::vector<const HuffmanTable*> ac;
};

inline ScanContext make_scan_context(const ParsedImage& img,
                                     const std::vector<HuffmanTable>& built_dc,
                                     const std::vector<HuffmanTable>& built_ac) {
    ScanContext ctx;
    ctx.segment = &img.segment;
    ctx.frame = &img.frame;
    for (const auto& c : img.frame.components) {
        ctx.dc.push_back(&built_dc[c.dc_table_id]);
        ctx.ac.push_back(&built_ac[c.ac_table_id]);
    }
    return ctx;
}

inline SyncState origin_state(const ScanPartition& part, uint64_t i) {
    return SyncState{part.boundary(i), 0, 0, 0};
}

/// Decodes the symbols owned by subsequence i (those whose first bit lies
/// inside it) starting from `start`. Returns the state after the last owned
/// symbol, with n counting only this subsequence's output positions. In
/// writing mode coefficients land at out[out_offset + local + run] and
/// decoding stops once write_cap positions have been produced.
inline SyncEntry decode_subsequence(const ScanContext& ctx, const ScanPartition& part,
                                    uint64_t i, const SyncState& start, bool write,
                                    std::span<int16_t> out = {}, uint64_t out_offset = 0,
                                    uint64_t write_cap = 0) {
    const uint64_t end_bit = part.end_bit(i);
    const auto& du_seq = ctx.frame->du_sequence;
    SyncEntry r;
    r.state = start;
    r.state.n = 0;
    uint64_t local = 0;

    BitCursor cursor(*ctx.segment, start.p);
    while (cursor.position() < end_bit) {
        if (write && local >= write_cap) break;
        unsigned comp = du_seq[r.state.c];
        DecodedSymbol sym;
        try {
            sym = decode_next_symbol(cursor, r.state.z, *ctx.dc[comp], *ctx.ac[comp]);
        } catch (const Error& e) {
            if (e.code() == Errc::OutOfBits || e.code() == Errc::InvalidCode) {
                if (write) throw;
                r.divergent = true;
                return r;
            }
            throw;
        }
        uint64_t step = sym.run_length + 1;
        if (write) {
            if (local + step > write_cap) break;  // phantom tail past the true end
            if (sym.kind == DecodedSymbol::Kind::Coefficient)
                out[out_offset + local + sym.run_length] = static_cast<int16_t>(sym.coefficient);
        }
        r.state.p = cursor.position();
        r.state.n += step;
        local += step;
        r.state.z += static_cast<uint32_t>(step);
        if (r.state.z >= 64 || sym.kind == DecodedSymbol::Kind::EOB) {
            r.state.z = 0;
            r.state.c = (r.state.c + 1) % du_seq.size();
        }
    }
    return r;
}

/// Intra-sequence synchronization (rounds with barrier semantics): each
/// worker speculatively decodes its own subsequence from its origin, then
/// overflows into following subsequences until its (p, c, z) agrees with the
/// published entry or the sequence ends. Round k publications are visible
/// before round k+1, matching the thread-block barrier contract.
inline void sync_intra_sequence(const ScanContext& ctx, const ScanPartition& part,
                                SyncInfoArray& info, unsigned workers = 1) {
    info.entries.assign(part.N, {});
    info.sequence_synced.assign(part.B > 0 ? part.B - 1 : 0, 0);

    parallel_for(part.B, workers, [&](size_t g) {
        const uint64_t first = uint64_t(g) * part.b;
        const uint64_t last = std::min<uint64_t>(first + part.b, part.N) - 1;

        struct Worker {
            SyncEntry chain;
            uint64_t next = 0;
            bool active = false;
        };
        std::vector<Worker> w(last - first + 1);

        // Round 0: every worker decodes its own subsequence from its origin.
        for (uint64_t i = first; i <= last; ++i) {
            SyncEntry e = decode_subsequence(ctx, part, i, origin_state(part, i), false);
            info.entries[i] = e;
            auto& wk = w[i - first];
            wk.chain = e;
            wk.next = i + 1;
            wk.active = !e.divergent && i < last;
        }

        bool any_active = true;
        while (any_active) {
            any_active = false;
            // All workers in a round target distinct subsequences, so the
            // ascending order below cannot leak this round's publications
            // into this round's comparisons.
            for (auto& wk : w) {
                if (!wk.active) continue;
                if (wk.next > last) {
                    wk.active = false;
                    continue;
                }
                SyncEntry e = decode_subsequence(ctx, part, wk.next, wk.chain.state, false);
                bool synchronized = sync_equal(e, info.entries[wk.next]);
                info.entries[wk.next] = e;  // n becomes the authoritative count
                if (synchronized || e.divergent) {
                    wk.active = false;
                } else {
                    wk.chain = e;
                    ++wk.next;
                    any_active = true;
                }
            }
        }
    });
}

/// Inter-sequence synchronization: one worker per sequence boundary overflows
/// from its sequence's final state into the next sequence. Passes repeat until
/// every flag is set and a pass makes no further changes (fixpoint).
inline void sync_inter_sequence(const ScanContext& ctx, const ScanPartition& part,
                                SyncInfoArray& info, unsigned workers = 1) {
    info.inter_passes = 0;
    if (part.B <= 1) return;

    while (true) {
        bool all_synced = true;
        for (auto f : info.sequence_synced) all_synced = all_synced && f;
        if (all_synced) break;
        ++info.inter_passes;

        // Start states are snapshotted so a pass is one ordered step: workers
        // read pre-pass predecessors and write only into their own successor
        // sequence.
        std::vector<SyncEntry> starts(part.B - 1);
        for (uint64_t g = 0; g + 1 < part.B; ++g)
            starts[g] = info.entries[std::min<uint64_t>((g + 1) * part.b, part.N) - 1];

        std::vector<uint8_t> changed(part.B - 1, 0);
        std::vector<uint8_t> end_changed(part.B - 1, 0);
        parallel_for(part.B - 1, workers, [&](size_t g) {
            if (info.sequence_synced[g]) return;
            SyncEntry chain = starts[g];
            if (chain.divergent) return;
            const uint64_t first = uint64_t(g + 1) * part.b;
            const uint64_t last = std::min<uint64_t>(first + part.b, part.N) - 1;
            for (uint64_t j = first; j <= last; ++j) {
                SyncEntry e = decode_subsequence(ctx, part, j, chain.state, false);
                const SyncEntry old = info.entries[j];
                bool synchronized = sync_equal(e, old);
                bool entry_changed = !synchronized || e.state.n != old.state.n;
                if (entry_changed) {
                    changed[g] = 1;
                    if (j == last) end_changed[g] = 1;
                }
                info.entries[j] = e;
                if (synchronized) {
                    info.sequence_synced[g] = 1;
                    break;
                }
                if (e.divergent) break;
                chain = e;
            }
        });

        // A sequence whose final state moved invalidates its successor's flag:
        // the successor was synchronized against a start state that no longer
        // exists, so it must be re-derived next pass.
        for (uint64_t g = 0; g + 2 < part.B; ++g)
            if (end_changed[g]) info.sequence_synced[g + 1] = 0;

        bool progressed = false;
        for (uint64_t g = 0; g + 1 < part.B; ++g)
            progressed = progressed || changed[g] || info.sequence_synced[g];
        if (!progressed)
            throw Error(Errc::ConsistencyFailure,
                        "inter-sequence synchronization reached a fixpoint with unset flags");
    }
}

/// Exclusive prefix sum over the per-subsequence coefficient counts. Trailing
/// byte-alignment padding can decode into phantom symbols past the true end of
/// the scan; the excess is trimmed from the tail entries before scanning.
inline std::vector<uint64_t> offsets(SyncInfoArray& info, uint64_t expected_total) {
    uint64_t raw = 0;
    for (const auto& e : info.entries) raw += e.state.n;
    if (raw < expected_total)
        throw Error(Errc::ConsistencyFailure,
                    "decoded " + std::to_string(raw) + " coefficient slots, expected " +
                        std::to_string(expected_total));
    uint64_t excess = raw - expected_total;
    // At most 7 padding bits exist, each phantom symbol accounts for <= 64
    // slots, so a large excess means the synchronization itself went wrong.
    if (excess > 512)
        throw Error(Errc::ConsistencyFailure,
                    "coefficient count excess " + std::to_string(excess) +
                        " too large for scan padding");
    for (size_t k = info.entries.size(); k-- > 0 && excess > 0;) {
        uint64_t d = std::min(excess, info.entries[k].state.n);
        info.entries[k].state.n -= d;
        excess -= d;
    }
    std::vector<uint64_t> out(info.entries.size());
    uint64_t acc = 0;
    for (size_t i = 0; i < info.entries.size(); ++i) {
        out[i] = acc;
        acc += info.entries[i].state.n;
    }
    return out;
}

/// Writing pass: every subsequence is decoded once from its synchronized
/// start state; coefficients land at disjoint output ranges, zero runs stay
/// zero by virtue of the zero-initialized buffer.
inline void write_output(const ScanContext& ctx, const ScanPartition& part,
                         const SyncInfoArray& info, const std::vector<uint64_t>& offs,
                         std::span<int16_t> out, unsigned workers = 1) {
    parallel_for(part.N, workers, [&](size_t i) {
        uint64_t cap = info.entries[i].state.n;
        if (cap == 0) return;
        SyncState start = i == 0 ? origin_state(part, 0) : info.entries[i - 1].state;
        decode_subsequence(ctx, part, i, start, true, out, offs[i], cap);
    });
}

/// Full entropy stage: partition, synchronize, prefix-sum, write.
inline std::vector<int16_t> parallel_entropy_decode(const ScanContext& ctx,
                                                    const PartitionConfig& config,
                                                    unsigned workers = 1,
                                                    SyncInfoArray* info_out = nullptr) {
    ScanPartition part = partition(*ctx.segment, config);
    SyncInfoArray info;
    sync_intra_sequence(ctx, part, info, workers);
    sync_inter_sequence(ctx, part, info, workers);
    uint64_t expected = ctx.frame->total_data_units() * 64;
    std::vector<uint64_t> offs = offsets(info, expected);
    std::vector<int16_t> out(expected, 0);
    write_output(ctx, part, info, offs, out, workers);
    if (info_out) *info_out = std::move(info);
    return out;
}

}  // namespace pjpeg
