#pragma once

// Access-trace handling: the text format parser/serializer (gzip-aware),
// synthetic workload generators, and an optional L1 filter that reduces a
// raw trace to the miss/writeback stream an L2 would observe.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "hcsim/cache.hpp"
#include "hcsim/config.hpp"

namespace hcsim {

struct AccessRecord {
    AccessOp op = AccessOp::Read;
    std::uint64_t addr = 0;
    std::uint64_t icount = 0;  // cumulative instruction count

    bool operator==(const AccessRecord&) const = default;
};

using Trace = std::vector<AccessRecord>;

// --- text format ----------------------------------------------------------
// One record per line: `R|W 0x<hex-address> <decimal-icount>`.
// `#` starts a comment line; blank lines are skipped.

inline Trace parse_trace(std::istream& in) {
    Trace trace;
    std::string raw;
    std::size_t lineno = 0;
    std::uint64_t prev_icount = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;

        auto fail = [lineno](const std::string& why) -> std::runtime_error {
            return std::runtime_error("trace line " + std::to_string(lineno) + ": " + why);
        };

        std::istringstream fields{std::string(line)};
        std::string op_tok, addr_tok, icount_tok, extra;
        if (!(fields >> op_tok >> addr_tok >> icount_tok)) throw fail("expected `R|W 0xADDR ICOUNT`");
        if (fields >> extra) throw fail("trailing junk `" + extra + "`");

        AccessRecord rec;
        if (op_tok == "R") rec.op = AccessOp::Read;
        else if (op_tok == "W") rec.op = AccessOp::Write;
        else throw fail("bad op `" + op_tok + "` (expected R or W)");

        if (addr_tok.size() <= 2 || addr_tok[0] != '0' || (addr_tok[1] != 'x' && addr_tok[1] != 'X'))
            throw fail("address must be 0x-prefixed hex");
        std::size_t used = 0;
        try {
            rec.addr = std::stoull(addr_tok.substr(2), &used, 16);
        } catch (const std::exception&) {
            throw fail("bad hex address `" + addr_tok + "`");
        }
        if (used != addr_tok.size() - 2) throw fail("bad hex address `" + addr_tok + "`");

        try {
            rec.icount = std::stoull(icount_tok, &used, 10);
        } catch (const std::exception&) {
            throw fail("bad instruction count `" + icount_tok + "`");
        }
        if (used != icount_tok.size()) throw fail("bad instruction count `" + icount_tok + "`");

        if (!trace.empty() && rec.icount < prev_icount)
            throw fail("instruction count regresses (" + std::to_string(rec.icount) + " after " +
                       std::to_string(prev_icount) + ")");
        prev_icount = rec.icount;
        trace.push_back(rec);
    }
    return trace;
}

inline void serialize_trace(const Trace& trace, std::ostream& out) {
    char buf[64];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof buf, "%c 0x%llx %llu\n", r.op == AccessOp::Read ? 'R' : 'W',
                      static_cast<unsigned long long>(r.addr),
                      static_cast<unsigned long long>(r.icount));
        out << buf;
    }
}

namespace detail {

inline bool has_gz_suffix(std::string_view path) {
    return path.size() > 3 && path.substr(path.size() - 3) == ".gz";
}

inline std::string gz_read_all(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open trace file: " + path);
    std::string data;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof buf)) > 0) data.append(buf, static_cast<std::size_t>(n));
    const bool bad = n < 0;
    gzclose(f);
    if (bad) throw std::runtime_error("gzip read error in: " + path);
    return data;
}

inline void gz_write_all(const std::string& path, const std::string& data) {
    gzFile f = gzopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    if (gzwrite(f, data.data(), static_cast<unsigned>(data.size())) !=
        static_cast<int>(data.size())) {
        gzclose(f);
        throw std::runtime_error("gzip write error in: " + path);
    }
    gzclose(f);
}

}  // namespace detail

inline Trace load_trace_file(const std::string& path) {
    if (detail::has_gz_suffix(path)) {
        std::istringstream in(detail::gz_read_all(path));
        return parse_trace(in);
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    return parse_trace(in);
}

inline void save_trace_file(const Trace& trace, const std::string& path) {
    if (detail::has_gz_suffix(path)) {
        std::ostringstream out;
        serialize_trace(trace, out);
        detail::gz_write_all(path, out.str());
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    serialize_trace(trace, out);
}

// --- synthetic generators --------------------------------------------------
// All generators are pure functions of their parameters: reruns with the
// same seed produce byte-identical traces. Raw engine draws are mapped to
// uniform variates here instead of through std::distributions, whose
// sequences vary across standard libraries.

class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(gen_()) * n) >> 64);
    }

private:
    std::mt19937_64 gen_;
};

namespace detail {

inline std::uint64_t block_addr(std::uint64_t tag, std::uint64_t set, std::uint64_t num_sets,
                                std::uint32_t block_bytes) {
    return (tag * num_sets + set) * block_bytes;
}

}  // namespace detail

struct TraceGeometry {
    std::uint64_t num_sets = 16384;  // matches the 8 MiB / 8-way / 64 B designs
    std::uint32_t block_bytes = 64;
    std::uint64_t instr_per_access = 10;
};

// Round-robin sweep over `blocks_per_set` distinct blocks in each targeted
// set, repeated `laps` times. With blocks_per_set > assoc this thrashes an
// LRU stack: every lap after the first misses on every access.
struct CyclicSpec {
    std::uint64_t sets = 1;
    std::uint64_t blocks_per_set = 9;
    std::uint64_t laps = 2;
    double write_ratio = 0.0;
    std::uint64_t seed = 1;
    std::uint64_t first_block = 0;  // tag offset, for composing disjoint regions
    TraceGeometry geom;
};

inline Trace gen_cyclic(const CyclicSpec& spec) {
    DetRng rng(spec.seed);
    Trace trace;
    trace.reserve(spec.sets * spec.blocks_per_set * spec.laps);
    std::uint64_t icount = 0;
    for (std::uint64_t lap = 0; lap < spec.laps; ++lap)
        for (std::uint64_t j = 0; j < spec.blocks_per_set; ++j)
            for (std::uint64_t s = 0; s < spec.sets; ++s) {
                icount += spec.geom.instr_per_access;
                const AccessOp op =
                    rng.uniform01() < spec.write_ratio ? AccessOp::Write : AccessOp::Read;
                trace.push_back({op,
                                 detail::block_addr(spec.first_block + j, s, spec.geom.num_sets,
                                                    spec.geom.block_bytes),
                                 icount});
            }
    return trace;
}

// Non-uniform set pressure: `hot_fraction` of accesses go to a tiny
// per-set working set in `sets_hot` sets, the remainder is uniform. A short
// deterministic prologue churns each hot set with throwaway fills first, so
// the steady-state working set is installed under realistic (non-virgin)
// stack conditions rather than into an untouched set.
struct SkewedSpec {
    std::uint64_t sets_hot = 16;
    double hot_fraction = 0.99;
    std::uint64_t total_accesses = 1'000'000;
    double write_ratio = 0.5;
    std::uint64_t seed = 1;
    std::uint32_t hot_blocks_per_set = 2;
    std::uint32_t cold_blocks_per_set = 64;
    std::uint32_t prologue_blocks = 2;  // churn fills per hot set, 0 disables
    TraceGeometry geom;
};

inline Trace gen_skewed(const SkewedSpec& spec) {
    if (!(spec.hot_fraction >= 0.0 && spec.hot_fraction <= 1.0))
        throw std::invalid_argument("gen_skewed: hot_fraction outside [0, 1]");
    DetRng rng(spec.seed);
    Trace trace;
    trace.reserve(spec.total_accesses);
    std::uint64_t icount = 0;
    auto push = [&](AccessOp op, std::uint64_t addr) {
        icount += spec.geom.instr_per_access;
        trace.push_back({op, addr, icount});
    };

    if (spec.hot_fraction > 0.0)
        for (std::uint64_t s = 0; s < spec.sets_hot && trace.size() < spec.total_accesses; ++s)
            for (std::uint32_t p = 0; p < spec.prologue_blocks; ++p) {
                if (trace.size() >= spec.total_accesses) break;
                push(AccessOp::Read,
                     detail::block_addr(spec.hot_blocks_per_set + p, s, spec.geom.num_sets,
                                        spec.geom.block_bytes));
            }

    while (trace.size() < spec.total_accesses) {
        const AccessOp op = rng.uniform01() < spec.write_ratio ? AccessOp::Write : AccessOp::Read;
        if (rng.uniform01() < spec.hot_fraction) {
            const std::uint64_t s = rng.below(spec.sets_hot);
            const std::uint64_t j = rng.below(spec.hot_blocks_per_set);
            push(op, detail::block_addr(j, s, spec.geom.num_sets, spec.geom.block_bytes));
        } else {
            const std::uint64_t s = rng.below(spec.geom.num_sets);
            const std::uint64_t j = rng.below(spec.cold_blocks_per_set);
            push(op, detail::block_addr(j, s, spec.geom.num_sets, spec.geom.block_bytes));
        }
    }
    return trace;
}

// Block popularity proportional to rank^(-alpha); alpha = 0 is uniform.
struct ZipfSpec {
    double alpha = 1.0;
    std::uint64_t universe_blocks = 4096;
    std::uint64_t total_accesses = 100'000;
    double write_ratio = 0.0;
    std::uint64_t seed = 1;
    TraceGeometry geom;
};

inline Trace gen_zipf(const ZipfSpec& spec) {
    if (spec.alpha < 0.0) throw std::invalid_argument("gen_zipf: alpha must be >= 0");
    if (spec.universe_blocks == 0) throw std::invalid_argument("gen_zipf: empty universe");
    std::vector<double> cdf(spec.universe_blocks);
    double acc = 0.0;
    for (std::uint64_t r = 0; r < spec.universe_blocks; ++r) {
        acc += std::pow(static_cast<double>(r + 1), -spec.alpha);
        cdf[r] = acc;
    }
    for (auto& c : cdf) c /= acc;

    DetRng rng(spec.seed);
    Trace trace;
    trace.reserve(spec.total_accesses);
    std::uint64_t icount = 0;
    for (std::uint64_t i = 0; i < spec.total_accesses; ++i) {
        const AccessOp op = rng.uniform01() < spec.write_ratio ? AccessOp::Write : AccessOp::Read;
        const double u = rng.uniform01();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::uint64_t block =
            static_cast<std::uint64_t>(std::distance(cdf.begin(), it == cdf.end() ? it - 1 : it));
        icount += spec.geom.instr_per_access;
        trace.push_back({op, block * spec.geom.block_bytes, icount});
    }
    return trace;
}

// --- L1 filter --------------------------------------------------------------
// Runs a write-back write-allocate LRU L1 over the trace and keeps only what
// reaches the next level: the missing accesses themselves plus a WRITE for
// every dirty eviction. l1_capacity = 0 passes the trace through unchanged.
// Models a unified L1 (no I/D split).
inline Trace l1_filter(const Trace& input, std::uint64_t l1_capacity, std::uint32_t l1_assoc,
                       std::uint32_t block_bytes) {
    if (l1_capacity == 0) return input;
    CacheConfig cfg;
    cfg.capacity_bytes = l1_capacity;
    cfg.assoc = l1_assoc;
    cfg.block_bytes = block_bytes;
    cfg.n_fast = 0;
    cfg.policy = PolicyKind::Lru;
    cfg.banks = 1;
    cfg.validate();
    CacheState l1(cfg);
    const std::uint64_t sets = cfg.num_sets();

    Trace out;
    auto lru = [](std::span<const BlockState> ways) {
        for (std::size_t w = 0; w < ways.size(); ++w)
            if (ways[w].lru_order == ways.size()) return w;
        return ways.size() - 1;  // unreachable for a valid permutation
    };
    for (const auto& rec : input) {
        const auto outcome = l1.access(rec.op, rec.addr, lru);
        if (outcome.hit) continue;
        out.push_back({rec.op, rec.addr, rec.icount});
        if (outcome.writeback_issued)
            out.push_back({AccessOp::Write,
                           detail::block_addr(outcome.victim_tag, outcome.set_index, sets,
                                              block_bytes),
                           rec.icount});
    }
    return out;
}

}  // namespace hcsim
