#pragma once

// Set-associative cache state machine: way-level region tagging, LRU-stack
// maintenance via per-way order values, write-back/write-allocate
// semantics, and per-block wear counters.

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hcsim {

enum class PolicyKind : std::uint8_t { Lru, Dfb };
enum class Region : std::uint8_t { Fast, Slow };
enum class AccessOp : std::uint8_t { Read, Write };

struct CacheConfig {
    std::uint64_t capacity_bytes = 8ull << 20;
    std::uint32_t assoc = 8;
    std::uint32_t block_bytes = 64;
    std::uint32_t n_fast = 2;
    PolicyKind policy = PolicyKind::Lru;
    std::uint32_t banks = 8;
    std::uint64_t interval_cycles = 5'000'000;  // 0 disables Z adaptation
    std::uint32_t z_initial = 4;
    bool prefer_invalid = false;          // claim invalid ways before the DFB scan
    std::string dfb_thresholds;           // optional `mr:z,...` override table

    std::uint64_t num_sets() const {
        return capacity_bytes / (static_cast<std::uint64_t>(assoc) * block_bytes);
    }

    void validate() const {
        if (assoc == 0 || block_bytes == 0 || capacity_bytes == 0)
            throw std::invalid_argument("CacheConfig: zero geometry field");
        if (!std::has_single_bit(static_cast<std::uint64_t>(block_bytes)))
            throw std::invalid_argument("CacheConfig: block_bytes must be a power of two");
        const std::uint64_t line = static_cast<std::uint64_t>(assoc) * block_bytes;
        if (capacity_bytes % line != 0)
            throw std::invalid_argument("CacheConfig: capacity not divisible by assoc*block_bytes");
        if (!std::has_single_bit(num_sets()))
            throw std::invalid_argument("CacheConfig: num_sets must be a power of two");
        if (n_fast > assoc)
            throw std::invalid_argument("CacheConfig: n_fast exceeds assoc");
        if (banks == 0)
            throw std::invalid_argument("CacheConfig: banks must be >= 1");
        if (policy == PolicyKind::Dfb && (z_initial < 2 || z_initial > assoc))
            throw std::invalid_argument("CacheConfig: z_initial out of [2, assoc]");
    }
};

struct BlockState {
    std::uint64_t tag = 0;
    std::uint64_t write_count = 0;
    std::uint32_t lru_order = 0;  // 1 = MRU .. assoc = LRU; permutation per set
    bool valid = false;
    bool dirty = false;
    Region region = Region::Slow;
};

struct AccessOutcome {
    bool hit = false;
    std::uint32_t way = 0;
    Region region_touched = Region::Slow;  // hit region, or fill region on a miss
    bool victim_dirty = false;
    bool writeback_issued = false;
    bool fill_write = false;  // true iff miss (every miss installs the block)
    std::uint32_t set_index = 0;
    bool victim_valid = false;
    std::uint64_t victim_tag = 0;  // meaningful when victim_valid
};

// set_index = (addr / block) mod sets; tag = (addr / block) / sets.
// Sub-block address bits are truncated, so unaligned addresses are fine.
inline std::pair<std::uint64_t, std::uint64_t> decompose_address(std::uint64_t addr,
                                                                 const CacheConfig& cfg) {
    const std::uint64_t block = addr / cfg.block_bytes;
    const std::uint64_t sets = cfg.num_sets();
    return {block / sets, block % sets};
}

// Move `way` to the top of the set's recency stack: its order becomes 1 and
// every way that ranked above it slides down one position.
inline void promote_mru(std::span<BlockState> ways, std::size_t way) {
    const std::uint32_t old_order = ways[way].lru_order;
    for (auto& b : ways)
        if (b.lru_order < old_order) ++b.lru_order;
    ways[way].lru_order = 1;
}

class CacheState {
public:
    explicit CacheState(const CacheConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        blocks_.resize(cfg_.num_sets() * cfg_.assoc);
        for (std::uint64_t s = 0; s < cfg_.num_sets(); ++s) {
            auto ways = set(s);
            for (std::uint32_t w = 0; w < cfg_.assoc; ++w) {
                // Fast ways start at the top of the stack; an all-invalid set
                // therefore drains from the highest-numbered slow way down.
                ways[w].lru_order = w + 1;
                ways[w].region = (w < cfg_.n_fast) ? Region::Fast : Region::Slow;
            }
        }
    }

    const CacheConfig& config() const { return cfg_; }

    std::span<BlockState> set(std::uint64_t s) {
        return {blocks_.data() + s * cfg_.assoc, cfg_.assoc};
    }
    std::span<const BlockState> set(std::uint64_t s) const {
        return {blocks_.data() + s * cfg_.assoc, cfg_.assoc};
    }

    // One cache access. On a miss, `victim_fn` picks the way to fill; the
    // fill itself counts as one write to the allocated block.
    template <typename VictimFn>
    AccessOutcome access(AccessOp op, std::uint64_t addr, VictimFn&& victim_fn) {
        const auto [tag, set_index] = decompose_address(addr, cfg_);
        auto ways = set(set_index);
        AccessOutcome out;
        out.set_index = static_cast<std::uint32_t>(set_index);

        for (std::uint32_t w = 0; w < cfg_.assoc; ++w) {
            if (ways[w].valid && ways[w].tag == tag) {
                out.hit = true;
                out.way = w;
                out.region_touched = ways[w].region;
                promote_mru(ways, w);
                if (op == AccessOp::Write) {
                    ways[w].dirty = true;
                    ++ways[w].write_count;
                }
                return out;
            }
        }

        const std::size_t victim = victim_fn(std::span<const BlockState>(ways));
        BlockState& b = ways[victim];
        out.way = static_cast<std::uint32_t>(victim);
        out.region_touched = b.region;
        out.victim_valid = b.valid;
        out.victim_tag = b.tag;
        out.victim_dirty = b.valid && b.dirty;
        out.writeback_issued = out.victim_dirty;
        out.fill_write = true;

        b.tag = tag;
        b.valid = true;
        b.dirty = (op == AccessOp::Write);
        ++b.write_count;
        promote_mru(ways, victim);
        return out;
    }

    std::uint64_t max_write_count(Region region) const {
        std::uint64_t m = 0;
        for (const auto& b : blocks_)
            if (b.region == region && b.write_count > m) m = b.write_count;
        return m;
    }

    std::uint64_t max_write_count() const {
        std::uint64_t m = 0;
        for (const auto& b : blocks_)
            if (b.write_count > m) m = b.write_count;
        return m;
    }

    // Warmup boundary: wear accounting starts over, block contents stay.
    void reset_write_counts() {
        for (auto& b : blocks_) b.write_count = 0;
    }

private:
    CacheConfig cfg_;
    std::vector<BlockState> blocks_;
};

}  // namespace hcsim
