#pragma once

// Victim selection policies over a set's recency stack: plain LRU, the
// dead-fast-block (DFB) policy that reclaims fast ways once they sink past
// a threshold Z, and the interval-driven adaptation of Z from miss rate.

#include <charconv>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcsim/cache.hpp"

namespace hcsim {

// Returns the way holding the stack bottom (lru_order == assoc).
// Precondition: lru_order is a permutation of 1..assoc.
inline std::size_t lru_select_victim(std::span<const std::uint32_t> lru_order) {
    const std::uint32_t assoc = static_cast<std::uint32_t>(lru_order.size());
    for (std::size_t w = 0; w < lru_order.size(); ++w)
        if (lru_order[w] == assoc) return w;
    throw std::logic_error("lru_select_victim: malformed lru_order permutation");
}

// Scans ways in physical order; a fast way (index < n_fast) that has sunk
// to order >= z is reclaimed before the stack bottom is considered.
inline std::size_t dfb_select_victim(std::span<const std::uint32_t> lru_order,
                                     std::size_t n_fast, std::uint32_t z) {
    const std::uint32_t assoc = static_cast<std::uint32_t>(lru_order.size());
    for (std::size_t w = 0; w < lru_order.size(); ++w) {
        if (w < n_fast && lru_order[w] >= z) return w;
        if (lru_order[w] == assoc) return w;
    }
    throw std::logic_error("dfb_select_victim: malformed lru_order permutation");
}

// Miss-rate bands mapping to Z values: rate < bands[i].upper picks
// bands[i].z, checked in order. The last band must have upper == 1 and
// catches everything else (miss rate is <= 1 by definition).
struct ZThresholds {
    struct Band {
        double upper;
        std::uint32_t z;
    };
    std::vector<Band> bands;

    std::uint32_t lookup(double miss_rate) const {
        for (std::size_t i = 0; i + 1 < bands.size(); ++i)
            if (miss_rate < bands[i].upper) return bands[i].z;
        return bands.back().z;
    }

    void validate(std::uint32_t assoc) const {
        if (bands.size() < 2)
            throw std::invalid_argument("dfb_thresholds: need at least two bands");
        double prev = 0.0;
        for (std::size_t i = 0; i < bands.size(); ++i) {
            const auto& b = bands[i];
            if (b.z < 2 || b.z > assoc)
                throw std::invalid_argument("dfb_thresholds: z out of [2, assoc]");
            if (!(b.upper > prev))
                throw std::invalid_argument("dfb_thresholds: bounds must be strictly ascending");
            if (i > 0 && b.z > bands[i - 1].z)
                throw std::invalid_argument("dfb_thresholds: z must be non-increasing");
            prev = b.upper;
        }
        if (bands.back().upper != 1.0)
            throw std::invalid_argument("dfb_thresholds: last band must have bound 1");
    }

    // `mr:z` pairs, comma separated, e.g. "0.8:5,0.9:4,0.99:3,1:2".
    static ZThresholds parse(const std::string& text, std::uint32_t assoc) {
        ZThresholds t;
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t comma = text.find(',', pos);
            if (comma == std::string::npos) comma = text.size();
            const std::string item = text.substr(pos, comma - pos);
            const std::size_t colon = item.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("dfb_thresholds: expected `mr:z` in `" + item + "`");
            try {
                t.bands.push_back({std::stod(item.substr(0, colon)),
                                   static_cast<std::uint32_t>(std::stoul(item.substr(colon + 1)))});
            } catch (const std::exception&) {
                throw std::invalid_argument("dfb_thresholds: bad number in `" + item + "`");
            }
            pos = comma + 1;
        }
        t.validate(assoc);
        return t;
    }
};

// Built-in adaptation bands, tuned for the default 8-way / 2-fast-way
// geometry. Other geometries must supply their own table.
inline ZThresholds builtin_thresholds() {
    return ZThresholds{{{0.80, 5}, {0.90, 4}, {0.99, 3}, {1.0, 2}}};
}

inline std::uint32_t update_z(double miss_rate) {
    if (!(miss_rate >= 0.0) || !(miss_rate <= 1.0))
        throw std::invalid_argument("update_z: miss_rate outside [0, 1]");
    return builtin_thresholds().lookup(miss_rate);
}

struct PolicyState {
    std::uint32_t z = 4;
    std::uint64_t interval_accesses = 0;
    std::uint64_t interval_misses = 0;
};

// End-of-interval update: recompute Z from the interval's miss rate and
// reset the counters. An idle interval leaves Z untouched.
inline void interval_tick(PolicyState& st, const ZThresholds& table) {
    if (st.interval_accesses > 0) {
        const double mr = static_cast<double>(st.interval_misses) /
                          static_cast<double>(st.interval_accesses);
        st.z = table.lookup(mr);
    }
    st.interval_accesses = 0;
    st.interval_misses = 0;
}

// Runtime policy bound to one simulation: holds the Z state for DFB and
// provides the victim selector the cache calls on misses.
class Policy {
public:
    static Policy make(const CacheConfig& cfg) {
        Policy p;
        p.kind_ = cfg.policy;
        p.n_fast_ = cfg.n_fast;
        p.prefer_invalid_ = cfg.prefer_invalid;
        p.state_.z = cfg.z_initial;
        if (cfg.policy == PolicyKind::Dfb) {
            if (!cfg.dfb_thresholds.empty()) {
                p.table_ = ZThresholds::parse(cfg.dfb_thresholds, cfg.assoc);
            } else if (cfg.assoc == 8 && cfg.n_fast == 2) {
                p.table_ = builtin_thresholds();
            } else if (cfg.interval_cycles != 0) {
                throw std::invalid_argument(
                    "DFB with non-default geometry requires dfb_thresholds");
            }
        }
        return p;
    }

    PolicyKind kind() const { return kind_; }
    std::uint32_t z() const { return state_.z; }
    const PolicyState& state() const { return state_; }

    std::size_t select_victim(std::span<const BlockState> ways) {
        orders_.clear();
        for (const auto& b : ways) orders_.push_back(b.lru_order);
        if (prefer_invalid_) {
            // Claim the lowest-ranked invalid way, if any, before scanning.
            std::size_t best = ways.size();
            std::uint32_t best_order = 0;
            for (std::size_t w = 0; w < ways.size(); ++w)
                if (!ways[w].valid && ways[w].lru_order > best_order) {
                    best = w;
                    best_order = ways[w].lru_order;
                }
            if (best != ways.size()) return best;
        }
        if (kind_ == PolicyKind::Lru) return lru_select_victim(orders_);
        return dfb_select_victim(orders_, n_fast_, state_.z);
    }

    void count_access(bool miss) {
        ++state_.interval_accesses;
        if (miss) ++state_.interval_misses;
    }

    // Returns the interval miss rate consumed by the update, if one ran.
    double tick() {
        double mr = -1.0;
        if (state_.interval_accesses > 0)
            mr = static_cast<double>(state_.interval_misses) /
                 static_cast<double>(state_.interval_accesses);
        interval_tick(state_, table_);
        return mr;
    }

private:
    PolicyKind kind_ = PolicyKind::Lru;
    std::uint32_t n_fast_ = 0;
    bool prefer_invalid_ = false;
    PolicyState state_;
    ZThresholds table_ = builtin_thresholds();
    std::vector<std::uint32_t> orders_;
};

}  // namespace hcsim
