#pragma once

// Aggregated run counters and the derived evaluation metrics: energy,
// relative lifetime, MPKI, relative performance, fast-write fraction, and
// cross-run summaries.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>

#include "hcsim/device.hpp"

namespace hcsim {

struct SimReport {
    std::uint64_t accesses = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t read_hits_fast = 0;
    std::uint64_t read_hits_slow = 0;
    std::uint64_t writes_fast = 0;   // write hits + fills into fast ways
    std::uint64_t writes_slow = 0;
    std::uint64_t fills_fast = 0;
    std::uint64_t fills_slow = 0;
    std::uint64_t mem_reads = 0;
    std::uint64_t mem_writebacks = 0;
    std::uint64_t total_cycles = 0;
    std::uint64_t instructions = 0;
    std::uint64_t max_writes_slow_block = 0;
    std::uint64_t max_writes_any_block = 0;
    double energy_cache_nj = 0.0;  // dynamic + leakage
    double energy_mem_nj = 0.0;

    double total_energy_nj() const { return energy_cache_nj + energy_mem_nj; }
    double hit_rate() const {
        return accesses == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(accesses);
    }
};

inline double sim_time_ns(std::uint64_t total_cycles, const TimingConfig& timing) {
    return static_cast<double>(total_cycles) / timing.core_freq_ghz;
}

// Cache energy: read hits at the region hit energy, writes (hits and fills)
// at the region write energy, tag-check energy per miss, plus leakage over
// the simulated wall time. 1 W integrates to 1 nJ per ns.
inline double cache_energy_nj(const SimReport& r, const HybridParams& dev,
                              const TimingConfig& timing) {
    const double dynamic =
        static_cast<double>(r.read_hits_fast) * dev.fast.hit_energy_nj +
        static_cast<double>(r.read_hits_slow) * dev.slow.hit_energy_nj +
        static_cast<double>(r.writes_fast) * dev.fast.write_energy_nj +
        static_cast<double>(r.writes_slow) * dev.slow.write_energy_nj +
        static_cast<double>(r.misses) * dev.miss_energy_nj;
    return dynamic + dev.leakage_w * sim_time_ns(r.total_cycles, timing);
}

inline double memory_energy_nj(const SimReport& r, const MemoryParams& mem,
                               const TimingConfig& timing) {
    return static_cast<double>(r.mem_reads + r.mem_writebacks) * mem.access_energy_nj +
           mem.leakage_w * sim_time_ns(r.total_cycles, timing);
}

inline double energy_total_nj(const SimReport& r, const HybridParams& dev,
                              const TimingConfig& timing, const MemoryParams& mem) {
    return cache_energy_nj(r, dev, timing) + memory_energy_nj(r, mem, timing);
}

inline double energy_saving_pct(double scheme_nj, double baseline_nj) {
    if (!(baseline_nj > 0.0))
        throw std::invalid_argument("energy_saving_pct: baseline must be positive");
    return 100.0 * (baseline_nj - scheme_nj) / baseline_nj;
}

// Lifetime is the inverse of the maximum per-block write count, taken over
// endurance-limited (slow) blocks. A scheme with zero slow writes has
// unbounded relative lifetime.
struct LifetimeRatio {
    bool unbounded = false;
    double ratio = 0.0;

    std::string str() const {
        if (unbounded) return "inf";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", ratio);
        return buf;
    }
};

inline LifetimeRatio relative_lifetime(std::uint64_t scheme_max_writes,
                                       std::uint64_t baseline_max_writes) {
    if (scheme_max_writes == 0) return {true, 0.0};
    return {false,
            static_cast<double>(baseline_max_writes) / static_cast<double>(scheme_max_writes)};
}

inline double mpki(std::uint64_t misses, std::uint64_t instructions) {
    if (instructions == 0) throw std::invalid_argument("mpki: instructions must be positive");
    return 1000.0 * static_cast<double>(misses) / static_cast<double>(instructions);
}

// IPC ratio over the identical trace, which reduces to a cycle ratio.
inline double relative_performance(const SimReport& scheme, const SimReport& baseline) {
    if (scheme.instructions != baseline.instructions)
        throw std::invalid_argument("relative_performance: runs consumed different traces");
    if (scheme.total_cycles == 0 || baseline.total_cycles == 0)
        throw std::invalid_argument("relative_performance: zero-cycle run");
    return static_cast<double>(baseline.total_cycles) / static_cast<double>(scheme.total_cycles);
}

// Fraction of all block writes (hits plus fills) absorbed by fast ways.
// Undefined when the run produced no writes at all.
struct FastWriteFraction {
    bool defined = false;
    double value = 0.0;
};

inline FastWriteFraction fast_write_fraction(std::uint64_t writes_fast,
                                             std::uint64_t writes_slow) {
    if (writes_fast + writes_slow == 0) return {false, 0.0};
    return {true, static_cast<double>(writes_fast) /
                      static_cast<double>(writes_fast + writes_slow)};
}

enum class MeanKind { Geometric, Arithmetic };

inline double summarize(std::span<const double> values, MeanKind kind) {
    if (values.empty()) throw std::invalid_argument("summarize: empty input");
    if (kind == MeanKind::Arithmetic) {
        double sum = 0.0;
        for (double v : values) sum += v;
        return sum / static_cast<double>(values.size());
    }
    double log_sum = 0.0;
    for (double v : values) {
        if (!(v > 0.0))
            throw std::invalid_argument("summarize: geometric mean needs positive values");
        log_sum += std::log(v);
    }
    return std::exp(log_sum / static_cast<double>(values.size()));
}

}  // namespace hcsim
