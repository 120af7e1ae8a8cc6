#pragma once

// Trace-driven simulation loop: drives accesses through the cache in
// order, tracks the cycle clock and per-bank availability, charges main
// memory latency on misses, fires Z-update intervals, and emits accounting
// events.
//
// Timing model. The core issues one trace access at a time: an access
// starts at max(previous access's data-return time, free time of its
// target bank). A hit returns after the region's hit or write latency. A
// miss returns after tag check plus the memory read; the fill write is
// then completed inside the bank, which stays occupied for it. A fill's
// trailing write therefore delays only later accesses to the same bank —
// that is where multi-bank designs gain over a single bank. Dirty-victim
// writebacks are posted to memory: one memory access of energy, no
// latency. Latencies accumulate in nanoseconds; conversion to cycles
// happens at the reporting boundary (ceiling).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hcsim/cache.hpp"
#include "hcsim/device.hpp"
#include "hcsim/metrics.hpp"
#include "hcsim/replacement.hpp"
#include "hcsim/trace.hpp"

namespace hcsim {

enum class EventKind : std::uint8_t {
    HitFast,       // read hit in a fast way
    HitSlow,       // read hit in a slow way
    Miss,          // tag check that missed
    WriteFast,     // write hit in a fast way
    WriteSlow,     // write hit in a slow way
    FillFast,      // miss fill into a fast way
    FillSlow,      // miss fill into a slow way
    MemRead,       // memory read for a miss
    MemWriteback,  // dirty victim posted to memory
};

struct SimEvent {
    EventKind kind;
    std::uint64_t cycle;
    std::uint32_t set_index;
    std::uint32_t way;
};

struct ZUpdate {
    std::uint64_t cycle;
    double miss_rate;  // over the accesses of the elapsed interval
    std::uint32_t z;
};

struct RunOptions {
    std::uint64_t warmup_accesses = 0;  // excluded from counters, not from state
    bool collect_events = false;
    bool collect_final_state = false;
};

struct RunResult {
    SimReport report;
    std::vector<SimEvent> events;       // populated when collect_events is set
    std::vector<ZUpdate> z_updates;
    std::vector<BlockState> final_blocks;  // populated when collect_final_state is set
};

inline const DeviceParams& region_params(const HybridParams& dev, Region r) {
    return r == Region::Fast ? dev.fast : dev.slow;
}

// Full service latency of one access in nanoseconds, fill write included.
inline double service_latency(const AccessOutcome& out, const HybridParams& dev, bool is_write,
                              const TimingConfig& timing) {
    const DeviceParams& region = region_params(dev, out.region_touched);
    if (out.hit) return is_write ? region.write_latency_ns : region.hit_latency_ns;
    return dev.miss_latency_ns + timing.mem_latency_ns() + region.write_latency_ns;
}

namespace detail {

// Latency until the access's data is back at the core; on a miss the fill
// write is excluded (the bank finishes it in the background).
inline double core_latency(const AccessOutcome& out, const HybridParams& dev, bool is_write,
                           const TimingConfig& timing) {
    if (out.hit) return service_latency(out, dev, is_write, timing);
    return dev.miss_latency_ns + timing.mem_latency_ns();
}

inline std::uint64_t to_cycles(double ns, const TimingConfig& timing) {
    return static_cast<std::uint64_t>(std::ceil(ns * timing.core_freq_ghz));
}

}  // namespace detail

inline RunResult run(std::span<const AccessRecord> trace, const CacheConfig& cfg,
                     const HybridParams& dev, const TimingConfig& timing,
                     const MemoryParams& mem, const RunOptions& opts = {}) {
    cfg.validate();
    if (dev.assoc != cfg.assoc || dev.n_fast != cfg.n_fast)
        throw std::invalid_argument("run: device way split disagrees with cache config");

    CacheState cache(cfg);
    Policy policy = Policy::make(cfg);
    auto victim = [&policy](std::span<const BlockState> ways) {
        return policy.select_victim(ways);
    };

    RunResult result;
    SimReport& rep = result.report;

    const std::uint64_t warmup = std::min<std::uint64_t>(opts.warmup_accesses, trace.size());
    for (std::uint64_t i = 0; i < warmup; ++i)
        cache.access(trace[i].op, trace[i].addr, victim);
    cache.reset_write_counts();
    const std::uint64_t warmup_icount = warmup > 0 ? trace[warmup - 1].icount : 0;

    double clock_ns = 0.0;      // running maximum of completion times
    double core_done_ns = 0.0;  // when the previous access's data returned
    std::vector<double> bank_free_ns(cfg.banks, 0.0);
    std::uint64_t prev_cycles = 0;
    const bool adaptive = cfg.policy == PolicyKind::Dfb && cfg.interval_cycles > 0;

    for (std::uint64_t i = warmup; i < trace.size(); ++i) {
        const AccessRecord& rec = trace[i];
        const bool is_write = rec.op == AccessOp::Write;
        const AccessOutcome out = cache.access(rec.op, rec.addr, victim);

        ++rep.accesses;
        policy.count_access(!out.hit);
        if (out.hit) {
            ++rep.hits;
            if (is_write) {
                (out.region_touched == Region::Fast ? rep.writes_fast : rep.writes_slow) += 1;
            } else {
                (out.region_touched == Region::Fast ? rep.read_hits_fast : rep.read_hits_slow) += 1;
            }
        } else {
            ++rep.misses;
            ++rep.mem_reads;
            (out.region_touched == Region::Fast ? rep.fills_fast : rep.fills_slow) += 1;
            (out.region_touched == Region::Fast ? rep.writes_fast : rep.writes_slow) += 1;
            if (out.writeback_issued) ++rep.mem_writebacks;
        }

        const double full_ns = service_latency(out, dev, is_write, timing);
        const double core_ns = detail::core_latency(out, dev, is_write, timing);
        const std::uint32_t bank = out.set_index % cfg.banks;
        const double start_ns = std::max(core_done_ns, bank_free_ns[bank]);
        core_done_ns = start_ns + core_ns;
        bank_free_ns[bank] = start_ns + full_ns;
        clock_ns = std::max(clock_ns, start_ns + full_ns);

        const std::uint64_t now_cycles = detail::to_cycles(clock_ns, timing);
        if (opts.collect_events) {
            auto emit = [&](EventKind kind) {
                result.events.push_back({kind, now_cycles, out.set_index, out.way});
            };
            if (out.hit) {
                if (is_write)
                    emit(out.region_touched == Region::Fast ? EventKind::WriteFast
                                                            : EventKind::WriteSlow);
                else
                    emit(out.region_touched == Region::Fast ? EventKind::HitFast
                                                            : EventKind::HitSlow);
            } else {
                emit(EventKind::Miss);
                emit(out.region_touched == Region::Fast ? EventKind::FillFast
                                                        : EventKind::FillSlow);
                emit(EventKind::MemRead);
                if (out.writeback_issued) emit(EventKind::MemWriteback);
            }
        }

        // Interval boundary check runs once per access; several crossings
        // inside one long access collapse into a single update.
        if (adaptive && now_cycles / cfg.interval_cycles > prev_cycles / cfg.interval_cycles) {
            const double mr = policy.tick();
            if (mr >= 0.0) result.z_updates.push_back({now_cycles, mr, policy.z()});
        }
        prev_cycles = now_cycles;
    }

    rep.total_cycles = detail::to_cycles(clock_ns, timing);
    rep.instructions = trace.size() > warmup ? trace.back().icount - warmup_icount : 0;
    rep.max_writes_slow_block = cache.max_write_count(Region::Slow);
    rep.max_writes_any_block = cache.max_write_count();
    rep.energy_cache_nj = cache_energy_nj(rep, dev, timing);
    rep.energy_mem_nj = memory_energy_nj(rep, mem, timing);
    if (opts.collect_final_state) {
        result.final_blocks.reserve(cfg.num_sets() * cfg.assoc);
        for (std::uint64_t s = 0; s < cfg.num_sets(); ++s)
            for (const auto& b : cache.set(s)) result.final_blocks.push_back(b);
    }
    return result;
}

}  // namespace hcsim
