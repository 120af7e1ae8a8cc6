#pragma once

// Technology parameter tables for the built-in SRAM and PCM arrays and
// derivation of way-partitioned hybrid cache parameters.

#include <cstdint>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "hcsim/config.hpp"

namespace hcsim {

enum class Technology { Sram1MB, Pcm8MB };

// One technology table row: per-access latencies/energies plus whole-array
// area and leakage at the stated capacity.
struct DeviceParams {
    double area_mm2 = 0.0;
    double hit_latency_ns = 0.0;
    double miss_latency_ns = 0.0;  // tag-check cost charged on a miss
    double write_latency_ns = 0.0;
    double hit_energy_nj = 0.0;
    double miss_energy_nj = 0.0;
    double write_energy_nj = 0.0;
    double leakage_w = 0.0;
    std::uint64_t capacity_bytes = 0;
    bool endurance_limited = false;  // true for PCM, false for SRAM

    void validate() const {
        auto pos = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string("DeviceParams: ") + name +
                                            " must be strictly positive");
        };
        pos(area_mm2, "area_mm2");
        pos(hit_latency_ns, "hit_latency_ns");
        pos(miss_latency_ns, "miss_latency_ns");
        pos(write_latency_ns, "write_latency_ns");
        pos(hit_energy_nj, "hit_energy_nj");
        pos(miss_energy_nj, "miss_energy_nj");
        pos(write_energy_nj, "write_energy_nj");
        pos(leakage_w, "leakage_w");
        if (capacity_bytes == 0)
            throw std::invalid_argument("DeviceParams: capacity_bytes must be positive");
    }
};

inline DeviceParams builtin_params(Technology kind) {
    DeviceParams p;
    switch (kind) {
        case Technology::Sram1MB:
            p.area_mm2 = 1.894;
            p.hit_latency_ns = 0.697;
            p.miss_latency_ns = 0.217;
            p.write_latency_ns = 0.3;
            p.hit_energy_nj = 0.29;
            p.miss_energy_nj = 0.006;
            p.write_energy_nj = 0.282;
            p.leakage_w = 2.194;
            p.capacity_bytes = 1ull << 20;
            p.endurance_limited = false;
            break;
        case Technology::Pcm8MB:
            p.area_mm2 = 1.602;
            p.hit_latency_ns = 0.905;
            p.miss_latency_ns = 0.274;
            p.write_latency_ns = 150.384;
            p.hit_energy_nj = 3.326;
            p.miss_energy_nj = 0.969;
            p.write_energy_nj = 76.418;
            p.leakage_w = 1.029;
            p.capacity_bytes = 8ull << 20;
            p.endurance_limited = true;
            break;
    }
    return p;
}

// Way-partitioned cache: the first n_fast physical ways of every set use
// the fast technology, the rest the slow one. Area and leakage scale
// linearly with the way split; miss latency and miss energy follow the
// slow technology. Hit/write costs stay per-region and are charged at
// access time from `fast` or `slow`.
struct HybridParams {
    DeviceParams fast;
    DeviceParams slow;
    std::uint32_t n_fast = 0;
    std::uint32_t assoc = 0;
    double area_mm2 = 0.0;
    double leakage_w = 0.0;
    double miss_latency_ns = 0.0;
    double miss_energy_nj = 0.0;
};

inline HybridParams derive_hybrid(const DeviceParams& fast, const DeviceParams& slow,
                                  std::uint32_t n_fast, std::uint32_t assoc) {
    if (assoc == 0) throw std::invalid_argument("derive_hybrid: assoc must be >= 1");
    if (n_fast > assoc) throw std::invalid_argument("derive_hybrid: n_fast exceeds assoc");
    fast.validate();
    slow.validate();
    const double f = static_cast<double>(n_fast) / static_cast<double>(assoc);
    HybridParams h;
    h.fast = fast;
    h.slow = slow;
    h.n_fast = n_fast;
    h.assoc = assoc;
    h.area_mm2 = f * fast.area_mm2 + (1.0 - f) * slow.area_mm2;
    h.leakage_w = f * fast.leakage_w + (1.0 - f) * slow.leakage_w;
    h.miss_latency_ns = slow.miss_latency_ns;
    h.miss_energy_nj = slow.miss_energy_nj;
    return h;
}

// A uniform (single-technology) cache expressed in HybridParams form, so
// the engine handles pure and partitioned designs identically.
inline HybridParams uniform_device(const DeviceParams& dev, std::uint32_t n_fast,
                                   std::uint32_t assoc) {
    return derive_hybrid(dev, dev, n_fast, assoc);
}

inline bool iso_area_ok(double candidate_mm2, double reference_mm2) {
    if (!(candidate_mm2 > 0.0) || !(reference_mm2 > 0.0))
        throw std::invalid_argument("iso_area_ok: areas must be positive");
    return candidate_mm2 <= reference_mm2;
}

// Main-memory model shared by every design.
struct MemoryParams {
    double access_energy_nj = 70.0;
    double leakage_w = 0.18;
};

// Modeled platform: in-order core clock and flat memory read latency.
struct TimingConfig {
    double core_freq_ghz = 2.0;
    std::uint64_t mem_latency_cycles = 360;

    double cycle_ns() const { return 1.0 / core_freq_ghz; }
    double mem_latency_ns() const { return static_cast<double>(mem_latency_cycles) / core_freq_ghz; }
};

// Device parameter file: flat `key = value` lines, keys matching the
// DeviceParams field names. Unknown keys are an error.
inline DeviceParams load_device_params(std::istream& in) {
    DeviceParams p;
    bool endurance_seen = false;
    for (const auto& e : parse_config(in)) {
        if (!e.section.empty())
            throw std::runtime_error("device file line " + std::to_string(e.line) +
                                     ": sections are not allowed");
        if (e.key == "area_mm2") p.area_mm2 = std::stod(e.value);
        else if (e.key == "hit_latency_ns") p.hit_latency_ns = std::stod(e.value);
        else if (e.key == "miss_latency_ns") p.miss_latency_ns = std::stod(e.value);
        else if (e.key == "write_latency_ns") p.write_latency_ns = std::stod(e.value);
        else if (e.key == "hit_energy_nj") p.hit_energy_nj = std::stod(e.value);
        else if (e.key == "miss_energy_nj") p.miss_energy_nj = std::stod(e.value);
        else if (e.key == "write_energy_nj") p.write_energy_nj = std::stod(e.value);
        else if (e.key == "leakage_w") p.leakage_w = std::stod(e.value);
        else if (e.key == "capacity_bytes") p.capacity_bytes = std::stoull(e.value);
        else if (e.key == "endurance_limited") {
            if (e.value != "true" && e.value != "false")
                throw std::runtime_error("device file line " + std::to_string(e.line) +
                                         ": endurance_limited must be true or false");
            p.endurance_limited = (e.value == "true");
            endurance_seen = true;
        } else {
            throw std::runtime_error("device file line " + std::to_string(e.line) +
                                     ": unknown key `" + e.key + "`");
        }
    }
    if (!endurance_seen)
        throw std::runtime_error("device file: endurance_limited is required");
    p.validate();
    return p;
}

inline DeviceParams load_device_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open device file: " + path);
    return load_device_params(in);
}

}  // namespace hcsim
