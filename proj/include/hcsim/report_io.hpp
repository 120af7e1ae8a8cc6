#pragma once

// Flat SimReport serialization: one JSON object and one CSV row, fixed
// field order (documented in the README format reference).

#include <cstdio>
#include <string>

#include <json.hpp>

#include "hcsim/metrics.hpp"

namespace hcsim {

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline nlohmann::ordered_json report_to_json(const SimReport& r) {
    nlohmann::ordered_json j;
    j["accesses"] = r.accesses;
    j["hits"] = r.hits;
    j["misses"] = r.misses;
    j["read_hits_fast"] = r.read_hits_fast;
    j["read_hits_slow"] = r.read_hits_slow;
    j["writes_fast"] = r.writes_fast;
    j["writes_slow"] = r.writes_slow;
    j["fills_fast"] = r.fills_fast;
    j["fills_slow"] = r.fills_slow;
    j["mem_reads"] = r.mem_reads;
    j["mem_writebacks"] = r.mem_writebacks;
    j["total_cycles"] = r.total_cycles;
    j["instructions"] = r.instructions;
    j["max_writes_slow_block"] = r.max_writes_slow_block;
    j["max_writes_any_block"] = r.max_writes_any_block;
    j["energy_cache_nj"] = r.energy_cache_nj;
    j["energy_mem_nj"] = r.energy_mem_nj;
    j["energy_total_nj"] = r.total_energy_nj();
    return j;
}

inline std::string report_csv_header() {
    return "accesses,hits,misses,read_hits_fast,read_hits_slow,writes_fast,writes_slow,"
           "fills_fast,fills_slow,mem_reads,mem_writebacks,total_cycles,instructions,"
           "max_writes_slow_block,max_writes_any_block,energy_cache_nj,energy_mem_nj,"
           "energy_total_nj";
}

inline std::string report_csv_row(const SimReport& r) {
    std::string row;
    auto add_u = [&row](std::uint64_t v) {
        if (!row.empty()) row += ',';
        row += std::to_string(v);
    };
    auto add_d = [&row](double v) {
        row += ',';
        row += fmt_g(v);
    };
    add_u(r.accesses);
    add_u(r.hits);
    add_u(r.misses);
    add_u(r.read_hits_fast);
    add_u(r.read_hits_slow);
    add_u(r.writes_fast);
    add_u(r.writes_slow);
    add_u(r.fills_fast);
    add_u(r.fills_slow);
    add_u(r.mem_reads);
    add_u(r.mem_writebacks);
    add_u(r.total_cycles);
    add_u(r.instructions);
    add_u(r.max_writes_slow_block);
    add_u(r.max_writes_any_block);
    add_d(r.energy_cache_nj);
    add_d(r.energy_mem_nj);
    add_d(r.total_energy_nj());
    return row;
}

}  // namespace hcsim
