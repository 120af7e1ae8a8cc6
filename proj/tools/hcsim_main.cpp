// hcsim command line: experiment runner, trace generator, L1 filter, and
// device table dump.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hcsim/experiment.hpp"

namespace {

void print_table(const hcsim::ComparisonReport& cmp) {
    for (const auto& tr : cmp.traces) {
        std::printf("trace: %s\n", tr.label.c_str());
        std::printf("%-11s %12s %10s %9s %9s %11s %10s %9s %9s\n", "design", "accesses",
                    "hit_rate", "mpki", "fastWr", "energy(nJ)", "saving%", "lifetime", "relPerf");
        for (const auto& d : tr.designs) {
            const std::string fw =
                d.fast_writes.defined ? hcsim::fmt_g(d.fast_writes.value) : "nan";
            std::printf("%-11s %12llu %10.4f %9.4f %9s %11.4g %10.3f %9s %9.4f\n",
                        hcsim::design_name(d.design),
                        static_cast<unsigned long long>(d.report.accesses), d.hit_rate,
                        d.mpki_value, fw.c_str(), d.report.total_energy_nj(), d.energy_saving,
                        d.lifetime.str().c_str(), d.rel_performance);
        }
    }
    if (!cmp.summary.empty()) {
        std::printf("summary (%zu traces)\n", cmp.traces.size());
        std::printf("%-11s %10s %9s %9s %9s %9s\n", "design", "saving%", "lifetime", "relPerf",
                    "dMPKI", "fastWr");
        for (const auto& row : cmp.summary)
            std::printf("%-11s %10.3f %9s %9.4f %9.4f %9.4f\n", hcsim::design_name(row.design),
                        row.energy_saving, row.lifetime.str().c_str(), row.rel_performance,
                        row.mpki_delta, row.fast_write_frac);
    }
}

int cmd_run(const std::string& config_path,
            const std::vector<hcsim::ConfigEntry>& flag_entries) {
    hcsim::ExperimentSpec spec;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config file: " << config_path << "\n";
            return 1;
        }
        hcsim::apply_config(spec, hcsim::parse_config(in));
    }
    hcsim::apply_config(spec, flag_entries);  // flags override the file

    const auto cmp = hcsim::run_experiment(spec);
    const auto written = hcsim::write_outputs(cmp, spec);
    if (!spec.quiet) {
        print_table(cmp);
        for (const auto& p : written) std::printf("wrote %s\n", p.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Way-partitioned SRAM-PCM hybrid LLC simulator"};
    app.require_subcommand(1);

    // --- run -----------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "Run an experiment over one or more traces");
    std::string config_path;
    run_cmd->add_option("--config", config_path, "Experiment config file");
    // Flags are collected as config entries so the same override path and
    // validation applies to both sources.
    std::vector<hcsim::ConfigEntry> flags;
    auto opt = [&flags, run_cmd](const std::string& section, const std::string& key,
                                 const std::string& help) {
        std::string names = "--" + key;
        std::string hyphenated = key;
        for (auto& c : hyphenated)
            if (c == '_') c = '-';
        if (hyphenated != key) names += ",--" + hyphenated;
        run_cmd
            ->add_option_function<std::string>(
                names, [&flags, section, key](const std::string& v) {
                    flags.push_back({section, key, v, 0});
                },
                help)
            ->type_name("VAL");
    };
    opt("experiment", "designs", "Comma list of PCM,SRAM,HYBRID_LRU,HYBRID_DFB");
    opt("experiment", "baseline", "Baseline design (default PCM)");
    opt("experiment", "out", "Output directory for report.csv/report.json");
    opt("experiment", "warmup_accesses", "Accesses excluded from counters");
    opt("experiment", "plot", "Comma list of plot metrics");
    opt("trace", "file", "Trace file (comma-separate for several)");
    run_cmd
        ->add_option_function<std::string>(
            "--trace",
            [&flags](const std::string& v) { flags.push_back({"trace", "file", v, 0}); },
            "Alias for --file")
        ->type_name("VAL");
    opt("trace", "generator", "Synthetic source: cyclic, skewed or zipf");
    opt("trace", "sets", "cyclic: number of target sets");
    opt("trace", "blocks_per_set", "cyclic: distinct blocks per set");
    opt("trace", "laps", "cyclic: sweep repetitions");
    opt("trace", "first_block", "cyclic: tag offset of the swept region");
    opt("trace", "sets_hot", "skewed: number of hot sets");
    opt("trace", "hot_fraction", "skewed: fraction of accesses to hot sets");
    opt("trace", "hot_blocks_per_set", "skewed: working set per hot set");
    opt("trace", "cold_blocks_per_set", "skewed: uniform universe depth");
    opt("trace", "prologue_blocks", "skewed: churn fills per hot set");
    opt("trace", "alpha", "zipf: skew exponent");
    opt("trace", "universe_blocks", "zipf: block universe");
    opt("trace", "total_accesses", "generator length");
    opt("trace", "write_ratio", "generator write probability");
    opt("trace", "seed", "generator seed");
    opt("trace", "num_sets", "generator target cache sets");
    opt("trace", "block_bytes", "generator block size");
    opt("trace", "instr_per_access", "generator icount step");
    opt("cache", "capacity_bytes", "Cache capacity override");
    opt("cache", "assoc", "Associativity override");
    opt("cache", "n_fast", "Fast (SRAM) ways override");
    opt("cache", "banks", "Bank count override");
    opt("cache", "interval_cycles", "Z-update interval (0 disables adaptation)");
    opt("cache", "z_initial", "Initial Z for DFB");
    opt("cache", "prefer_invalid", "Claim invalid ways before the DFB scan");
    opt("cache", "dfb_thresholds", "Custom miss-rate:z table, e.g. 0.8:5,0.9:4,0.99:3,1:2");
    opt("cache", "policy", "Force lru or dfb on all designs");
    opt("timing", "core_freq_ghz", "Core frequency");
    opt("timing", "mem_latency_cycles", "Main memory read latency");
    opt("memory", "access_energy_nj", "Memory access energy");
    opt("memory", "leakage_w", "Memory leakage power");
    run_cmd->add_flag_callback(
        "--quiet", [&flags] { flags.push_back({"experiment", "quiet", "true", 0}); },
        "Suppress the stdout table");

    // --- gen -----------------------------------------------------------
    auto* gen_cmd = app.add_subcommand("gen", "Emit a synthetic trace to a file");
    std::string gen_kind, gen_out;
    gen_cmd->add_option("--kind", gen_kind, "cyclic, skewed or zipf")->required();
    gen_cmd->add_option("--out", gen_out, "Output path (.gz compresses)")->required();
    hcsim::CyclicSpec cyc;
    hcsim::SkewedSpec skw;
    hcsim::ZipfSpec zpf;
    std::optional<std::uint64_t> g_seed, g_total, g_num_sets, g_ipa;
    std::optional<double> g_write_ratio;
    std::optional<std::uint32_t> g_block_bytes;
    gen_cmd->add_option("--sets", cyc.sets, "cyclic: target sets");
    gen_cmd->add_option("--blocks-per-set", cyc.blocks_per_set, "cyclic: blocks per set");
    gen_cmd->add_option("--laps", cyc.laps, "cyclic: repetitions");
    gen_cmd->add_option("--first-block", cyc.first_block, "cyclic: tag offset");
    gen_cmd->add_option("--sets-hot", skw.sets_hot, "skewed: hot sets");
    gen_cmd->add_option("--hot-fraction", skw.hot_fraction, "skewed: hot access fraction");
    gen_cmd->add_option("--hot-blocks-per-set", skw.hot_blocks_per_set, "skewed: hot working set");
    gen_cmd->add_option("--cold-blocks-per-set", skw.cold_blocks_per_set, "skewed: cold universe");
    gen_cmd->add_option("--prologue-blocks", skw.prologue_blocks, "skewed: churn fills");
    gen_cmd->add_option("--alpha", zpf.alpha, "zipf: exponent");
    gen_cmd->add_option("--universe-blocks", zpf.universe_blocks, "zipf: universe");
    gen_cmd->add_option("--total-accesses", [&g_total](auto r) { g_total = std::stoull(r[0]); return true; }, "generator length")->type_name("N");
    gen_cmd->add_option("--write-ratio", [&g_write_ratio](auto r) { g_write_ratio = std::stod(r[0]); return true; }, "write probability")->type_name("X");
    gen_cmd->add_option("--seed", [&g_seed](auto r) { g_seed = std::stoull(r[0]); return true; }, "seed")->type_name("N");
    gen_cmd->add_option("--num-sets", [&g_num_sets](auto r) { g_num_sets = std::stoull(r[0]); return true; }, "target cache sets")->type_name("N");
    gen_cmd->add_option("--block-bytes", [&g_block_bytes](auto r) { g_block_bytes = static_cast<std::uint32_t>(std::stoul(r[0])); return true; }, "block size")->type_name("N");
    gen_cmd->add_option("--instr-per-access", [&g_ipa](auto r) { g_ipa = std::stoull(r[0]); return true; }, "icount step")->type_name("N");

    // --- filter ---------------------------------------------------------
    auto* filter_cmd = app.add_subcommand("filter", "Reduce a trace to its L1 miss stream");
    std::string f_in, f_out;
    std::uint64_t f_capacity = 32 * 1024;
    std::uint32_t f_assoc = 4, f_block = 64;
    filter_cmd->add_option("--in", f_in, "Input trace")->required();
    filter_cmd->add_option("--out", f_out, "Output trace")->required();
    filter_cmd->add_option("--l1-capacity", f_capacity, "L1 capacity in bytes (0 = pass-through)");
    filter_cmd->add_option("--l1-assoc", f_assoc, "L1 associativity");
    filter_cmd->add_option("--block-bytes", f_block, "Block size");

    // --- devices ---------------------------------------------------------
    auto* dev_cmd = app.add_subcommand("devices", "Print built-in device parameters as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return cmd_run(config_path, flags);
        if (*gen_cmd) {
            auto geom = [&](hcsim::TraceGeometry& g) {
                if (g_num_sets) g.num_sets = *g_num_sets;
                if (g_block_bytes) g.block_bytes = *g_block_bytes;
                if (g_ipa) g.instr_per_access = *g_ipa;
            };
            hcsim::Trace trace;
            if (gen_kind == "cyclic") {
                if (g_seed) cyc.seed = *g_seed;
                if (g_write_ratio) cyc.write_ratio = *g_write_ratio;
                geom(cyc.geom);
                trace = hcsim::gen_cyclic(cyc);
            } else if (gen_kind == "skewed") {
                if (g_seed) skw.seed = *g_seed;
                if (g_write_ratio) skw.write_ratio = *g_write_ratio;
                if (g_total) skw.total_accesses = *g_total;
                geom(skw.geom);
                trace = hcsim::gen_skewed(skw);
            } else if (gen_kind == "zipf") {
                if (g_seed) zpf.seed = *g_seed;
                if (g_write_ratio) zpf.write_ratio = *g_write_ratio;
                if (g_total) zpf.total_accesses = *g_total;
                geom(zpf.geom);
                trace = hcsim::gen_zipf(zpf);
            } else {
                std::cerr << "error: unknown generator kind `" << gen_kind << "`\n";
                return 1;
            }
            hcsim::save_trace_file(trace, gen_out);
            std::printf("wrote %zu records to %s\n", trace.size(), gen_out.c_str());
            return 0;
        }
        if (*filter_cmd) {
            const auto input = hcsim::load_trace_file(f_in);
            const auto output = hcsim::l1_filter(input, f_capacity, f_assoc, f_block);
            hcsim::save_trace_file(output, f_out);
            std::printf("filtered %zu records to %zu (%s)\n", input.size(), output.size(),
                        f_out.c_str());
            return 0;
        }
        if (*dev_cmd) {
            auto to_json = [](const hcsim::DeviceParams& p) {
                nlohmann::ordered_json j;
                j["area_mm2"] = p.area_mm2;
                j["hit_latency_ns"] = p.hit_latency_ns;
                j["miss_latency_ns"] = p.miss_latency_ns;
                j["write_latency_ns"] = p.write_latency_ns;
                j["hit_energy_nj"] = p.hit_energy_nj;
                j["miss_energy_nj"] = p.miss_energy_nj;
                j["write_energy_nj"] = p.write_energy_nj;
                j["leakage_w"] = p.leakage_w;
                j["capacity_bytes"] = p.capacity_bytes;
                j["endurance_limited"] = p.endurance_limited;
                return j;
            };
            nlohmann::ordered_json j;
            j["v"] = 1;
            j["SRAM-1MB"] = to_json(hcsim::builtin_params(hcsim::Technology::Sram1MB));
            j["PCM-8MB"] = to_json(hcsim::builtin_params(hcsim::Technology::Pcm8MB));
            std::cout << j.dump(2) << "\n";
            return 0;
        }
    } catch (const hcsim::MissingTraceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
