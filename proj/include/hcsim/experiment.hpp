#pragma once

// Experiment runner: configures the evaluated cache designs, runs every
// design over the identical trace(s), computes baseline-relative metrics,
// and writes CSV/JSON reports plus plot-ready columnar files.

#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcsim/engine.hpp"
#include "hcsim/report_io.hpp"

namespace hcsim {

enum class Design { Pcm, Sram, HybridLru, HybridDfb };

inline const char* design_name(Design d) {
    switch (d) {
        case Design::Pcm: return "PCM";
        case Design::Sram: return "SRAM";
        case Design::HybridLru: return "HYBRID_LRU";
        case Design::HybridDfb: return "HYBRID_DFB";
    }
    return "?";
}

inline Design parse_design(const std::string& s) {
    if (s == "PCM") return Design::Pcm;
    if (s == "SRAM") return Design::Sram;
    if (s == "HYBRID_LRU") return Design::HybridLru;
    if (s == "HYBRID_DFB") return Design::HybridDfb;
    throw std::invalid_argument("unknown design `" + s +
                                "` (valid: PCM, SRAM, HYBRID_LRU, HYBRID_DFB)");
}

// Optional per-experiment overrides layered over the design presets.
struct Overrides {
    std::optional<std::uint64_t> capacity_bytes;
    std::optional<std::uint32_t> assoc;
    std::optional<std::uint32_t> block_bytes;
    std::optional<std::uint32_t> n_fast;
    std::optional<std::uint32_t> banks;
    std::optional<std::uint64_t> interval_cycles;
    std::optional<std::uint32_t> z_initial;
    std::optional<bool> prefer_invalid;
    std::optional<std::string> dfb_thresholds;
    std::optional<PolicyKind> policy;  // forces one policy on every design
};

struct DesignSetup {
    CacheConfig cache;
    HybridParams dev;
};

// The four built-in designs: an 8 MiB 8-bank PCM cache (the baseline), a
// 1 MiB single-bank SRAM cache, and 8 MiB hybrids with 2 fast ways under
// LRU or DFB. Hybrid overrides of n_fast/assoc re-derive the device split.
inline DesignSetup builtin_design(Design d, const DeviceParams& sram, const DeviceParams& pcm,
                                  const Overrides& ov = {}) {
    CacheConfig c;
    c.block_bytes = ov.block_bytes.value_or(64);
    c.assoc = ov.assoc.value_or(8);
    c.interval_cycles = ov.interval_cycles.value_or(5'000'000);
    c.z_initial = ov.z_initial.value_or(4);
    if (ov.prefer_invalid) c.prefer_invalid = *ov.prefer_invalid;
    if (ov.dfb_thresholds) c.dfb_thresholds = *ov.dfb_thresholds;

    DesignSetup setup;
    switch (d) {
        case Design::Pcm:
            c.capacity_bytes = ov.capacity_bytes.value_or(pcm.capacity_bytes);
            c.n_fast = 0;
            c.policy = PolicyKind::Lru;
            c.banks = ov.banks.value_or(8);
            setup.dev = uniform_device(pcm, 0, c.assoc);
            break;
        case Design::Sram:
            c.capacity_bytes = ov.capacity_bytes.value_or(sram.capacity_bytes);
            c.n_fast = c.assoc;
            c.policy = PolicyKind::Lru;
            c.banks = ov.banks.value_or(1);
            setup.dev = uniform_device(sram, c.assoc, c.assoc);
            break;
        case Design::HybridLru:
        case Design::HybridDfb:
            c.capacity_bytes = ov.capacity_bytes.value_or(pcm.capacity_bytes);
            c.n_fast = ov.n_fast.value_or(2);
            c.policy = d == Design::HybridDfb ? PolicyKind::Dfb : PolicyKind::Lru;
            c.banks = ov.banks.value_or(8);
            setup.dev = derive_hybrid(sram, pcm, c.n_fast, c.assoc);
            break;
    }
    if (ov.policy) c.policy = *ov.policy;
    setup.cache = c;
    setup.cache.validate();
    return setup;
}

struct GeneratorSpec {
    std::string kind;  // cyclic | skewed | zipf
    CyclicSpec cyclic;
    SkewedSpec skewed;
    ZipfSpec zipf;

    Trace generate() const {
        if (kind == "cyclic") return gen_cyclic(cyclic);
        if (kind == "skewed") return gen_skewed(skewed);
        if (kind == "zipf") return gen_zipf(zipf);
        throw std::invalid_argument("unknown generator `" + kind +
                                    "` (valid: cyclic, skewed, zipf)");
    }

    std::string label() const { return "gen:" + kind; }
};

struct TraceSource {
    std::vector<std::string> files;
    std::optional<GeneratorSpec> generator;
};

struct MissingTraceError : std::runtime_error {
    explicit MissingTraceError(const std::string& path)
        : std::runtime_error("trace file not found: " + path) {}
};

struct ExperimentSpec {
    std::vector<Design> designs = {Design::Pcm, Design::Sram, Design::HybridLru,
                                   Design::HybridDfb};
    Design baseline = Design::Pcm;
    TraceSource source;
    Overrides overrides;
    DeviceParams sram = builtin_params(Technology::Sram1MB);
    DeviceParams pcm = builtin_params(Technology::Pcm8MB);
    TimingConfig timing;
    MemoryParams mem;
    std::uint64_t warmup_accesses = 0;
    std::string out_dir;  // empty: no files written
    std::vector<std::string> plot_metrics;
    bool quiet = false;

    void validate() const {
        if (designs.empty()) throw std::invalid_argument("experiment: no designs selected");
        bool found = false;
        for (auto d : designs) found = found || d == baseline;
        if (!found) throw std::invalid_argument("experiment: baseline not among designs");
        if (source.files.empty() && !source.generator)
            throw std::invalid_argument("experiment: no trace source given");
        if (!source.files.empty() && source.generator)
            throw std::invalid_argument("experiment: trace files and generator are exclusive");
    }
};

struct DesignResult {
    Design design;
    SimReport report;
    double hit_rate = 0.0;
    double mpki_value = 0.0;
    FastWriteFraction fast_writes;
    double energy_saving = 0.0;        // percent vs baseline
    LifetimeRatio lifetime;            // vs baseline
    double rel_performance = 1.0;
    double mpki_delta = 0.0;
    std::size_t z_update_count = 0;
};

struct TraceRunResult {
    std::string label;
    std::vector<DesignResult> designs;
};

struct SummaryRow {
    Design design;
    double energy_saving = 0.0;     // arithmetic mean
    LifetimeRatio lifetime;         // geometric mean, inf if any run unbounded
    double rel_performance = 1.0;   // geometric mean
    double mpki_delta = 0.0;        // arithmetic mean
    double fast_write_frac = 0.0;   // arithmetic mean over defined values
};

struct ComparisonReport {
    int v = 1;
    Design baseline;
    std::vector<TraceRunResult> traces;
    std::vector<SummaryRow> summary;  // filled when traces.size() > 1
};

namespace detail {

inline DesignResult relate(Design d, const SimReport& rep, const SimReport& base,
                           std::size_t z_updates) {
    DesignResult r;
    r.design = d;
    r.report = rep;
    r.hit_rate = rep.hit_rate();
    r.mpki_value = rep.instructions > 0 ? mpki(rep.misses, rep.instructions) : 0.0;
    r.fast_writes = fast_write_fraction(rep.writes_fast, rep.writes_slow);
    // degenerate empty-trace runs compare as equal rather than erroring
    r.energy_saving = base.total_energy_nj() > 0.0
                          ? energy_saving_pct(rep.total_energy_nj(), base.total_energy_nj())
                          : 0.0;
    r.lifetime = relative_lifetime(rep.max_writes_slow_block, base.max_writes_slow_block);
    r.rel_performance = rep.total_cycles == 0 && base.total_cycles == 0
                            ? 1.0
                            : relative_performance(rep, base);
    const double base_mpki = base.instructions > 0 ? mpki(base.misses, base.instructions) : 0.0;
    r.mpki_delta = r.mpki_value - base_mpki;
    r.z_update_count = z_updates;
    return r;
}

}  // namespace detail

inline ComparisonReport run_experiment(const ExperimentSpec& spec) {
    spec.validate();

    std::vector<std::pair<std::string, Trace>> traces;
    if (spec.source.generator) {
        traces.emplace_back(spec.source.generator->label(), spec.source.generator->generate());
    } else {
        for (const auto& path : spec.source.files) {
            if (!std::filesystem::exists(path)) throw MissingTraceError(path);
            traces.emplace_back(path, load_trace_file(path));
        }
    }

    ComparisonReport cmp;
    cmp.baseline = spec.baseline;

    for (const auto& entry : traces) {
        const std::string& label = entry.first;
        const Trace& trace = entry.second;
        // Designs are independent; run them concurrently and assemble in
        // the declared order so output is deterministic.
        std::vector<std::future<RunResult>> futures;
        for (Design d : spec.designs) {
            futures.push_back(std::async(std::launch::async, [&spec, &trace, d] {
                const DesignSetup setup = builtin_design(d, spec.sram, spec.pcm, spec.overrides);
                RunOptions opts;
                opts.warmup_accesses = spec.warmup_accesses;
                return run(trace, setup.cache, setup.dev, spec.timing, spec.mem, opts);
            }));
        }
        std::vector<RunResult> runs;
        runs.reserve(futures.size());
        for (auto& f : futures) runs.push_back(f.get());

        const SimReport* base = nullptr;
        for (std::size_t i = 0; i < spec.designs.size(); ++i)
            if (spec.designs[i] == spec.baseline) base = &runs[i].report;

        TraceRunResult tr;
        tr.label = label;
        for (std::size_t i = 0; i < spec.designs.size(); ++i)
            tr.designs.push_back(detail::relate(spec.designs[i], runs[i].report, *base,
                                                runs[i].z_updates.size()));
        cmp.traces.push_back(std::move(tr));
    }

    if (cmp.traces.size() > 1) {
        for (std::size_t i = 0; i < spec.designs.size(); ++i) {
            SummaryRow row;
            row.design = spec.designs[i];
            std::vector<double> savings, perfs, lifetimes, deltas, fracs;
            bool lifetime_unbounded = false;
            for (const auto& tr : cmp.traces) {
                const auto& d = tr.designs[i];
                savings.push_back(d.energy_saving);
                perfs.push_back(d.rel_performance);
                deltas.push_back(d.mpki_delta);
                if (d.fast_writes.defined) fracs.push_back(d.fast_writes.value);
                if (d.lifetime.unbounded) lifetime_unbounded = true;
                else lifetimes.push_back(d.lifetime.ratio);
            }
            row.energy_saving = summarize(savings, MeanKind::Arithmetic);
            row.rel_performance = summarize(perfs, MeanKind::Geometric);
            row.mpki_delta = summarize(deltas, MeanKind::Arithmetic);
            row.fast_write_frac =
                fracs.empty() ? 0.0 : summarize(fracs, MeanKind::Arithmetic);
            if (lifetime_unbounded) row.lifetime = {true, 0.0};
            else row.lifetime = {false, summarize(lifetimes, MeanKind::Geometric)};
            cmp.summary.push_back(row);
        }
    }
    return cmp;
}

// --- output ------------------------------------------------------------------

inline const std::vector<std::string>& plot_metric_ids() {
    static const std::vector<std::string> ids = {
        "energy_saving_pct", "fast_write_fraction", "mpki_delta", "relative_performance",
        "relative_lifetime", "mpki",                "hit_rate",   "energy_total_nj"};
    return ids;
}

namespace detail {

inline std::string metric_value(const DesignResult& d, const std::string& metric) {
    if (metric == "energy_saving_pct") return fmt_g(d.energy_saving);
    if (metric == "fast_write_fraction")
        return d.fast_writes.defined ? fmt_g(d.fast_writes.value) : "nan";
    if (metric == "mpki_delta") return fmt_g(d.mpki_delta);
    if (metric == "relative_performance") return fmt_g(d.rel_performance);
    if (metric == "relative_lifetime") return d.lifetime.str();
    if (metric == "mpki") return fmt_g(d.mpki_value);
    if (metric == "hit_rate") return fmt_g(d.hit_rate);
    if (metric == "energy_total_nj") return fmt_g(d.report.total_energy_nj());
    std::string valid;
    for (const auto& id : plot_metric_ids()) valid += (valid.empty() ? "" : ", ") + id;
    throw std::invalid_argument("unknown metric `" + metric + "` (valid: " + valid + ")");
}

}  // namespace detail

// Two whitespace-separated columns, one line per design, for external
// plotting tools. With several traces the summarized metrics are used;
// per-run-only metrics then need a single-trace experiment.
inline std::string emit_plotdata(const ComparisonReport& cmp, const std::string& metric) {
    std::string out;
    if (cmp.summary.empty()) {
        for (const auto& d : cmp.traces.at(0).designs)
            out += std::string(design_name(d.design)) + " " + detail::metric_value(d, metric) + "\n";
        return out;
    }
    detail::metric_value(cmp.traces.at(0).designs.front(), metric);  // validates the id
    for (const auto& row : cmp.summary) {
        std::string value;
        if (metric == "energy_saving_pct") value = fmt_g(row.energy_saving);
        else if (metric == "fast_write_fraction") value = fmt_g(row.fast_write_frac);
        else if (metric == "mpki_delta") value = fmt_g(row.mpki_delta);
        else if (metric == "relative_performance") value = fmt_g(row.rel_performance);
        else if (metric == "relative_lifetime") value = row.lifetime.str();
        else
            throw std::invalid_argument("metric `" + metric +
                                        "` is per-run only; rerun with a single trace");
        out += std::string(design_name(row.design)) + " " + value + "\n";
    }
    return out;
}

inline std::string comparison_csv(const ComparisonReport& cmp) {
    std::string out = "v,trace,design," + report_csv_header() +
                      ",hit_rate,mpki,fast_write_fraction,energy_saving_pct,relative_lifetime,"
                      "relative_performance,mpki_delta,z_updates\n";
    auto relatives = [](const DesignResult& d) {
        std::string s;
        s += ',' + fmt_g(d.hit_rate);
        s += ',' + fmt_g(d.mpki_value);
        s += ',' + (d.fast_writes.defined ? fmt_g(d.fast_writes.value) : "nan");
        s += ',' + fmt_g(d.energy_saving);
        s += ',' + d.lifetime.str();
        s += ',' + fmt_g(d.rel_performance);
        s += ',' + fmt_g(d.mpki_delta);
        s += ',' + std::to_string(d.z_update_count);
        return s;
    };
    for (const auto& tr : cmp.traces)
        for (const auto& d : tr.designs)
            out += "1," + tr.label + "," + design_name(d.design) + "," + report_csv_row(d.report) +
                   relatives(d) + "\n";
    return out;
}

inline nlohmann::ordered_json comparison_json(const ComparisonReport& cmp) {
    nlohmann::ordered_json j;
    j["v"] = 1;
    j["baseline"] = design_name(cmp.baseline);
    j["traces"] = nlohmann::ordered_json::array();
    for (const auto& tr : cmp.traces) {
        nlohmann::ordered_json jt;
        jt["label"] = tr.label;
        jt["designs"] = nlohmann::ordered_json();
        for (const auto& d : tr.designs) {
            nlohmann::ordered_json jd = report_to_json(d.report);
            jd["hit_rate"] = d.hit_rate;
            jd["mpki"] = d.mpki_value;
            if (d.fast_writes.defined) jd["fast_write_fraction"] = d.fast_writes.value;
            else jd["fast_write_fraction"] = nullptr;
            jd["energy_saving_pct"] = d.energy_saving;
            if (d.lifetime.unbounded) jd["relative_lifetime"] = "inf";
            else jd["relative_lifetime"] = d.lifetime.ratio;
            jd["relative_performance"] = d.rel_performance;
            jd["mpki_delta"] = d.mpki_delta;
            jd["z_updates"] = d.z_update_count;
            jt["designs"][design_name(d.design)] = jd;
        }
        j["traces"].push_back(jt);
    }
    if (!cmp.summary.empty()) {
        nlohmann::ordered_json js;
        for (const auto& row : cmp.summary) {
            nlohmann::ordered_json jr;
            jr["energy_saving_pct"] = row.energy_saving;
            if (row.lifetime.unbounded) jr["relative_lifetime"] = "inf";
            else jr["relative_lifetime"] = row.lifetime.ratio;
            jr["relative_performance"] = row.rel_performance;
            jr["mpki_delta"] = row.mpki_delta;
            jr["fast_write_fraction"] = row.fast_write_frac;
            js[design_name(row.design)] = jr;
        }
        j["summary"] = js;
    }
    return j;
}

// --- configuration file ------------------------------------------------------
// `key = value` lines under [section] headers; flags given on the command
// line override file values. Unknown sections or keys are errors.

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        const auto item = trim(std::string_view(s).substr(pos, comma - pos));
        if (!item.empty()) items.emplace_back(item);
        pos = comma + 1;
    }
    return items;
}

inline bool parse_bool(const ConfigEntry& e) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw std::invalid_argument("config line " + std::to_string(e.line) + ": `" + e.key +
                                "` must be true or false");
}

inline PolicyKind parse_policy(const std::string& s) {
    if (s == "lru") return PolicyKind::Lru;
    if (s == "dfb") return PolicyKind::Dfb;
    throw std::invalid_argument("policy must be lru or dfb, got `" + s + "`");
}

}  // namespace detail

inline void apply_config(ExperimentSpec& spec, const std::vector<ConfigEntry>& entries) {
    auto bad = [](const ConfigEntry& e) -> std::invalid_argument {
        return std::invalid_argument("config line " + std::to_string(e.line) + ": unknown key `" +
                                     e.key + "` in section [" + e.section + "]");
    };
    for (const auto& e : entries) {
        if (e.section == "experiment" || e.section.empty()) {
            if (e.key == "designs") {
                spec.designs.clear();
                for (const auto& name : detail::split_list(e.value))
                    spec.designs.push_back(parse_design(name));
            } else if (e.key == "baseline") spec.baseline = parse_design(e.value);
            else if (e.key == "out") spec.out_dir = e.value;
            else if (e.key == "warmup_accesses") spec.warmup_accesses = std::stoull(e.value);
            else if (e.key == "quiet") spec.quiet = detail::parse_bool(e);
            else if (e.key == "plot") spec.plot_metrics = detail::split_list(e.value);
            else throw bad(e);
        } else if (e.section == "trace") {
            auto& gen = spec.source.generator;
            auto ensure_gen = [&]() -> GeneratorSpec& {
                if (!gen) gen.emplace();
                return *gen;
            };
            if (e.key == "file") {
                for (const auto& f : detail::split_list(e.value))
                    spec.source.files.push_back(f);
            } else if (e.key == "generator") ensure_gen().kind = e.value;
            else if (e.key == "sets") ensure_gen().cyclic.sets = std::stoull(e.value);
            else if (e.key == "blocks_per_set")
                ensure_gen().cyclic.blocks_per_set = std::stoull(e.value);
            else if (e.key == "laps") ensure_gen().cyclic.laps = std::stoull(e.value);
            else if (e.key == "first_block") ensure_gen().cyclic.first_block = std::stoull(e.value);
            else if (e.key == "sets_hot") ensure_gen().skewed.sets_hot = std::stoull(e.value);
            else if (e.key == "hot_fraction") ensure_gen().skewed.hot_fraction = std::stod(e.value);
            else if (e.key == "hot_blocks_per_set")
                ensure_gen().skewed.hot_blocks_per_set = std::stoul(e.value);
            else if (e.key == "cold_blocks_per_set")
                ensure_gen().skewed.cold_blocks_per_set = std::stoul(e.value);
            else if (e.key == "prologue_blocks")
                ensure_gen().skewed.prologue_blocks = std::stoul(e.value);
            else if (e.key == "alpha") ensure_gen().zipf.alpha = std::stod(e.value);
            else if (e.key == "universe_blocks")
                ensure_gen().zipf.universe_blocks = std::stoull(e.value);
            else if (e.key == "total_accesses") {
                auto& g = ensure_gen();
                g.skewed.total_accesses = g.zipf.total_accesses = std::stoull(e.value);
            } else if (e.key == "write_ratio") {
                auto& g = ensure_gen();
                g.cyclic.write_ratio = g.skewed.write_ratio = g.zipf.write_ratio =
                    std::stod(e.value);
            } else if (e.key == "seed") {
                auto& g = ensure_gen();
                g.cyclic.seed = g.skewed.seed = g.zipf.seed = std::stoull(e.value);
            } else if (e.key == "num_sets") {
                auto& g = ensure_gen();
                g.cyclic.geom.num_sets = g.skewed.geom.num_sets = g.zipf.geom.num_sets =
                    std::stoull(e.value);
            } else if (e.key == "block_bytes") {
                auto& g = ensure_gen();
                g.cyclic.geom.block_bytes = g.skewed.geom.block_bytes = g.zipf.geom.block_bytes =
                    std::stoul(e.value);
            } else if (e.key == "instr_per_access") {
                auto& g = ensure_gen();
                g.cyclic.geom.instr_per_access = g.skewed.geom.instr_per_access =
                    g.zipf.geom.instr_per_access = std::stoull(e.value);
            } else throw bad(e);
        } else if (e.section == "cache") {
            auto& ov = spec.overrides;
            if (e.key == "capacity_bytes") ov.capacity_bytes = std::stoull(e.value);
            else if (e.key == "assoc") ov.assoc = std::stoul(e.value);
            else if (e.key == "block_bytes") ov.block_bytes = std::stoul(e.value);
            else if (e.key == "n_fast") ov.n_fast = std::stoul(e.value);
            else if (e.key == "banks") ov.banks = std::stoul(e.value);
            else if (e.key == "interval_cycles") ov.interval_cycles = std::stoull(e.value);
            else if (e.key == "z_initial") ov.z_initial = std::stoul(e.value);
            else if (e.key == "prefer_invalid") ov.prefer_invalid = detail::parse_bool(e);
            else if (e.key == "dfb_thresholds") ov.dfb_thresholds = e.value;
            else if (e.key == "policy") ov.policy = detail::parse_policy(e.value);
            else throw bad(e);
        } else if (e.section == "timing") {
            if (e.key == "core_freq_ghz") spec.timing.core_freq_ghz = std::stod(e.value);
            else if (e.key == "mem_latency_cycles")
                spec.timing.mem_latency_cycles = std::stoull(e.value);
            else throw bad(e);
        } else if (e.section == "memory") {
            if (e.key == "access_energy_nj") spec.mem.access_energy_nj = std::stod(e.value);
            else if (e.key == "leakage_w") spec.mem.leakage_w = std::stod(e.value);
            else throw bad(e);
        } else if (e.section == "device.sram") {
            if (e.key == "file") spec.sram = load_device_params_file(e.value);
            else throw bad(e);
        } else if (e.section == "device.pcm") {
            if (e.key == "file") spec.pcm = load_device_params_file(e.value);
            else throw bad(e);
        } else {
            throw std::invalid_argument("config line " + std::to_string(e.line) +
                                        ": unknown section [" + e.section + "]");
        }
    }
}

// Writes report.csv, report.json, and plot_<metric>.dat files under
// spec.out_dir. Returns the list of paths written.
inline std::vector<std::string> write_outputs(const ComparisonReport& cmp,
                                              const ExperimentSpec& spec) {
    std::vector<std::string> written;
    if (spec.out_dir.empty()) return written;
    std::filesystem::create_directories(spec.out_dir);
    const auto out = [&](const std::string& name, const std::string& content) {
        const std::string path = (std::filesystem::path(spec.out_dir) / name).string();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write output file: " + path);
        f << content;
        written.push_back(path);
    };
    out("report.csv", comparison_csv(cmp));
    out("report.json", comparison_json(cmp).dump(2) + "\n");
    for (const auto& metric : spec.plot_metrics)
        out("plot_" + metric + ".dat", emit_plotdata(cmp, metric));
    return written;
}

}  // namespace hcsim
