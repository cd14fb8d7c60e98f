#include "sporadic/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sporadic {

namespace fs = std::filesystem;

const char *const kOutputSchemaHelp = R"(Output files (CSV: comma separated, LF line endings, numbers as %.6g):
  results.csv          trace,config_id,family,s_c,l_a,l_min,l_max,distance,
                       pref_rel_size,chr,precision,sar,n_ch,n_cm,n_pr,n_eu,
                       n_dp,n_dc
                       one row per trace per configuration; the LRU baseline
                       row (config_id lru, distance none) comes first
  pareto_precision.csv family,config_id,s_c,distance,pref_rel_size,avg_chr,
                       avg_precision,family_front,global_front
  pareto_sar.csv       family,config_id,s_c,distance,pref_rel_size,avg_chr,
                       avg_sar,family_front,global_front
  scurve_chr.csv       trace,<config_id>...  prefetcher configurations in
  scurve_precision.csv sweep order then lru; rows sorted ascending by the
                       first configuration column
  summary.json         averaged metrics per configuration and Pareto fronts
)";

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep))
        out.push_back(item);
    return out;
}

std::vector<long long> parse_int_list(const std::string &s, std::size_t n,
                                      const char *flag)
{
    auto parts = split(s, ',');
    if (parts.size() != n)
        throw ConfigError(std::string(flag) + " expects " +
                          std::to_string(n) + " comma separated integers");
    std::vector<long long> out;
    for (const auto &p : parts) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(p, &used);
            if (used != p.size() || v < 0)
                throw std::invalid_argument(p);
            out.push_back(v);
        } catch (const std::exception &) {
            throw ConfigError(std::string(flag) + ": invalid integer '" + p +
                              "'");
        }
    }
    return out;
}

std::size_t positive(long long v, const char *what)
{
    if (v < 1)
        throw ConfigError(std::string(what) + " must be positive");
    return static_cast<std::size_t>(v);
}

} // namespace

SweepSpec validate_config(const RawFlags &raw,
                          std::vector<std::string> &warnings)
{
    SweepSpec spec;

    for (const auto &t : raw.traces)
        spec.trace_paths.emplace_back(t);
    if (raw.trace_dir) {
        const fs::path dir(*raw.trace_dir);
        if (!fs::is_directory(dir))
            throw ConfigError("trace directory not found: " + dir.string());
        std::vector<fs::path> found;
        for (const auto &entry : fs::directory_iterator(dir))
            if (entry.is_regular_file())
                found.push_back(entry.path());
        std::sort(found.begin(), found.end());
        if (found.empty())
            throw ConfigError("no trace files in " + dir.string());
        spec.trace_paths.insert(spec.trace_paths.end(), found.begin(),
                                found.end());
    }

    if (raw.synthetic) {
        auto v = parse_int_list(*raw.synthetic, 4, "--synthetic");
        SyntheticSpec syn;
        syn.n_pairs = static_cast<std::size_t>(v[0]);
        syn.repeats = static_cast<std::size_t>(v[1]);
        syn.gap = static_cast<std::size_t>(v[2]);
        syn.noise_keys = static_cast<std::size_t>(v[3]);
        if (syn.n_pairs < 1 || syn.repeats < 2 || syn.gap < 1)
            throw ConfigError("--synthetic needs pairs >= 1, repeats >= 2 "
                              "and gap >= 1");
        spec.synthetic = syn;
    }
    if (spec.trace_paths.empty() && !spec.synthetic)
        throw ConfigError("no input: give --traces, --trace-dir or "
                          "--synthetic");

    if (raw.block_size) {
        const auto bs = *raw.block_size;
        if (bs == 0 || (bs & (bs - 1)))
            throw ConfigError("--block-size must be a power of two");
        spec.block_size = bs;
    }
    if (raw.cache_pct) {
        if (!(*raw.cache_pct > 0.0 && *raw.cache_pct <= 1.0))
            throw ConfigError("--cache-pct must be in (0, 1]");
        spec.cache_pct = *raw.cache_pct;
    }
    if (!raw.pref_rel_sizes.empty())
        spec.pref_rel_sizes = raw.pref_rel_sizes;
    for (double p : spec.pref_rel_sizes) {
        if (!(p >= 0.0 && p < 1.0))
            throw ConfigError("--pref-rel-size must be in [0, 1), got " +
                              format_number(p));
        if (p > 0.10)
            warnings.push_back("prefetcher relative size " +
                               format_number(p) +
                               " exceeds 0.1; larger prefetchers rarely "
                               "pay for the cache space they take");
    }

    if (!raw.s_c_values.empty()) {
        spec.s_c_values.clear();
        for (long long v : raw.s_c_values)
            spec.s_c_values.push_back(positive(v, "--sc"));
    }

    if (raw.l_min) {
        if (*raw.l_min < 2)
            throw ConfigError("--lmin must be at least 2: an association "
                              "needs the request to repeat at least twice");
        spec.l_min = static_cast<std::size_t>(*raw.l_min);
    }
    spec.l_max = spec.l_min + 2;
    if (raw.l_max) {
        if (*raw.l_max <= static_cast<long long>(spec.l_min))
            throw ConfigError("--lmax must be greater than --lmin");
        spec.l_max = static_cast<std::size_t>(*raw.l_max);
    }
    if (raw.lookahead)
        spec.l_a = positive(*raw.lookahead, "--lookahead");

    if (raw.distance) {
        const auto &d = *raw.distance;
        if (d == "f1")
            spec.distances = {Distance::Manhattan};
        else if (d == "f2")
            spec.distances = {Distance::NormalizedManhattan};
        else if (d == "both")
            spec.distances = {Distance::Manhattan,
                              Distance::NormalizedManhattan};
        else
            throw ConfigError("--distance must be f1, f2 or both");
    }

    if (raw.seed)
        spec.seed = *raw.seed;
    if (spec.synthetic)
        spec.synthetic->seed = spec.seed;
    if (raw.out)
        spec.output_dir = *raw.out;
    if (raw.jobs)
        spec.jobs = positive(*raw.jobs, "--jobs");

    if (raw.rows) {
        auto v = parse_int_list(*raw.rows, 3, "--rows");
        TableRows rows{positive(v[0], "--rows"), positive(v[1], "--rows"),
                       positive(v[2], "--rows")};
        spec.rows_override = rows;
    }
    return spec;
}

std::vector<SweepConfig> sweep_grid(const SweepSpec &spec)
{
    std::vector<SweepConfig> grid;
    for (double p : spec.pref_rel_sizes) {
        for (Distance d : spec.distances) {
            for (std::size_t s_c : spec.s_c_values) {
                SweepConfig c;
                c.distance = distance_name(d);
                c.family = "DBSP_" + c.distance;
                c.s_c = s_c;
                c.l_a = spec.l_a;
                c.l_min = spec.l_min;
                c.l_max = spec.l_max;
                c.pref_rel_size = p;
                c.id = "dbsp_" + c.distance + "_sc" + std::to_string(s_c) +
                       "_p" + format_number(p);
                grid.push_back(std::move(c));
            }
        }
    }
    return grid;
}

namespace {

SimConfig sim_config(const SweepSpec &spec, const SweepConfig &c)
{
    SimConfig cfg;
    cfg.cache_pct = spec.cache_pct;
    cfg.block_size = spec.block_size;
    cfg.pref_rel_size = c.pref_rel_size;
    cfg.rows_override = spec.rows_override;
    cfg.dbsp.s_c = std::max<std::size_t>(c.s_c, 1);
    cfg.dbsp.l_a = std::max<std::size_t>(c.l_a, 1);
    cfg.dbsp.l_min = c.l_min;
    cfg.dbsp.l_max = c.l_max;
    cfg.dbsp.normalised = c.distance == "f2";
    return cfg;
}

} // namespace

SweepResult evaluate_sweep(const SweepSpec &spec)
{
    std::vector<Trace> traces(spec.trace_paths.size());
    parallel_for(traces.size(), spec.jobs, [&](std::size_t i) {
        traces[i] = load_trace(spec.trace_paths[i], spec.block_size);
    });
    if (spec.synthetic) {
        Trace t = synth_correlated_trace(*spec.synthetic);
        const auto &s = *spec.synthetic;
        t.name = "synthetic_p" + std::to_string(s.n_pairs) + "_r" +
                 std::to_string(s.repeats) + "_g" + std::to_string(s.gap) +
                 "_n" + std::to_string(s.noise_keys) + "_s" +
                 std::to_string(s.seed);
        traces.push_back(std::move(t));
    }

    SweepResult out;
    for (const auto &t : traces)
        out.trace_names.push_back(t.name);

    SweepConfig lru;
    lru.id = "lru";
    lru.family = "LRU";
    lru.distance = "none";
    out.configs.push_back(lru);
    for (auto &c : sweep_grid(spec))
        out.configs.push_back(std::move(c));

    const std::size_t n_traces = traces.size();
    const std::size_t n_configs = out.configs.size();
    std::vector<std::vector<TraceResult>> cells(
        n_configs, std::vector<TraceResult>(n_traces));

    auto run_cell = [&](std::size_t config, std::size_t trace) {
        try {
            if (config == 0) {
                SimConfig cfg;
                cfg.cache_pct = spec.cache_pct;
                cfg.block_size = spec.block_size;
                cells[0][trace] = baseline_metrics(traces[trace], cfg);
            } else {
                const SimConfig cfg =
                    sim_config(spec, out.configs[config]);
                cells[config][trace] = treatment_metrics(
                    dbsp_factory(), traces[trace], cfg,
                    cells[0][trace].counters.n_dc_blocks);
            }
        } catch (const std::exception &e) {
            throw std::runtime_error("trace " + traces[trace].name +
                                     ", configuration " +
                                     out.configs[config].id + ": " +
                                     e.what());
        }
    };

    // Baselines first: every treatment cell needs its trace's n_dc.
    parallel_for(n_traces, spec.jobs,
                 [&](std::size_t t) { run_cell(0, t); });
    parallel_for((n_configs - 1) * n_traces, spec.jobs, [&](std::size_t k) {
        run_cell(1 + k / n_traces, k % n_traces);
    });

    for (std::size_t c = 0; c < n_configs; ++c)
        out.results.push_back(
            ConfigResult{out.configs[c].id, summarize(std::move(cells[c]))});
    return out;
}

std::string results_csv(const SweepResult &r)
{
    std::string out = "trace,config_id,family,s_c,l_a,l_min,l_max,distance,"
                      "pref_rel_size,chr,precision,sar,n_ch,n_cm,n_pr,n_eu,"
                      "n_dp,n_dc\n";
    for (std::size_t t = 0; t < r.trace_names.size(); ++t) {
        for (std::size_t c = 0; c < r.configs.size(); ++c) {
            const auto &cfg = r.configs[c];
            const auto &res = r.results[c].eval.per_trace[t];
            const auto &m = res.counters;
            out += res.trace_name + "," + cfg.id + "," + cfg.family + "," +
                   std::to_string(cfg.s_c) + "," + std::to_string(cfg.l_a) +
                   "," + std::to_string(cfg.l_min) + "," +
                   std::to_string(cfg.l_max) + "," + cfg.distance + "," +
                   format_number(cfg.pref_rel_size) + "," +
                   format_number(res.chr) + "," +
                   format_number(res.precision) + "," +
                   format_number(res.sar) + "," + std::to_string(m.n_ch) +
                   "," + std::to_string(m.n_cm) + "," +
                   std::to_string(m.n_pr) + "," + std::to_string(m.n_eu) +
                   "," + std::to_string(m.n_dp_blocks) + "," +
                   std::to_string(m.n_dc_blocks) + "\n";
        }
    }
    return out;
}

namespace {

struct Fronts
{
    std::vector<bool> family;
    std::vector<bool> global;
};

Fronts fronts(const SweepResult &r, bool sar)
{
    const Direction dir = sar ? Direction::Minimize : Direction::Maximize;
    std::vector<ParetoPoint> points;
    for (std::size_t c = 0; c < r.configs.size(); ++c) {
        const auto &e = r.results[c].eval;
        points.push_back(ParetoPoint{e.avg_chr,
                                     sar ? e.avg_sar : e.avg_precision,
                                     std::to_string(c)});
    }

    Fronts f{std::vector<bool>(points.size()),
             std::vector<bool>(points.size())};
    for (const auto &p : pareto_front(points, dir))
        f.global[std::stoul(p.label)] = true;

    std::vector<std::string> families;
    for (const auto &c : r.configs)
        if (std::find(families.begin(), families.end(), c.family) ==
            families.end())
            families.push_back(c.family);
    for (const auto &fam : families) {
        std::vector<ParetoPoint> subset;
        for (std::size_t c = 0; c < r.configs.size(); ++c)
            if (r.configs[c].family == fam)
                subset.push_back(points[c]);
        for (const auto &p : pareto_front(subset, dir))
            f.family[std::stoul(p.label)] = true;
    }
    return f;
}

} // namespace

std::string pareto_csv(const SweepResult &r, bool sar)
{
    const Fronts f = fronts(r, sar);
    std::string out = std::string("family,config_id,s_c,distance,"
                                  "pref_rel_size,avg_chr,") +
                      (sar ? "avg_sar" : "avg_precision") +
                      ",family_front,global_front\n";
    for (std::size_t c = 0; c < r.configs.size(); ++c) {
        const auto &cfg = r.configs[c];
        const auto &e = r.results[c].eval;
        out += cfg.family + "," + cfg.id + "," + std::to_string(cfg.s_c) +
               "," + cfg.distance + "," + format_number(cfg.pref_rel_size) +
               "," + format_number(e.avg_chr) + "," +
               format_number(sar ? e.avg_sar : e.avg_precision) + "," +
               (f.family[c] ? "1" : "0") + "," + (f.global[c] ? "1" : "0") +
               "\n";
    }
    return out;
}

std::string scurve_csv(const SweepResult &r, SCurveMetric metric)
{
    // Prefetcher configurations first so the sort key is a real prefetcher.
    std::vector<ConfigResult> ordered(r.results.begin() + 1, r.results.end());
    ordered.push_back(r.results.front());
    const SCurve curve = s_curve(ordered, metric, 0);

    std::string out = "trace";
    for (const auto &c : curve.columns)
        out += "," + c;
    out += "\n";
    for (const auto &row : curve.rows) {
        out += row.trace;
        for (double v : row.values)
            out += "," + format_number(v);
        out += "\n";
    }
    return out;
}

std::string summary_json(const SweepResult &r)
{
    using json = nlohmann::ordered_json;
    json doc;
    doc["traces"] = r.trace_names;

    json configs = json::array();
    for (std::size_t c = 0; c < r.configs.size(); ++c) {
        const auto &cfg = r.configs[c];
        const auto &e = r.results[c].eval;
        configs.push_back({{"config_id", cfg.id},
                           {"family", cfg.family},
                           {"s_c", cfg.s_c},
                           {"l_a", cfg.l_a},
                           {"l_min", cfg.l_min},
                           {"l_max", cfg.l_max},
                           {"distance", cfg.distance},
                           {"pref_rel_size", cfg.pref_rel_size},
                           {"avg_chr", e.avg_chr},
                           {"avg_precision", e.avg_precision},
                           {"avg_sar", e.avg_sar}});
    }
    doc["configs"] = configs;

    for (bool sar : {false, true}) {
        std::vector<ParetoPoint> points;
        for (std::size_t c = 0; c < r.configs.size(); ++c) {
            const auto &e = r.results[c].eval;
            points.push_back(ParetoPoint{
                e.avg_chr, sar ? e.avg_sar : e.avg_precision, r.configs[c].id});
        }
        json front = json::array();
        for (const auto &p :
             pareto_front(points,
                          sar ? Direction::Minimize : Direction::Maximize))
            front.push_back({{"config_id", p.label},
                             {"avg_chr", p.x},
                             {sar ? "avg_sar" : "avg_precision", p.y}});
        doc[sar ? "pareto_sar" : "pareto_precision"] = front;
    }
    return doc.dump(2) + "\n";
}

SweepResult run_sweep(const SweepSpec &spec)
{
    SweepResult result = evaluate_sweep(spec);

    fs::create_directories(spec.output_dir);
    auto write = [&](const char *name, const std::string &body) {
        const fs::path path = spec.output_dir / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << body;
        if (!f)
            throw std::runtime_error("cannot write " + path.string());
    };
    write("results.csv", results_csv(result));
    write("summary.json", summary_json(result));
    write("pareto_precision.csv", pareto_csv(result, false));
    write("pareto_sar.csv", pareto_csv(result, true));
    write("scurve_chr.csv", scurve_csv(result, SCurveMetric::Chr));
    write("scurve_precision.csv",
          scurve_csv(result, SCurveMetric::Precision));
    return result;
}

} // namespace sporadic
