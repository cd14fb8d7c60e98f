#include "sporadic/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_map>

namespace sporadic {

void SimConfig::validate() const
{
    if (!(cache_pct > 0.0 && cache_pct <= 1.0))
        throw ConfigError("cache percentage must be in (0, 1]");
    if (!(pref_rel_size >= 0.0 && pref_rel_size < 1.0))
        throw ConfigError("prefetcher relative size must be in [0, 1)");
    if (block_size == 0 || (block_size & (block_size - 1)))
        throw ConfigError("block size must be a power of two");
    const auto &s = table_split;
    if (!(s.record > 0 && s.compute > 0 && s.prefetch > 0) ||
        std::abs(s.record + s.compute + s.prefetch - 1.0) > 1e-9)
        throw ConfigError("table split must be three positive shares "
                          "summing to 1");
}

std::uint64_t record_row_bytes(const DbspConfig &c)
{
    return 8 * (1 + c.l_min);
}

std::uint64_t compute_row_bytes(const DbspConfig &c)
{
    return 8 * (1 + c.l_max);
}

std::uint64_t prefetch_row_bytes(const DbspConfig &c)
{
    return 8 * (1 + 2 * c.s_c);
}

Budget budget(std::uint64_t storage_blocks, const SimConfig &cfg)
{
    if (storage_blocks == 0)
        throw ConfigError("storage size must be positive");
    cfg.validate();

    Budget b;
    b.memory_bytes = static_cast<std::uint64_t>(
        std::llround(cfg.cache_pct * static_cast<double>(storage_blocks) *
                     static_cast<double>(cfg.block_size)));
    b.prefetcher_bytes = static_cast<std::uint64_t>(std::llround(
        cfg.pref_rel_size * static_cast<double>(b.memory_bytes)));
    b.baseline_blocks = b.memory_bytes / cfg.block_size;
    b.cache_blocks = (b.memory_bytes - b.prefetcher_bytes) / cfg.block_size;
    if (b.cache_blocks < 1)
        throw ConfigError("memory budget leaves the cache less than one "
                          "block");

    const double p = static_cast<double>(b.prefetcher_bytes);
    auto rows = [&](double share, std::uint64_t cost) {
        auto n = static_cast<std::size_t>(
            std::floor(share * p / static_cast<double>(cost)));
        return std::max<std::size_t>(1, n);
    };
    b.rows.nr_r = rows(cfg.table_split.record, record_row_bytes(cfg.dbsp));
    b.rows.nr_c = rows(cfg.table_split.compute, compute_row_bytes(cfg.dbsp));
    b.rows.nr_p =
        rows(cfg.table_split.prefetch, prefetch_row_bytes(cfg.dbsp));
    return b;
}

PrefetcherFactory dbsp_factory()
{
    return [](const Budget &b, const SimConfig &cfg) {
        DbspConfig c = cfg.dbsp;
        const TableRows rows = cfg.rows_override.value_or(b.rows);
        c.nr_r = rows.nr_r;
        c.nr_c = rows.nr_c;
        c.nr_p = rows.nr_p;
        c.l_a = std::min(c.l_a, c.nr_c);
        return std::make_unique<DbspPrefetcher>(c);
    };
}

PrefetcherFactory null_factory()
{
    return [](const Budget &, const SimConfig &) {
        return std::make_unique<NullPrefetcher>();
    };
}

CacheCounters replay(std::span<const ReadRequest> reads,
                     std::uint64_t capacity_blocks, Prefetcher *prefetcher)
{
    BlockCache cache(capacity_blocks);
    std::unordered_map<BlockKey, std::uint64_t> last_size;
    std::uint64_t next_prefetch_id = 0;

    for (const auto &r : reads) {
        if (prefetcher) {
            for (BlockKey k : prefetcher->associations(r)) {
                if (k == r.key)
                    continue;
                auto it = last_size.find(k);
                const std::uint64_t size =
                    it == last_size.end() ? 1 : it->second;
                if (size > capacity_blocks)
                    continue;
                cache.admit_prefetch(k, size, next_prefetch_id++);
            }
        }
        cache.access(r);
        last_size[r.key] = r.size_blocks;
    }
    return cache.counters();
}

TraceResult make_result(std::string trace_name, const RunMetrics &m)
{
    TraceResult r;
    r.trace_name = std::move(trace_name);
    r.counters = m;
    r.chr = chr(m);
    r.precision = precision(m);
    r.sar = sar(m);
    return r;
}

TraceResult baseline_metrics(const Trace &trace, const SimConfig &cfg)
{
    const Budget b = budget(trace.storage_blocks, cfg);
    const CacheCounters c = replay(trace.reads, b.baseline_blocks, nullptr);
    RunMetrics m{c.n_ch, c.n_cm, c.n_pr, c.n_eu, c.n_dp_blocks,
                 c.n_dp_blocks};
    return make_result(trace.name, m);
}

TraceResult treatment_metrics(const PrefetcherFactory &factory,
                              const Trace &trace, const SimConfig &cfg,
                              std::uint64_t n_dc_blocks)
{
    const Budget b = budget(trace.storage_blocks, cfg);
    auto prefetcher = factory(b, cfg);
    const CacheCounters c =
        replay(trace.reads, b.cache_blocks, prefetcher.get());
    RunMetrics m{c.n_ch, c.n_cm, c.n_pr, c.n_eu, c.n_dp_blocks, n_dc_blocks};
    return make_result(trace.name, m);
}

TraceResult get_target_metrics(const PrefetcherFactory &factory,
                               const Trace &trace, const SimConfig &cfg)
{
    if (trace.reads.empty())
        throw TraceError(trace.name + ": no read requests");
    const TraceResult base = baseline_metrics(trace, cfg);
    return treatment_metrics(factory, trace, cfg,
                             base.counters.n_dc_blocks);
}

EvalResult summarize(std::vector<TraceResult> per_trace)
{
    EvalResult out;
    out.per_trace = std::move(per_trace);
    if (out.per_trace.empty())
        return out;
    for (const auto &r : out.per_trace) {
        out.avg_chr += r.chr;
        out.avg_sar += r.sar;
        out.avg_precision += r.precision;
    }
    const double n = static_cast<double>(out.per_trace.size());
    out.avg_chr /= n;
    out.avg_sar /= n;
    out.avg_precision /= n;
    return out;
}

void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)> &fn)
{
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failed_at = n;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                // Keep the lowest failing index so errors match a
                // sequential run.
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t)
        pool.emplace_back(worker);
    for (auto &t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

EvalResult evaluate_prefetcher(const PrefetcherFactory &factory,
                               std::span<const Trace> traces,
                               const SimConfig &cfg, std::size_t jobs)
{
    if (traces.empty())
        throw ConfigError("evaluation needs at least one trace");
    cfg.validate();

    std::vector<TraceResult> results(traces.size());
    parallel_for(traces.size(), jobs, [&](std::size_t i) {
        try {
            results[i] = get_target_metrics(factory, traces[i], cfg);
        } catch (const std::exception &e) {
            throw std::runtime_error("trace " + traces[i].name + ": " +
                                     e.what());
        }
    });
    return summarize(std::move(results));
}

std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points,
                                      Direction y_direction)
{
    auto better = [&](double a, double b) {
        return y_direction == Direction::Maximize ? a > b : a < b;
    };

    std::vector<ParetoPoint> sorted(points.begin(), points.end());
    // Highest x first; within equal x the best y first.
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](const ParetoPoint &a, const ParetoPoint &b) {
                         if (a.x != b.x)
                             return a.x > b.x;
                         return better(a.y, b.y);
                     });

    std::vector<ParetoPoint> front;
    for (const auto &p : sorted)
        if (front.empty() || better(p.y, front.back().y))
            front.push_back(p);
    std::reverse(front.begin(), front.end());
    return front;
}

SCurve s_curve(std::span<const ConfigResult> results, SCurveMetric metric,
               std::size_t reference)
{
    SCurve out;
    if (results.empty())
        return out;
    if (reference >= results.size())
        throw ConfigError("s-curve reference configuration out of range");

    const std::size_t n_traces = results.front().eval.per_trace.size();
    for (const auto &cr : results) {
        if (cr.eval.per_trace.size() != n_traces)
            throw ConfigError("configuration " + cr.config_id +
                              " covers a different set of traces");
        out.columns.push_back(cr.config_id);
    }

    auto value = [&](const TraceResult &r) {
        return metric == SCurveMetric::Chr ? r.chr : r.precision;
    };
    for (std::size_t t = 0; t < n_traces; ++t) {
        SCurve::Row row;
        row.trace = results.front().eval.per_trace[t].trace_name;
        for (const auto &cr : results) {
            const auto &r = cr.eval.per_trace[t];
            if (r.trace_name != row.trace)
                throw ConfigError("configuration " + cr.config_id +
                                  " lists traces in a different order");
            row.values.push_back(value(r));
        }
        out.rows.push_back(std::move(row));
    }

    std::stable_sort(out.rows.begin(), out.rows.end(),
                     [&](const SCurve::Row &a, const SCurve::Row &b) {
                         if (a.values[reference] != b.values[reference])
                             return a.values[reference] <
                                    b.values[reference];
                         return a.trace < b.trace;
                     });
    return out;
}

} // namespace sporadic
