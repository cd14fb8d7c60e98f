#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sporadic/cache.hpp"
#include "sporadic/dbsp.hpp"
#include "sporadic/metrics.hpp"
#include "sporadic/prefetcher.hpp"
#include "sporadic/trace.hpp"

namespace sporadic {

/// Shares of the prefetcher budget given to the record/compute/prefetch
/// tables.
struct TableSplit
{
    double record = 1.0 / 3.0;
    double compute = 1.0 / 3.0;
    double prefetch = 1.0 / 3.0;
};

struct TableRows
{
    std::size_t nr_r = 1;
    std::size_t nr_c = 1;
    std::size_t nr_p = 1;

    bool operator==(const TableRows &) const = default;
};

struct SimConfig
{
    double cache_pct = 0.01;     ///< fast memory as a share of storage
    double pref_rel_size = 0.10; ///< prefetcher share of fast memory
    std::uint64_t block_size = kDefaultBlockSize;
    TableSplit table_split;
    DbspConfig dbsp;
    /// Fixed table sizes instead of the ones derived from the budget.
    std::optional<TableRows> rows_override;

    void validate() const;
};

struct Budget
{
    std::uint64_t memory_bytes = 0;     ///< M
    std::uint64_t prefetcher_bytes = 0; ///< P
    std::uint64_t baseline_blocks = 0;  ///< cache-only capacity, M
    std::uint64_t cache_blocks = 0;     ///< capacity next to the prefetcher
    TableRows rows;
};

/// Row cost of each table in bytes: 8 per key plus 8 per stored value.
std::uint64_t record_row_bytes(const DbspConfig &c);
std::uint64_t compute_row_bytes(const DbspConfig &c);
std::uint64_t prefetch_row_bytes(const DbspConfig &c);

/// Splits fast memory between the cache and the prefetcher tables.
Budget budget(std::uint64_t storage_blocks, const SimConfig &cfg);

using PrefetcherFactory = std::function<std::unique_ptr<Prefetcher>(
    const Budget &, const SimConfig &)>;

/// DBSP sized from the budget (or rows_override). l_a is capped at nr_c.
PrefetcherFactory dbsp_factory();
PrefetcherFactory null_factory();

/**
 * Replays reads through an LRU cache of the given capacity. Before each
 * demand access every association returned by the prefetcher (except the
 * request itself) is prefetched with the size that key was last read at.
 */
CacheCounters replay(std::span<const ReadRequest> reads,
                     std::uint64_t capacity_blocks, Prefetcher *prefetcher);

struct TraceResult
{
    std::string trace_name;
    RunMetrics counters;
    double chr = 0;
    double precision = 1;
    double sar = 1;
};

TraceResult make_result(std::string trace_name, const RunMetrics &m);

/// Cache-only run with the whole memory budget; n_dp equals n_dc.
TraceResult baseline_metrics(const Trace &trace, const SimConfig &cfg);

/// Treatment run against a known baseline download count.
TraceResult treatment_metrics(const PrefetcherFactory &factory,
                              const Trace &trace, const SimConfig &cfg,
                              std::uint64_t n_dc_blocks);

/// Paired baseline and treatment runs over one trace.
TraceResult get_target_metrics(const PrefetcherFactory &factory,
                               const Trace &trace, const SimConfig &cfg);

struct EvalResult
{
    std::vector<TraceResult> per_trace;
    double avg_chr = 0;
    double avg_sar = 0;
    double avg_precision = 0;
};

/// Unweighted means over per-trace results.
EvalResult summarize(std::vector<TraceResult> per_trace);

EvalResult evaluate_prefetcher(const PrefetcherFactory &factory,
                               std::span<const Trace> traces,
                               const SimConfig &cfg, std::size_t jobs = 1);

/// Runs fn(0..n-1) on up to jobs threads. Rethrows the first failure.
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)> &fn);

enum class Direction { Maximize, Minimize };

struct ParetoPoint
{
    double x = 0; ///< CHR, always maximized
    double y = 0;
    std::string label;
};

/// Non-dominated subset sorted by x ascending; duplicates kept once.
std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points,
                                      Direction y_direction);

enum class SCurveMetric { Chr, Precision };

struct ConfigResult
{
    std::string config_id;
    EvalResult eval;
};

struct SCurve
{
    std::vector<std::string> columns;
    struct Row
    {
        std::string trace;
        std::vector<double> values;
    };
    std::vector<Row> rows;
};

/**
 * Trace-by-configuration table of one metric, rows sorted ascending by the
 * reference configuration's value (ties by trace name).
 */
SCurve s_curve(std::span<const ConfigResult> results, SCurveMetric metric,
               std::size_t reference = 0);

} // namespace sporadic
