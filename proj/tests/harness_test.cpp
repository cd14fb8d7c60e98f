#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sporadic/harness.hpp"

using namespace sporadic;

namespace
{

Trace make_trace(std::vector<BlockKey> keys, std::string name = "t")
{
    Trace t;
    t.name = std::move(name);
    for (BlockKey k : keys)
        t.reads.push_back(ReadRequest{k, 1, t.reads.size()});
    t.storage_blocks = storage_size(t.reads);
    return t;
}

/// Returns a fixed association list for one trigger key.
class ScriptedPrefetcher final : public Prefetcher
{
  public:
    ScriptedPrefetcher(BlockKey trigger, std::vector<BlockKey> out)
        : trigger_(trigger), out_(std::move(out))
    {
    }
    std::vector<BlockKey> associations(const ReadRequest &r) override
    {
        return r.key == trigger_ ? out_ : std::vector<BlockKey>{};
    }

  private:
    BlockKey trigger_;
    std::vector<BlockKey> out_;
};

SimConfig synthetic_config()
{
    SimConfig cfg;
    cfg.cache_pct = 0.0005;
    cfg.pref_rel_size = 0.1;
    cfg.dbsp.l_a = 1;
    cfg.dbsp.s_c = 2;
    cfg.rows_override = TableRows{1000, 40, 1000};
    return cfg;
}

} // namespace

TEST(Budget, PrefetcherDisabled)
{
    SimConfig cfg;
    cfg.pref_rel_size = 0;
    const Budget b = budget(100000, cfg);
    EXPECT_EQ(b.prefetcher_bytes, 0U);
    EXPECT_EQ(b.cache_blocks, b.baseline_blocks);
    EXPECT_EQ(b.cache_blocks, 1000U);
    EXPECT_EQ(b.rows, (TableRows{1, 1, 1}));
}

TEST(Budget, RowsFromCostModel)
{
    SimConfig cfg;
    cfg.cache_pct = 1.0;
    cfg.pref_rel_size = 0.1;
    cfg.dbsp.l_min = 2;
    cfg.dbsp.l_max = 4;
    cfg.dbsp.s_c = 3;
    const Budget b = budget(256, cfg); // M = 1 MiB
    EXPECT_EQ(b.memory_bytes, 1048576U);
    EXPECT_EQ(b.prefetcher_bytes, 104858U);
    EXPECT_EQ(b.rows.nr_r, 1456U);                // 104858 / 3 / 24
    EXPECT_EQ(b.rows.nr_c, 104858U / 3 / 40);     // 8 * (1 + l_max)
    EXPECT_EQ(b.rows.nr_p, 104858U / 3 / 56);     // 8 * (1 + 2 s_c)
    EXPECT_EQ(b.cache_blocks, (1048576U - 104858U) / 4096);
    EXPECT_EQ(b.baseline_blocks, 256U);
}

TEST(Budget, FullCache)
{
    SimConfig cfg;
    cfg.cache_pct = 1.0;
    cfg.pref_rel_size = 0;
    EXPECT_EQ(budget(777, cfg).cache_blocks, 777U);
}

TEST(Budget, Errors)
{
    SimConfig cfg;
    EXPECT_THROW(budget(0, cfg), ConfigError);
    EXPECT_THROW(budget(10, cfg), ConfigError); // 0.1 block of memory
    cfg.pref_rel_size = 1.0;
    EXPECT_THROW(budget(100000, cfg), ConfigError);
    cfg = SimConfig{};
    cfg.table_split = {0.5, 0.5, 0.5};
    EXPECT_THROW(budget(100000, cfg), ConfigError);
    cfg = SimConfig{};
    cfg.cache_pct = 0;
    EXPECT_THROW(budget(100000, cfg), ConfigError);
}

TEST(Replay, PrefetchesBeforeDemandAndSkipsSelf)
{
    const std::vector<ReadRequest> reads{{1, 1, 0}, {2, 1, 1}};
    ScriptedPrefetcher p(1, {1, 2});
    const CacheCounters c = replay(reads, 4, &p);
    EXPECT_EQ(c.n_pr, 1U);
    EXPECT_EQ(c.n_ch, 1U);
    EXPECT_EQ(c.n_cm, 1U);
    EXPECT_EQ(c.n_dp_blocks, 2U);
}

TEST(Replay, PrefetchUsesLastSeenSize)
{
    const std::vector<ReadRequest> reads{{8, 3, 0},  {20, 1, 1}, {21, 1, 2},
                                         {22, 1, 3}, {23, 1, 4}, {30, 1, 5},
                                         {8, 3, 6}};
    ScriptedPrefetcher p(30, {8});
    const CacheCounters c = replay(reads, 4, &p);
    // Key 8 was last read with 3 blocks, so the prefetch brings back all
    // three and the final read hits.
    EXPECT_EQ(c.n_pr, 1U);
    EXPECT_EQ(c.n_ch, 1U);
    EXPECT_EQ(c.n_dp_blocks, 3U + 4U + 3U + 1U);
}

TEST(GetTargetMetrics, NullPrefetcherMatchesPlainLru)
{
    std::mt19937_64 rng(2);
    std::vector<BlockKey> keys;
    for (int i = 0; i < 5000; ++i)
        keys.push_back(rng() % 3000);
    keys.push_back(100000); // storage of 100001 blocks
    const Trace t = make_trace(keys);
    SimConfig cfg;
    cfg.pref_rel_size = 0.1;
    const Budget b = budget(t.storage_blocks, cfg);
    const TraceResult r = get_target_metrics(null_factory(), t, cfg);

    oracle::ReferenceLru small(b.cache_blocks), full(b.baseline_blocks);
    std::uint64_t hits = 0;
    for (const auto &q : t.reads) {
        hits += small.access(q.key, 1);
        full.access(q.key, 1);
    }
    EXPECT_EQ(r.counters.n_ch, hits);
    EXPECT_EQ(r.counters.n_pr, 0U);
    EXPECT_EQ(r.counters.n_dp_blocks, small.downloaded);
    EXPECT_EQ(r.counters.n_dc_blocks, full.downloaded);
    EXPECT_EQ(r.sar, static_cast<double>(small.downloaded) /
                         static_cast<double>(full.downloaded));
    EXPECT_EQ(r.precision, 1.0);
}

TEST(GetTargetMetrics, NullPrefetcherWithoutBudgetHasUnitSar)
{
    const Trace t = make_trace({5, 9, 5, 200000, 9, 5});
    SimConfig cfg;
    cfg.pref_rel_size = 0;
    const TraceResult r = get_target_metrics(null_factory(), t, cfg);
    EXPECT_EQ(r.sar, 1.0);
    EXPECT_EQ(r.counters.n_ch + r.counters.n_cm, t.reads.size());
}

TEST(GetTargetMetrics, SingleRequest)
{
    const Trace t = make_trace({400000});
    const TraceResult r = get_target_metrics(dbsp_factory(), t, SimConfig{});
    EXPECT_EQ(r.chr, 0.0);
    EXPECT_EQ(r.precision, 1.0);
    EXPECT_EQ(r.sar, 1.0);
}

TEST(GetTargetMetrics, LearnsSyntheticPairs)
{
    const Trace t = synth_correlated_trace({20, 5, 1, 200, 3});
    const SimConfig cfg = synthetic_config();
    const TraceResult base = baseline_metrics(t, cfg);
    const TraceResult r = get_target_metrics(dbsp_factory(), t, cfg);
    EXPECT_GT(r.chr, base.chr);
    EXPECT_GE(r.precision, 0.9);
    EXPECT_GT(r.counters.n_pr, 0U);
}

TEST(GetTargetMetrics, Deterministic)
{
    const Trace t = synth_correlated_trace({10, 4, 2, 100, 8});
    const SimConfig cfg = synthetic_config();
    EXPECT_EQ(get_target_metrics(dbsp_factory(), t, cfg).counters,
              get_target_metrics(dbsp_factory(), t, cfg).counters);
}

TEST(Evaluate, Means)
{
    TraceResult a, b;
    a.chr = 0.2;
    b.chr = 0.4;
    a.sar = 1.0;
    b.sar = 1.5;
    a.precision = 1.0;
    b.precision = 0.5;
    const EvalResult e = summarize({a, b});
    EXPECT_DOUBLE_EQ(e.avg_chr, 0.3);
    EXPECT_DOUBLE_EQ(e.avg_sar, 1.25);
    EXPECT_DOUBLE_EQ(e.avg_precision, 0.75);
}

TEST(Evaluate, SingletonAndEmpty)
{
    const Trace t = synth_correlated_trace({5, 4, 1, 30, 1});
    const SimConfig cfg = synthetic_config();
    const std::vector<Trace> one{t};
    const EvalResult e = evaluate_prefetcher(dbsp_factory(), one, cfg);
    ASSERT_EQ(e.per_trace.size(), 1U);
    EXPECT_EQ(e.avg_chr, e.per_trace[0].chr);
    EXPECT_EQ(e.avg_precision, e.per_trace[0].precision);
    EXPECT_EQ(e.avg_sar, e.per_trace[0].sar);
    EXPECT_THROW(evaluate_prefetcher(dbsp_factory(), std::vector<Trace>{}, cfg),
                 ConfigError);
}

TEST(Evaluate, ParallelMatchesSequential)
{
    std::vector<Trace> traces;
    for (std::uint64_t s = 0; s < 6; ++s)
        traces.push_back(synth_correlated_trace({8, 4, 1 + s % 3, 40, s}));
    const SimConfig cfg = synthetic_config();
    const EvalResult seq = evaluate_prefetcher(dbsp_factory(), traces, cfg, 1);
    const EvalResult par = evaluate_prefetcher(dbsp_factory(), traces, cfg, 4);
    ASSERT_EQ(seq.per_trace.size(), par.per_trace.size());
    for (std::size_t i = 0; i < seq.per_trace.size(); ++i)
        EXPECT_EQ(seq.per_trace[i].counters, par.per_trace[i].counters);
    EXPECT_EQ(seq.avg_chr, par.avg_chr);
}

TEST(Evaluate, FailureNamesTrace)
{
    Trace bad = make_trace({1, 2, 3}, "tiny");
    try {
        evaluate_prefetcher(dbsp_factory(), std::vector<Trace>{bad},
                            SimConfig{});
        FAIL() << "expected failure";
    } catch (const std::exception &e) {
        EXPECT_NE(std::string(e.what()).find("tiny"), std::string::npos);
    }
}

TEST(Pareto, Examples)
{
    std::vector<ParetoPoint> pts{{0.1, 0.9, "a"}, {0.2, 0.8, "b"},
                                 {0.15, 0.95, "c"}};
    auto f = pareto_front(pts, Direction::Maximize);
    ASSERT_EQ(f.size(), 2U);
    EXPECT_EQ(f[0].label, "c");
    EXPECT_EQ(f[1].label, "b");

    std::vector<ParetoPoint> one{{0.3, 0.3, "x"}};
    EXPECT_EQ(pareto_front(one, Direction::Minimize).size(), 1U);

    std::vector<ParetoPoint> dup{{0.3, 0.3, "x"}, {0.3, 0.3, "y"}};
    auto d = pareto_front(dup, Direction::Maximize);
    ASSERT_EQ(d.size(), 1U);
    EXPECT_EQ(d[0].label, "x");
}

TEST(Pareto, MinimizeY)
{
    std::vector<ParetoPoint> pts{{0.1, 1.0, "lru"}, {0.3, 1.05, "a"},
                                 {0.3, 1.2, "b"}, {0.2, 1.1, "c"}};
    auto f = pareto_front(pts, Direction::Minimize);
    ASSERT_EQ(f.size(), 2U);
    EXPECT_EQ(f[0].label, "lru");
    EXPECT_EQ(f[1].label, "a");
}

TEST(Pareto, MatchesDominanceOracle)
{
    std::mt19937_64 rng(12);
    for (int round = 0; round < 60; ++round) {
        const std::size_t n = rng() % 1001;
        std::vector<ParetoPoint> pts;
        for (std::size_t i = 0; i < n; ++i)
            pts.push_back({static_cast<double>(rng() % 40) / 40.0,
                           static_cast<double>(rng() % 40) / 40.0,
                           std::to_string(i)});
        for (bool maximize : {true, false}) {
            auto f = pareto_front(
                pts, maximize ? Direction::Maximize : Direction::Minimize);
            auto idx = oracle::pareto_indices(pts, maximize);
            ASSERT_EQ(f.size(), idx.size());
            std::set<std::string> want;
            for (auto i : idx)
                want.insert(pts[i].label);
            for (std::size_t k = 0; k < f.size(); ++k) {
                ASSERT_TRUE(want.count(f[k].label));
                if (k)
                    ASSERT_LT(f[k - 1].x, f[k].x);
            }
        }
    }
}

TEST(SCurve, SortsByReference)
{
    auto result = [](std::vector<std::pair<std::string, double>> v) {
        std::vector<TraceResult> rs;
        for (auto &[n, c] : v) {
            TraceResult r;
            r.trace_name = n;
            r.chr = c;
            r.precision = 1 - c;
            rs.push_back(r);
        }
        return summarize(rs);
    };
    std::vector<ConfigResult> cfgs{
        {"ref", result({{"a", 0.3}, {"b", 0.1}, {"c", 0.2}})},
        {"other", result({{"a", 0.9}, {"b", 0.8}, {"c", 0.7}})}};
    const SCurve s = s_curve(cfgs, SCurveMetric::Chr);
    ASSERT_EQ(s.columns.size(), 2U);
    ASSERT_EQ(s.rows.size(), 3U);
    EXPECT_EQ(s.rows[0].trace, "b");
    EXPECT_EQ(s.rows[1].trace, "c");
    EXPECT_EQ(s.rows[2].trace, "a");
    EXPECT_EQ(s.rows[0].values, (std::vector<double>{0.1, 0.8}));

    const SCurve p = s_curve(cfgs, SCurveMetric::Precision);
    EXPECT_EQ(p.rows[0].trace, "a");

    std::vector<ConfigResult> single{{"only", result({{"z", 0.5}})}};
    EXPECT_EQ(s_curve(single, SCurveMetric::Chr).rows.size(), 1U);
    EXPECT_THROW(s_curve(cfgs, SCurveMetric::Chr, 5), ConfigError);
}
