#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sporadic/harness.hpp"

namespace sporadic {

/// Flag values as given on the command line, before defaults and checks.
struct RawFlags
{
    std::vector<std::string> traces;
    std::optional<std::string> trace_dir;
    std::optional<std::uint64_t> block_size;
    std::optional<double> cache_pct;
    std::vector<double> pref_rel_sizes;
    std::vector<long long> s_c_values;
    std::optional<long long> l_min;
    std::optional<long long> l_max;
    std::optional<long long> lookahead;
    std::optional<std::string> distance; ///< f1, f2 or both
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<long long> jobs;
    std::optional<std::string> synthetic; ///< pairs,repeats,gap,noise
    std::optional<std::string> rows;      ///< nr_r,nr_c,nr_p
};

struct SweepSpec
{
    std::vector<std::filesystem::path> trace_paths;
    std::optional<SyntheticSpec> synthetic;
    std::uint64_t block_size = kDefaultBlockSize;
    double cache_pct = 0.01;
    std::vector<double> pref_rel_sizes{0.10};
    std::vector<std::size_t> s_c_values{1, 2, 3, 5, 7, 9};
    std::size_t l_min = 2;
    std::size_t l_max = 4;
    std::size_t l_a = 4;
    std::vector<Distance> distances{Distance::Manhattan,
                                    Distance::NormalizedManhattan};
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "results";
    std::size_t jobs = 1;
    std::optional<TableRows> rows_override;
};

/// Applies defaults and rejects contradictory flags. Advisory problems are
/// appended to warnings.
SweepSpec validate_config(const RawFlags &raw,
                          std::vector<std::string> &warnings);

/// One point of the parameter grid.
struct SweepConfig
{
    std::string id;
    std::string family; ///< LRU, DBSP_f1 or DBSP_f2
    std::size_t s_c = 0;
    std::size_t l_a = 0;
    std::size_t l_min = 0;
    std::size_t l_max = 0;
    std::string distance; ///< f1, f2 or none
    double pref_rel_size = 0;
};

struct SweepResult
{
    std::vector<std::string> trace_names;
    /// Index 0 is the LRU baseline, then the grid in sweep order.
    std::vector<SweepConfig> configs;
    std::vector<ConfigResult> results;
};

/// Grid order: pref_rel_size, then distance, then s_c.
std::vector<SweepConfig> sweep_grid(const SweepSpec &spec);

/// Loads the traces and evaluates the baseline and every grid point.
SweepResult evaluate_sweep(const SweepSpec &spec);

std::string results_csv(const SweepResult &r);
std::string summary_json(const SweepResult &r);
std::string pareto_csv(const SweepResult &r, bool sar);
std::string scurve_csv(const SweepResult &r, SCurveMetric metric);

/// Runs the sweep and writes every output file into spec.output_dir.
SweepResult run_sweep(const SweepSpec &spec);

/// Column layout of the output files, for --help.
extern const char *const kOutputSchemaHelp;

/// "%.6g" formatting used by every CSV field.
std::string format_number(double v);

} // namespace sporadic
