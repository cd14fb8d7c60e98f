#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sporadic {

using BlockKey = std::uint64_t;
using Timestamp = std::uint64_t;

inline constexpr std::uint64_t kDefaultBlockSize = 4096;

class TraceError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class OpType { Read, Write };

/**
 * One line of an MSR-Cambridge trace:
 * Timestamp,Hostname,DiskNumber,Type,Offset,Size,ResponseTime
 */
struct TraceRecord
{
    std::int64_t timestamp_raw = 0;
    std::string host;
    std::int64_t disk = 0;
    OpType op = OpType::Read;
    std::uint64_t offset_bytes = 0;
    std::uint64_t size_bytes = 1;
    std::int64_t response_time_raw = 0;
};

/// A block-granular demand read. ts is the read's index within its trace.
struct ReadRequest
{
    BlockKey key = 0;
    std::uint64_t size_blocks = 1;
    Timestamp ts = 0;

    bool operator==(const ReadRequest &) const = default;
};

struct Trace
{
    std::string name;
    std::vector<ReadRequest> reads;
    std::uint64_t storage_blocks = 0;
};

/// Parses one MSR CSV record. line_no is only used in error messages.
TraceRecord parse_msr_line(std::string_view line, std::size_t line_no = 0);

/// Converts a byte range to its covering block span.
ReadRequest to_block_request(std::uint64_t offset_bytes,
                             std::uint64_t size_bytes,
                             std::uint64_t block_size, Timestamp ts);

/// Largest key + size_blocks over all reads.
std::uint64_t storage_size(std::span<const ReadRequest> reads);

/**
 * Loads an MSR trace, keeping reads only, in file order, with logical
 * timestamps 0, 1, 2, ...
 */
Trace load_trace(const std::filesystem::path &path,
                 std::uint64_t block_size = kDefaultBlockSize);

/// Same as load_trace over an in-memory CSV body.
Trace parse_trace(std::string_view csv, std::string name,
                  std::uint64_t block_size = kDefaultBlockSize);

/// Writes reads back out as MSR CSV (Read records, block-aligned).
std::string to_msr_csv(const Trace &trace,
                       std::uint64_t block_size = kDefaultBlockSize);

struct SyntheticSpec
{
    std::size_t n_pairs = 1;
    std::size_t repeats = 2;
    std::size_t gap = 1;
    std::size_t noise_keys = 0;
    std::uint64_t seed = 0;
};

/**
 * Synthetic sporadic workload. Pair i uses keys A_i = 2i and B_i = 2i + 1.
 * Every round visits the pairs in order; each visit is A_i, then gap - 1
 * filler reads, then B_i. Fillers and noise reads use distinct keys drawn
 * uniformly from a cold range above the pair keys, so they never repeat.
 * noise_keys noise reads are scattered uniformly between visits, never
 * inside one, so B_i always lands exactly gap reads after A_i.
 * storage_blocks covers the pair keys plus the whole cold range.
 */
Trace synth_correlated_trace(const SyntheticSpec &spec);

} // namespace sporadic
