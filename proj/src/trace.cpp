#include "sporadic/trace.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_set>

namespace sporadic {

namespace {

std::string where(std::size_t line_no)
{
    return line_no ? "line " + std::to_string(line_no) + ": " : "";
}

template <typename T>
T parse_number(std::string_view field, const char *what, std::size_t line_no)
{
    T value{};
    const char *first = field.data();
    const char *last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty())
        throw TraceError(where(line_no) + "invalid " + what + " '" +
                         std::string(field) + "'");
    return value;
}

bool iequals(std::string_view a, std::string_view b)
{
    return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                      [](char x, char y) {
                          return std::tolower(static_cast<unsigned char>(x)) ==
                                 std::tolower(static_cast<unsigned char>(y));
                      });
}

bool is_power_of_two(std::uint64_t v) { return v && !(v & (v - 1)); }

} // namespace

TraceRecord parse_msr_line(std::string_view line, std::size_t line_no)
{
    if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    if (fields.size() != 7)
        throw TraceError(where(line_no) + "expected 7 fields, got " +
                         std::to_string(fields.size()));

    TraceRecord rec;
    rec.timestamp_raw =
        parse_number<std::int64_t>(fields[0], "timestamp", line_no);
    rec.host = std::string(fields[1]);
    rec.disk = parse_number<std::int64_t>(fields[2], "disk number", line_no);
    if (iequals(fields[3], "Read"))
        rec.op = OpType::Read;
    else if (iequals(fields[3], "Write"))
        rec.op = OpType::Write;
    else
        throw TraceError(where(line_no) + "unknown request type '" +
                         std::string(fields[3]) + "'");
    rec.offset_bytes =
        parse_number<std::uint64_t>(fields[4], "offset", line_no);
    rec.size_bytes = parse_number<std::uint64_t>(fields[5], "size", line_no);
    rec.response_time_raw =
        parse_number<std::int64_t>(fields[6], "response time", line_no);

    if (rec.size_bytes == 0)
        throw TraceError(where(line_no) + "zero-sized request");
    if (rec.offset_bytes >
        std::numeric_limits<std::uint64_t>::max() - rec.size_bytes)
        throw TraceError(where(line_no) + "offset + size overflows");
    return rec;
}

ReadRequest to_block_request(std::uint64_t offset_bytes,
                             std::uint64_t size_bytes,
                             std::uint64_t block_size, Timestamp ts)
{
    const std::uint64_t first = offset_bytes / block_size;
    const std::uint64_t last = (offset_bytes + size_bytes - 1) / block_size;
    return ReadRequest{first, last - first + 1, ts};
}

std::uint64_t storage_size(std::span<const ReadRequest> reads)
{
    if (reads.empty())
        throw TraceError("storage size of an empty trace is undefined");
    std::uint64_t top = 0;
    for (const auto &r : reads)
        top = std::max(top, r.key + r.size_blocks);
    return top;
}

Trace parse_trace(std::string_view csv, std::string name,
                  std::uint64_t block_size)
{
    if (!is_power_of_two(block_size))
        throw TraceError("block size must be a power of two");

    Trace trace;
    trace.name = std::move(name);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        auto nl = csv.find('\n', pos);
        auto line = csv.substr(pos, nl == std::string_view::npos
                                        ? std::string_view::npos
                                        : nl - pos);
        pos = nl == std::string_view::npos ? csv.size() : nl + 1;
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        auto rec = parse_msr_line(line, line_no);
        if (rec.op != OpType::Read)
            continue;
        trace.reads.push_back(to_block_request(rec.offset_bytes,
                                               rec.size_bytes, block_size,
                                               trace.reads.size()));
    }
    if (trace.reads.empty())
        throw TraceError(trace.name + ": no read requests");
    trace.storage_blocks = storage_size(trace.reads);
    return trace;
}

Trace load_trace(const std::filesystem::path &path, std::uint64_t block_size)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw TraceError("cannot open trace " + path.string());
    std::ostringstream body;
    body << in.rdbuf();
    if (in.bad())
        throw TraceError("error reading trace " + path.string());
    try {
        return parse_trace(body.str(), path.filename().string(), block_size);
    } catch (const TraceError &e) {
        throw TraceError(path.string() + ": " + e.what());
    }
}

std::string to_msr_csv(const Trace &trace, std::uint64_t block_size)
{
    std::string out;
    for (const auto &r : trace.reads) {
        out += std::to_string(r.ts) + ",synthetic,0,Read," +
               std::to_string(r.key * block_size) + "," +
               std::to_string(r.size_blocks * block_size) + ",0\n";
    }
    return out;
}

Trace synth_correlated_trace(const SyntheticSpec &spec)
{
    if (spec.n_pairs < 1 || spec.repeats < 2 || spec.gap < 1)
        throw TraceError("synthetic trace needs n_pairs >= 1, repeats >= 2 "
                         "and gap >= 1");

    std::mt19937_64 rng(spec.seed);
    const std::size_t visits = spec.n_pairs * spec.repeats;
    const std::size_t cold_reads = spec.noise_keys + visits * (spec.gap - 1);
    const BlockKey cold_base = 2 * spec.n_pairs;
    const BlockKey cold_span =
        std::max<BlockKey>(1 << 16, 16 * static_cast<BlockKey>(cold_reads));

    std::unordered_set<BlockKey> used;
    std::uniform_int_distribution<BlockKey> cold_dist(0, cold_span - 1);
    auto cold_key = [&] {
        while (true) {
            BlockKey k = cold_base + cold_dist(rng);
            if (used.insert(k).second)
                return k;
        }
    };

    // Noise lands in one of visits + 1 slots: before, between or after visits.
    std::vector<std::size_t> noise_in_slot(visits + 1, 0);
    std::uniform_int_distribution<std::size_t> slot_dist(0, visits);
    for (std::size_t i = 0; i < spec.noise_keys; ++i)
        ++noise_in_slot[slot_dist(rng)];

    Trace trace;
    trace.name = "synthetic";
    auto emit = [&](BlockKey key) {
        trace.reads.push_back(ReadRequest{key, 1, trace.reads.size()});
    };

    std::size_t slot = 0;
    for (std::size_t round = 0; round < spec.repeats; ++round) {
        for (std::size_t pair = 0; pair < spec.n_pairs; ++pair) {
            for (std::size_t n = 0; n < noise_in_slot[slot]; ++n)
                emit(cold_key());
            ++slot;
            emit(2 * pair);
            for (std::size_t f = 1; f < spec.gap; ++f)
                emit(cold_key());
            emit(2 * pair + 1);
        }
    }
    for (std::size_t n = 0; n < noise_in_slot[slot]; ++n)
        emit(cold_key());

    // The device spans the whole cold range whether or not noise landed
    // near its top, so runs with different noise levels share a budget.
    trace.storage_blocks = cold_base + cold_span;
    return trace;
}

} // namespace sporadic
