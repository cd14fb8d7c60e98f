#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "sporadic/linked_hash_map.hpp"
#include "sporadic/prefetcher.hpp"
#include "sporadic/trace.hpp"

namespace sporadic {

class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

enum class Distance { Manhattan, NormalizedManhattan };

const char *distance_name(Distance d);

struct DbspConfig
{
    std::size_t nr_r = 1024; ///< record table rows
    std::size_t nr_c = 1024; ///< compute table rows
    std::size_t nr_p = 1024; ///< prefetch table rows
    std::size_t l_a = 4;     ///< lookahead when mining the compute table
    std::size_t s_c = 3;     ///< associations kept per prefetch row
    std::size_t l_min = 2;   ///< history length that promotes to cTable
    std::size_t l_max = 4;   ///< history length that drops a cTable row
    bool normalised = false; ///< f2 instead of f1
    bool pref_flag = true;

    /// Throws ConfigError when an invariant does not hold.
    void validate() const;
};

/**
 * Association degree as an exact non-negative rational num / den.
 * Zero is {0, 1}; the zero-distance sentinel is {2^63, 1}.
 */
struct Degree
{
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    static constexpr Degree zero() { return {0, 1}; }
    static constexpr Degree max() { return {std::uint64_t{1} << 63, 1}; }

    bool positive() const { return num != 0; }
    double value() const
    {
        return static_cast<double>(num) / static_cast<double>(den);
    }

    friend std::strong_ordering operator<=>(const Degree &a, const Degree &b)
    {
        using u128 = unsigned __int128;
        return static_cast<u128>(a.num) * b.den <=>
               static_cast<u128>(b.num) * a.den;
    }
    friend bool operator==(const Degree &a, const Degree &b)
    {
        return (a <=> b) == 0;
    }
};

inline constexpr Degree kDegreeMax = Degree::max();

/**
 * Inverse distance between two arrival histories. Zero when the lengths
 * differ or when a started after b. f1 is the Manhattan distance, f2
 * divides it by the history length.
 */
Degree association_degree(std::span<const Timestamp> a,
                          std::span<const Timestamp> b, bool normalised);

/**
 * Bounded set of (key, degree) ordered by degree, with a key index. On
 * overflow the lowest degree goes; among equal degrees the oldest insert.
 */
class AssocContainer
{
  public:
    struct Entry
    {
        BlockKey key;
        Degree degree;
        std::uint64_t seq;
    };

    explicit AssocContainer(std::size_t capacity) : capacity_(capacity) {}

    void insert(BlockKey key, Degree degree);

    std::size_t size() const { return by_key_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool contains(BlockKey key) const { return by_key_.count(key) != 0; }
    std::optional<Degree> degree_of(BlockKey key) const;

    /// Entries by descending degree; equal degrees newest first.
    std::vector<Entry> entries() const;

  private:
    using Rank = std::pair<Degree, std::uint64_t>;

    std::size_t capacity_;
    std::uint64_t next_seq_ = 0;
    std::map<Rank, BlockKey> ranked_;
    std::unordered_map<BlockKey, Rank> by_key_;
};

using History = std::vector<Timestamp>;
using HistoryTable = LinkedHashMap<BlockKey, History>;

class PrefetchTable
{
  public:
    explicit PrefetchTable(std::size_t capacity) : capacity_(capacity) {}

    /// Row for key, created (evicting the LRU row) if absent. Refreshes it.
    AssocContainer &row(BlockKey key, std::size_t s_c);
    /// Looks up key and refreshes its recency.
    const AssocContainer *find(BlockKey key);
    const AssocContainer *peek(BlockKey key) const { return rows_.find(key); }

    std::size_t size() const { return rows_.size(); }
    std::size_t capacity() const { return capacity_; }
    auto begin() const { return rows_.begin(); }
    auto end() const { return rows_.end(); }

  private:
    std::size_t capacity_;
    LinkedHashMap<BlockKey, AssocContainer> rows_;
};

/**
 * Compares each compute-table row with the l_a rows inserted after it and
 * records every positive-degree pair in the prefetch table.
 */
void compute_associated_requests(const HistoryTable &ctable,
                                 PrefetchTable &ptable, bool normalised,
                                 std::size_t s_c, std::size_t l_a);

/// Distance based sporadic prefetcher.
class DbspPrefetcher final : public Prefetcher
{
  public:
    explicit DbspPrefetcher(const DbspConfig &config);

    /**
     * Records the arrival and, when pref_flag is set, returns the
     * associations stored for key, highest degree first.
     */
    std::optional<std::vector<AssocContainer::Entry>> on_request(BlockKey key,
                                                                 Timestamp ts);

    std::vector<BlockKey> associations(const ReadRequest &request) override;

    /// History bookkeeping without the lookup.
    void prefetch_engine(BlockKey key, Timestamp ts);

    const DbspConfig &config() const { return config_; }
    const HistoryTable &record_table() const { return rtable_; }
    const HistoryTable &compute_table() const { return ctable_; }
    const PrefetchTable &prefetch_table() const { return ptable_; }
    PrefetchTable &prefetch_table() { return ptable_; }
    std::uint64_t mining_passes() const { return mining_passes_; }

  private:
    DbspConfig config_;
    HistoryTable rtable_;
    HistoryTable ctable_;
    PrefetchTable ptable_;
    std::uint64_t mining_passes_ = 0;
};

} // namespace sporadic
