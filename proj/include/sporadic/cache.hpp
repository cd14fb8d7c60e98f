#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "sporadic/linked_hash_map.hpp"
#include "sporadic/trace.hpp"

namespace sporadic {

class CacheError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct BlockState
{
    bool prefetched = false;
    bool touched = false;
    std::optional<std::uint64_t> origin_prefetch_id;
};

struct CacheCounters
{
    std::uint64_t n_ch = 0;        ///< demand hits
    std::uint64_t n_cm = 0;        ///< demand misses
    std::uint64_t n_dp_blocks = 0; ///< blocks read from the backend
    std::uint64_t n_pr = 0;        ///< prefetch requests that admitted a block
    std::uint64_t n_eu = 0;        ///< prefetch requests evicted untouched
};

struct AccessOutcome
{
    bool hit = false;
    std::uint64_t missing_blocks = 0;
};

/**
 * Block-granular LRU cache. A request hits only when every block of its
 * span is resident. Misses fill all missing blocks; prefetches fill only
 * non-resident blocks and are tracked per prefetch id so that a prefetch
 * counts as wasted once all of its blocks leave the cache untouched.
 */
class BlockCache
{
  public:
    explicit BlockCache(std::uint64_t capacity_blocks);

    AccessOutcome access(const ReadRequest &request);
    AccessOutcome access(BlockKey key, std::uint64_t size_blocks);

    std::uint64_t admit_prefetch(BlockKey key, std::uint64_t size_blocks,
                                 std::uint64_t prefetch_id);

    bool resident(BlockKey block) const { return blocks_.contains(block); }
    const BlockState *state(BlockKey block) const
    {
        return blocks_.find(block);
    }

    std::uint64_t capacity() const { return capacity_; }
    std::uint64_t size() const { return blocks_.size(); }
    const CacheCounters &counters() const { return counters_; }

  private:
    struct PrefetchRecord
    {
        std::uint64_t live_blocks = 0;
        bool touched = false;
    };

    void insert_block(BlockKey block, BlockState state);
    void evict_lru();
    void on_evict(const BlockState &state);

    std::uint64_t capacity_;
    LinkedHashMap<BlockKey, BlockState> blocks_;
    std::unordered_map<std::uint64_t, PrefetchRecord> prefetches_;
    CacheCounters counters_;
};

} // namespace sporadic
