#include "sporadic/cache.hpp"

#include <string>

namespace sporadic {

BlockCache::BlockCache(std::uint64_t capacity_blocks)
    : capacity_(capacity_blocks)
{
    if (capacity_ == 0)
        throw CacheError("cache capacity must be at least one block");
}

AccessOutcome BlockCache::access(const ReadRequest &request)
{
    return access(request.key, request.size_blocks);
}

AccessOutcome BlockCache::access(BlockKey key, std::uint64_t size_blocks)
{
    if (size_blocks > capacity_)
        throw CacheError("request of " + std::to_string(size_blocks) +
                         " blocks exceeds cache capacity of " +
                         std::to_string(capacity_));

    AccessOutcome out;
    for (BlockKey b = key; b < key + size_blocks; ++b)
        if (!blocks_.contains(b))
            ++out.missing_blocks;
    out.hit = out.missing_blocks == 0;

    if (out.hit) {
        ++counters_.n_ch;
        for (BlockKey b = key; b < key + size_blocks; ++b) {
            BlockState *st = blocks_.find(b);
            if (!st->touched && st->prefetched) {
                auto rec = prefetches_.find(*st->origin_prefetch_id);
                if (rec != prefetches_.end())
                    rec->second.touched = true;
            }
            st->touched = true;
            blocks_.touch(b);
        }
        return out;
    }

    ++counters_.n_cm;
    counters_.n_dp_blocks += out.missing_blocks;
    // Resident part of the span moves to MRU first so that evictions made
    // room for the missing blocks never take a block of this span.
    for (BlockKey b = key; b < key + size_blocks; ++b)
        blocks_.touch(b);
    for (BlockKey b = key; b < key + size_blocks; ++b)
        if (!blocks_.contains(b))
            insert_block(b, BlockState{});
        else
            blocks_.touch(b);
    return out;
}

std::uint64_t BlockCache::admit_prefetch(BlockKey key,
                                         std::uint64_t size_blocks,
                                         std::uint64_t prefetch_id)
{
    if (size_blocks > capacity_)
        throw CacheError("prefetch larger than cache capacity");

    std::uint64_t admitted = 0;
    for (BlockKey b = key; b < key + size_blocks; ++b) {
        if (blocks_.contains(b))
            continue;
        insert_block(b, BlockState{true, false, prefetch_id});
        ++prefetches_[prefetch_id].live_blocks;
        ++admitted;
    }
    if (admitted) {
        ++counters_.n_pr;
        counters_.n_dp_blocks += admitted;
    }
    return admitted;
}

void BlockCache::insert_block(BlockKey block, BlockState state)
{
    while (blocks_.size() >= capacity_)
        evict_lru();
    blocks_.push_back(block, std::move(state));
}

void BlockCache::evict_lru()
{
    auto victim = blocks_.pop_front();
    on_evict(victim.second);
}

void BlockCache::on_evict(const BlockState &state)
{
    if (!state.prefetched)
        return;
    auto rec = prefetches_.find(*state.origin_prefetch_id);
    if (rec == prefetches_.end())
        return;
    if (--rec->second.live_blocks == 0) {
        if (!rec->second.touched)
            ++counters_.n_eu;
        prefetches_.erase(rec);
    }
}

} // namespace sporadic
