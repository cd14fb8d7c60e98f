#pragma once

#include <vector>

#include "sporadic/trace.hpp"

namespace sporadic {

/// Prefetcher as seen by the simulator: one event per demand read.
class Prefetcher
{
  public:
    virtual ~Prefetcher() = default;

    /// Keys to prefetch in response to request, in priority order.
    virtual std::vector<BlockKey> associations(const ReadRequest &request) = 0;
};

/// Never predicts anything.
class NullPrefetcher final : public Prefetcher
{
  public:
    std::vector<BlockKey> associations(const ReadRequest &) override
    {
        return {};
    }
};

} // namespace sporadic
