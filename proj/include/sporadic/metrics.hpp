#pragma once

#include <cstdint>
#include <stdexcept>

namespace sporadic {

class MetricError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Raw counters of one paired evaluation run.
struct RunMetrics
{
    std::uint64_t n_ch = 0;
    std::uint64_t n_cm = 0;
    std::uint64_t n_pr = 0;
    std::uint64_t n_eu = 0;
    std::uint64_t n_dp_blocks = 0; ///< downloads with the prefetcher
    std::uint64_t n_dc_blocks = 0; ///< downloads of the cache-only run

    bool operator==(const RunMetrics &) const = default;
};

/// n_ch / (n_ch + n_cm). Throws when there were no accesses.
double chr(std::uint64_t n_ch, std::uint64_t n_cm);

/// (n_pr - n_eu) / n_pr, or 1.0 when nothing was prefetched.
double precision(std::uint64_t n_pr, std::uint64_t n_eu);

/// n_dp / n_dc in blocks. Throws when the baseline downloaded nothing.
double sar(std::uint64_t n_dp_blocks, std::uint64_t n_dc_blocks);

inline double chr(const RunMetrics &m) { return chr(m.n_ch, m.n_cm); }
inline double precision(const RunMetrics &m)
{
    return precision(m.n_pr, m.n_eu);
}
inline double sar(const RunMetrics &m)
{
    return sar(m.n_dp_blocks, m.n_dc_blocks);
}

} // namespace sporadic
