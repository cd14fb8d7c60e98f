#include "sporadic/metrics.hpp"

namespace sporadic {

double chr(std::uint64_t n_ch, std::uint64_t n_cm)
{
    if (n_ch + n_cm == 0)
        throw MetricError("CHR undefined: no accesses");
    return static_cast<double>(n_ch) / static_cast<double>(n_ch + n_cm);
}

double precision(std::uint64_t n_pr, std::uint64_t n_eu)
{
    if (n_eu > n_pr)
        throw MetricError("more wasted prefetches than prefetches");
    if (n_pr == 0)
        return 1.0;
    return static_cast<double>(n_pr - n_eu) / static_cast<double>(n_pr);
}

double sar(std::uint64_t n_dp_blocks, std::uint64_t n_dc_blocks)
{
    if (n_dc_blocks == 0)
        throw MetricError("SAR undefined: baseline downloaded nothing");
    return static_cast<double>(n_dp_blocks) /
           static_cast<double>(n_dc_blocks);
}

} // namespace sporadic
