#ifndef RDFPART_METRICS_HPP
#define RDFPART_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rdfpart/dataset.hpp"

namespace rdfpart {

/// (stored quads - original triples) / original triples.
inline double replication_rate(const PartitionedDataset& pd) {
    if (pd.original_count() == 0) return 0.0;
    return static_cast<double>(pd.total_quads() - pd.original_count()) /
           static_cast<double>(pd.original_count());
}

/// Population standard deviation.
inline double stddev(std::span<const std::size_t> values) {
    if (values.empty()) return 0.0;
    double mean = 0.0;
    for (std::size_t v : values) mean += static_cast<double>(v);
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (std::size_t v : values) {
        double d = static_cast<double>(v) - mean;
        var += d * d;
    }
    return std::sqrt(var / static_cast<double>(values.size()));
}

/// Population standard deviation of per-partition quad counts.
inline double size_stddev(const PartitionedDataset& pd) {
    std::vector<std::size_t> sizes = pd.partition_sizes();
    return stddev(sizes);
}

}  // namespace rdfpart

#endif  // RDFPART_METRICS_HPP
