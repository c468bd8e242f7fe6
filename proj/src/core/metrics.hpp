#pragma once

#include "core/rng.hpp"

namespace bdbm {

// Energy distance V-statistic: 2 E|x-y| - E|x-x'| - E|y-y'| over all pairs
// (self-pairs included).  Desk-scale stand-in for FID.
double energy_distance(const std::vector<vec>& X, const std::vector<vec>& Y);

// 95th-percentile (or other quantile) of the permutation null: pool X and Y,
// reshuffle into same-size sets, recompute.  Calibrates "same distribution".
double energy_distance_null_quantile(const std::vector<vec>& X, const std::vector<vec>& Y,
                                     int resamples, double quantile, Rng& rng);

// Mean squared distance between paired items; pairing[i] indexes `reference`.
double coupling_mse(const std::vector<vec>& generated, const std::vector<vec>& reference,
                    const std::vector<size_t>& pairing);
double coupling_mse(const std::vector<vec>& generated, const std::vector<vec>& reference);

// Per-coordinate standard deviation within each source's generation set,
// averaged over coordinates and sources.  Stand-in for the per-pixel
// diversity metric.
double diversity(const std::vector<std::vector<vec>>& per_source_sets);

}  // namespace bdbm
