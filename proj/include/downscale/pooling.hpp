#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "downscale/grid.hpp"

namespace downscale {

// all values within +/- window days of the given day-of-year slot, wrapping
// across the year boundary; one sample vector per cell, NaN skipped
inline std::vector<std::vector<float>> day_of_year_pool(const GridStack& stack, int doy, int window = 15) {
    if (doy < 1 || doy > kDoySlots) throw std::invalid_argument("day of year must be in 1..366");
    if (window < 0) throw std::invalid_argument("window must be >= 0");

    std::vector<std::vector<float>> pools(stack.ncell());
    const long start_serial = to_serial(stack.start_date());
    for (std::size_t t = 0; t < stack.ntime(); ++t) {
        const int d = day_of_year_366(from_serial(start_serial + static_cast<long>(t)));
        if (cyclic_doy_distance(d, doy) > window) continue;
        for (std::size_t c = 0; c < stack.ncell(); ++c) {
            const float v = stack.at_cell(t, c);
            if (!std::isnan(v)) pools[c].push_back(v);
        }
    }
    return pools;
}

// windowed day-of-year mean per (doy, cell); NaN where a pool is empty.
// Computed in one pass over the stack rather than 366 pool scans.
inline std::vector<std::vector<double>> doy_climatology(const GridStack& stack, int window = 15) {
    const std::size_t ncell = stack.ncell();
    std::vector<std::vector<double>> sum(kDoySlots, std::vector<double>(ncell, 0.0));
    std::vector<std::vector<long>> cnt(kDoySlots, std::vector<long>(ncell, 0));

    const long start_serial = to_serial(stack.start_date());
    for (std::size_t t = 0; t < stack.ntime(); ++t) {
        const int d = day_of_year_366(from_serial(start_serial + static_cast<long>(t)));
        for (int off = -window; off <= window; ++off) {
            const int slot = ((d - 1 + off) % kDoySlots + kDoySlots) % kDoySlots;
            for (std::size_t c = 0; c < ncell; ++c) {
                const float v = stack.at_cell(t, c);
                if (!std::isnan(v)) {
                    sum[slot][c] += v;
                    cnt[slot][c] += 1;
                }
            }
        }
    }

    std::vector<std::vector<double>> clim(kDoySlots, std::vector<double>(ncell));
    for (int s = 0; s < kDoySlots; ++s)
        for (std::size_t c = 0; c < ncell; ++c)
            clim[s][c] = cnt[s][c] > 0 ? sum[s][c] / cnt[s][c] : std::numeric_limits<double>::quiet_NaN();
    return clim;
}

}  // namespace downscale
