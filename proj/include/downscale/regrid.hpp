#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "downscale/grid.hpp"

namespace downscale {

// block-mean coarsening; a coarse cell is the mean of its non-missing fine
// cells, NaN when the whole block is missing
inline GridStack upscale_block_mean(const GridStack& fine, int factor_lat, int factor_lon) {
    if (factor_lat < 1 || factor_lon < 1) throw std::invalid_argument("upscale factors must be >= 1");
    if (fine.nlat() % factor_lat != 0 || fine.nlon() % factor_lon != 0)
        throw std::invalid_argument("fine grid dims not divisible by upscale factors");

    const std::size_t clat = fine.nlat() / factor_lat;
    const std::size_t clon = fine.nlon() / factor_lon;
    std::vector<double> lats(clat), lons(clon);
    for (std::size_t i = 0; i < clat; ++i) {
        double s = 0;
        for (int a = 0; a < factor_lat; ++a) s += fine.lats()[i * factor_lat + a];
        lats[i] = s / factor_lat;
    }
    for (std::size_t j = 0; j < clon; ++j) {
        double s = 0;
        for (int b = 0; b < factor_lon; ++b) s += fine.lons()[j * factor_lon + b];
        lons[j] = s / factor_lon;
    }

    GridStack coarse(fine.start_date(), std::move(lats), std::move(lons), fine.ntime(), fine.units(),
                     fine.variable());
    for (std::size_t t = 0; t < fine.ntime(); ++t)
        for (std::size_t i = 0; i < clat; ++i)
            for (std::size_t j = 0; j < clon; ++j) {
                double sum = 0;
                int n = 0;
                for (int a = 0; a < factor_lat; ++a)
                    for (int b = 0; b < factor_lon; ++b) {
                        const float v = fine.at(t, i * factor_lat + a, j * factor_lon + b);
                        if (!std::isnan(v)) {
                            sum += v;
                            ++n;
                        }
                    }
                coarse.at(t, i, j) =
                    n > 0 ? static_cast<float>(sum / n) : std::numeric_limits<float>::quiet_NaN();
            }
    return coarse;
}

namespace detail {

// nearest non-missing neighbor in grid-index metric, ties broken by
// (lat, lon) lexicographic order of the donor cell
inline std::size_t nearest_donor(const GridStack& g, std::size_t t, std::size_t i0, std::size_t j0) {
    long best_d2 = std::numeric_limits<long>::max();
    double best_lat = 0, best_lon = 0;
    std::size_t best_cell = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < g.nlat(); ++i)
        for (std::size_t j = 0; j < g.nlon(); ++j) {
            if (std::isnan(g.at(t, i, j))) continue;
            const long di = static_cast<long>(i) - static_cast<long>(i0);
            const long dj = static_cast<long>(j) - static_cast<long>(j0);
            const long d2 = di * di + dj * dj;
            const double lat = g.lats()[i], lon = g.lons()[j];
            if (d2 < best_d2 || (d2 == best_d2 && (lat < best_lat || (lat == best_lat && lon < best_lon)))) {
                best_d2 = d2;
                best_lat = lat;
                best_lon = lon;
                best_cell = i * g.nlon() + j;
            }
        }
    return best_cell;
}

inline std::vector<double> ascending_copy(const std::vector<double>& v, bool& flipped) {
    flipped = v.size() >= 2 && v[1] < v[0];
    if (!flipped) return v;
    return std::vector<double>(v.rbegin(), v.rend());
}

// bracketing indices and weight for linear interpolation on an ascending axis
inline void bracket(const std::vector<double>& axis, double x, std::size_t& lo, std::size_t& hi, double& w) {
    const double eps = 1e-9 * std::max(1.0, std::abs(axis.back() - axis.front()));
    if (x < axis.front() - eps || x > axis.back() + eps)
        throw std::invalid_argument("interpolation target outside coarse bounding box");
    x = std::clamp(x, axis.front(), axis.back());
    if (axis.size() == 1) {
        lo = hi = 0;
        w = 0.0;
        return;
    }
    auto it = std::upper_bound(axis.begin(), axis.end(), x);
    hi = static_cast<std::size_t>(it - axis.begin());
    if (hi == 0) hi = 1;
    if (hi == axis.size()) hi = axis.size() - 1;
    lo = hi - 1;
    const double span = axis[hi] - axis[lo];
    w = span > 0 ? (x - axis[lo]) / span : 0.0;
}

}  // namespace detail

// replaces NaN cells with their nearest non-missing neighbor, per time step
// (the coastal fill applied before interpolation)
inline GridStack fill_missing_nearest(const GridStack& stack) {
    GridStack out = stack;
    for (std::size_t t = 0; t < stack.ntime(); ++t) {
        bool any_missing = false, any_present = false;
        for (std::size_t c = 0; c < stack.ncell(); ++c) {
            if (std::isnan(stack.at_cell(t, c)))
                any_missing = true;
            else
                any_present = true;
        }
        if (!any_present) throw std::runtime_error("fill_missing_nearest: all-missing field at time step");
        if (!any_missing) continue;
        for (std::size_t i = 0; i < stack.nlat(); ++i)
            for (std::size_t j = 0; j < stack.nlon(); ++j)
                if (std::isnan(stack.at(t, i, j)))
                    out.at(t, i, j) = stack.at_cell(t, detail::nearest_donor(stack, t, i, j));
    }
    return out;
}

// standard bilinear weights from the 4 surrounding coarse nodes; missing
// coarse cells are filled first so the output carries no NaN
inline GridStack bilinear_interpolate(const GridStack& coarse_in, const std::vector<double>& target_lats,
                                      const std::vector<double>& target_lons) {
    const GridStack coarse = fill_missing_nearest(coarse_in);

    bool flip_lat = false, flip_lon = false;
    const std::vector<double> axis_lat = detail::ascending_copy(coarse.lats(), flip_lat);
    const std::vector<double> axis_lon = detail::ascending_copy(coarse.lons(), flip_lon);
    const auto src_i = [&](std::size_t i) { return flip_lat ? coarse.nlat() - 1 - i : i; };
    const auto src_j = [&](std::size_t j) { return flip_lon ? coarse.nlon() - 1 - j : j; };

    struct Node {
        std::size_t i0, i1, j0, j1;
        double wi, wj;
    };
    std::vector<Node> nodes(target_lats.size() * target_lons.size());
    for (std::size_t i = 0; i < target_lats.size(); ++i)
        for (std::size_t j = 0; j < target_lons.size(); ++j) {
            Node& n = nodes[i * target_lons.size() + j];
            detail::bracket(axis_lat, target_lats[i], n.i0, n.i1, n.wi);
            detail::bracket(axis_lon, target_lons[j], n.j0, n.j1, n.wj);
        }

    GridStack fine(coarse.start_date(), target_lats, target_lons, coarse.ntime(), coarse.units(),
                   coarse.variable());
    for (std::size_t t = 0; t < coarse.ntime(); ++t)
        for (std::size_t i = 0; i < target_lats.size(); ++i)
            for (std::size_t j = 0; j < target_lons.size(); ++j) {
                const Node& n = nodes[i * target_lons.size() + j];
                const double v00 = coarse.at(t, src_i(n.i0), src_j(n.j0));
                const double v01 = coarse.at(t, src_i(n.i0), src_j(n.j1));
                const double v10 = coarse.at(t, src_i(n.i1), src_j(n.j0));
                const double v11 = coarse.at(t, src_i(n.i1), src_j(n.j1));
                const double v = (1 - n.wi) * ((1 - n.wj) * v00 + n.wj * v01) +
                                 n.wi * ((1 - n.wj) * v10 + n.wj * v11);
                fine.at(t, i, j) = static_cast<float>(v);
            }
    return fine;
}

}  // namespace downscale
