#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "downscale/calendar.hpp"

namespace downscale {

// A daily gridded field: values laid out [time][lat][lon], float32 storage to
// match the on-disk payload. Dates are start + index (daily step, no gaps).
// NaN encodes missing cells.
class GridStack {
public:
    GridStack() = default;

    GridStack(Date start, std::vector<double> lats, std::vector<double> lons, std::size_t ntime,
              std::string units = "", std::string variable = "")
        : start_(start),
          lats_(std::move(lats)),
          lons_(std::move(lons)),
          ntime_(ntime),
          units_(std::move(units)),
          variable_(std::move(variable)),
          values_(ntime * lats_.size() * lons_.size(), 0.0f) {
        check_coords();
    }

    std::size_t ntime() const { return ntime_; }
    std::size_t nlat() const { return lats_.size(); }
    std::size_t nlon() const { return lons_.size(); }
    std::size_t ncell() const { return nlat() * nlon(); }
    std::size_t size() const { return values_.size(); }

    const std::vector<double>& lats() const { return lats_; }
    const std::vector<double>& lons() const { return lons_; }
    const std::string& units() const { return units_; }
    const std::string& variable() const { return variable_; }
    void set_units(std::string u) { units_ = std::move(u); }
    void set_variable(std::string v) { variable_ = std::move(v); }

    Date start_date() const { return start_; }
    Date date(std::size_t t) const { return from_serial(to_serial(start_) + static_cast<long>(t)); }
    int doy(std::size_t t) const { return day_of_year_366(date(t)); }

    float& at(std::size_t t, std::size_t i, std::size_t j) { return values_[(t * nlat() + i) * nlon() + j]; }
    float at(std::size_t t, std::size_t i, std::size_t j) const { return values_[(t * nlat() + i) * nlon() + j]; }

    // cell-major accessors (cell = i * nlon + j)
    float& at_cell(std::size_t t, std::size_t cell) { return values_[t * ncell() + cell]; }
    float at_cell(std::size_t t, std::size_t cell) const { return values_[t * ncell() + cell]; }

    std::vector<float>& values() { return values_; }
    const std::vector<float>& values() const { return values_; }

    bool is_precipitation() const { return units_ == "mm/day"; }

    // time series at one cell
    std::vector<float> cell_series(std::size_t cell) const {
        std::vector<float> out(ntime_);
        for (std::size_t t = 0; t < ntime_; ++t) out[t] = at_cell(t, cell);
        return out;
    }

    std::array<SeasonMask, 4> season_masks() const { return season_split(start_, ntime_); }

    bool same_geometry(const GridStack& other) const {
        return lats_ == other.lats_ && lons_ == other.lons_;
    }

    bool same_time_axis(const GridStack& other) const {
        return ntime_ == other.ntime_ && start_ == other.start_;
    }

    // enforces the type invariants; precip stacks must be non-negative
    void validate() const {
        check_coords();
        if (values_.size() != ntime_ * nlat() * nlon())
            throw std::runtime_error("GridStack: value count does not match dims");
        validate_date(start_);
        if (is_precipitation()) {
            for (float v : values_)
                if (!std::isnan(v) && v < 0.0f)
                    throw std::runtime_error("GridStack: negative precipitation value");
        }
    }

private:
    void check_coords() const {
        if (lats_.empty() || lons_.empty()) throw std::runtime_error("GridStack: empty coordinate vector");
        for (const auto* c : {&lats_, &lons_}) {
            const auto& v = *c;
            if (v.size() < 2) continue;
            const bool inc = v[1] > v[0];
            for (std::size_t k = 1; k < v.size(); ++k) {
                const bool ok = inc ? v[k] > v[k - 1] : v[k] < v[k - 1];
                if (!ok) throw std::runtime_error("GridStack: coordinates not strictly monotone");
            }
        }
    }

    Date start_{};
    std::vector<double> lats_, lons_;
    std::size_t ntime_ = 0;
    std::string units_, variable_;
    std::vector<float> values_;
};

}  // namespace downscale
