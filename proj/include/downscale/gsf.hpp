#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "downscale/grid.hpp"

namespace downscale {

// Grid Stack Format: a JSON metadata file next to a raw payload of
// little-endian float32 in [time][lat][lon] order. NaN encodes missing.
// A CSV alternative (date,lat,lon,value) is accepted for small stacks.

namespace detail {

inline void write_f32_le(std::ostream& os, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    const char bytes[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                           static_cast<char>((bits >> 16) & 0xFF), static_cast<char>((bits >> 24) & 0xFF)};
    os.write(bytes, 4);
}

inline float read_f32_le(const unsigned char* p) {
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace detail

inline void save_grid_stack(const GridStack& stack, const std::filesystem::path& meta_path) {
    stack.validate();
    std::filesystem::path payload_path = meta_path;
    payload_path.replace_extension(".bin");

    nlohmann::json meta;
    meta["dims"] = {stack.ntime(), stack.nlat(), stack.nlon()};
    meta["lats"] = stack.lats();
    meta["lons"] = stack.lons();
    meta["start_date"] = to_iso(stack.start_date());
    meta["units"] = stack.units();
    meta["payload"] = payload_path.filename().string();
    if (!stack.variable().empty()) meta["variable"] = stack.variable();

    std::ofstream mf(meta_path);
    if (!mf) throw std::runtime_error("cannot write " + meta_path.string());
    mf << meta.dump(2) << "\n";
    mf.close();

    std::ofstream pf(payload_path, std::ios::binary);
    if (!pf) throw std::runtime_error("cannot write " + payload_path.string());
    for (float v : stack.values()) detail::write_f32_le(pf, v);
}

inline GridStack load_grid_stack_csv(const std::filesystem::path& path);

inline GridStack load_grid_stack(const std::filesystem::path& path) {
    if (path.extension() == ".csv") return load_grid_stack_csv(path);

    std::ifstream mf(path);
    if (!mf) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json meta;
    try {
        mf >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed GSF metadata in " + path.string() + ": " + e.what());
    }

    for (const char* key : {"dims", "lats", "lons", "start_date", "units", "payload"})
        if (!meta.contains(key))
            throw std::runtime_error("GSF metadata " + path.string() + " missing key '" + key + "'");

    const auto dims = meta["dims"].get<std::vector<std::size_t>>();
    if (dims.size() != 3) throw std::runtime_error("GSF dims must have 3 entries");
    auto lats = meta["lats"].get<std::vector<double>>();
    auto lons = meta["lons"].get<std::vector<double>>();
    if (lats.size() != dims[1] || lons.size() != dims[2])
        throw std::runtime_error("GSF coordinate lengths disagree with dims");

    GridStack stack(parse_iso(meta["start_date"].get<std::string>()), std::move(lats), std::move(lons), dims[0],
                    meta["units"].get<std::string>(), meta.value("variable", ""));

    const std::filesystem::path payload_path = path.parent_path() / meta["payload"].get<std::string>();
    std::ifstream pf(payload_path, std::ios::binary);
    if (!pf) throw std::runtime_error("cannot open payload " + payload_path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(pf)), std::istreambuf_iterator<char>());
    const std::size_t expect = dims[0] * dims[1] * dims[2];
    if (bytes.size() != expect * 4)
        throw std::runtime_error("GSF payload " + payload_path.string() + " holds " +
                                 std::to_string(bytes.size() / 4) + " values, metadata implies " +
                                 std::to_string(expect));
    for (std::size_t k = 0; k < expect; ++k) stack.values()[k] = detail::read_f32_le(&bytes[4 * k]);

    stack.validate();
    return stack;
}

inline void save_grid_stack_csv(const GridStack& stack, const std::filesystem::path& path) {
    stack.validate();
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "date,lat,lon,value\n";
    char buf[96];
    for (std::size_t t = 0; t < stack.ntime(); ++t) {
        const std::string date = to_iso(stack.date(t));
        for (std::size_t i = 0; i < stack.nlat(); ++i)
            for (std::size_t j = 0; j < stack.nlon(); ++j) {
                const float v = stack.at(t, i, j);
                if (std::isnan(v))
                    std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,nan\n", date.c_str(), stack.lats()[i],
                                  stack.lons()[j]);
                else
                    std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g\n", date.c_str(), stack.lats()[i],
                                  stack.lons()[j], static_cast<double>(v));
                f << buf;
            }
    }
}

inline GridStack load_grid_stack_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty CSV " + path.string());

    struct Row {
        long serial;
        double lat, lon;
        float value;
    };
    std::vector<Row> rows;
    std::set<long> serials;
    std::set<double> lat_set, lon_set;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string date_s, lat_s, lon_s, val_s;
        if (!std::getline(ss, date_s, ',') || !std::getline(ss, lat_s, ',') || !std::getline(ss, lon_s, ',') ||
            !std::getline(ss, val_s))
            throw std::runtime_error("malformed CSV row: " + line);
        Row r;
        r.serial = to_serial(parse_iso(date_s));
        r.lat = std::stod(lat_s);
        r.lon = std::stod(lon_s);
        r.value = (val_s.empty() || val_s == "nan" || val_s == "NaN")
                      ? std::numeric_limits<float>::quiet_NaN()
                      : std::stof(val_s);
        serials.insert(r.serial);
        lat_set.insert(r.lat);
        lon_set.insert(r.lon);
        rows.push_back(r);
    }
    if (rows.empty()) throw std::runtime_error("CSV has no data rows: " + path.string());
    if (serials.size() * lat_set.size() * lon_set.size() > 1000000)
        throw std::runtime_error("CSV stacks are limited to 1e6 cells");

    const long first = *serials.begin(), last = *serials.rbegin();
    if (static_cast<std::size_t>(last - first + 1) != serials.size())
        throw std::runtime_error("CSV dates must form a contiguous daily range");

    std::vector<double> lats(lat_set.begin(), lat_set.end());
    std::vector<double> lons(lon_set.begin(), lon_set.end());
    std::map<double, std::size_t> lat_idx, lon_idx;
    for (std::size_t i = 0; i < lats.size(); ++i) lat_idx[lats[i]] = i;
    for (std::size_t j = 0; j < lons.size(); ++j) lon_idx[lons[j]] = j;

    GridStack stack(from_serial(first), std::move(lats), std::move(lons),
                    static_cast<std::size_t>(last - first + 1));
    for (auto& v : stack.values()) v = std::numeric_limits<float>::quiet_NaN();
    for (const Row& r : rows)
        stack.at(static_cast<std::size_t>(r.serial - first), lat_idx[r.lat], lon_idx[r.lon]) = r.value;
    return stack;
}

}  // namespace downscale
