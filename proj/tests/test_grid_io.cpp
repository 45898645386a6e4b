#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "downscale/gsf.hpp"

using namespace downscale;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path p = fs::temp_directory_path() / "downscale_gsf_test";
    fs::create_directories(p);
    return p;
}

GridStack small_stack() {
    GridStack s(Date{2000, 1, 1}, {40.0, 41.0}, {285.0, 286.0}, 2, "mm/day", "pr");
    float v = 0.5f;
    for (auto& x : s.values()) {
        x = v;
        v += 0.25f;
    }
    return s;
}

}  // namespace

TEST_CASE("gsf round trip is the identity") {
    const fs::path meta = temp_dir() / "rt.json";
    const GridStack s = small_stack();
    save_grid_stack(s, meta);
    const GridStack r = load_grid_stack(meta);

    REQUIRE(r.ntime() == s.ntime());
    REQUIRE(r.lats() == s.lats());
    REQUIRE(r.lons() == s.lons());
    REQUIRE(r.start_date() == s.start_date());
    REQUIRE(r.units() == s.units());
    REQUIRE(r.variable() == s.variable());
    REQUIRE(r.values() == s.values());  // bit-for-bit

    // saving the loaded stack reproduces both files byte-exactly
    const fs::path meta2 = temp_dir() / "rt2.json";
    save_grid_stack(r, meta2);
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    };
    auto payload_of = [](fs::path p) { return p.replace_extension(".bin"); };
    REQUIRE(slurp(payload_of(meta)) == slurp(payload_of(meta2)));
    // metadata differs only in the payload filename; compare after load
    REQUIRE(load_grid_stack(meta2).values() == s.values());
}

TEST_CASE("payload shorter than dims imply is rejected") {
    const fs::path meta = temp_dir() / "short.json";
    save_grid_stack(small_stack(), meta);
    fs::path payload = meta;
    payload.replace_extension(".bin");
    fs::resize_file(payload, fs::file_size(payload) - 4);
    REQUIRE_THROWS_WITH(load_grid_stack(meta), Catch::Matchers::ContainsSubstring("payload"));
}

TEST_CASE("NaN cells survive a round trip") {
    const fs::path meta = temp_dir() / "nan.json";
    GridStack s = small_stack();
    s.set_units("1");  // NaN is fine outside precip stacks too
    s.at(1, 0, 1) = std::numeric_limits<float>::quiet_NaN();
    save_grid_stack(s, meta);
    const GridStack r = load_grid_stack(meta);
    REQUIRE(std::isnan(r.at(1, 0, 1)));
    REQUIRE(r.at(0, 0, 1) == s.at(0, 0, 1));
}

TEST_CASE("malformed metadata is reported") {
    const fs::path meta = temp_dir() / "bad.json";
    {
        std::ofstream f(meta);
        f << "{ not json";
    }
    REQUIRE_THROWS_WITH(load_grid_stack(meta), Catch::Matchers::ContainsSubstring("malformed"));

    {
        std::ofstream f(meta);
        f << R"({"dims": [2, 2, 2]})";
    }
    REQUIRE_THROWS_WITH(load_grid_stack(meta), Catch::Matchers::ContainsSubstring("missing key"));
}

TEST_CASE("non-monotone coordinates are rejected") {
    REQUIRE_THROWS(GridStack(Date{2000, 1, 1}, {40.0, 40.0}, {285.0, 286.0}, 1));
    REQUIRE_THROWS(GridStack(Date{2000, 1, 1}, {40.0, 41.0, 40.5}, {285.0}, 1));
    // strictly decreasing is allowed
    REQUIRE_NOTHROW(GridStack(Date{2000, 1, 1}, {41.0, 40.0}, {285.0, 286.0}, 1));
}

TEST_CASE("negative precipitation fails validation") {
    GridStack s = small_stack();
    s.at(0, 0, 0) = -1.0f;
    REQUIRE_THROWS(s.validate());
    s.set_units("K");
    REQUIRE_NOTHROW(s.validate());
}

TEST_CASE("csv round trip with missing cells") {
    const fs::path csv = temp_dir() / "stack.csv";
    GridStack s = small_stack();
    s.set_units("");
    s.at(0, 1, 0) = std::numeric_limits<float>::quiet_NaN();
    save_grid_stack_csv(s, csv);
    const GridStack r = load_grid_stack(csv);
    REQUIRE(r.ntime() == 2);
    REQUIRE(r.lats() == s.lats());
    REQUIRE(std::isnan(r.at(0, 1, 0)));
    REQUIRE(r.at(1, 1, 1) == s.at(1, 1, 1));
}
