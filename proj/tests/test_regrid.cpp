#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "downscale/regrid.hpp"

using namespace downscale;

namespace {

GridStack stack_2x2(std::initializer_list<float> vals) {
    GridStack s(Date{2000, 1, 1}, {0.0, 1.0}, {0.0, 1.0}, 1, "1");
    std::size_t k = 0;
    for (float v : vals) s.values()[k++] = v;
    return s;
}

}  // namespace

TEST_CASE("block mean of a 2x2 block") {
    const GridStack fine = stack_2x2({1.0f, 2.0f, 3.0f, 4.0f});
    const GridStack coarse = upscale_block_mean(fine, 2, 2);
    REQUIRE(coarse.nlat() == 1);
    REQUIRE(coarse.nlon() == 1);
    REQUIRE(coarse.at(0, 0, 0) == Catch::Approx(2.5));
}

TEST_CASE("factor (1,1) upscaling is the identity") {
    const GridStack fine = stack_2x2({1.0f, 2.0f, 3.0f, 4.0f});
    const GridStack same = upscale_block_mean(fine, 1, 1);
    REQUIRE(same.values() == fine.values());
    REQUIRE(same.lats() == fine.lats());
}

TEST_CASE("block mean skips missing cells") {
    const float nan = std::numeric_limits<float>::quiet_NaN();
    const GridStack fine = stack_2x2({1.0f, nan, 3.0f, nan});
    REQUIRE(upscale_block_mean(fine, 2, 2).at(0, 0, 0) == Catch::Approx(2.0));

    const GridStack all_missing = stack_2x2({nan, nan, nan, nan});
    REQUIRE(std::isnan(upscale_block_mean(all_missing, 2, 2).at(0, 0, 0)));
}

TEST_CASE("non-divisible dims are rejected") {
    const GridStack fine = stack_2x2({1, 2, 3, 4});
    REQUIRE_THROWS(upscale_block_mean(fine, 3, 1));
    REQUIRE_THROWS(upscale_block_mean(fine, 1, 0));
}

TEST_CASE("bilinear midpoint and node exactness") {
    const GridStack coarse = stack_2x2({0.0f, 1.0f, 1.0f, 2.0f});
    const GridStack mid = bilinear_interpolate(coarse, {0.5}, {0.5});
    REQUIRE(mid.at(0, 0, 0) == Catch::Approx(1.0));

    const GridStack nodes = bilinear_interpolate(coarse, {0.0, 1.0}, {0.0, 1.0});
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) REQUIRE(nodes.at(0, i, j) == coarse.at(0, i, j));
}

TEST_CASE("coastal fill takes the nearest donor before interpolating") {
    // corner (0,0) missing; nearest non-missing neighbors are (0,1) and (1,0)
    // at index distance 1, tie broken toward the smaller (lat, lon)
    const float nan = std::numeric_limits<float>::quiet_NaN();
    const GridStack coarse = stack_2x2({nan, 1.0f, 1.0f, 2.0f});
    const GridStack at_corner = bilinear_interpolate(coarse, {0.0}, {0.0});
    REQUIRE(at_corner.at(0, 0, 0) == Catch::Approx(1.0));

    const GridStack out = bilinear_interpolate(coarse, {0.0, 0.5, 1.0}, {0.0, 0.5, 1.0});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) REQUIRE_FALSE(std::isnan(out.at(0, i, j)));
}

TEST_CASE("all-missing coarse field is an error") {
    const float nan = std::numeric_limits<float>::quiet_NaN();
    const GridStack coarse = stack_2x2({nan, nan, nan, nan});
    REQUIRE_THROWS(bilinear_interpolate(coarse, {0.5}, {0.5}));
}

TEST_CASE("targets outside the bounding box are rejected") {
    const GridStack coarse = stack_2x2({0, 1, 1, 2});
    REQUIRE_THROWS(bilinear_interpolate(coarse, {1.5}, {0.5}));
}

TEST_CASE("upscale then interpolate back recovers a bilinear field") {
    // field linear in (lat, lon) stays exact under block mean + bilinear
    GridStack fine(Date{2000, 1, 1}, {0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 2.0, 3.0}, 3, "1");
    for (std::size_t t = 0; t < fine.ntime(); ++t)
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                fine.at(t, i, j) = static_cast<float>(2.0 * fine.lats()[i] - 3.0 * fine.lons()[j] + t);

    const GridStack coarse = upscale_block_mean(fine, 2, 2);
    // interior fine nodes lie inside the coarse hull; compare there
    const GridStack back = bilinear_interpolate(coarse, {1.0, 2.0}, {1.0, 2.0});
    for (std::size_t t = 0; t < fine.ntime(); ++t)
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                REQUIRE(back.at(t, i, j) == Catch::Approx(fine.at(t, i + 1, j + 1)).margin(1e-5));
}

TEST_CASE("interpolation from a descending-latitude grid") {
    GridStack coarse(Date{2000, 1, 1}, {1.0, 0.0}, {0.0, 1.0}, 1, "1");
    // value = lat + 2*lon
    coarse.at(0, 0, 0) = 1.0f;  // lat 1, lon 0
    coarse.at(0, 0, 1) = 3.0f;
    coarse.at(0, 1, 0) = 0.0f;  // lat 0, lon 0
    coarse.at(0, 1, 1) = 2.0f;
    const GridStack out = bilinear_interpolate(coarse, {0.25, 0.75}, {0.5});
    REQUIRE(out.at(0, 0, 0) == Catch::Approx(1.25));
    REQUIRE(out.at(0, 1, 0) == Catch::Approx(1.75));
}
