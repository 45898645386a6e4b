#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "downscale/preprocess.hpp"
#include "downscale/rng.hpp"

using namespace downscale;

TEST_CASE("standardize centers and scales") {
    Mat x(3, 2);
    x << 1, 5, 2, 5, 3, 5;
    const Standardizer s = standardize_fit(x);
    const Mat z = standardize_apply(x, s);

    REQUIRE(z.col(0).mean() == Catch::Approx(0.0).margin(1e-12));
    const double sd = std::sqrt(z.col(0).squaredNorm() / 2.0);
    REQUIRE(sd == Catch::Approx(1.0));
    REQUIRE(z(0, 0) == Catch::Approx(-1.0));
    REQUIRE(z(2, 0) == Catch::Approx(1.0));

    // constant column: centered only, scale 1
    REQUIRE(s.scales(1) == 1.0);
    REQUIRE(z.col(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standardize applies the training affine map to new rows") {
    Mat x(4, 1);
    x << 0, 2, 4, 6;
    const Standardizer s = standardize_fit(x);
    Mat test(2, 1);
    test << 10, -4;
    const Mat z = standardize_apply(test, s);
    REQUIRE(z(0, 0) == Catch::Approx((10 - s.means(0)) / s.scales(0)));
    REQUIRE(z(1, 0) == Catch::Approx((-4 - s.means(0)) / s.scales(0)));
}

TEST_CASE("rank-1 data keeps one component") {
    Rng rng(7);
    Mat x(20, 4);
    for (int i = 0; i < 20; ++i) {
        const double t = rng.normal();
        for (int j = 0; j < 4; ++j) x(i, j) = t * (j + 1);
    }
    const PcaBasis basis = pca_fit(x, 0.98);
    REQUIRE(basis.retained() == 1);
    REQUIRE(basis.explained_fraction(0) == Catch::Approx(1.0));
}

TEST_CASE("var_frac 1.0 retains the numerical rank") {
    Rng rng(11);
    Mat x(30, 5);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    // columns 3,4 are linear combinations: rank 3
    x.col(3) = x.col(0) + x.col(1);
    x.col(4) = x.col(0) - 2.0 * x.col(2);
    const PcaBasis basis = pca_fit(x, 1.0);
    REQUIRE(basis.retained() == 3);
}

TEST_CASE("retained count follows hand-computed eigenvalues") {
    // build X with sample covariance R diag(8,1,1) R^T exactly:
    // orthogonal design scores scaled to the target eigenvalues
    const int n = 8;
    Mat z(n, 3);
    // three orthogonal, zero-mean columns
    z.col(0) << 1, 1, 1, 1, -1, -1, -1, -1;
    z.col(1) << 1, 1, -1, -1, 1, 1, -1, -1;
    z.col(2) << 1, -1, 1, -1, 1, -1, 1, -1;
    z *= std::sqrt((n - 1) / static_cast<double>(n));

    Mat rot(3, 3);  // hand-picked orthogonal rotation
    rot << 2.0 / 3, -2.0 / 3, 1.0 / 3, 2.0 / 3, 1.0 / 3, -2.0 / 3, 1.0 / 3, 2.0 / 3, 2.0 / 3;
    REQUIRE((rot.transpose() * rot - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);

    Vec scale(3);
    scale << std::sqrt(8.0), 1.0, 1.0;
    const Mat x = z * scale.asDiagonal() * rot.transpose();

    // sanity: covariance eigenvalues are (8, 1, 1)
    const Mat cov = x.transpose() * x / (n - 1);
    Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
    REQUIRE(eig.eigenvalues()(2) == Catch::Approx(8.0));
    REQUIRE(eig.eigenvalues()(0) == Catch::Approx(1.0));

    REQUIRE(pca_fit(x, 0.98).retained() == 3);
    REQUIRE(pca_fit(x, 0.80).retained() == 1);
}

TEST_CASE("pca reconstruction at full rank and component properties") {
    Rng rng(3);
    Mat x(40, 6);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 6; ++j) x(i, j) = rng.normal() + j;
    const PcaBasis basis = pca_fit(x, 1.0);
    REQUIRE(basis.retained() == 6);

    const Mat scores = pca_transform(x, basis);
    const Mat back = pca_inverse(scores, basis);
    REQUIRE((back - x).cwiseAbs().maxCoeff() < 1e-10);

    // orthonormal components
    const Mat gram = basis.components.transpose() * basis.components;
    REQUIRE((gram - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);

    // explained fractions non-increasing, sum <= 1
    double sum = 0;
    for (Eigen::Index c = 0; c < basis.retained(); ++c) {
        if (c > 0) REQUIRE(basis.explained_fraction(c) <= basis.explained_fraction(c - 1) + 1e-12);
        sum += basis.explained_fraction(c);
    }
    REQUIRE(sum <= 1.0 + 1e-12);

    // deterministic sign: largest-|.| loading positive
    for (Eigen::Index c = 0; c < basis.retained(); ++c) {
        Eigen::Index arg = 0;
        basis.components.col(c).cwiseAbs().maxCoeff(&arg);
        REQUIRE(basis.components(arg, c) > 0);
    }
}

TEST_CASE("pca on a single row is rejected") {
    Mat x(1, 3);
    x << 1, 2, 3;
    REQUIRE_THROWS(pca_fit(x, 0.98));
    REQUIRE_THROWS(standardize_fit(x));
}

namespace {

GridStack covariate(Date start, std::size_t ndays, std::vector<double> lats, std::vector<double> lons,
                    const std::string& var, float base) {
    GridStack s(start, std::move(lats), std::move(lons), ndays, "1", var);
    for (std::size_t t = 0; t < ndays; ++t)
        for (std::size_t c = 0; c < s.ncell(); ++c)
            s.at_cell(t, c) = base + static_cast<float>(t + 10 * c);
    return s;
}

}  // namespace

TEST_CASE("design matrix enumerates (variable, cell) pairs in stable order") {
    const Date start{2000, 1, 1};
    std::vector<GridStack> stacks;
    stacks.push_back(covariate(start, 4, {40, 41, 42}, {285, 286, 287}, "tas", 0.0f));
    stacks.push_back(covariate(start, 4, {40, 41, 42}, {285, 286, 287}, "huss", 100.0f));

    const DesignMatrix dm = build_design_matrix(stacks);
    REQUIRE(dm.x.cols() == 18);
    REQUIRE(dm.columns.size() == 18);
    REQUIRE(dm.columns[0].variable == "tas");
    REQUIRE(dm.columns[9].variable == "huss");
    // lat-major, lon-minor within a stack
    REQUIRE(dm.columns[0].lat == 40.0);
    REQUIRE(dm.columns[0].lon == 285.0);
    REQUIRE(dm.columns[1].lon == 286.0);
    REQUIRE(dm.columns[3].lat == 41.0);

    // re-ingesting the same stacks gives the identical layout
    const DesignMatrix dm2 = build_design_matrix(stacks);
    REQUIRE(dm.x == dm2.x);
    for (std::size_t c = 0; c < dm.columns.size(); ++c) {
        REQUIRE(dm.columns[c].variable == dm2.columns[c].variable);
        REQUIRE(dm.columns[c].lat == dm2.columns[c].lat);
        REQUIRE(dm.columns[c].lon == dm2.columns[c].lon);
    }
}

TEST_CASE("design matrix drops NaN cells with their descriptors") {
    const Date start{2000, 1, 1};
    std::vector<GridStack> stacks;
    stacks.push_back(covariate(start, 4, {40, 41, 42}, {285, 286, 287}, "tas", 0.0f));
    stacks.push_back(covariate(start, 4, {40, 41, 42}, {285, 286, 287}, "huss", 100.0f));
    for (std::size_t t = 0; t < 4; ++t)
        stacks[1].at(t, 1, 1) = std::numeric_limits<float>::quiet_NaN();

    const DesignMatrix dm = build_design_matrix(stacks);
    REQUIRE(dm.x.cols() == 17);
    for (const auto& c : dm.columns)
        REQUIRE(!(c.variable == "huss" && c.lat == 41.0 && c.lon == 286.0));
    REQUIRE(!dm.x.hasNaN());
}

TEST_CASE("empty bbox and misaligned axes are rejected") {
    const Date start{2000, 1, 1};
    std::vector<GridStack> stacks;
    stacks.push_back(covariate(start, 4, {40, 41}, {285, 286}, "tas", 0.0f));

    BBox empty;
    empty.lat_min = 80;
    REQUIRE_THROWS(build_design_matrix(stacks, empty));

    stacks.push_back(covariate(Date{2001, 1, 1}, 4, {40, 41}, {285, 286}, "huss", 0.0f));
    REQUIRE_THROWS(build_design_matrix(stacks));
}

TEST_CASE("bbox restricts the covariate cells") {
    const Date start{2000, 1, 1};
    std::vector<GridStack> stacks;
    stacks.push_back(covariate(start, 4, {40, 41, 42}, {285, 286, 287}, "tas", 0.0f));
    BBox box{40.5, 42.5, 284.5, 286.5};
    const DesignMatrix dm = build_design_matrix(stacks, box);
    REQUIRE(dm.x.cols() == 4);  // lats {41,42} x lons {285,286}
}

TEST_CASE("target matrix rejects NaN and negatives") {
    GridStack obs(Date{2000, 1, 1}, {40.0, 41.0}, {285.0}, 3, "mm/day");
    for (auto& v : obs.values()) v = 1.0f;
    REQUIRE(build_target_matrix(obs).y.cols() == 2);

    obs.at(0, 0, 0) = std::numeric_limits<float>::quiet_NaN();
    REQUIRE_THROWS(build_target_matrix(obs));
}
