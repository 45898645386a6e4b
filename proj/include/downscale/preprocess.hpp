#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "downscale/grid.hpp"
#include "downscale/weights.hpp"

namespace downscale {

struct Standardizer {
    Vec means;
    Vec scales;  // sample sd; 1 for zero-variance columns
};

inline Standardizer standardize_fit(const Mat& x) {
    if (x.rows() < 2) throw std::invalid_argument("standardize_fit needs at least 2 rows");
    Standardizer s;
    s.means = x.colwise().mean();
    s.scales = Vec(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double var = (x.col(j).array() - s.means(j)).square().sum() / static_cast<double>(x.rows() - 1);
        const double sd = std::sqrt(var);
        s.scales(j) = sd > 0 ? sd : 1.0;
    }
    return s;
}

inline Mat standardize_apply(const Mat& x, const Standardizer& s) {
    if (x.cols() != s.means.size()) throw std::invalid_argument("standardizer dimension mismatch");
    return (x.rowwise() - s.means.transpose()).array().rowwise() / s.scales.transpose().array();
}

// Principal-component basis with variance-fraction truncation. Centering is
// built in; scales are 1 unless the basis was fit through a standardizing
// pipeline (fit_standardized_pca).
struct PcaBasis {
    Vec means;
    Vec scales;
    Mat components;           // d x p, orthonormal columns
    Vec explained_fraction;   // p entries, non-increasing
    Eigen::Index retained() const { return components.cols(); }
};

// eigendecomposition of the covariance; components ordered by decreasing
// eigenvalue, sign fixed so each component's largest-|.| loading is positive
inline PcaBasis pca_fit(const Mat& x, double var_frac = 0.98) {
    if (x.rows() < 2) throw std::invalid_argument("pca_fit needs at least 2 rows");
    if (var_frac <= 0 || var_frac > 1) throw std::invalid_argument("var_frac must be in (0, 1]");

    PcaBasis basis;
    basis.means = x.colwise().mean();
    basis.scales = Vec::Ones(x.cols());
    const Mat centered = x.rowwise() - basis.means.transpose();
    const Mat cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);

    Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
    if (eig.info() != Eigen::Success) throw std::runtime_error("pca_fit: eigendecomposition failed");
    // ascending from Eigen; walk backwards
    const Vec evals = eig.eigenvalues();
    const Mat evecs = eig.eigenvectors();

    const double total = evals.array().max(0.0).sum();
    if (total <= 0) throw std::runtime_error("pca_fit: zero total variance");
    const double rank_tol = evals(evals.size() - 1) * static_cast<double>(x.cols()) * 1e-12;

    std::vector<Eigen::Index> keep;
    double cum = 0;
    for (Eigen::Index r = evals.size() - 1; r >= 0; --r) {
        if (evals(r) <= rank_tol) break;  // numerically zero directions carry no variance
        keep.push_back(r);
        cum += evals(r);
        if (cum / total >= var_frac - 1e-12) break;
    }
    if (keep.empty()) keep.push_back(evals.size() - 1);

    basis.components = Mat(x.cols(), static_cast<Eigen::Index>(keep.size()));
    basis.explained_fraction = Vec(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        Vec v = evecs.col(keep[c]);
        Eigen::Index argmax = 0;
        v.cwiseAbs().maxCoeff(&argmax);
        if (v(argmax) < 0) v = -v;
        basis.components.col(static_cast<Eigen::Index>(c)) = v;
        basis.explained_fraction(static_cast<Eigen::Index>(c)) = evals(keep[c]) / total;
    }
    return basis;
}

inline Mat pca_transform(const Mat& x, const PcaBasis& basis) {
    if (x.cols() != basis.means.size()) throw std::invalid_argument("pca basis dimension mismatch");
    const Mat z = (x.rowwise() - basis.means.transpose()).array().rowwise() / basis.scales.transpose().array();
    return z * basis.components;
}

inline Mat pca_inverse(const Mat& scores, const PcaBasis& basis) {
    Mat z = scores * basis.components.transpose();
    z = z.array().rowwise() * basis.scales.transpose().array();
    return z.rowwise() + basis.means.transpose();
}

// standardize then PCA, folded into one basis so a single object maps raw
// covariates to scores
inline PcaBasis fit_standardized_pca(const Mat& x, double var_frac = 0.98) {
    const Standardizer s = standardize_fit(x);
    PcaBasis basis = pca_fit(standardize_apply(x, s), var_frac);
    basis.means = s.means;
    basis.scales = s.scales;
    return basis;
}

struct ColumnDescriptor {
    std::string variable;
    int level = 0;
    double lat = 0;
    double lon = 0;
};

struct DesignMatrix {
    Mat x;  // n x d, no NaN
    std::vector<ColumnDescriptor> columns;
};

struct TargetMatrix {
    Mat y;  // n x K, non-negative
    std::vector<std::size_t> cells;  // fine-grid cell index per task
};

struct BBox {
    double lat_min = -std::numeric_limits<double>::infinity();
    double lat_max = std::numeric_limits<double>::infinity();
    double lon_min = -std::numeric_limits<double>::infinity();
    double lon_max = std::numeric_limits<double>::infinity();

    bool contains(double lat, double lon) const {
        return lat >= lat_min && lat <= lat_max && lon >= lon_min && lon <= lon_max;
    }
};

struct CovariateField {
    const GridStack* stack = nullptr;
    std::string variable;
    int level = 0;
};

// flattens covariate grids into columns: stacks in list order, cells
// lat-major lon-minor; cells containing NaN are dropped with their
// descriptors
inline DesignMatrix build_design_matrix(const std::vector<CovariateField>& fields, const BBox& bbox = {}) {
    if (fields.empty()) throw std::invalid_argument("no covariate stacks given");
    const GridStack* first = fields.front().stack;
    for (const auto& f : fields)
        if (!f.stack->same_time_axis(*first))
            throw std::invalid_argument("covariate stacks have misaligned time axes");

    const std::size_t n = first->ntime();
    std::vector<ColumnDescriptor> cols;
    std::vector<std::pair<const GridStack*, std::size_t>> sources;
    for (const auto& f : fields) {
        const GridStack& s = *f.stack;
        for (std::size_t i = 0; i < s.nlat(); ++i)
            for (std::size_t j = 0; j < s.nlon(); ++j) {
                if (!bbox.contains(s.lats()[i], s.lons()[j])) continue;
                const std::size_t cell = i * s.nlon() + j;
                bool has_nan = false;
                for (std::size_t t = 0; t < n && !has_nan; ++t) has_nan = std::isnan(s.at_cell(t, cell));
                if (has_nan) continue;
                cols.push_back({f.variable, f.level, s.lats()[i], s.lons()[j]});
                sources.emplace_back(&s, cell);
            }
    }
    if (cols.empty()) throw std::invalid_argument("bounding box excludes every covariate cell");

    DesignMatrix dm;
    dm.columns = std::move(cols);
    dm.x = Mat(n, static_cast<Eigen::Index>(sources.size()));
    for (std::size_t c = 0; c < sources.size(); ++c)
        for (std::size_t t = 0; t < n; ++t)
            dm.x(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) =
                sources[c].first->at_cell(t, sources[c].second);
    return dm;
}

inline DesignMatrix build_design_matrix(const std::vector<GridStack>& stacks, const BBox& bbox = {}) {
    std::vector<CovariateField> fields;
    fields.reserve(stacks.size());
    for (const auto& s : stacks) fields.push_back({&s, s.variable(), 0});
    return build_design_matrix(fields, bbox);
}

// fine-grid observations as one task per cell, lat-major order
inline TargetMatrix build_target_matrix(const GridStack& obs) {
    TargetMatrix tm;
    tm.y = Mat(static_cast<Eigen::Index>(obs.ntime()), static_cast<Eigen::Index>(obs.ncell()));
    tm.cells.resize(obs.ncell());
    for (std::size_t c = 0; c < obs.ncell(); ++c) {
        tm.cells[c] = c;
        for (std::size_t t = 0; t < obs.ntime(); ++t) {
            const float v = obs.at_cell(t, c);
            if (std::isnan(v)) throw std::invalid_argument("target matrix cannot contain missing values");
            if (v < 0) throw std::invalid_argument("target matrix entries must be non-negative");
            tm.y(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return tm;
}

}  // namespace downscale
