#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace downscale {

// contiguous-block folds over the time axis; daily weather autocorrelation
// makes shuffled folds leak, so rows are never permuted
struct CvFold {
    std::size_t valid_begin;
    std::size_t valid_end;  // half-open
};

inline std::vector<CvFold> contiguous_folds(std::size_t n_rows, int folds) {
    if (folds < 2) throw std::invalid_argument("cross-validation needs >= 2 folds");
    if (n_rows < static_cast<std::size_t>(folds)) throw std::invalid_argument("more folds than rows");
    std::vector<CvFold> out;
    for (int f = 0; f < folds; ++f)
        out.push_back({n_rows * f / folds, n_rows * (f + 1) / folds});
    return out;
}

struct GridSearchResult {
    std::size_t best_index = 0;
    double best_score = 0;
    std::vector<double> mean_scores;
};

// evaluate(param_index, fold) -> validation score, lower is better (RMSE or
// log-loss). The grid must be ordered weakest-to-strongest regularization;
// exact score ties resolve to the strongest (last) candidate.
inline GridSearchResult grid_search_cv(
    std::size_t grid_size, std::size_t n_rows, int folds,
    const std::function<double(std::size_t, const CvFold&)>& evaluate) {
    if (grid_size == 0) throw std::invalid_argument("grid_search_cv: empty parameter grid");
    const std::vector<CvFold> fold_spec = contiguous_folds(n_rows, folds);

    GridSearchResult res;
    res.mean_scores.assign(grid_size, 0.0);
    for (std::size_t g = 0; g < grid_size; ++g) {
        double sum = 0;
        for (const CvFold& f : fold_spec) sum += evaluate(g, f);
        res.mean_scores[g] = sum / static_cast<double>(fold_spec.size());
    }
    res.best_index = 0;
    res.best_score = res.mean_scores[0];
    for (std::size_t g = 1; g < grid_size; ++g)
        if (res.mean_scores[g] <= res.best_score) {  // ties -> stronger regularization
            res.best_index = g;
            res.best_score = res.mean_scores[g];
        }
    return res;
}

}  // namespace downscale
