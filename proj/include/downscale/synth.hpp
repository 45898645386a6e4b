#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "downscale/grid.hpp"
#include "downscale/regrid.hpp"
#include "downscale/rng.hpp"
#include "downscale/weights.hpp"

namespace downscale {

// Desk-scale stand-in for a reanalysis + gauge-analysis pair: smooth coarse
// covariate fields drive fine-grid precipitation through a sparse
// occurrence-times-amount model with known weights.
struct SynthConfig {
    // covariate grid (the "large box" of coarse predictors)
    int cov_nlat = 5;
    int cov_nlon = 5;
    int n_variables = 2;
    int n_levels = 1;

    // fine observation grid; K tasks = fine_nlat * fine_nlon
    int fine_nlat = 3;
    int fine_nlon = 3;

    // the model precipitation stack lives on the fine grid coarsened by
    // these factors (fine dims must be divisible)
    int precip_factor_lat = 1;
    int precip_factor_lon = 1;

    int start_year = 1995;
    int n_years = 20;

    double weight_sparsity = 0.1;    // fraction of covariates active per task
    double noise_sd = 0.5;           // additive amount noise, mm/day
    double wet_prob = 0.5;           // base occurrence probability; >= 1 means always wet
    double spatial_smoothness = 0.5; // 0 = white fields, 1 = fully smooth modes
    double occ_signal_scale = 2.0;   // sd of the occurrence logit signal
    double amount_signal_scale = 0.5;// sd of the log-amount signal
    double amount_log_mean = 1.25;   // log of the median wet-day amount (~3.5 mm)

    // distortion applied to the upscaled truth to make a biased "model" precip
    double model_bias_mult = 1.3;
    double model_bias_pow = 0.9;
    double model_noise_sd = 0.15;    // lognormal sd on wet model values

    std::uint64_t seed = 42;

    void validate() const {
        if (cov_nlat < 1 || cov_nlon < 1 || fine_nlat < 1 || fine_nlon < 1)
            throw std::invalid_argument("synth grids must be non-empty");
        if (precip_factor_lat < 1 || precip_factor_lon < 1 || fine_nlat % precip_factor_lat != 0 ||
            fine_nlon % precip_factor_lon != 0)
            throw std::invalid_argument("fine grid dims must be integer multiples of the coarse precip grid");
        if (n_years < 1 || n_variables < 1 || n_levels < 1)
            throw std::invalid_argument("synth needs >= 1 year and >= 1 covariate stack");
        if (noise_sd < 0 || model_noise_sd < 0) throw std::invalid_argument("noise sd must be >= 0");
        if (wet_prob < 0) throw std::invalid_argument("wet probability must be >= 0");
        if (spatial_smoothness < 0 || spatial_smoothness > 1)
            throw std::invalid_argument("spatial smoothness must be in [0, 1]");
        if (weight_sparsity <= 0 || weight_sparsity > 1)
            throw std::invalid_argument("weight sparsity must be in (0, 1]");
    }

    int n_days() const {
        int n = 0;
        for (int y = 0; y < n_years; ++y) n += is_leap_year(start_year + y) ? 366 : 365;
        return n;
    }
    int n_stacks() const { return n_variables * n_levels; }
    int n_covariates() const { return n_stacks() * cov_nlat * cov_nlon; }
    int n_tasks() const { return fine_nlat * fine_nlon; }
};

struct SynthTruth {
    WeightMatrix occurrence;  // logit weights per task
    WeightMatrix amount;      // log-amount weights per task
};

struct SynthData {
    std::vector<GridStack> covariates;  // coarse covariate stacks, generation order
    GridStack model_precip;             // biased coarse-precip stack for BCSD
    GridStack fine_obs;                 // fine-grid daily precipitation, mm/day
    SynthTruth truth;
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = (lo + hi) / 2;
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

inline GridStack synth_covariate_stack(const SynthConfig& cfg, const std::string& name, Rng rng) {
    GridStack stack(Date{cfg.start_year, 1, 1}, linspace(40.0, 44.0, cfg.cov_nlat),
                    linspace(284.0, 288.0, cfg.cov_nlon), static_cast<std::size_t>(cfg.n_days()), "1", name);

    constexpr int n_modes = 6;
    const int ncell = cfg.cov_nlat * cfg.cov_nlon;
    std::vector<std::vector<double>> pattern(n_modes, std::vector<double>(ncell));
    std::vector<double> amp(n_modes);
    for (int m = 0; m < n_modes; ++m) {
        const double fi = rng.uniform(0.5, 2.5);
        const double fj = rng.uniform(0.5, 2.5);
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        for (int i = 0; i < cfg.cov_nlat; ++i)
            for (int j = 0; j < cfg.cov_nlon; ++j)
                pattern[m][i * cfg.cov_nlon + j] = std::cos(
                    2.0 * std::numbers::pi * (fi * i / cfg.cov_nlat + fj * j / cfg.cov_nlon) + phase);
        amp[m] = rng.uniform(0.5, 1.0);
    }
    double norm = 0;
    for (int m = 0; m < n_modes; ++m) norm += 0.5 * amp[m] * amp[m];
    norm = std::sqrt(norm);

    // AR(1) mode amplitudes give day-to-day persistence
    constexpr double ar = 0.8;
    std::vector<double> a(n_modes, 0.0);
    for (int m = 0; m < n_modes; ++m) a[m] = rng.normal();
    const double w_smooth = std::sqrt(cfg.spatial_smoothness);
    const double w_white = std::sqrt(1.0 - cfg.spatial_smoothness);
    for (std::size_t t = 0; t < stack.ntime(); ++t) {
        if (t > 0)
            for (int m = 0; m < n_modes; ++m) a[m] = ar * a[m] + std::sqrt(1 - ar * ar) * rng.normal();
        for (int c = 0; c < ncell; ++c) {
            double smooth = 0;
            for (int m = 0; m < n_modes; ++m) smooth += amp[m] * a[m] * pattern[m][c];
            stack.at_cell(t, c) = static_cast<float>(w_smooth * smooth / norm + w_white * rng.normal());
        }
    }
    return stack;
}

// sparse weights: a shared active pool plus per-task extras, entry scale set
// so the linear score has roughly the requested sd
inline WeightMatrix synth_sparse_weights(int d, int k, double sparsity, double scale, double intercept,
                                         Rng rng) {
    WeightMatrix w(d, k);
    const int n_active = std::max(1, static_cast<int>(std::lround(sparsity * d)));
    const int n_shared = n_active / 2;

    std::vector<int> order(d);
    for (int j = 0; j < d; ++j) order[j] = j;
    for (int j = d - 1; j > 0; --j) std::swap(order[j], order[rng.below(j + 1)]);
    const std::vector<int> shared(order.begin(), order.begin() + n_shared);

    const double entry = scale / std::sqrt(static_cast<double>(n_active));
    for (int task = 0; task < k; ++task) {
        std::vector<char> used(d, 0);
        for (int j : shared) used[j] = 1;
        int extras = n_active - n_shared;
        while (extras > 0) {
            const int j = static_cast<int>(rng.below(d));
            if (used[j]) continue;
            used[j] = 1;
            --extras;
        }
        for (int j = 0; j < d; ++j)
            if (used[j]) w.coef(j, task) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * entry * rng.uniform(1.0, 2.0);
        w.intercepts(task) = intercept;
    }
    return w;
}

}  // namespace detail

// Deterministic under cfg.seed. The flattened covariate row for day t (stack
// order, cells lat-major) drives both stages; the fine grid is nested inside
// the covariate box.
inline SynthData synth_generate(const SynthConfig& cfg) {
    cfg.validate();
    Rng root(cfg.seed);

    static constexpr const char* kVarNames[] = {"tas", "huss", "psl", "ua", "va", "zg", "ta", "wap"};
    static constexpr int kNVarNames = 8;
    static constexpr int kLevels[] = {850, 700, 500, 300};

    SynthData out;
    int stack_idx = 0;
    for (int v = 0; v < cfg.n_variables; ++v)
        for (int l = 0; l < cfg.n_levels; ++l, ++stack_idx) {
            std::string name = kVarNames[v % kNVarNames];
            if (cfg.n_levels > 1) name += std::to_string(kLevels[l % 4]);
            out.covariates.push_back(detail::synth_covariate_stack(cfg, name, root.fork(100 + stack_idx)));
        }

    const int n = cfg.n_days();
    const int d = cfg.n_covariates();
    const int k = cfg.n_tasks();

    // flattened covariates, the same layout build_design_matrix produces
    Mat x(n, d);
    {
        int col = 0;
        for (const GridStack& s : out.covariates) {
            for (std::size_t c = 0; c < s.ncell(); ++c, ++col)
                for (int t = 0; t < n; ++t) x(t, col) = s.at_cell(t, c);
        }
    }

    const double p0 = std::min(cfg.wet_prob, 1.0 - 1e-9);
    const double occ_intercept = std::log(std::max(p0, 1e-9) / (1.0 - std::max(p0, 1e-9)));
    out.truth.occurrence = detail::synth_sparse_weights(d, k, cfg.weight_sparsity, cfg.occ_signal_scale,
                                                        occ_intercept, root.fork(1));
    out.truth.amount = detail::synth_sparse_weights(d, k, cfg.weight_sparsity, cfg.amount_signal_scale,
                                                    cfg.amount_log_mean, root.fork(2));

    const Mat occ_score = out.truth.occurrence.predict(x);
    const Mat amt_score = out.truth.amount.predict(x);

    GridStack fine(Date{cfg.start_year, 1, 1}, detail::linspace(41.2, 42.8, cfg.fine_nlat),
                   detail::linspace(285.2, 286.8, cfg.fine_nlon), static_cast<std::size_t>(n), "mm/day",
                   "pr_obs");
    Rng draw = root.fork(3);
    for (int t = 0; t < n; ++t)
        for (int c = 0; c < k; ++c) {
            const double u = draw.uniform();
            const double eps = draw.normal();  // drawn unconditionally to keep streams aligned
            const bool wet = cfg.wet_prob >= 1.0 || u < 1.0 / (1.0 + std::exp(-occ_score(t, c)));
            double v = 0.0;
            if (wet) v = std::max(std::exp(amt_score(t, c)) + cfg.noise_sd * eps, 0.0);
            fine.at_cell(t, c) = static_cast<float>(v);
        }
    out.fine_obs = std::move(fine);

    // biased model precip: upscale the truth, then distort wet values
    GridStack model = upscale_block_mean(out.fine_obs, cfg.precip_factor_lat, cfg.precip_factor_lon);
    model.set_variable("pr_model");
    Rng distort = root.fork(4);
    for (auto& value : model.values()) {
        const double eta = distort.normal();
        if (value > 0.0f)
            value = static_cast<float>(cfg.model_bias_mult * std::pow(static_cast<double>(value), cfg.model_bias_pow) *
                                       std::exp(cfg.model_noise_sd * eta));
    }
    out.model_precip = std::move(model);
    return out;
}

}  // namespace downscale
