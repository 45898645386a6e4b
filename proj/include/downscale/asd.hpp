#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "downscale/calendar.hpp"
#include "downscale/elastic_net.hpp"
#include "downscale/logistic.hpp"
#include "downscale/ols.hpp"
#include "downscale/preprocess.hpp"
#include "downscale/svm.hpp"

namespace downscale {

struct HyperParams {
    double lambda1 = 1.0;  // elastic-net l1
    double lambda2 = 1.0;  // elastic-net l2
    double svr_c = 1.0;
    double svr_epsilon = 0.1;
    double mssl_lambda = 0.1;  // precision-matrix l1
    double mssl_gamma = 0.1;   // weight-matrix l1
    double rain_threshold = 0.5;
    double wet_day_cutoff = 1.0;  // mm/day
    double cls_lambda1 = 0.1;     // classifier l1 where applicable

    void validate() const {
        if (lambda1 < 0 || lambda2 < 0 || mssl_lambda < 0 || mssl_gamma < 0 || cls_lambda1 < 0)
            throw std::invalid_argument("penalties must be >= 0");
        if (svr_c <= 0 || svr_epsilon < 0) throw std::invalid_argument("SVR needs C > 0 and epsilon >= 0");
        if (rain_threshold < 0 || rain_threshold > 1)
            throw std::invalid_argument("rain threshold must be in [0, 1]");
        if (wet_day_cutoff < 0) throw std::invalid_argument("wet-day cutoff must be >= 0");
    }
};

enum class ClassifierKind { Logistic, L1Logistic, Svc };
enum class RegressorKind { Ols, ElasticNet, Svr };

inline const char* classifier_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::Logistic: return "logistic";
        case ClassifierKind::L1Logistic: return "l1-logistic";
        default: return "svc";
    }
}

inline const char* regressor_name(RegressorKind k) {
    switch (k) {
        case RegressorKind::Ols: return "ols";
        case RegressorKind::ElasticNet: return "elastic-net";
        default: return "svr";
    }
}

// shared feature map: optional standardization, optional PCA truncation
struct FeaturePipeline {
    bool standardize = true;
    bool use_pca = false;
    double pca_var_frac = 0.98;

    std::optional<Standardizer> scaler;
    std::optional<PcaBasis> pca;

    void fit(const Mat& x) {
        if (standardize) scaler = standardize_fit(x);
        if (use_pca) pca = pca_fit(standardize ? standardize_apply(x, *scaler) : x, pca_var_frac);
    }

    Mat transform(const Mat& x) const {
        Mat z = standardize ? standardize_apply(x, *scaler) : x;
        if (use_pca) z = pca_transform(z, *pca);
        return z;
    }
};

// occurrence classifier x amount regressor behind one prediction rule:
// 0 where P(rainy) < threshold, otherwise the regressed amount floored at 0
struct AsdModel {
    ClassifierKind classifier_kind = ClassifierKind::Logistic;
    RegressorKind regressor_kind = RegressorKind::Ols;
    FeaturePipeline pipeline;
    Vec cls_w;
    double cls_b = 0;
    Vec reg_w;
    double reg_b = 0;
    HyperParams hyper;
    Season season = Season::DJF;
    bool cls_converged = true;
    bool reg_flag = false;  // rank deficiency or non-convergence

    Vec rain_probability(const Mat& x_raw) const {
        const Mat z = pipeline.transform(x_raw);
        Vec p = (z * cls_w).array() + cls_b;
        for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = sigmoid(p(i));
        return p;
    }

    Vec amount(const Mat& x_raw) const {
        const Mat z = pipeline.transform(x_raw);
        return (z * reg_w).array() + reg_b;
    }
};

inline AsdModel asd_fit(const Mat& x, const Vec& y_precip, ClassifierKind cls, RegressorKind reg,
                        const HyperParams& hyper, FeaturePipeline pipeline = {}) {
    hyper.validate();
    if (x.rows() != y_precip.size()) throw std::invalid_argument("asd_fit: row count mismatch");

    Vec labels(y_precip.size());
    Eigen::Index n_wet = 0;
    for (Eigen::Index i = 0; i < y_precip.size(); ++i) {
        labels(i) = y_precip(i) >= hyper.wet_day_cutoff ? 1.0 : 0.0;
        n_wet += labels(i) > 0.5;
    }
    if (n_wet < 10) throw std::runtime_error("asd_fit: fewer than 10 wet days in training window");

    AsdModel model;
    model.classifier_kind = cls;
    model.regressor_kind = reg;
    model.hyper = hyper;
    model.pipeline = std::move(pipeline);
    model.pipeline.fit(x);
    const Mat z = model.pipeline.transform(x);

    switch (cls) {
        case ClassifierKind::Logistic: {
            const LogisticModel c = logistic_fit(z, labels);
            model.cls_w = c.w;
            model.cls_b = c.b;
            model.cls_converged = c.converged;
            break;
        }
        case ClassifierKind::L1Logistic: {
            const L1LogisticModel c = l1_logistic_fit(z, labels, hyper.cls_lambda1);
            model.cls_w = c.w;
            model.cls_b = c.b;
            model.cls_converged = c.converged;
            break;
        }
        case ClassifierKind::Svc: {
            const SvcModel c = svc_fit(z, labels, hyper.svr_c);
            model.cls_w = c.w;
            model.cls_b = c.b;
            model.cls_converged = c.converged;
            break;
        }
    }

    // amount stage conditions on observed wet days, not classified ones
    Mat zw(n_wet, z.cols());
    Vec yw(n_wet);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < y_precip.size(); ++i)
        if (labels(i) > 0.5) {
            zw.row(r) = z.row(i);
            yw(r) = y_precip(i);
            ++r;
        }

    switch (reg) {
        case RegressorKind::Ols: {
            const OlsResult f = ols_fit(zw, yw);
            model.reg_w = f.coef;
            model.reg_b = f.intercept;
            model.reg_flag = f.rank_deficient;
            break;
        }
        case RegressorKind::ElasticNet: {
            const ElasticNetResult f = elasticnet_fit(zw, yw, hyper.lambda1, hyper.lambda2);
            model.reg_w = f.coef;
            model.reg_b = f.intercept;
            model.reg_flag = !f.converged;
            break;
        }
        case RegressorKind::Svr: {
            const SvrModel f = svr_fit(zw, yw, hyper.svr_c, hyper.svr_epsilon);
            model.reg_w = f.w;
            model.reg_b = f.b;
            model.reg_flag = !f.converged;
            break;
        }
    }
    return model;
}

inline Vec asd_predict(const AsdModel& model, const Mat& x_raw) {
    const Vec p = model.rain_probability(x_raw);
    const Vec a = model.amount(x_raw);
    Vec out(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i)
        out(i) = p(i) < model.hyper.rain_threshold ? 0.0 : std::max(a(i), 0.0);
    return out;
}

}  // namespace downscale
