#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "compreg/compositions.hpp"
#include "compreg/optimizer.hpp"

namespace compreg {

/// ESOV drops every (observation, component) cell whose observed part is
/// zero from the objective, as the reference R implementation does through
/// `sum(..., na.rm = TRUE)`. ESOVFull keeps the fitted half f log 2 of those
/// cells, i.e. minimises the full divergence sum.
struct ModelKind {
    enum class Tag { ESOV, ESOVFull, Aitchison, MultinomialLogitKL, OLS, WeightedJS, Jeffreys };

    Tag tag = Tag::ESOV;
    double lambda = 0.5; // WeightedJS only

    static ModelKind esov() { return {Tag::ESOV, 0.5}; }
    static ModelKind esov_full() { return {Tag::ESOVFull, 0.5}; }
    static ModelKind aitchison() { return {Tag::Aitchison, 0.5}; }
    static ModelKind kl() { return {Tag::MultinomialLogitKL, 0.5}; }
    static ModelKind ols() { return {Tag::OLS, 0.5}; }
    static ModelKind weighted_js(double lambda);
    static ModelKind jeffreys() { return {Tag::Jeffreys, 0.5}; }

    // Does the response enter through the inverse logit link and an iterative fit?
    bool iterative() const noexcept { return tag != Tag::Aitchison; }
    // Can the objective be evaluated on responses containing zeros?
    bool accepts_zeros() const noexcept { return tag != Tag::Aitchison && tag != Tag::Jeffreys; }

    friend bool operator==(const ModelKind&, const ModelKind&) = default;
};

/// Parses esov | esov-full | aitchison | kl | ols | wjs:LAMBDA | jeffreys.
ModelKind parse_model_kind(std::string_view text);
std::string to_string(const ModelKind& kind);

struct FitOptions {
    // The minimizer is restarted from its own solution until one restart
    // improves the objective by no more than `restart_tolerance`.
    double restart_tolerance = 1e-5;
    int max_restarts = 100;
    // Extra randomly perturbed starts (0 = the single deterministic start).
    int multistart = 0;
    std::uint64_t multistart_seed = 20140101;
    MinimizeOptions minimizer;
};

struct FitResult {
    ModelKind model;
    CoefMatrix coefficients;
    Eigen::MatrixXd fitted;     // n x D, one fitted composition per row
    double objective = 0.0;
    double initial_objective = 0.0;
    int iterations = 0;
    int restarts = 0;
    bool converged = true;
    std::vector<std::string> part_names;
    std::vector<std::string> covariate_names;
};

/// Multinomial-logit inverse link for one design row; component 1 is the baseline.
Composition inverse_link(const CoefMatrix& beta, const Eigen::Ref<const Eigen::VectorXd>& xrow);

/// Row-wise inverse link, n x D.
Eigen::MatrixXd inverse_link_rows(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& design);

/// Sum over observations of a per-component loss between the observed and
/// linked compositions, with its gradient in the coefficients.
class LinkObjective {
public:
    LinkObjective(ModelKind kind, Eigen::MatrixXd responses, Eigen::MatrixXd design);

    double value(const Eigen::MatrixXd& beta) const;
    // `gradient` may be null; otherwise it is resized to beta's shape.
    double value(const Eigen::MatrixXd& beta, Eigen::MatrixXd* gradient) const;

    Eigen::Index coef_rows() const noexcept { return design_.cols(); }
    Eigen::Index coef_cols() const noexcept { return responses_.cols() - 1; }

private:
    ModelKind kind_;
    Eigen::MatrixXd responses_;
    Eigen::MatrixXd design_;
};

/// Least-squares coefficients of alr(responses) on the design. Zero parts are
/// displaced by 1e-6 and re-closed for this computation only.
CoefMatrix alr_ols_start(const CompositionalDataset& data);

void require_full_rank(const Eigen::MatrixXd& design);

FitResult fit(const CompositionalDataset& data, const ModelKind& kind, const FitOptions& options = {});
FitResult fit_esov(const CompositionalDataset& data, const FitOptions& options = {});
FitResult fit_aitchison(const CompositionalDataset& data);
FitResult fit_kl(const CompositionalDataset& data, const FitOptions& options = {});
FitResult fit_ols(const CompositionalDataset& data, const FitOptions& options = {});

/// Fitted compositions for new design rows (intercept column included).
Eigen::MatrixXd predict(const FitResult& fit, const Eigen::MatrixXd& new_design);

/// Principal-component regression on compositional covariates: clr, Helmert
/// rotation, centring, then the leading `k` principal axes.
struct PcrFit {
    FitResult regression;
    Eigen::MatrixXd helmert;    // (Dx-1) x Dx
    Eigen::RowVectorXd center;  // mean of the Helmert coordinates
    Eigen::MatrixXd rotation;   // (Dx-1) x k principal axes
    Eigen::VectorXd variances;  // all Dx-1 component variances, descending
    int k = 0;
};

/// Helmert-rotated clr coordinates, n x (Dx-1).
Eigen::MatrixXd helmert_coordinates(const Eigen::MatrixXd& xcomp);

/// PCA scores of new covariate compositions under a fitted rotation.
Eigen::MatrixXd pcr_scores(const PcrFit& fit, const Eigen::MatrixXd& xcomp);

PcrFit fit_pcr_compositional_covariates(const Eigen::MatrixXd& responses, const Eigen::MatrixXd& xcomp, int k,
                                        const ModelKind& kind, const FitOptions& options = {});

Eigen::MatrixXd predict_pcr(const PcrFit& fit, const Eigen::MatrixXd& xcomp);

} // namespace compreg
