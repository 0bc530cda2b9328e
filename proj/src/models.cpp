#include "compreg/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "compreg/divergences.hpp"
#include "compreg/rng.hpp"

namespace compreg {

namespace {

constexpr double kStartDisplacement = 1e-6;

// Loss of one component and its derivative in the fitted part f.
struct ComponentLoss {
    double value;
    double slope;
};

ComponentLoss component_loss(const ModelKind& kind, double y, double f)
{
    switch (kind.tag) {
    case ModelKind::Tag::ESOV:
        if (y == 0.0) {
            return {0.0, 0.0};
        }
        return {terms::esov(y, f), f > 0.0 ? std::log(2.0 * f / (y + f)) : 0.0};
    case ModelKind::Tag::ESOVFull:
        return {terms::esov(y, f), f > 0.0 ? std::log(2.0 * f / (y + f)) : 0.0};
    case ModelKind::Tag::WeightedJS: {
        const double lambda = kind.lambda;
        if (!(f > 0.0)) {
            return {terms::weighted_js(y, f, lambda), 0.0};
        }
        const double share = y / (y + f);
        return {terms::weighted_js(y, f, lambda),
                -lambda * share + (1.0 - lambda) * (std::log(2.0 * f / (y + f)) + share)};
    }
    case ModelKind::Tag::MultinomialLogitKL:
        return {terms::kl(y, f), f > 0.0 ? -y / f : 0.0};
    case ModelKind::Tag::Jeffreys:
        return {terms::jeffreys(y, f), f > 0.0 && y > 0.0 ? -y / f + std::log(f / y) + 1.0 : 0.0};
    case ModelKind::Tag::OLS:
        return {(y - f) * (y - f), -2.0 * (y - f)};
    case ModelKind::Tag::Aitchison:
        break;
    }
    throw Error(ErrorCode::InvalidConfig, "the Aitchison model has no link objective");
}

// Softmax of (0, eta) with the row maximum subtracted first.
template <typename Eta, typename Out>
void link_row(const Eta& eta, Out&& out)
{
    const double shift = std::max(0.0, eta.size() > 0 ? eta.maxCoeff() : 0.0);
    out[0] = std::exp(-shift);
    for (Eigen::Index k = 0; k < eta.size(); ++k) {
        out[k + 1] = std::exp(eta[k] - shift);
    }
    out /= out.sum();
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& beta)
{
    return Eigen::Map<const Eigen::VectorXd>(beta.data(), beta.size());
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& x, Eigen::Index rows, Eigen::Index cols)
{
    return Eigen::Map<const Eigen::MatrixXd>(x.data(), rows, cols);
}

struct RestartOutcome {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    int restarts = 0;
    bool converged = false;
};

RestartOutcome minimize_with_restarts(const SmoothObjective& objective, const Eigen::VectorXd& start,
                                      const FitOptions& options)
{
    RestartOutcome out;
    MinimizeResult run = minimize_bfgs(objective, start, options.minimizer);
    out.iterations = run.iterations;
    double previous = run.value;
    run = minimize_bfgs(objective, run.x, options.minimizer);
    out.iterations += run.iterations;
    out.restarts = 1;
    out.converged = true;
    while (previous - run.value > options.restart_tolerance) {
        if (out.restarts >= options.max_restarts) {
            out.converged = false;
            break;
        }
        previous = run.value;
        run = minimize_bfgs(objective, run.x, options.minimizer);
        out.iterations += run.iterations;
        ++out.restarts;
    }
    out.x = std::move(run.x);
    out.value = run.value;
    return out;
}

void require_zero_free(const CompositionalDataset& data, const ModelKind& kind)
{
    if (!kind.accepts_zeros() && data.has_zeros()) {
        throw Error(ErrorCode::ZeroPart, "the " + to_string(kind) +
                                             " model needs strictly positive responses; "
                                             "pass --zero-replace multiplicative");
    }
}

FitResult fit_iterative(const CompositionalDataset& data, const ModelKind& kind, const FitOptions& options)
{
    require_zero_free(data, kind);
    require_full_rank(data.design());

    const LinkObjective link(kind, data.responses(), data.design());
    const Eigen::Index rows = link.coef_rows();
    const Eigen::Index cols = link.coef_cols();
    const SmoothObjective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* gradient) {
        const Eigen::MatrixXd beta = unflatten(x, rows, cols);
        if (!gradient) {
            return link.value(beta);
        }
        Eigen::MatrixXd grad;
        const double value = link.value(beta, &grad);
        *gradient = flatten(grad);
        return value;
    };

    const Eigen::VectorXd start = flatten(alr_ols_start(data).values);
    const double initial = objective(start, nullptr);
    RestartOutcome best = minimize_with_restarts(objective, start, options);

    if (options.multistart > 0) {
        Rng rng(options.multistart_seed);
        for (int s = 0; s < options.multistart; ++s) {
            Eigen::VectorXd perturbed = start;
            for (Eigen::Index j = 0; j < perturbed.size(); ++j) {
                perturbed[j] += rng.normal();
            }
            RestartOutcome candidate = minimize_with_restarts(objective, perturbed, options);
            const int iterations = best.iterations + candidate.iterations;
            if (candidate.value < best.value) {
                best = std::move(candidate);
            }
            best.iterations = iterations;
        }
    }

    FitResult result;
    result.model = kind;
    result.coefficients.values = unflatten(best.x, rows, cols);
    result.fitted = inverse_link_rows(result.coefficients.values, data.design());
    // Every link loss is a divergence; drop negative rounding residue.
    result.objective = std::max(0.0, link.value(result.coefficients.values));
    result.initial_objective = initial;
    result.iterations = best.iterations;
    result.restarts = best.restarts;
    result.converged = best.converged;
    result.part_names = data.part_names();
    result.covariate_names = data.covariate_names();
    return result;
}

} // namespace

ModelKind ModelKind::weighted_js(double lambda)
{
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw Error(ErrorCode::InvalidLambda, "lambda must lie in [0, 1]");
    }
    return {Tag::WeightedJS, lambda};
}

ModelKind parse_model_kind(std::string_view text)
{
    if (text == "esov") return ModelKind::esov();
    if (text == "esov-full") return ModelKind::esov_full();
    if (text == "aitchison") return ModelKind::aitchison();
    if (text == "kl") return ModelKind::kl();
    if (text == "ols") return ModelKind::ols();
    if (text == "jeffreys") return ModelKind::jeffreys();
    if (text.starts_with("wjs:")) {
        const std::string number(text.substr(4));
        std::size_t used = 0;
        double lambda = 0.0;
        try {
            lambda = std::stod(number, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != number.size()) {
            throw Error(ErrorCode::InvalidLambda, "cannot parse lambda in '" + std::string(text) + "'");
        }
        return ModelKind::weighted_js(lambda);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown model '" + std::string(text) + "'");
}

std::string to_string(const ModelKind& kind)
{
    switch (kind.tag) {
    case ModelKind::Tag::ESOV: return "esov";
    case ModelKind::Tag::ESOVFull: return "esov-full";
    case ModelKind::Tag::Aitchison: return "aitchison";
    case ModelKind::Tag::MultinomialLogitKL: return "kl";
    case ModelKind::Tag::OLS: return "ols";
    case ModelKind::Tag::Jeffreys: return "jeffreys";
    case ModelKind::Tag::WeightedJS: {
        std::ostringstream out;
        out.precision(17);
        out << "wjs:" << kind.lambda;
        return out.str();
    }
    }
    return "unknown";
}

Composition inverse_link(const CoefMatrix& beta, const Eigen::Ref<const Eigen::VectorXd>& xrow)
{
    if (beta.rows() != xrow.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "design row has " + std::to_string(xrow.size()) + " entries, coefficients expect " +
                        std::to_string(beta.rows()));
    }
    const Eigen::RowVectorXd eta = xrow.transpose() * beta.values;
    Eigen::RowVectorXd parts(eta.size() + 1);
    link_row(eta, parts);
    return Composition(Eigen::VectorXd(parts.transpose()));
}

Eigen::MatrixXd inverse_link_rows(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& design)
{
    if (beta.rows() != design.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "design has " + std::to_string(design.cols()) + " columns, coefficients expect " +
                        std::to_string(beta.rows()));
    }
    const Eigen::MatrixXd eta = design * beta;
    Eigen::MatrixXd fitted(design.rows(), beta.cols() + 1);
    for (Eigen::Index i = 0; i < design.rows(); ++i) {
        link_row(eta.row(i), fitted.row(i));
    }
    return fitted;
}

LinkObjective::LinkObjective(ModelKind kind, Eigen::MatrixXd responses, Eigen::MatrixXd design)
    : kind_(kind), responses_(std::move(responses)), design_(std::move(design))
{
    if (!kind_.iterative()) {
        throw Error(ErrorCode::InvalidConfig, "the Aitchison model has no link objective");
    }
    if (responses_.rows() != design_.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "responses and design have different row counts");
    }
}

double LinkObjective::value(const Eigen::MatrixXd& beta) const
{
    return value(beta, nullptr);
}

double LinkObjective::value(const Eigen::MatrixXd& beta, Eigen::MatrixXd* gradient) const
{
    if (beta.rows() != coef_rows() || beta.cols() != coef_cols()) {
        throw Error(ErrorCode::DimensionMismatch, "coefficient matrix has the wrong shape");
    }
    const Eigen::Index n = responses_.rows();
    const Eigen::Index parts = responses_.cols();
    const Eigen::MatrixXd eta = design_ * beta;

    Eigen::MatrixXd eta_grad;
    if (gradient) {
        eta_grad.resize(n, parts - 1);
    }
    Eigen::RowVectorXd f(parts);
    Eigen::RowVectorXd slope(parts);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        link_row(eta.row(i), f);
        for (Eigen::Index j = 0; j < parts; ++j) {
            const ComponentLoss loss = component_loss(kind_, responses_(i, j), f[j]);
            total += loss.value;
            slope[j] = loss.slope;
        }
        if (gradient) {
            // Softmax Jacobian: d eta_k = f_k (slope_k - sum_j f_j slope_j).
            const double mean_slope = f.dot(slope);
            for (Eigen::Index k = 1; k < parts; ++k) {
                eta_grad(i, k - 1) = f[k] * (slope[k] - mean_slope);
            }
        }
    }
    if (gradient) {
        *gradient = design_.transpose() * eta_grad;
    }
    return total;
}

void require_full_rank(const Eigen::MatrixXd& design)
{
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) {
        throw Error(ErrorCode::SingularDesign,
                    "design matrix has rank " + std::to_string(qr.rank()) + " < " +
                        std::to_string(design.cols()) + " columns");
    }
}

CoefMatrix alr_ols_start(const CompositionalDataset& data)
{
    Eigen::MatrixXd y = data.responses();
    if (data.has_zeros()) {
        y.array() += kStartDisplacement;
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            y.row(i) /= y.row(i).sum();
        }
    }
    const Eigen::MatrixXd z = alr_rows(y);
    return CoefMatrix{data.design().colPivHouseholderQr().solve(z)};
}

FitResult fit(const CompositionalDataset& data, const ModelKind& kind, const FitOptions& options)
{
    if (kind.tag == ModelKind::Tag::Aitchison) {
        return fit_aitchison(data);
    }
    return fit_iterative(data, kind, options);
}

FitResult fit_esov(const CompositionalDataset& data, const FitOptions& options)
{
    return fit_iterative(data, ModelKind::esov(), options);
}

FitResult fit_kl(const CompositionalDataset& data, const FitOptions& options)
{
    return fit_iterative(data, ModelKind::kl(), options);
}

FitResult fit_ols(const CompositionalDataset& data, const FitOptions& options)
{
    return fit_iterative(data, ModelKind::ols(), options);
}

FitResult fit_aitchison(const CompositionalDataset& data)
{
    require_zero_free(data, ModelKind::aitchison());
    require_full_rank(data.design());

    const Eigen::MatrixXd z = alr_rows(data.responses());
    FitResult result;
    result.model = ModelKind::aitchison();
    result.coefficients.values = data.design().colPivHouseholderQr().solve(z);
    result.fitted = inverse_link_rows(result.coefficients.values, data.design());
    result.objective = (z - data.design() * result.coefficients.values).squaredNorm();
    result.initial_objective = result.objective;
    result.part_names = data.part_names();
    result.covariate_names = data.covariate_names();
    return result;
}

Eigen::MatrixXd predict(const FitResult& fit, const Eigen::MatrixXd& new_design)
{
    return inverse_link_rows(fit.coefficients.values, new_design);
}

Eigen::MatrixXd helmert_coordinates(const Eigen::MatrixXd& xcomp)
{
    return clr_rows(xcomp) * helmert_submatrix(xcomp.cols()).transpose();
}

Eigen::MatrixXd pcr_scores(const PcrFit& fit, const Eigen::MatrixXd& xcomp)
{
    if (xcomp.cols() != fit.helmert.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "covariate compositions have the wrong number of parts");
    }
    const Eigen::MatrixXd coords = clr_rows(xcomp) * fit.helmert.transpose();
    return (coords.rowwise() - fit.center) * fit.rotation;
}

PcrFit fit_pcr_compositional_covariates(const Eigen::MatrixXd& responses, const Eigen::MatrixXd& xcomp, int k,
                                        const ModelKind& kind, const FitOptions& options)
{
    if (xcomp.rows() != responses.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "responses and covariates have different row counts");
    }
    const Eigen::MatrixXd checked = validate_compositions(xcomp);
    if (!(checked.array() > 0.0).all()) {
        throw Error(ErrorCode::ZeroPart, "compositional covariates must not contain zeros");
    }
    const Eigen::Index axes = checked.cols() - 1;
    if (k < 1 || k > axes) {
        throw Error(ErrorCode::InvalidK, "k must lie in [1, " + std::to_string(axes) + "]");
    }

    PcrFit out;
    out.k = k;
    out.helmert = helmert_submatrix(checked.cols());
    const Eigen::MatrixXd coords = clr_rows(checked) * out.helmert.transpose();
    out.center = coords.colwise().mean();
    const Eigen::MatrixXd centered = coords.rowwise() - out.center;
    const Eigen::MatrixXd covariance =
        centered.transpose() * centered / static_cast<double>(std::max<Eigen::Index>(1, centered.rows() - 1));

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(covariance);
    // Eigen sorts ascending; take axes largest-first and fix each sign so the
    // largest-magnitude loading is positive.
    out.variances.resize(axes);
    Eigen::MatrixXd axes_sorted(axes, axes);
    for (Eigen::Index c = 0; c < axes; ++c) {
        const Eigen::Index src = axes - 1 - c;
        out.variances[c] = eigen.eigenvalues()[src];
        Eigen::VectorXd v = eigen.eigenvectors().col(src);
        Eigen::Index lead = 0;
        v.cwiseAbs().maxCoeff(&lead);
        if (v[lead] < 0.0) {
            v = -v;
        }
        axes_sorted.col(c) = v;
    }
    out.rotation = axes_sorted.leftCols(k);

    const Eigen::MatrixXd scores = centered * out.rotation;
    std::vector<std::string> names{"(Intercept)"};
    for (int c = 1; c <= k; ++c) {
        names.push_back("PC" + std::to_string(c));
    }
    const CompositionalDataset data(responses, with_intercept(scores), {}, names);
    out.regression = fit(data, kind, options);
    return out;
}

Eigen::MatrixXd predict_pcr(const PcrFit& fit, const Eigen::MatrixXd& xcomp)
{
    return predict(fit.regression, with_intercept(pcr_scores(fit, xcomp)));
}

} // namespace compreg
