#include "compreg/divergences.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace compreg {

namespace {

void require_same_size(const Composition& x, const Composition& y)
{
    if (x.size() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "compositions have " + std::to_string(x.size()) + " and " +
                        std::to_string(y.size()) + " parts");
    }
}

template <typename Term>
double sum_terms(const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& y, Term term)
{
    double total = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        total += term(x[j], y[j]);
    }
    return total;
}

} // namespace

DivergenceKind DivergenceKind::weighted_js(double lambda)
{
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw Error(ErrorCode::InvalidLambda, "lambda must lie in [0, 1]");
    }
    return {Tag::WeightedJS, lambda};
}

std::string to_string(const DivergenceKind& kind)
{
    switch (kind.tag) {
    case DivergenceKind::Tag::ESOV: return "esov";
    case DivergenceKind::Tag::KL: return "kl";
    case DivergenceKind::Tag::WeightedJS: {
        std::ostringstream out;
        out << "wjs:" << kind.lambda;
        return out.str();
    }
    case DivergenceKind::Tag::Jeffreys: return "jeffreys";
    case DivergenceKind::Tag::Hellinger: return "hellinger";
    case DivergenceKind::Tag::ChiSquare: return "chisq";
    }
    return "unknown";
}

double esov(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y)
{
    // Rounding can leave the sum an ulp outside the attainable range.
    return std::clamp(sum_terms(x, y, terms::esov), 0.0, 2.0 * std::numbers::ln2);
}

double kl(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y)
{
    return std::max(0.0, sum_terms(x, y, terms::kl));
}

double esov(const Composition& x, const Composition& y)
{
    require_same_size(x, y);
    return esov(x.parts(), y.parts());
}

double esov_phi_form(const Composition& x, const Composition& y)
{
    require_same_size(x, y);
    // f(t) = t log(2t / (1 + t)) + log(2 / (1 + t)), summed as y_j f(x_j / y_j).
    double total = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (!(y[j] > 0.0)) {
            throw Error(ErrorCode::ZeroPart, "phi-form needs strictly positive denominators");
        }
        const double t = x[j] / y[j];
        const double f = (t == 0.0 ? 0.0 : t * std::log(2.0 * t / (1.0 + t))) + std::log(2.0 / (1.0 + t));
        total += y[j] * f;
    }
    return total;
}

double kl(const Composition& x, const Composition& y)
{
    require_same_size(x, y);
    return kl(x.parts(), y.parts());
}

double weighted_js(const Composition& x, const Composition& y, double lambda)
{
    require_same_size(x, y);
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw Error(ErrorCode::InvalidLambda, "lambda must lie in [0, 1]");
    }
    return sum_terms(x.parts(), y.parts(),
                     [lambda](double a, double b) { return terms::weighted_js(a, b, lambda); });
}

double jeffreys(const Composition& x, const Composition& y)
{
    require_same_size(x, y);
    return sum_terms(x.parts(), y.parts(), terms::jeffreys);
}

double hellinger(const Composition& x, const Composition& y)
{
    require_same_size(x, y);
    const double squared = sum_terms(x.parts(), y.parts(), [](double a, double b) {
        const double diff = std::sqrt(a) - std::sqrt(b);
        return diff * diff;
    });
    return std::sqrt(squared / 2.0);
}

double chi_square(const Composition& x, const Composition& y)
{
    require_same_size(x, y);
    return sum_terms(x.parts(), y.parts(), terms::chi_square);
}

double divergence(const DivergenceKind& kind, const Composition& x, const Composition& y)
{
    switch (kind.tag) {
    case DivergenceKind::Tag::ESOV: return esov(x, y);
    case DivergenceKind::Tag::KL: return kl(x, y);
    case DivergenceKind::Tag::WeightedJS: return weighted_js(x, y, kind.lambda);
    case DivergenceKind::Tag::Jeffreys: return jeffreys(x, y);
    case DivergenceKind::Tag::Hellinger: return hellinger(x, y);
    case DivergenceKind::Tag::ChiSquare: return chi_square(x, y);
    }
    return 0.0;
}

} // namespace compreg
