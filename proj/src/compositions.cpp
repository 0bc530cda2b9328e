#include "compreg/compositions.hpp"

#include <cmath>
#include <string>

namespace compreg {

namespace {

Eigen::VectorXd checked_parts(Eigen::VectorXd parts, Eigen::Index row = -1)
{
    const std::string where = row >= 0 ? " in row " + std::to_string(row) : std::string{};
    if (parts.size() < 2) {
        throw Error(ErrorCode::InvalidDimension, "a composition needs at least 2 parts" + where);
    }
    for (Eigen::Index j = 0; j < parts.size(); ++j) {
        if (!std::isfinite(parts[j])) {
            throw Error(ErrorCode::NonFinite, "non-finite part" + where);
        }
        if (parts[j] < 0.0) {
            throw Error(ErrorCode::NegativeEntry, "negative part" + where);
        }
    }
    const double total = parts.sum();
    const double gap = std::abs(total - 1.0);
    if (gap <= kUnitSumTolerance) {
        return parts;
    }
    if (gap <= kReclosureTolerance) {
        parts /= total;
        return parts;
    }
    throw Error(ErrorCode::NotOnSimplex,
                "parts sum to " + std::to_string(total) + ", not 1" + where);
}

void require_positive(const Eigen::VectorXd& parts, const char* op)
{
    for (Eigen::Index j = 0; j < parts.size(); ++j) {
        if (!(parts[j] > 0.0)) {
            throw Error(ErrorCode::ZeroPart,
                        std::string(op) + " needs strictly positive parts; run zero replacement first");
        }
    }
}

} // namespace

Composition::Composition(Eigen::VectorXd parts) : parts_(checked_parts(std::move(parts))) {}

Composition::Composition(std::initializer_list<double> parts)
    : Composition(Eigen::Map<const Eigen::VectorXd>(parts.begin(), static_cast<Eigen::Index>(parts.size())))
{
}

bool Composition::has_zero() const
{
    return (parts_.array() == 0.0).any();
}

CompositionalDataset::CompositionalDataset(Eigen::MatrixXd responses, Eigen::MatrixXd design,
                                           std::vector<std::string> part_names,
                                           std::vector<std::string> covariate_names)
    : responses_(validate_compositions(std::move(responses))),
      design_(std::move(design)),
      part_names_(std::move(part_names)),
      covariate_names_(std::move(covariate_names))
{
    if (design_.rows() != responses_.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "design and responses have different row counts");
    }
    if (design_.cols() < 1 || !(design_.col(0).array() == 1.0).all()) {
        throw Error(ErrorCode::InvalidDesign, "first design column must be the all-ones intercept");
    }
    if (!design_.allFinite()) {
        throw Error(ErrorCode::NonFinite, "design contains non-finite values");
    }
    if (responses_.rows() <= design_.cols()) {
        throw Error(ErrorCode::InvalidDimension,
                    "need more observations (" + std::to_string(responses_.rows()) +
                        ") than design columns (" + std::to_string(design_.cols()) + ")");
    }
    if (part_names_.empty()) {
        for (Eigen::Index j = 0; j < responses_.cols(); ++j) {
            part_names_.push_back("y" + std::to_string(j + 1));
        }
    }
    if (covariate_names_.empty()) {
        covariate_names_.push_back("(Intercept)");
        for (Eigen::Index j = 1; j < design_.cols(); ++j) {
            covariate_names_.push_back("x" + std::to_string(j));
        }
    }
    if (static_cast<Eigen::Index>(part_names_.size()) != responses_.cols() ||
        static_cast<Eigen::Index>(covariate_names_.size()) != design_.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "name lists do not match the data dimensions");
    }
}

Composition CompositionalDataset::response(Eigen::Index i) const
{
    return Composition(Eigen::VectorXd(responses_.row(i).transpose()));
}

bool CompositionalDataset::has_zeros() const
{
    return (responses_.array() == 0.0).any();
}

CompositionalDataset CompositionalDataset::without_row(Eigen::Index i) const
{
    const Eigen::Index n = responses_.rows();
    Eigen::MatrixXd y(n - 1, responses_.cols());
    Eigen::MatrixXd x(n - 1, design_.cols());
    for (Eigen::Index r = 0, out = 0; r < n; ++r) {
        if (r == i) {
            continue;
        }
        y.row(out) = responses_.row(r);
        x.row(out) = design_.row(r);
        ++out;
    }
    return CompositionalDataset(std::move(y), std::move(x), part_names_, covariate_names_);
}

CompositionalDataset CompositionalDataset::with_responses(Eigen::MatrixXd responses) const
{
    return CompositionalDataset(std::move(responses), design_, part_names_, covariate_names_);
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& covariates)
{
    Eigen::MatrixXd design(covariates.rows(), covariates.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(covariates.cols()) = covariates;
    return design;
}

Eigen::MatrixXd validate_compositions(Eigen::MatrixXd rows)
{
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        rows.row(i) = checked_parts(rows.row(i).transpose(), i).transpose();
    }
    return rows;
}

Composition closure(const Eigen::VectorXd& raw)
{
    for (Eigen::Index j = 0; j < raw.size(); ++j) {
        if (!std::isfinite(raw[j])) {
            throw Error(ErrorCode::NonFinite, "closure input is not finite");
        }
        if (raw[j] < 0.0) {
            throw Error(ErrorCode::NegativeEntry, "closure input has a negative entry");
        }
    }
    const double total = raw.sum();
    if (!(total > 0.0)) {
        throw Error(ErrorCode::AllZeroRow, "closure input is all zero");
    }
    // Points already on the simplex are kept bit-for-bit, so closure is idempotent.
    if (std::abs(total - 1.0) <= kUnitSumTolerance) {
        return Composition(raw);
    }
    return Composition(Eigen::VectorXd(raw / total));
}

Eigen::VectorXd alr(const Composition& y)
{
    const auto& parts = y.parts();
    require_positive(parts, "alr");
    const Eigen::Index d = parts.size() - 1;
    Eigen::VectorXd z(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        z[j] = std::log(parts[j + 1] / parts[0]);
    }
    return z;
}

Composition alr_inverse(const Eigen::VectorXd& z)
{
    if (!z.allFinite()) {
        throw Error(ErrorCode::NonFinite, "alr_inverse input is not finite");
    }
    const double shift = std::max(0.0, z.size() > 0 ? z.maxCoeff() : 0.0);
    Eigen::VectorXd parts(z.size() + 1);
    parts[0] = std::exp(-shift);
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        parts[j + 1] = std::exp(z[j] - shift);
    }
    parts /= parts.sum();
    return Composition(std::move(parts));
}

Eigen::VectorXd clr(const Composition& x)
{
    const auto& parts = x.parts();
    require_positive(parts, "clr");
    Eigen::VectorXd logs = parts.array().log().matrix();
    logs.array() -= logs.mean();
    return logs;
}

Eigen::MatrixXd alr_rows(const Eigen::MatrixXd& y)
{
    if (y.cols() < 2) {
        throw Error(ErrorCode::InvalidDimension, "alr needs at least 2 parts");
    }
    if (!(y.array() > 0.0).all()) {
        throw Error(ErrorCode::ZeroPart, "alr needs strictly positive parts; run zero replacement first");
    }
    Eigen::MatrixXd z(y.rows(), y.cols() - 1);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        for (Eigen::Index j = 1; j < y.cols(); ++j) {
            z(i, j - 1) = std::log(y(i, j) / y(i, 0));
        }
    }
    return z;
}

Eigen::MatrixXd clr_rows(const Eigen::MatrixXd& x)
{
    if (!(x.array() > 0.0).all()) {
        throw Error(ErrorCode::ZeroPart, "clr needs strictly positive parts");
    }
    Eigen::MatrixXd logs = x.array().log().matrix();
    for (Eigen::Index i = 0; i < logs.rows(); ++i) {
        logs.row(i).array() -= logs.row(i).mean();
    }
    return logs;
}

Eigen::MatrixXd helmert_submatrix(Eigen::Index parts)
{
    if (parts < 2) {
        throw Error(ErrorCode::InvalidDimension, "Helmert sub-matrix needs D >= 2");
    }
    // Row k of the standard construction: k ones, then -k, then zeros.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(parts - 1, parts);
    for (Eigen::Index k = 1; k < parts; ++k) {
        h.row(k - 1).head(k).setOnes();
        h(k - 1, k) = -static_cast<double>(k);
    }
    // Modified Gram-Schmidt; the rows are already orthogonal so this only
    // normalises, but it also scrubs any rounding in the dot products.
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
        for (Eigen::Index q = 0; q < r; ++q) {
            h.row(r) -= h.row(r).dot(h.row(q)) * h.row(q);
        }
        h.row(r) /= h.row(r).norm();
    }
    return h;
}

} // namespace compreg
