#include "compreg/zeros.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "compreg/rng.hpp"

namespace compreg {

ZeroPolicy ZeroPolicy::multiplicative(double delta_fraction)
{
    if (!(delta_fraction > 0.0 && delta_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidFraction, "delta fraction must lie in (0, 1)");
    }
    return {Strategy::Multiplicative, delta_fraction};
}

Eigen::MatrixXd replace_zeros(const Eigen::MatrixXd& compositions, const ZeroPolicy& policy)
{
    if (!policy.replaces()) {
        throw Error(ErrorCode::InvalidConfig, "replace_zeros needs a multiplicative policy");
    }
    if (!(policy.delta_fraction > 0.0 && policy.delta_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidFraction, "delta fraction must lie in (0, 1)");
    }
    const Eigen::Index n = compositions.rows();
    const Eigen::Index parts = compositions.cols();

    std::vector<double> delta(static_cast<std::size_t>(parts), std::numeric_limits<double>::quiet_NaN());
    for (Eigen::Index j = 0; j < parts; ++j) {
        double smallest = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = compositions(i, j);
            if (v > 0.0 && v < smallest) {
                smallest = v;
            }
        }
        if (std::isfinite(smallest)) {
            delta[static_cast<std::size_t>(j)] = policy.delta_fraction * smallest;
        }
    }

    Eigen::MatrixXd out = compositions;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(compositions.row(i).array() == 0.0).any()) {
            continue;
        }
        if (!(compositions.row(i).array() > 0.0).any()) {
            throw Error(ErrorCode::AllZeroRow, "row " + std::to_string(i) + " is all zero");
        }
        double replaced = 0.0;
        for (Eigen::Index j = 0; j < parts; ++j) {
            if (compositions(i, j) == 0.0) {
                const double d = delta[static_cast<std::size_t>(j)];
                if (std::isnan(d)) {
                    throw Error(ErrorCode::ZeroPart,
                                "component " + std::to_string(j + 1) + " has no positive value to scale from");
                }
                out(i, j) = d;
                replaced += d;
            }
        }
        if (!(replaced < 1.0)) {
            throw Error(ErrorCode::ZeroPart, "replacement values in row " + std::to_string(i) + " sum to >= 1");
        }
        for (Eigen::Index j = 0; j < parts; ++j) {
            if (compositions(i, j) > 0.0) {
                out(i, j) = compositions(i, j) * (1.0 - replaced);
            }
        }
    }
    return out;
}

Eigen::MatrixXd inject_zeros(const Eigen::MatrixXd& compositions, int component_count, double row_fraction,
                             std::uint64_t rng_seed)
{
    const Eigen::Index parts = compositions.cols();
    if (component_count < 1 || component_count >= parts) {
        throw Error(ErrorCode::InvalidConfig, "zero-bearing component count must lie in [1, D-1]");
    }
    if (!(row_fraction > 0.0 && row_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidFraction, "zero probability must lie in (0, 1)");
    }
    Rng rng(rng_seed);
    Eigen::MatrixXd out = compositions;
    const Eigen::Index first = parts - component_count;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        Eigen::RowVectorXd row = out.row(i);
        bool changed = false;
        // One draw per designated entry, always consumed, so the stream
        // position does not depend on the data.
        for (Eigen::Index j = first; j < parts; ++j) {
            if (rng.uniform() < row_fraction && row[j] != 0.0) {
                row[j] = 0.0;
                changed = true;
            }
        }
        if (!changed) {
            continue;
        }
        if (!(row.array() > 0.0).any()) {
            Eigen::Index largest = 0;
            out.row(i).maxCoeff(&largest);
            row[largest] = out(i, largest);
        }
        out.row(i) = row / row.sum();
    }
    return out;
}

} // namespace compreg
