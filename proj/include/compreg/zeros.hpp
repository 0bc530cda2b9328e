#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "compreg/error.hpp"

namespace compreg {

struct ZeroPolicy {
    enum class Strategy { None, Multiplicative };

    Strategy strategy = Strategy::None;
    double delta_fraction = 0.65;

    static ZeroPolicy none() { return {}; }
    static ZeroPolicy multiplicative(double delta_fraction = 0.65);

    bool replaces() const noexcept { return strategy == Strategy::Multiplicative; }
};

/// Multiplicative replacement: a zero in component j becomes
/// delta_j = delta_fraction * (smallest positive value in column j) and the
/// positive parts of that row are scaled by (1 - sum of its deltas).
/// Rows without zeros are returned untouched.
Eigen::MatrixXd replace_zeros(const Eigen::MatrixXd& compositions, const ZeroPolicy& policy);

/// Zero the last `component_count` components, each entry independently with
/// probability `row_fraction`, then re-close the modified rows. A row whose
/// entries would all vanish keeps its largest part.
Eigen::MatrixXd inject_zeros(const Eigen::MatrixXd& compositions, int component_count, double row_fraction,
                             std::uint64_t rng_seed);

} // namespace compreg
