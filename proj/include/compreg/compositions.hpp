#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "compreg/error.hpp"

namespace compreg {

inline constexpr double kUnitSumTolerance = 1e-10;
// Inputs off the simplex by no more than this are re-closed silently.
inline constexpr double kReclosureTolerance = 1e-6;

/// A point on the simplex: D >= 2 non-negative parts summing to one.
class Composition {
public:
    /// Validates `parts`. A sum within 1e-6 of one is re-closed, anything
    /// further off throws NotOnSimplex.
    explicit Composition(Eigen::VectorXd parts);
    Composition(std::initializer_list<double> parts);

    const Eigen::VectorXd& parts() const noexcept { return parts_; }
    Eigen::Index size() const noexcept { return parts_.size(); }
    double operator[](Eigen::Index j) const { return parts_[j]; }

    bool has_zero() const;

    friend bool operator==(const Composition& a, const Composition& b)
    {
        return a.parts_.size() == b.parts_.size() && a.parts_ == b.parts_;
    }

private:
    Eigen::VectorXd parts_;
};

/// Regression coefficients, (p+1) x (D-1). Column k holds the coefficients
/// of component k+2; component 1 is the baseline with an implicit zero column.
struct CoefMatrix {
    Eigen::MatrixXd values;

    Eigen::Index rows() const noexcept { return values.rows(); }
    Eigen::Index cols() const noexcept { return values.cols(); }
};

/// n compositions (one per row of `responses`) with an n x (p+1) design
/// whose first column is the all-ones intercept.
class CompositionalDataset {
public:
    CompositionalDataset(Eigen::MatrixXd responses, Eigen::MatrixXd design,
                         std::vector<std::string> part_names = {},
                         std::vector<std::string> covariate_names = {});

    const Eigen::MatrixXd& responses() const noexcept { return responses_; }
    const Eigen::MatrixXd& design() const noexcept { return design_; }
    const std::vector<std::string>& part_names() const noexcept { return part_names_; }
    const std::vector<std::string>& covariate_names() const noexcept { return covariate_names_; }

    Eigen::Index n() const noexcept { return responses_.rows(); }
    Eigen::Index parts() const noexcept { return responses_.cols(); }
    // Number of design columns, intercept included (p + 1).
    Eigen::Index design_cols() const noexcept { return design_.cols(); }

    Composition response(Eigen::Index i) const;
    bool has_zeros() const;

    CompositionalDataset without_row(Eigen::Index i) const;
    CompositionalDataset with_responses(Eigen::MatrixXd responses) const;

private:
    Eigen::MatrixXd responses_;
    Eigen::MatrixXd design_;
    std::vector<std::string> part_names_;
    std::vector<std::string> covariate_names_;
};

/// Prepend the intercept column to a covariate matrix.
Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& covariates);

/// Validate every row of `rows` as a composition, re-closing rows within the
/// re-closure tolerance. Throws on the first offending row.
Eigen::MatrixXd validate_compositions(Eigen::MatrixXd rows);

Composition closure(const Eigen::VectorXd& raw);

// Log-ratios use the FIRST component as the base: alr(y) = log(y_{2..D} / y_1).
Eigen::VectorXd alr(const Composition& y);
Composition alr_inverse(const Eigen::VectorXd& z);
Eigen::VectorXd clr(const Composition& x);

/// Row-wise alr of an n x D matrix of strictly positive compositions.
Eigen::MatrixXd alr_rows(const Eigen::MatrixXd& y);
Eigen::MatrixXd clr_rows(const Eigen::MatrixXd& x);

/// (D-1) x D orthonormal Helmert sub-matrix, rows orthogonal to the ones vector.
Eigen::MatrixXd helmert_submatrix(Eigen::Index parts);

} // namespace compreg
