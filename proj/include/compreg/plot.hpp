#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace compreg::plot {

// Triangle in the plane: vertex 1 = (0, 0), vertex 2 = (1, 0), vertex 3 = (1/2, sqrt(3)/2).
inline constexpr double kTriangleHeight = std::numbers::sqrt3 / 2.0;

struct PlanePoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

PlanePoint ternary_vertex(int k);

/// Barycentric map of non-negative weights (normalised by their sum).
PlanePoint ternary_point(double w1, double w2, double w3);

struct TernaryPlot {
    std::vector<std::string> labels; // one per vertex
    Eigen::MatrixXd points;          // n x 3 compositions
    std::optional<Eigen::MatrixXd> curve; // m x 3, drawn as a polyline in row order
    std::string title;
};

std::string ternary_svg(const TernaryPlot& plot);

/// One scatter panel per component: covariate against observed share, with
/// the fitted share curve when present.
struct ComponentPanels {
    std::vector<std::string> labels;
    std::string covariate_label;
    Eigen::VectorXd covariate;
    Eigen::MatrixXd observed;            // n x D
    std::optional<Eigen::VectorXd> curve_covariate;
    std::optional<Eigen::MatrixXd> curve; // m x D
    std::string title;
};

std::string component_panels_svg(const ComponentPanels& panels);

/// Design rows sweeping column `column` of `design` over its observed range
/// in increasing order, other covariates held at their means.
struct CovariateSweep {
    Eigen::VectorXd values;
    Eigen::MatrixXd design;
};

CovariateSweep covariate_sweep(const Eigen::MatrixXd& design, Eigen::Index column, int points = 101);

} // namespace compreg::plot
