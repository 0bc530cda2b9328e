#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "compreg/compositions.hpp"

namespace compreg {

/// Divergences between compositions. Every function treats 0 * log(0 / c) as 0
/// and may return +inf (never an error) when absolute continuity fails.
struct DivergenceKind {
    enum class Tag { ESOV, KL, WeightedJS, Jeffreys, Hellinger, ChiSquare };

    Tag tag = Tag::ESOV;
    double lambda = 0.5; // WeightedJS only

    static DivergenceKind esov() { return {Tag::ESOV, 0.5}; }
    static DivergenceKind kl() { return {Tag::KL, 0.5}; }
    static DivergenceKind weighted_js(double lambda);
    static DivergenceKind jeffreys() { return {Tag::Jeffreys, 0.5}; }
    static DivergenceKind hellinger() { return {Tag::Hellinger, 0.5}; }
    static DivergenceKind chi_square() { return {Tag::ChiSquare, 0.5}; }
};

std::string to_string(const DivergenceKind& kind);

namespace terms {

// Per-component summands. `x` is the first argument of the divergence.

// x log(2x / (x + y)), zero when x == 0.
inline double js_half(double x, double y)
{
    if (x == 0.0) {
        return 0.0;
    }
    return x * std::log(2.0 * x / (x + y));
}

inline double esov(double x, double y)
{
    return js_half(x, y) + js_half(y, x);
}

inline double kl(double x, double y)
{
    if (x == 0.0) {
        return 0.0;
    }
    if (y == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return x * std::log(x / y);
}

inline double weighted_js(double x, double y, double lambda)
{
    return lambda * js_half(x, y) + (1.0 - lambda) * js_half(y, x);
}

inline double jeffreys(double x, double y)
{
    return kl(x, y) + kl(y, x);
}

inline double chi_square(double x, double y)
{
    const double diff = x - y;
    if (diff == 0.0) {
        return 0.0;
    }
    if (y == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return diff * diff / y;
}

} // namespace terms

double esov(const Composition& x, const Composition& y);
double esov_phi_form(const Composition& x, const Composition& y);
double kl(const Composition& x, const Composition& y);
double weighted_js(const Composition& x, const Composition& y, double lambda);
double jeffreys(const Composition& x, const Composition& y);
double hellinger(const Composition& x, const Composition& y);
double chi_square(const Composition& x, const Composition& y);

double divergence(const DivergenceKind& kind, const Composition& x, const Composition& y);

// Same functionals on raw rows; callers guarantee both are compositions.
double esov(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);
double kl(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

} // namespace compreg
