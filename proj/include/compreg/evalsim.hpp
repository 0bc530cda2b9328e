#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compreg/compositions.hpp"
#include "compreg/models.hpp"
#include "compreg/zeros.hpp"

namespace compreg {

struct ZeroInjection {
    int component_count = 2;
    double row_fraction = 0.5;
};

struct SimConfig {
    int n = 50;
    int parts = 6;       // D
    int covariates = 2;  // p, intercept excluded
    int replications = 200;
    std::optional<ZeroInjection> zero_injection;
    std::uint64_t seed = 1;
    int workers = 0;     // 0 = one per hardware thread
    double delta_fraction = 0.65;

    void validate() const;
};

/// 2, 4 and 6 zero-bearing components for D = 6, 11 and 16.
int default_zero_components(int parts);

struct GeneratedData {
    CompositionalDataset data;
    CoefMatrix coefficients;
    Eigen::VectorXd variances;
};

/// alr-space normal regression mapped to the simplex. B ~ N(0, 1) entrywise,
/// diagonal variances ~ Exp(1), covariates ~ N(0, 1). `noise_scale` = 0 puts
/// every response exactly on the model surface.
GeneratedData generate_logistic_normal(const SimConfig& config, std::uint64_t seed, double noise_scale = 1.0);

/// Row i holds the prediction for design row i from the fit without row i.
Eigen::MatrixXd loocv_predictions(const CompositionalDataset& data, const ModelKind& kind,
                                  const ZeroPolicy& zero_policy, const FitOptions& options = {});

/// Sum over i of KL(y_i, prediction of the fit without row i). The zero policy
/// is applied to the training rows of each fold only.
double loocv_kl(const CompositionalDataset& data, const ModelKind& kind, const ZeroPolicy& zero_policy,
                const FitOptions& options = {});

struct SimReport {
    SimConfig config;
    // Indexed by replication; empty where the replication failed.
    std::vector<std::optional<double>> esov_scores;
    std::vector<std::optional<double>> aitchison_scores;
    std::vector<std::string> failures;
    int valid_replications = 0;
    double win_proportion = 0.0;
    double mean_esov = 0.0;
    double mean_aitchison = 0.0;
};

SimReport run_comparison(const SimConfig& config);

struct DensityCurve {
    std::string estimator;
    double bandwidth = 0.0;
    std::vector<double> x;
    std::vector<double> density;
};

double silverman_bandwidth(std::span<const double> sample);
std::vector<double> gaussian_kde(std::span<const double> sample, double bandwidth, std::span<const double> grid);

/// Gaussian kernel densities of both estimators' scores on one shared grid.
std::vector<DensityCurve> kl_density_summary(const SimReport& report, int grid_points = 512);

double loocv_kl_pcr(const Eigen::MatrixXd& responses, const Eigen::MatrixXd& xcomp, int k, const ModelKind& kind,
                    const ZeroPolicy& zero_policy, const FitOptions& options = {});

struct PcrSelection {
    int best_k = 0;
    std::vector<double> scores; // scores[k-1]
};

/// Choose the number of principal components by LOOCV KL.
PcrSelection select_pcr_components(const Eigen::MatrixXd& responses, const Eigen::MatrixXd& xcomp,
                                   const ModelKind& kind, const ZeroPolicy& zero_policy,
                                   const FitOptions& options = {});

} // namespace compreg
