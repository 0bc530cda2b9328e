#include "compreg/evalsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "compreg/divergences.hpp"
#include "compreg/rng.hpp"

namespace compreg {

namespace {

Eigen::MatrixXd training_responses(const CompositionalDataset& train, const ZeroPolicy& policy)
{
    if (policy.replaces() && train.has_zeros()) {
        return replace_zeros(train.responses(), policy);
    }
    return train.responses();
}

Error tag_fold(const Error& error, Eigen::Index fold)
{
    return Error(error.code(), "fold " + std::to_string(fold) + ": " + error.what());
}

double quantile(std::vector<double> sorted, double prob)
{
    // Linear interpolation between order statistics (type 7).
    std::sort(sorted.begin(), sorted.end());
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> present(const std::vector<std::optional<double>>& scores)
{
    std::vector<double> out;
    for (const auto& s : scores) {
        if (s) {
            out.push_back(*s);
        }
    }
    return out;
}

} // namespace

void SimConfig::validate() const
{
    if (parts < 2) {
        throw Error(ErrorCode::InvalidDimension, "D must be at least 2");
    }
    if (covariates < 0) {
        throw Error(ErrorCode::InvalidConfig, "covariate count must be non-negative");
    }
    if (n <= covariates + 1) {
        throw Error(ErrorCode::InvalidDimension, "n must exceed p + 1");
    }
    if (replications < 1) {
        throw Error(ErrorCode::InvalidConfig, "replications must be at least 1");
    }
    if (workers < 0) {
        throw Error(ErrorCode::InvalidConfig, "worker count must be non-negative");
    }
    if (!(delta_fraction > 0.0 && delta_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidFraction, "delta fraction must lie in (0, 1)");
    }
    if (zero_injection) {
        if (zero_injection->component_count < 1 || zero_injection->component_count >= parts) {
            throw Error(ErrorCode::InvalidConfig, "zero-bearing component count must lie in [1, D-1]");
        }
        if (!(zero_injection->row_fraction > 0.0 && zero_injection->row_fraction < 1.0)) {
            throw Error(ErrorCode::InvalidFraction, "zero probability must lie in (0, 1)");
        }
    }
}

int default_zero_components(int parts)
{
    return std::clamp(2 * (parts - 1) / 5, 1, std::max(1, parts - 1));
}

GeneratedData generate_logistic_normal(const SimConfig& config, std::uint64_t seed, double noise_scale)
{
    config.validate();
    const int n = config.n;
    const int d = config.parts - 1;
    const int p = config.covariates;
    Rng rng(seed);

    // Draw order is part of the reproducibility contract: B, variances, X, noise.
    Eigen::MatrixXd beta(p + 1, d);
    for (int r = 0; r < p + 1; ++r) {
        for (int c = 0; c < d; ++c) {
            beta(r, c) = rng.normal();
        }
    }
    Eigen::VectorXd variances(d);
    for (int c = 0; c < d; ++c) {
        variances[c] = rng.exponential(1.0);
    }
    Eigen::MatrixXd design(n, p + 1);
    for (int i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        for (int c = 1; c <= p; ++c) {
            design(i, c) = rng.normal();
        }
    }
    Eigen::MatrixXd z = design * beta;
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) {
            z(i, c) += noise_scale * std::sqrt(variances[c]) * rng.normal();
        }
    }

    Eigen::MatrixXd y(n, d + 1);
    for (int i = 0; i < n; ++i) {
        y.row(i) = alr_inverse(z.row(i).transpose()).parts().transpose();
    }
    return GeneratedData{CompositionalDataset(std::move(y), std::move(design)), CoefMatrix{beta}, variances};
}

Eigen::MatrixXd loocv_predictions(const CompositionalDataset& data, const ModelKind& kind,
                                  const ZeroPolicy& zero_policy, const FitOptions& options)
{
    if (data.n() < data.design_cols() + 2) {
        throw Error(ErrorCode::InvalidDimension, "leave-one-out needs n >= p + 3");
    }
    Eigen::MatrixXd predicted(data.n(), data.parts());
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        try {
            const CompositionalDataset fold = data.without_row(i);
            const CompositionalDataset train = fold.with_responses(training_responses(fold, zero_policy));
            const FitResult model = fit(train, kind, options);
            predicted.row(i) = predict(model, data.design().row(i));
        } catch (const Error& error) {
            throw tag_fold(error, i);
        }
    }
    return predicted;
}

double loocv_kl(const CompositionalDataset& data, const ModelKind& kind, const ZeroPolicy& zero_policy,
                const FitOptions& options)
{
    const Eigen::MatrixXd predicted = loocv_predictions(data, kind, zero_policy, options);
    double total = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        total += kl(Eigen::VectorXd(data.responses().row(i).transpose()),
                    Eigen::VectorXd(predicted.row(i).transpose()));
    }
    return total;
}

SimReport run_comparison(const SimConfig& config)
{
    config.validate();
    const auto reps = static_cast<std::size_t>(config.replications);
    SimReport report;
    report.config = config;
    report.esov_scores.assign(reps, std::nullopt);
    report.aitchison_scores.assign(reps, std::nullopt);
    std::vector<std::string> failure_of(reps);

    const auto run_one = [&](std::size_t r) {
        try {
            const GeneratedData generated = generate_logistic_normal(config, derive_seed(config.seed, 2 * r));
            CompositionalDataset data = generated.data;
            if (config.zero_injection) {
                data = data.with_responses(inject_zeros(data.responses(), config.zero_injection->component_count,
                                                        config.zero_injection->row_fraction,
                                                        derive_seed(config.seed, 2 * r + 1)));
            }
            const double esov_score = loocv_kl(data, ModelKind::esov(), ZeroPolicy::none());
            const ZeroPolicy baseline_policy =
                data.has_zeros() ? ZeroPolicy::multiplicative(config.delta_fraction) : ZeroPolicy::none();
            const double aitchison_score = loocv_kl(data, ModelKind::aitchison(), baseline_policy);
            report.esov_scores[r] = esov_score;
            report.aitchison_scores[r] = aitchison_score;
        } catch (const Error& error) {
            failure_of[r] = "replication " + std::to_string(r) + ": " + std::string(to_string(error.code())) +
                            ": " + error.what();
        }
    };

    unsigned workers = config.workers > 0 ? static_cast<unsigned>(config.workers)
                                          : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(reps));
    if (workers <= 1) {
        for (std::size_t r = 0; r < reps; ++r) {
            run_one(r);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < reps; r = next++) {
                    run_one(r);
                }
            });
        }
    }

    int wins = 0;
    double sum_esov = 0.0;
    double sum_aitchison = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        if (!failure_of[r].empty()) {
            report.failures.push_back(failure_of[r]);
            continue;
        }
        ++report.valid_replications;
        sum_esov += *report.esov_scores[r];
        sum_aitchison += *report.aitchison_scores[r];
        if (*report.esov_scores[r] < *report.aitchison_scores[r]) {
            ++wins;
        }
    }
    if (report.valid_replications > 0) {
        const double valid = report.valid_replications;
        report.win_proportion = wins / valid;
        report.mean_esov = sum_esov / valid;
        report.mean_aitchison = sum_aitchison / valid;
    } else {
        report.mean_esov = std::numeric_limits<double>::quiet_NaN();
        report.mean_aitchison = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

double silverman_bandwidth(std::span<const double> sample)
{
    const auto n = static_cast<double>(sample.size());
    if (sample.size() < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (double v : sample) {
        mean += v;
    }
    mean /= n;
    double ss = 0.0;
    for (double v : sample) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    std::vector<double> copy(sample.begin(), sample.end());
    const double iqr = quantile(copy, 0.75) - quantile(copy, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) {
        spread = sd;
    }
    return 0.9 * spread * std::pow(n, -0.2);
}

std::vector<double> gaussian_kde(std::span<const double> sample, double bandwidth, std::span<const double> grid)
{
    const double norm = 1.0 / (static_cast<double>(sample.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
    std::vector<double> density;
    density.reserve(grid.size());
    for (double g : grid) {
        double total = 0.0;
        for (double v : sample) {
            const double u = (g - v) / bandwidth;
            total += std::exp(-0.5 * u * u);
        }
        density.push_back(total * norm);
    }
    return density;
}

std::vector<DensityCurve> kl_density_summary(const SimReport& report, int grid_points)
{
    const std::vector<double> esov_scores = present(report.esov_scores);
    const std::vector<double> aitchison_scores = present(report.aitchison_scores);
    if (esov_scores.size() < 10 || aitchison_scores.size() < 10) {
        throw Error(ErrorCode::InsufficientReplications, "density summary needs at least 10 replications");
    }
    if (grid_points < 2) {
        throw Error(ErrorCode::InvalidConfig, "density grid needs at least 2 points");
    }

    // Degenerate samples (all scores equal) get a narrow kernel at that score.
    const auto bandwidth_of = [](const std::vector<double>& s) {
        const double h = silverman_bandwidth(s);
        if (h > 0.0) {
            return h;
        }
        return 1e-3 * std::max(1.0, std::abs(s.front()));
    };
    const double h_esov = bandwidth_of(esov_scores);
    const double h_aitchison = bandwidth_of(aitchison_scores);
    const double lo = std::min(*std::min_element(esov_scores.begin(), esov_scores.end()) - 5.0 * h_esov,
                               *std::min_element(aitchison_scores.begin(), aitchison_scores.end()) - 5.0 * h_aitchison);
    const double hi = std::max(*std::max_element(esov_scores.begin(), esov_scores.end()) + 5.0 * h_esov,
                               *std::max_element(aitchison_scores.begin(), aitchison_scores.end()) + 5.0 * h_aitchison);
    // The grid must resolve the narrowest kernel for the curves to integrate to one.
    const double h_min = std::min(h_esov, h_aitchison);
    const int needed = static_cast<int>(std::ceil((hi - lo) / (h_min / 4.0))) + 1;
    const int points = std::max(grid_points, std::min(needed, 200001));

    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int g = 0; g < points; ++g) {
        grid[static_cast<std::size_t>(g)] = lo + (hi - lo) * g / (points - 1);
    }
    std::vector<DensityCurve> curves;
    curves.push_back({"esov", h_esov, grid, gaussian_kde(esov_scores, h_esov, grid)});
    curves.push_back({"aitchison", h_aitchison, grid, gaussian_kde(aitchison_scores, h_aitchison, grid)});
    return curves;
}

double loocv_kl_pcr(const Eigen::MatrixXd& responses, const Eigen::MatrixXd& xcomp, int k, const ModelKind& kind,
                    const ZeroPolicy& zero_policy, const FitOptions& options)
{
    const Eigen::Index n = responses.rows();
    if (xcomp.rows() != n) {
        throw Error(ErrorCode::DimensionMismatch, "responses and covariates have different row counts");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        try {
            Eigen::MatrixXd y(n - 1, responses.cols());
            Eigen::MatrixXd x(n - 1, xcomp.cols());
            for (Eigen::Index r = 0, out = 0; r < n; ++r) {
                if (r != i) {
                    y.row(out) = responses.row(r);
                    x.row(out) = xcomp.row(r);
                    ++out;
                }
            }
            if (zero_policy.replaces() && (y.array() == 0.0).any()) {
                y = replace_zeros(y, zero_policy);
            }
            const PcrFit model = fit_pcr_compositional_covariates(y, x, k, kind, options);
            const Eigen::MatrixXd predicted = predict_pcr(model, xcomp.row(i));
            total += kl(Eigen::VectorXd(responses.row(i).transpose()), Eigen::VectorXd(predicted.row(0).transpose()));
        } catch (const Error& error) {
            throw tag_fold(error, i);
        }
    }
    return total;
}

PcrSelection select_pcr_components(const Eigen::MatrixXd& responses, const Eigen::MatrixXd& xcomp,
                                   const ModelKind& kind, const ZeroPolicy& zero_policy, const FitOptions& options)
{
    const int max_k = static_cast<int>(xcomp.cols()) - 1;
    if (max_k < 1) {
        throw Error(ErrorCode::InvalidK, "covariate compositions need at least 2 parts");
    }
    PcrSelection out;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= max_k; ++k) {
        const double score = loocv_kl_pcr(responses, xcomp, k, kind, zero_policy, options);
        out.scores.push_back(score);
        if (score < best) {
            best = score;
            out.best_k = k;
        }
    }
    return out;
}

} // namespace compreg
