#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "compreg/compositions.hpp"
#include "compreg/evalsim.hpp"
#include "compreg/models.hpp"

namespace compreg::io {

/// A header row plus string cells; conversion to numbers happens per column.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(std::string_view name) const;
    Eigen::VectorXd numeric_column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

std::string format_csv(const std::vector<std::string>& header, const Eigen::MatrixXd& values);
void write_text(const std::filesystem::path& path, std::string_view text);

std::vector<std::string> split_list(std::string_view text, char sep = ',');

/// Covariate columns: the named ones, or every column that is not a part.
std::vector<std::string> covariate_columns(const CsvTable& table, const std::vector<std::string>& parts,
                                           const std::vector<std::string>& requested = {});

/// n x (p+1) design with intercept; `log_covariates` takes the natural log of
/// each covariate first.
Eigen::MatrixXd design_from_table(const CsvTable& table, const std::vector<std::string>& covariates,
                                  bool log_covariates);

/// Responses closed row-wise when within the re-closure tolerance; raw
/// percentages or counts must be closed by the caller (see `close_rows`).
CompositionalDataset dataset_from_table(const CsvTable& table, const std::vector<std::string>& parts,
                                        const std::vector<std::string>& covariates, bool log_covariates,
                                        bool close_rows = false);

/// The Arctic-lake layout: columns depth, sand, silt, clay (percentages, 39 rows
/// in the published data). Parts are closed row-wise; the covariate is log(depth).
CompositionalDataset arctic_lake_dataset(const CsvTable& table);

std::string covariate_transform_name(bool log_covariates);

nlohmann::json fit_to_json(const FitResult& fit, bool log_covariates = false);
FitResult fit_from_json(const nlohmann::json& doc);
bool fit_uses_log_covariates(const nlohmann::json& doc);

nlohmann::json report_to_json(const SimReport& report);
std::string report_to_csv(const SimReport& report);

nlohmann::json density_to_json(const std::vector<DensityCurve>& curves);

} // namespace compreg::io
