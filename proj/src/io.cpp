#include "compreg/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace compreg::io {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                cell += '"';
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

std::string format_number(double v)
{
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, result.ptr);
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows)
{
    const auto n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index cols = n > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
    Eigen::MatrixXd m(n, cols);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw Error(ErrorCode::ParseError, "ragged matrix in JSON");
        }
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
        }
    }
    return m;
}

nlohmann::json optional_scores(const std::vector<std::optional<double>>& scores)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : scores) {
        if (!s) {
            out.push_back(nullptr);
        } else if (std::isinf(*s)) {
            // JSON has no infinity; null is reserved for failed replications.
            out.push_back("Infinity");
        } else {
            out.push_back(*s);
        }
    }
    return out;
}

} // namespace

std::size_t CsvTable::column_index(std::string_view name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw Error(ErrorCode::InvalidConfig, "no column named '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

Eigen::VectorXd CsvTable::numeric_column(std::string_view name) const
{
    const std::size_t c = column_index(name);
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string& cell = rows[r][c];
        const std::string where = "column '" + std::string(name) + "', data row " + std::to_string(r + 1);
        if (cell.empty() || cell == "NA" || cell == "NaN") {
            throw Error(ErrorCode::ParseError, "missing value in " + where);
        }
        double value = 0.0;
        const char* end = cell.data() + cell.size();
        const auto result = std::from_chars(cell.data(), end, value);
        if (result.ec != std::errc{} || result.ptr != end || !std::isfinite(value)) {
            throw Error(ErrorCode::ParseError, "non-numeric value '" + cell + "' in " + where);
        }
        out[static_cast<Eigen::Index>(r)] = value;
    }
    return out;
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto cells = split_csv_line(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + " has " +
                                                   std::to_string(cells.size()) + " fields, header has " +
                                                   std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) {
        throw Error(ErrorCode::ParseError, "CSV input has no header row");
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str());
}

std::string format_csv(const std::vector<std::string>& header, const Eigen::MatrixXd& values)
{
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        out += (c ? "," : "") + header[c];
    }
    out += '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            out += (j ? "," : "") + format_number(values(i, j));
        }
        out += '\n';
    }
    return out;
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
    }
}

std::vector<std::string> split_list(std::string_view text, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find(sep, start);
        const auto piece = trim(text.substr(start, end == std::string_view::npos ? text.size() - start : end - start));
        if (!piece.empty()) {
            out.push_back(piece);
        }
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return out;
}

std::vector<std::string> covariate_columns(const CsvTable& table, const std::vector<std::string>& parts,
                                           const std::vector<std::string>& requested)
{
    for (const auto& p : parts) {
        table.column_index(p);
    }
    if (!requested.empty()) {
        for (const auto& c : requested) {
            table.column_index(c);
            if (std::find(parts.begin(), parts.end(), c) != parts.end()) {
                throw Error(ErrorCode::InvalidConfig, "column '" + c + "' is both a part and a covariate");
            }
        }
        return requested;
    }
    std::vector<std::string> out;
    for (const auto& name : table.header) {
        if (std::find(parts.begin(), parts.end(), name) == parts.end()) {
            out.push_back(name);
        }
    }
    return out;
}

Eigen::MatrixXd design_from_table(const CsvTable& table, const std::vector<std::string>& covariates,
                                  bool log_covariates)
{
    Eigen::MatrixXd design(static_cast<Eigen::Index>(table.rows.size()),
                           static_cast<Eigen::Index>(covariates.size()) + 1);
    design.col(0).setOnes();
    for (std::size_t c = 0; c < covariates.size(); ++c) {
        Eigen::VectorXd column = table.numeric_column(covariates[c]);
        if (log_covariates) {
            if (!(column.array() > 0.0).all()) {
                throw Error(ErrorCode::InvalidConfig, "log of non-positive covariate '" + covariates[c] + "'");
            }
            column = column.array().log().matrix();
        }
        design.col(static_cast<Eigen::Index>(c) + 1) = column;
    }
    return design;
}

CompositionalDataset dataset_from_table(const CsvTable& table, const std::vector<std::string>& parts,
                                        const std::vector<std::string>& covariates, bool log_covariates,
                                        bool close_rows)
{
    if (parts.size() < 2) {
        throw Error(ErrorCode::InvalidDimension, "need at least 2 part columns");
    }
    Eigen::MatrixXd y(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(parts.size()));
    for (std::size_t j = 0; j < parts.size(); ++j) {
        y.col(static_cast<Eigen::Index>(j)) = table.numeric_column(parts[j]);
    }
    if (close_rows) {
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            y.row(i) = closure(y.row(i).transpose()).parts().transpose();
        }
    }
    std::vector<std::string> names{"(Intercept)"};
    names.insert(names.end(), covariates.begin(), covariates.end());
    return CompositionalDataset(std::move(y), design_from_table(table, covariates, log_covariates), parts,
                                std::move(names));
}

CompositionalDataset arctic_lake_dataset(const CsvTable& table)
{
    return dataset_from_table(table, {"sand", "silt", "clay"}, {"depth"}, true, true);
}

std::string covariate_transform_name(bool log_covariates)
{
    return log_covariates ? "log" : "none";
}

nlohmann::json fit_to_json(const FitResult& fit, bool log_covariates)
{
    nlohmann::json doc;
    doc["format"] = "compreg-fit";
    doc["version"] = 1;
    doc["model"] = to_string(fit.model);
    doc["alr_base"] = "first";
    doc["parts"] = fit.part_names;
    doc["covariates"] = fit.covariate_names;
    doc["covariate_transform"] = covariate_transform_name(log_covariates);
    doc["coefficients"] = {
        {"rows", fit.covariate_names},
        {"columns", std::vector<std::string>(fit.part_names.begin() + (fit.part_names.empty() ? 0 : 1),
                                             fit.part_names.end())},
        {"values", matrix_to_json(fit.coefficients.values)},
    };
    doc["objective"] = fit.objective;
    doc["initial_objective"] = fit.initial_objective;
    doc["diagnostics"] = {
        {"iterations", fit.iterations},
        {"restarts", fit.restarts},
        {"converged", fit.converged},
    };
    doc["n"] = fit.fitted.rows();
    doc["fitted"] = matrix_to_json(fit.fitted);
    return doc;
}

FitResult fit_from_json(const nlohmann::json& doc)
{
    try {
        if (doc.at("format").get<std::string>() != "compreg-fit") {
            throw Error(ErrorCode::ParseError, "not a compreg fit document");
        }
        if (doc.at("alr_base").get<std::string>() != "first") {
            throw Error(ErrorCode::ParseError, "unsupported alr base");
        }
        FitResult fit;
        fit.model = parse_model_kind(doc.at("model").get<std::string>());
        fit.part_names = doc.at("parts").get<std::vector<std::string>>();
        fit.covariate_names = doc.at("covariates").get<std::vector<std::string>>();
        fit.coefficients.values = matrix_from_json(doc.at("coefficients").at("values"));
        if (fit.coefficients.rows() != static_cast<Eigen::Index>(fit.covariate_names.size()) ||
            fit.coefficients.cols() + 1 != static_cast<Eigen::Index>(fit.part_names.size())) {
            throw Error(ErrorCode::ParseError, "coefficient shape does not match names");
        }
        fit.objective = doc.at("objective").get<double>();
        fit.initial_objective = doc.value("initial_objective", fit.objective);
        const auto& diag = doc.at("diagnostics");
        fit.iterations = diag.at("iterations").get<int>();
        fit.restarts = diag.at("restarts").get<int>();
        fit.converged = diag.at("converged").get<bool>();
        if (doc.contains("fitted")) {
            fit.fitted = matrix_from_json(doc.at("fitted"));
        }
        return fit;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed fit document: ") + e.what());
    }
}

bool fit_uses_log_covariates(const nlohmann::json& doc)
{
    return doc.value("covariate_transform", std::string("none")) == "log";
}

nlohmann::json report_to_json(const SimReport& report)
{
    const SimConfig& c = report.config;
    nlohmann::json doc;
    doc["format"] = "compreg-simreport";
    doc["version"] = 1;
    doc["config"] = {
        {"n", c.n},
        {"D", c.parts},
        {"p", c.covariates},
        {"replications", c.replications},
        {"seed", c.seed},
        {"delta_fraction", c.delta_fraction},
        {"zero_injection", c.zero_injection
                               ? nlohmann::json{{"component_count", c.zero_injection->component_count},
                                                {"row_fraction", c.zero_injection->row_fraction}}
                               : nlohmann::json(nullptr)},
    };
    doc["scores"] = {
        {"esov", optional_scores(report.esov_scores)},
        {"aitchison", optional_scores(report.aitchison_scores)},
    };
    doc["mean_scores"] = {{"esov", report.mean_esov}, {"aitchison", report.mean_aitchison}};
    doc["win_proportion"] = report.win_proportion;
    doc["valid_replications"] = report.valid_replications;
    doc["failed_replications"] = report.failures.size();
    doc["failures"] = report.failures;
    return doc;
}

std::string report_to_csv(const SimReport& report)
{
    std::string out = "replication,esov_kl,aitchison_kl,esov_wins\n";
    for (std::size_t r = 0; r < report.esov_scores.size(); ++r) {
        const auto& e = report.esov_scores[r];
        const auto& a = report.aitchison_scores[r];
        out += std::to_string(r) + ",";
        out += (e ? format_number(*e) : std::string("NA")) + ",";
        out += (a ? format_number(*a) : std::string("NA")) + ",";
        out += (e && a) ? (*e < *a ? "1" : "0") : "NA";
        out += '\n';
    }
    return out;
}

nlohmann::json density_to_json(const std::vector<DensityCurve>& curves)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : curves) {
        out.push_back({{"estimator", c.estimator}, {"bandwidth", c.bandwidth}, {"x", c.x}, {"density", c.density}});
    }
    return out;
}

} // namespace compreg::io
