// compreg: fit, predict, simulate and plot from the command line.
//
// Failures print one line, `error code=<Code> message="..."`, to stderr and
// exit 2 (validation), 3 (numerical) or 4 (I/O).

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "compreg/divergences.hpp"
#include "compreg/evalsim.hpp"
#include "compreg/io.hpp"
#include "compreg/plot.hpp"
#include "compreg/rng.hpp"
#include "compreg/zeros.hpp"

using namespace compreg;

namespace {

struct DataFlags {
    std::string input;
    std::string parts;
    std::string covariates;
    bool log_covariates = false;
    bool close = false;
    std::string layout;
};

struct ZeroFlags {
    std::string zero_replace;
    double delta_fraction = 0.65;
    int inject_zeros = 0;
    double zero_prob = 0.5;
    std::uint64_t seed = 1;
};

void add_data_flags(CLI::App* cmd, DataFlags& flags)
{
    cmd->add_option("--input", flags.input, "CSV file with a header row")->required();
    cmd->add_option("--parts", flags.parts, "comma-separated response columns");
    cmd->add_option("--covariates", flags.covariates, "comma-separated covariate columns (default: all others)");
    cmd->add_flag("--log-covariates", flags.log_covariates, "use the natural log of each covariate");
    cmd->add_flag("--close", flags.close, "close each response row to unit sum (percentages, counts)");
    cmd->add_option("--layout", flags.layout,
                    "column preset; arctic-lake = parts sand,silt,clay closed, covariate log(depth)")
        ->check(CLI::IsMember({"arctic-lake"}));
}

// Fills parts/covariates from --layout and checks that parts were given.
DataFlags resolve_layout(DataFlags flags)
{
    if (flags.layout == "arctic-lake") {
        if (!flags.parts.empty() || !flags.covariates.empty()) {
            throw Error(ErrorCode::InvalidConfig, "--layout arctic-lake fixes --parts and --covariates");
        }
        flags.parts = "sand,silt,clay";
        flags.covariates = "depth";
        flags.log_covariates = true;
        flags.close = true;
    }
    if (flags.parts.empty()) {
        throw Error(ErrorCode::InvalidConfig, "--parts is required (or pass --layout)");
    }
    return flags;
}

void add_zero_flags(CLI::App* cmd, ZeroFlags& flags)
{
    cmd->add_option("--zero-replace", flags.zero_replace, "zero replacement before fitting")
        ->check(CLI::IsMember({"multiplicative"}));
    cmd->add_option("--delta-fraction", flags.delta_fraction, "multiplicative replacement fraction")
        ->capture_default_str();
    cmd->add_option("--inject-zeros", flags.inject_zeros, "zero the last K parts at random before fitting");
    cmd->add_option("--zero-prob", flags.zero_prob, "per-entry zeroing probability for --inject-zeros")
        ->capture_default_str();
    cmd->add_option("--seed", flags.seed, "seed for --inject-zeros")->capture_default_str();
}

std::string format_number(double v)
{
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.10g", v);
    return buffer;
}

// `flags` must already have been through resolve_layout.
CompositionalDataset load_dataset(const DataFlags& flags, io::CsvTable* table_out = nullptr)
{
    const io::CsvTable table = io::read_csv(flags.input);
    const std::vector<std::string> parts = io::split_list(flags.parts);
    const std::vector<std::string> covs = io::covariate_columns(table, parts, io::split_list(flags.covariates));
    CompositionalDataset data = io::dataset_from_table(table, parts, covs, flags.log_covariates, flags.close);
    if (table_out) {
        *table_out = table;
    }
    return data;
}

CompositionalDataset apply_zero_flags(const CompositionalDataset& data, const ZeroFlags& flags)
{
    CompositionalDataset out = data;
    if (flags.inject_zeros > 0) {
        out = out.with_responses(inject_zeros(out.responses(), flags.inject_zeros, flags.zero_prob, flags.seed));
    }
    if (!flags.zero_replace.empty() && out.has_zeros()) {
        out = out.with_responses(replace_zeros(out.responses(), ZeroPolicy::multiplicative(flags.delta_fraction)));
    }
    return out;
}

double mean_kl(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& fitted)
{
    double total = 0.0;
    for (Eigen::Index i = 0; i < observed.rows(); ++i) {
        total += kl(Eigen::VectorXd(observed.row(i).transpose()), Eigen::VectorXd(fitted.row(i).transpose()));
    }
    return total / static_cast<double>(observed.rows());
}

int cmd_fit(const DataFlags& raw_data_flags, const ZeroFlags& zero_flags, const std::string& model_text,
            int multistart, const std::string& out)
{
    const DataFlags data_flags = resolve_layout(raw_data_flags);
    const ModelKind kind = parse_model_kind(model_text);
    if (zero_flags.delta_fraction <= 0.0 || zero_flags.delta_fraction >= 1.0) {
        throw Error(ErrorCode::InvalidFraction, "--delta-fraction must lie in (0, 1)");
    }
    const CompositionalDataset data = apply_zero_flags(load_dataset(data_flags), zero_flags);
    if (!kind.accepts_zeros() && data.has_zeros()) {
        throw Error(ErrorCode::ZeroPart, "the " + to_string(kind) +
                                             " model cannot fit responses with zeros; pass --zero-replace "
                                             "multiplicative (or use --model esov)");
    }
    FitOptions options;
    options.multistart = multistart;
    const FitResult result = fit(data, kind, options);

    const std::string json = io::fit_to_json(result, data_flags.log_covariates).dump(2) + "\n";
    if (!out.empty()) {
        io::write_text(out, json);
    }
    std::cout << "model " << to_string(kind) << "\n"
              << "objective " << format_number(result.objective) << "\n"
              << "mean_kl " << format_number(mean_kl(data.responses(), result.fitted)) << "\n"
              << "converged " << (result.converged ? "true" : "false") << "\n";
    if (out.empty()) {
        std::cout << json;
    }
    return 0;
}

Eigen::MatrixXd design_for_fit(const io::CsvTable& table, const nlohmann::json& doc, const FitResult& model)
{
    std::vector<std::string> covs(model.covariate_names.begin() + 1, model.covariate_names.end());
    return io::design_from_table(table, covs, io::fit_uses_log_covariates(doc));
}

nlohmann::json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, "'" + path + "' is not valid JSON: " + e.what());
    }
}

int cmd_predict(const std::string& fit_path, const std::string& input, const std::string& out)
{
    const nlohmann::json doc = read_json(fit_path);
    const FitResult model = io::fit_from_json(doc);
    const io::CsvTable table = io::read_csv(input);
    const Eigen::MatrixXd predicted = predict(model, design_for_fit(table, doc, model));
    const std::string csv = io::format_csv(model.part_names, predicted);
    if (out.empty()) {
        std::cout << csv;
    } else {
        io::write_text(out, csv);
    }
    return 0;
}

struct SimFlags {
    int n = 50;
    int parts = 6;
    int covariates = 2;
    int reps = 200;
    std::uint64_t seed = 1;
    bool zeros = false;
    int inject_zeros = 0;
    double zero_prob = 0.5;
    double delta_fraction = 0.65;
    int workers = 0;
    bool grid = false;
    std::string out;
    std::string csv;
    std::string density;
    std::string dataset_out;
};

SimConfig config_from(const SimFlags& flags, int n, int parts)
{
    SimConfig config;
    config.n = n;
    config.parts = parts;
    config.covariates = flags.covariates;
    config.replications = flags.reps;
    config.seed = flags.seed;
    config.workers = flags.workers;
    config.delta_fraction = flags.delta_fraction;
    if (flags.zeros || flags.inject_zeros > 0) {
        const int count = flags.inject_zeros > 0 ? flags.inject_zeros : default_zero_components(std::max(parts, 2));
        config.zero_injection = ZeroInjection{count, flags.zero_prob};
    }
    return config;
}

int cmd_simulate(const SimFlags& flags)
{
    if (flags.grid) {
        const std::vector<int> ns{25, 50, 75, 100};
        const std::vector<int> ds{6, 11, 16};
        std::vector<SimConfig> configs;
        for (int n : ns) {
            for (int d : ds) {
                configs.push_back(config_from(flags, n, d));
                configs.back().validate();
            }
        }
        nlohmann::json reports = nlohmann::json::array();
        std::string csv = "n,D,win_proportion,valid_replications,failed_replications,mean_esov,mean_aitchison\n";
        std::vector<double> wins;
        for (const SimConfig& config : configs) {
            const SimReport report = run_comparison(config);
            wins.push_back(report.win_proportion);
            reports.push_back(io::report_to_json(report));
            csv += std::to_string(config.n) + "," + std::to_string(config.parts) + "," +
                   format_number(report.win_proportion) + "," + std::to_string(report.valid_replications) + "," +
                   std::to_string(report.failures.size()) + "," + format_number(report.mean_esov) + "," +
                   format_number(report.mean_aitchison) + "\n";
        }
        std::cout << "Proportion of replications where ES-OV has the smaller LOOCV KL ("
                  << (flags.zeros || flags.inject_zeros > 0 ? "zero values" : "no zero values") << ", "
                  << flags.reps << " replications)\n";
        std::cout << "             Number of components\n";
        std::cout << "Sample sizes     6      11      16\n";
        for (std::size_t r = 0; r < ns.size(); ++r) {
            char line[96];
            std::snprintf(line, sizeof(line), "n=%-10d %6.3f  %6.3f  %6.3f\n", ns[r], wins[r * 3], wins[r * 3 + 1],
                          wins[r * 3 + 2]);
            std::cout << line;
        }
        if (!flags.out.empty()) {
            io::write_text(flags.out, nlohmann::json{{"format", "compreg-simgrid"}, {"version", 1},
                                                     {"reports", reports}}
                                              .dump(2) +
                                          "\n");
        }
        if (!flags.csv.empty()) {
            io::write_text(flags.csv, csv);
        }
        return 0;
    }

    const SimConfig config = config_from(flags, flags.n, flags.parts);
    config.validate();
    if (!flags.dataset_out.empty()) {
        const GeneratedData gen = generate_logistic_normal(config, derive_seed(config.seed, 0));
        CompositionalDataset data = gen.data;
        if (config.zero_injection) {
            data = data.with_responses(inject_zeros(data.responses(), config.zero_injection->component_count,
                                                    config.zero_injection->row_fraction,
                                                    derive_seed(config.seed, 1)));
        }
        std::vector<std::string> header = data.part_names();
        header.insert(header.end(), data.covariate_names().begin() + 1, data.covariate_names().end());
        Eigen::MatrixXd values(data.n(), data.parts() + data.design_cols() - 1);
        values << data.responses(), data.design().rightCols(data.design_cols() - 1);
        io::write_text(flags.dataset_out, io::format_csv(header, values));
    }
    const SimReport report = run_comparison(config);
    if (!flags.out.empty()) {
        io::write_text(flags.out, io::report_to_json(report).dump(2) + "\n");
    }
    if (!flags.csv.empty()) {
        io::write_text(flags.csv, io::report_to_csv(report));
    }
    if (!flags.density.empty()) {
        io::write_text(flags.density, io::density_to_json(kl_density_summary(report)).dump(2) + "\n");
    }
    std::cout << "n " << config.n << " D " << config.parts << " replications " << config.replications
              << (config.zero_injection ? " zeros" : "") << "\n"
              << "win_proportion " << format_number(report.win_proportion) << "\n"
              << "mean_esov " << format_number(report.mean_esov) << "\n"
              << "mean_aitchison " << format_number(report.mean_aitchison) << "\n"
              << "valid_replications " << report.valid_replications << "\n"
              << "failed_replications " << report.failures.size() << "\n";
    for (const std::string& failure : report.failures) {
        std::cerr << "warning: " << failure << "\n";
    }
    return 0;
}

struct PlotFlags {
    std::string fit;
    std::string svg;
    std::string kind = "ternary";
    std::string covariate;
    std::string title;
    int points = 101;
};

int cmd_plot(const DataFlags& raw_data_flags, const PlotFlags& flags)
{
    const DataFlags data_flags = resolve_layout(raw_data_flags);
    io::CsvTable table;
    const std::vector<std::string> parts = io::split_list(data_flags.parts);
    if (flags.kind == "ternary" && parts.size() != 3) {
        throw Error(ErrorCode::NotThreeParts, "ternary diagrams need exactly 3 parts (got " +
                                                  std::to_string(parts.size()) + "); use --kind components");
    }
    const CompositionalDataset data = load_dataset(data_flags, &table);

    std::optional<nlohmann::json> doc;
    std::optional<FitResult> model;
    if (!flags.fit.empty()) {
        doc = read_json(flags.fit);
        model = io::fit_from_json(*doc);
        if (model->part_names.size() != parts.size()) {
            throw Error(ErrorCode::DimensionMismatch, "the fit and --parts have different part counts");
        }
    }

    // The swept covariate: --covariate, else the first covariate of the fit or data.
    const std::vector<std::string>& names = model ? model->covariate_names : data.covariate_names();
    std::string sweep_name = flags.covariate;
    if (sweep_name.empty() && names.size() > 1) {
        sweep_name = names[1];
    }
    Eigen::MatrixXd design = data.design();
    if (model) {
        design = design_for_fit(table, *doc, *model);
    }
    std::optional<plot::CovariateSweep> sweep;
    std::optional<Eigen::MatrixXd> curve;
    Eigen::Index column = 0;
    if (!sweep_name.empty()) {
        const auto it = std::find(names.begin(), names.end(), sweep_name);
        if (it == names.end() || it == names.begin()) {
            throw Error(ErrorCode::InvalidConfig, "unknown covariate '" + sweep_name + "'");
        }
        column = it - names.begin();
    }
    if (model) {
        if (column == 0) {
            throw Error(ErrorCode::InvalidConfig, "the fit has no covariate to sweep");
        }
        sweep = plot::covariate_sweep(design, column, flags.points);
        curve = predict(*model, sweep->design);
    }

    std::string svg;
    if (flags.kind == "ternary") {
        plot::TernaryPlot fig;
        fig.labels = parts;
        fig.points = data.responses();
        fig.curve = curve;
        fig.title = flags.title;
        svg = plot::ternary_svg(fig);
    } else {
        if (column == 0) {
            throw Error(ErrorCode::InvalidConfig, "component panels need a covariate (--covariate)");
        }
        plot::ComponentPanels fig;
        fig.labels = parts;
        const bool logged = model ? io::fit_uses_log_covariates(*doc) : data_flags.log_covariates;
        fig.covariate_label = logged ? "log(" + sweep_name + ")" : sweep_name;
        fig.covariate = design.col(column);
        fig.observed = data.responses();
        if (sweep) {
            fig.curve_covariate = sweep->values;
            fig.curve = curve;
        }
        fig.title = flags.title;
        svg = plot::component_panels_svg(fig);
    }
    io::write_text(flags.svg, svg);
    std::cout << "wrote " << flags.svg << "\n";
    return 0;
}

void report_error(ErrorCode code, const std::string& message)
{
    std::string escaped;
    for (char c : message) {
        if (c == '"' || c == '\\') {
            escaped += '\\';
        }
        escaped += c == '\n' ? ' ' : c;
    }
    std::cerr << "error code=" << to_string(code) << " message=\"" << escaped << "\"\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Divergence-based regression for compositional data"};
    app.require_subcommand(1);

    DataFlags fit_data;
    ZeroFlags fit_zeros;
    std::string model = "esov";
    int multistart = 0;
    std::string fit_out;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a regression model to a CSV dataset");
    add_data_flags(fit_cmd, fit_data);
    add_zero_flags(fit_cmd, fit_zeros);
    fit_cmd->add_option("--model", model, "esov | esov-full | aitchison | kl | ols | wjs:LAMBDA | jeffreys")
        ->capture_default_str();
    fit_cmd->add_option("--multistart", multistart, "extra randomly perturbed starts")->capture_default_str();
    fit_cmd->add_option("--out", fit_out, "write the fit as JSON here (default: stdout)");

    std::string predict_fit;
    std::string predict_input;
    std::string predict_out;
    CLI::App* predict_cmd = app.add_subcommand("predict", "predict compositions for new covariate rows");
    predict_cmd->add_option("--fit", predict_fit, "fit JSON written by `fit`")->required();
    predict_cmd->add_option("--input", predict_input, "CSV with the fit's covariate columns")->required();
    predict_cmd->add_option("--out", predict_out, "output CSV (default: stdout)");

    SimFlags sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo comparison of ES-OV and Aitchison regression");
    sim_cmd->add_option("--n", sim.n, "sample size")->capture_default_str();
    sim_cmd->add_option("--D", sim.parts, "number of components")->capture_default_str();
    sim_cmd->add_option("--p", sim.covariates, "number of covariates")->capture_default_str();
    sim_cmd->add_option("--reps", sim.reps, "replications")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "base seed")->capture_default_str();
    sim_cmd->add_flag("--zeros", sim.zeros, "inject zeros (2, 4, 6 parts for D = 6, 11, 16)");
    sim_cmd->add_option("--inject-zeros", sim.inject_zeros, "number of zero-bearing parts (implies --zeros)");
    sim_cmd->add_option("--zero-prob", sim.zero_prob, "per-entry zeroing probability")->capture_default_str();
    sim_cmd->add_option("--delta-fraction", sim.delta_fraction, "baseline's multiplicative replacement fraction")
        ->capture_default_str();
    sim_cmd->add_option("--workers", sim.workers, "worker threads (0 = hardware concurrency)");
    sim_cmd->add_flag("--grid", sim.grid, "run n = 25..100 by D = 6, 11, 16 and print the table");
    sim_cmd->add_option("--out", sim.out, "report JSON");
    sim_cmd->add_option("--csv", sim.csv, "per-replication scores CSV (grid: one row per cell)");
    sim_cmd->add_option("--density", sim.density, "kernel density curves JSON");
    sim_cmd->add_option("--dataset-out", sim.dataset_out, "write replication 0's dataset as CSV");

    DataFlags plot_data;
    PlotFlags plot_flags;
    CLI::App* plot_cmd = app.add_subcommand("plot", "ternary diagram or per-component panels as SVG");
    add_data_flags(plot_cmd, plot_data);
    plot_cmd->add_option("--fit", plot_flags.fit, "fit JSON; draws the fitted curve over a covariate sweep");
    plot_cmd->add_option("--svg", plot_flags.svg, "output SVG")->required();
    plot_cmd->add_option("--kind", plot_flags.kind, "ternary | components")
        ->check(CLI::IsMember({"ternary", "components"}))
        ->capture_default_str();
    plot_cmd->add_option("--covariate", plot_flags.covariate, "covariate to sweep (default: the first)");
    plot_cmd->add_option("--points", plot_flags.points, "points on the fitted curve")->capture_default_str();
    plot_cmd->add_option("--title", plot_flags.title, "plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error(ErrorCode::InvalidConfig, e.what());
        return 2;
    }

    try {
        if (fit_cmd->parsed()) {
            return cmd_fit(fit_data, fit_zeros, model, multistart, fit_out);
        }
        if (predict_cmd->parsed()) {
            return cmd_predict(predict_fit, predict_input, predict_out);
        }
        if (sim_cmd->parsed()) {
            return cmd_simulate(sim);
        }
        if (plot_cmd->parsed()) {
            return cmd_plot(plot_data, plot_flags);
        }
    } catch (const Error& e) {
        report_error(e.code(), e.what());
        return exit_status(e.code());
    } catch (const std::exception& e) {
        report_error(ErrorCode::IoError, e.what());
        return 4;
    }
    return 2;
}
