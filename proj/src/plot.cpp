#include "compreg/plot.hpp"

#include <algorithm>
#include <cstdio>

#include "compreg/error.hpp"

namespace compreg::plot {

namespace {

constexpr double kCanvas = 520.0;
constexpr double kMargin = 50.0;
constexpr double kScale = kCanvas - 2.0 * kMargin;

std::string fixed(double v)
{
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.3f", v);
    return buffer;
}

std::string escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Plane coordinates to SVG pixels (y axis points down).
std::string pixel(const PlanePoint& p)
{
    const double top = kMargin + kScale * (1.0 - kTriangleHeight) / 2.0;
    return fixed(kMargin + kScale * p.x) + "," + fixed(top + kScale * (kTriangleHeight - p.y));
}

std::string svg_open(double width, double height)
{
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width) + "\" height=\"" + fixed(height) +
           "\" viewBox=\"0 0 " + fixed(width) + " " + fixed(height) + "\">\n"
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

} // namespace

PlanePoint ternary_vertex(int k)
{
    switch (k) {
    case 0: return {0.0, 0.0};
    case 1: return {1.0, 0.0};
    case 2: return {0.5, kTriangleHeight};
    default: throw Error(ErrorCode::InvalidDimension, "ternary vertex index must be 0, 1 or 2");
    }
}

PlanePoint ternary_point(double w1, double w2, double w3)
{
    const double total = w1 + w2 + w3;
    if (!(total > 0.0) || w1 < 0.0 || w2 < 0.0 || w3 < 0.0) {
        throw Error(ErrorCode::NotOnSimplex, "ternary weights must be non-negative and not all zero");
    }
    return {(w2 + 0.5 * w3) / total, (kTriangleHeight * w3) / total};
}

std::string ternary_svg(const TernaryPlot& plot)
{
    if (plot.points.cols() != 3 || (plot.curve && plot.curve->cols() != 3)) {
        throw Error(ErrorCode::NotThreeParts, "ternary diagrams need exactly 3 parts; use component panels");
    }
    std::string svg = svg_open(kCanvas, kCanvas);
    if (!plot.title.empty()) {
        svg += "<text x=\"" + fixed(kCanvas / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"16\">" + escape(plot.title) + "</text>\n";
    }
    svg += "<polygon points=\"" + pixel(ternary_vertex(0)) + " " + pixel(ternary_vertex(1)) + " " +
           pixel(ternary_vertex(2)) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

    const char* anchors[3] = {"end", "start", "middle"};
    const double dx[3] = {-6.0, 6.0, 0.0};
    const double dy[3] = {14.0, 14.0, -8.0};
    for (int k = 0; k < 3; ++k) {
        const PlanePoint v = ternary_vertex(k);
        const std::string label = k < static_cast<int>(plot.labels.size()) ? plot.labels[static_cast<std::size_t>(k)]
                                                                           : "x" + std::to_string(k + 1);
        const std::string at = pixel(v);
        const auto comma = at.find(',');
        const double px = std::stod(at.substr(0, comma)) + dx[k];
        const double py = std::stod(at.substr(comma + 1)) + dy[k];
        svg += "<text x=\"" + fixed(px) + "\" y=\"" + fixed(py) + "\" text-anchor=\"" + anchors[k] +
               "\" font-family=\"sans-serif\" font-size=\"14\">" + escape(label) + "</text>\n";
    }

    svg += "<g fill=\"steelblue\" stroke=\"none\">\n";
    for (Eigen::Index i = 0; i < plot.points.rows(); ++i) {
        const PlanePoint p = ternary_point(plot.points(i, 0), plot.points(i, 1), plot.points(i, 2));
        const std::string at = pixel(p);
        const auto comma = at.find(',');
        const bool on_edge = (plot.points.row(i).array() == 0.0).any();
        svg += "<circle cx=\"" + at.substr(0, comma) + "\" cy=\"" + at.substr(comma + 1) + "\" r=\"3\"" +
               (on_edge ? " fill=\"firebrick\"" : "") + "/>\n";
    }
    svg += "</g>\n";

    if (plot.curve && plot.curve->rows() > 1) {
        svg += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
        for (Eigen::Index i = 0; i < plot.curve->rows(); ++i) {
            const auto& c = *plot.curve;
            svg += (i ? " " : "") + pixel(ternary_point(c(i, 0), c(i, 1), c(i, 2)));
        }
        svg += "\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string component_panels_svg(const ComponentPanels& panels)
{
    const Eigen::Index parts = panels.observed.cols();
    if (panels.covariate.size() != panels.observed.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "covariate and observations differ in length");
    }
    constexpr double panel = 260.0;
    constexpr double pad = 40.0;
    const int columns = static_cast<int>(std::min<Eigen::Index>(parts, 3));
    const int rows = static_cast<int>((parts + columns - 1) / columns);
    const double width = columns * panel;
    const double height = rows * panel + 30.0;

    double lo = panels.covariate.size() ? panels.covariate.minCoeff() : 0.0;
    double hi = panels.covariate.size() ? panels.covariate.maxCoeff() : 1.0;
    if (panels.curve_covariate && panels.curve_covariate->size()) {
        lo = std::min(lo, panels.curve_covariate->minCoeff());
        hi = std::max(hi, panels.curve_covariate->maxCoeff());
    }
    if (!(hi > lo)) {
        hi = lo + 1.0;
    }
    const double inner = panel - 2.0 * pad;

    std::string svg = svg_open(width, height);
    if (!panels.title.empty()) {
        svg += "<text x=\"" + fixed(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"16\">" + escape(panels.title) + "</text>\n";
    }
    for (Eigen::Index j = 0; j < parts; ++j) {
        const double ox = static_cast<double>(j % columns) * panel;
        const double oy = 30.0 + static_cast<double>(j / columns) * panel;
        const auto px = [&](double v) { return fixed(ox + pad + inner * (v - lo) / (hi - lo)); };
        const auto py = [&](double share) { return fixed(oy + pad + inner * (1.0 - share)); };
        const std::string label = j < static_cast<Eigen::Index>(panels.labels.size())
                                      ? panels.labels[static_cast<std::size_t>(j)]
                                      : "y" + std::to_string(j + 1);
        svg += "<g>\n<rect x=\"" + fixed(ox + pad) + "\" y=\"" + fixed(oy + pad) + "\" width=\"" + fixed(inner) +
               "\" height=\"" + fixed(inner) + "\" fill=\"none\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fixed(ox + panel / 2) + "\" y=\"" + fixed(oy + pad - 8) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + escape(label) + "</text>\n";
        svg += "<text x=\"" + fixed(ox + panel / 2) + "\" y=\"" + fixed(oy + panel - 10) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               escape(panels.covariate_label) + "</text>\n";
        for (Eigen::Index i = 0; i < panels.observed.rows(); ++i) {
            svg += "<circle cx=\"" + px(panels.covariate[i]) + "\" cy=\"" + py(panels.observed(i, j)) +
                   "\" r=\"2.5\" fill=\"steelblue\"/>\n";
        }
        if (panels.curve && panels.curve_covariate) {
            svg += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
            for (Eigen::Index i = 0; i < panels.curve->rows(); ++i) {
                svg += (i ? " " : "") + px((*panels.curve_covariate)[i]) + "," + py((*panels.curve)(i, j));
            }
            svg += "\"/>\n";
        }
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

CovariateSweep covariate_sweep(const Eigen::MatrixXd& design, Eigen::Index column, int points)
{
    if (column < 1 || column >= design.cols()) {
        throw Error(ErrorCode::InvalidConfig, "sweep column must be a non-intercept design column");
    }
    if (points < 2) {
        throw Error(ErrorCode::InvalidConfig, "sweep needs at least 2 points");
    }
    const Eigen::RowVectorXd means = design.colwise().mean();
    const double lo = design.col(column).minCoeff();
    const double hi = design.col(column).maxCoeff();
    CovariateSweep sweep;
    sweep.values.resize(points);
    sweep.design = means.replicate(points, 1);
    sweep.design.col(0).setOnes();
    for (int k = 0; k < points; ++k) {
        const double v = lo + (hi - lo) * static_cast<double>(k) / (points - 1);
        sweep.values[k] = v;
        sweep.design(k, column) = v;
    }
    return sweep;
}

} // namespace compreg::plot
