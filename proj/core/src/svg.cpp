#include "magspec/svg.hpp"

#include "magspec/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace magspec {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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

} // namespace

std::string emit_svg(const std::vector<PlotPoint>& rows, const PlotSpec& spec) {
    if (rows.size() < 2) throw InvalidArgument("a plot needs at least two rows");
    for (const auto& p : rows)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidArgument("plot rows must be finite");

    double xmin = rows.front().x, xmax = xmin, ymin = rows.front().y, ymax = ymin;
    for (const auto& p : rows) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    if (spec.reference_y) {
        ymin = std::min(ymin, *spec.reference_y);
        ymax = std::max(ymax, *spec.reference_y);
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    double pad = 0.05 * (ymax - ymin);
    if (pad == 0.0) pad = 0.05 * std::max(1.0, std::abs(ymax));
    ymin -= pad;
    ymax += pad;

    const double W = spec.width, H = spec.height;
    const double left = 70, right = 20, top = 40, bottom = 50;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
    auto py = [&](double y) { return H - bottom - (y - ymin) / (ymax - ymin) * (H - top - bottom); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
         std::to_string(spec.height) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) + "\" fill=\"white\"/>\n";
    s += "<text x=\"" + fmt(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(spec.title) +
         "</text>\n";
    s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(H - bottom) + "\" x2=\"" + fmt(W - right) + "\" y2=\"" +
         fmt(H - bottom) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) + "\" y2=\"" + fmt(H - bottom) +
         "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        double xv = xmin + (xmax - xmin) * k / 4.0;
        double yv = ymin + (ymax - ymin) * k / 4.0;
        char lab[32];
        std::snprintf(lab, sizeof lab, "%.4g", xv);
        s += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(H - bottom + 18) +
             "\" text-anchor=\"middle\" font-size=\"11\">" + lab + "</text>\n";
        std::snprintf(lab, sizeof lab, "%.4g", yv);
        s += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(py(yv) + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
             lab + "</text>\n";
    }
    s += "<text x=\"" + fmt(W / 2) + "\" y=\"" + fmt(H - 10) + "\" text-anchor=\"middle\" font-size=\"12\">" +
         escape(spec.x_label) + "</text>\n";
    s += "<text x=\"16\" y=\"" + fmt(H / 2) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " +
         fmt(H / 2) + ")\">" + escape(spec.y_label) + "</text>\n";
    if (spec.reference_y) {
        char val[32];
        std::snprintf(val, sizeof val, "%.10g", *spec.reference_y);
        double y = py(*spec.reference_y);
        s += "<line class=\"reference\" data-value=\"" + std::string(val) + "\" x1=\"" + fmt(left) + "\" y1=\"" +
             fmt(y) + "\" x2=\"" + fmt(W - right) + "\" y2=\"" + fmt(y) +
             "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
        s += "<text x=\"" + fmt(W - right - 4) + "\" y=\"" + fmt(y - 5) + "\" text-anchor=\"end\" font-size=\"11\">" +
             escape(spec.reference_label) + "</text>\n";
    }
    s += "<polyline class=\"data\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i) s += ' ';
        s += fmt(px(rows[i].x)) + "," + fmt(py(rows[i].y));
    }
    s += "\"/>\n";
    for (const auto& p : rows)
        s += "<circle cx=\"" + fmt(px(p.x)) + "\" cy=\"" + fmt(py(p.y)) + "\" r=\"2.5\" fill=\"steelblue\"/>\n";
    s += "</svg>\n";
    return s;
}

} // namespace magspec
