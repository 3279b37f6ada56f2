#include "hjb/terminal_cost.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hjb/errors.hpp"

namespace hjb {
namespace {

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double to_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw ConfigError("");
        return v;
    } catch (...) {
        throw ConfigError("cost parameter '" + key + "' is not a number: '" + text + "'");
    }
}

std::map<std::string, std::string> parse_params(const std::string& body) {
    std::map<std::string, std::string> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("cost parameter '" + item + "' must be key=value");
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

}  // namespace

TerminalCost TerminalCost::clamp_linear(double slope, double cap) {
    if (!(slope > 0.0) || !(cap > 0.0)) throw ConfigError("clamp cost needs slope > 0 and cap > 0");
    TerminalCost g;
    g.kind_ = Kind::ClampLinear;
    g.slope_ = slope;
    g.cap_ = cap;
    g.lower_ = -cap;
    g.upper_ = cap;
    return g;
}

TerminalCost TerminalCost::constant(double c) {
    if (!std::isfinite(c)) throw ConfigError("constant cost must be finite");
    TerminalCost g;
    g.kind_ = Kind::Constant;
    g.constant_ = c;
    g.lower_ = c;
    g.upper_ = c;
    return g;
}

TerminalCost TerminalCost::gaussian_bump(double height, double width, std::vector<double> center) {
    if (!std::isfinite(height) || !(width > 0.0)) throw ConfigError("bump cost needs finite height and width > 0");
    TerminalCost g;
    g.kind_ = Kind::GaussianBump;
    g.height_ = height;
    g.width_ = width;
    g.center_ = std::move(center);
    g.lower_ = std::min(0.0, -height);
    g.upper_ = std::max(0.0, -height);
    return g;
}

TerminalCost TerminalCost::tabulated(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() < 2 || xs.size() != ys.size()) throw ConfigError("tabulated cost needs >= 2 (x, g) samples");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw ConfigError("tabulated cost abscissae must be strictly increasing");
    for (double y : ys)
        if (!std::isfinite(y)) throw ConfigError("tabulated cost values must be finite");
    TerminalCost g;
    g.kind_ = Kind::Tabulated;
    g.lower_ = *std::min_element(ys.begin(), ys.end());
    g.upper_ = *std::max_element(ys.begin(), ys.end());
    g.xs_ = std::move(xs);
    g.ys_ = std::move(ys);
    return g;
}

TerminalCost TerminalCost::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);

    if (name == "clamp" || name == "clamp-linear") {
        const auto p = parse_params(body);
        double slope = 1.0;
        double cap = 1.0;
        for (const auto& [k, v] : p) {
            if (k == "slope") slope = to_double(k, v);
            else if (k == "cap") cap = to_double(k, v);
            else throw ConfigError("unknown clamp parameter '" + k + "'");
        }
        return clamp_linear(slope, cap);
    }
    if (name == "const" || name == "constant") {
        if (body.empty()) throw ConfigError("constant cost needs a value, e.g. const:0.5");
        const auto eq = body.find('=');
        return constant(to_double("c", eq == std::string::npos ? body : body.substr(eq + 1)));
    }
    if (name == "bump" || name == "gaussian-bump") {
        const auto p = parse_params(body);
        double height = 1.0;
        double width = 0.5;
        std::vector<double> center;
        for (const auto& [k, v] : p) {
            if (k == "height") height = to_double(k, v);
            else if (k == "width") width = to_double(k, v);
            else if (k == "center") {
                std::stringstream ss(v);
                std::string c;
                while (std::getline(ss, c, ';')) center.push_back(to_double(k, c));
            } else throw ConfigError("unknown bump parameter '" + k + "'");
        }
        return gaussian_bump(height, width, std::move(center));
    }
    if (name == "table" || name == "tabulated") {
        std::ifstream in(body);
        if (!in) throw ConfigError("cannot open tabulated cost file '" + body + "'");
        std::vector<double> xs;
        std::vector<double> ys;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ls(line);
            double x = 0.0;
            double y = 0.0;
            if (!(ls >> x >> y)) {
                if (xs.empty()) continue;  // header row
                throw ConfigError("malformed row in tabulated cost file: '" + line + "'");
            }
            xs.push_back(x);
            ys.push_back(y);
        }
        auto g = tabulated(std::move(xs), std::move(ys));
        g.table_source_ = body;
        return g;
    }
    throw ConfigError("unknown terminal cost '" + text + "' (expected clamp, const, bump, table)");
}

double TerminalCost::operator()(std::span<const double> x) const {
    switch (kind_) {
    case Kind::Constant:
        return constant_;
    case Kind::ClampLinear: {
        double v = 1.0;
        for (double xi : x) v *= std::clamp(slope_ * xi, -cap_, cap_);
        // keep the range [-cap, cap] in every dimension
        for (std::size_t i = 1; i < x.size(); ++i) v /= cap_;
        return v;
    }
    case Kind::GaussianBump: {
        double r2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double c = i < center_.size() ? center_[i] : 0.0;
            r2 += (x[i] - c) * (x[i] - c);
        }
        return -height_ * std::exp(-r2 / (2.0 * width_ * width_));
    }
    case Kind::Tabulated: {
        if (x.size() != 1) throw DimensionMismatch("tabulated cost is one-dimensional");
        const double s = x[0];
        if (s <= xs_.front()) return ys_.front();
        if (s >= xs_.back()) return ys_.back();
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), s);
        const std::size_t k = static_cast<std::size_t>(it - xs_.begin());
        const double w = (s - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
        return (1.0 - w) * ys_[k - 1] + w * ys_[k];
    }
    }
    return 0.0;
}

double TerminalCost::bound() const noexcept { return std::max(std::abs(lower_), std::abs(upper_)); }

double TerminalCost::lipschitz(std::size_t dim) const {
    switch (kind_) {
    case Kind::Constant:
        return 0.0;
    case Kind::ClampLinear:
        return slope_ * std::sqrt(static_cast<double>(dim));
    case Kind::GaussianBump:
        return std::abs(height_) / width_ * std::exp(-0.5);
    case Kind::Tabulated: {
        double l = 0.0;
        for (std::size_t i = 1; i < xs_.size(); ++i)
            l = std::max(l, std::abs(ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]));
        return l;
    }
    }
    return 0.0;
}

std::string TerminalCost::describe() const {
    switch (kind_) {
    case Kind::Constant:
        return "const:" + format_number(constant_);
    case Kind::ClampLinear:
        return "clamp:slope=" + format_number(slope_) + ",cap=" + format_number(cap_);
    case Kind::GaussianBump: {
        std::string s = "bump:height=" + format_number(height_) + ",width=" + format_number(width_);
        if (!center_.empty()) {
            s += ",center=";
            for (std::size_t i = 0; i < center_.size(); ++i) s += (i ? ";" : "") + format_number(center_[i]);
        }
        return s;
    }
    case Kind::Tabulated:
        return "table:" + table_source_;
    }
    return "";
}

}  // namespace hjb
