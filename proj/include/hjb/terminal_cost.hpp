#pragma once

#include <span>
#include <string>
#include <vector>

namespace hjb {

/// Bounded continuous data g for the terminal (or initial) condition.
///
/// Builtins:
///   clamp-linear  g(x) = prod_i clamp(slope * x_i, -cap, cap); for N = 1 with
///                 slope = cap = 1 this is -1 / x / 1 on (-inf,-1] / (-1,1) / [1,inf).
///   constant      g(x) = c.
///   gaussian-bump g(x) = -height * exp(-|x - center|^2 / (2 width^2)).
///   tabulated     1D samples, linear interpolation, constant extension outside.
class TerminalCost {
public:
    enum class Kind { ClampLinear, Constant, GaussianBump, Tabulated };

    static TerminalCost clamp_linear(double slope = 1.0, double cap = 1.0);
    static TerminalCost constant(double c);
    static TerminalCost gaussian_bump(double height, double width, std::vector<double> center = {});
    static TerminalCost tabulated(std::vector<double> xs, std::vector<double> ys);

    /// Parses "clamp[:slope=..,cap=..]", "const:<c>", "bump[:height=..,width=..,center=a;b]",
    /// or "table:<csv path>" (two columns x,g; '#' lines ignored). Throws ConfigError.
    static TerminalCost parse(const std::string& text);

    double operator()(std::span<const double> x) const;

    Kind kind() const noexcept { return kind_; }
    /// ||g||_inf.
    double bound() const noexcept;
    /// inf g and sup g.
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    /// A Lipschitz constant for g in dimension dim (Euclidean norm).
    double lipschitz(std::size_t dim) const;
    /// Canonical descriptor string; parse(describe()) reproduces the cost.
    std::string describe() const;

private:
    TerminalCost() = default;

    Kind kind_ = Kind::Constant;
    double slope_ = 1.0;
    double cap_ = 1.0;
    double constant_ = 0.0;
    double height_ = 1.0;
    double width_ = 1.0;
    std::vector<double> center_;
    std::vector<double> xs_;
    std::vector<double> ys_;
    std::string table_source_;
    double lower_ = 0.0;
    double upper_ = 0.0;
};

}  // namespace hjb
