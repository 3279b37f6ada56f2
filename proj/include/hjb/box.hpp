#pragma once

#include <cstddef>
#include <vector>

#include "hjb/errors.hpp"

namespace hjb {

/// Axis-aligned box [lo_1, hi_1] x ... x [lo_N, hi_N].
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box() = default;
    Box(std::vector<double> lower, std::vector<double> upper) : lo(std::move(lower)), hi(std::move(upper)) {
        if (lo.empty() || lo.size() != hi.size())
            throw ConfigError("box bounds must be non-empty and of equal dimension");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i])) throw ConfigError("box requires lo < hi on every axis");
    }

    /// The cube [a, b]^dim.
    static Box cube(std::size_t dim, double a, double b) {
        return Box(std::vector<double>(dim, a), std::vector<double>(dim, b));
    }

    std::size_t dim() const noexcept { return lo.size(); }
    double width(std::size_t axis) const { return hi[axis] - lo[axis]; }

    bool contains(const std::vector<double>& x) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
};

}  // namespace hjb
