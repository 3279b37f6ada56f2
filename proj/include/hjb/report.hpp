#pragma once

// Output artifacts: CSV with a '#' metadata block, schema-tagged JSON, and
// gnuplot-ready whitespace matrices. Numbers are printed with %.17g so files
// are byte-stable for a fixed configuration.

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hjb/dynamics.hpp"
#include "hjb/grid.hpp"

namespace hjb {

inline constexpr const char* kSchema = "hjb/1";

struct Metadata {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
};

std::string format_number(double v);

void write_metadata(std::ostream& os, const Metadata& meta);
void write_csv_row(std::ostream& os, const std::vector<double>& row);
void write_csv_header(std::ostream& os, const Metadata& meta, const std::vector<std::string>& columns);

/// {"schema", "command", "config"} ready for command-specific fields.
nlohmann::ordered_json json_envelope(const Metadata& meta);

/// Columns x1..xN, t, v with one row per node and slice.
void write_field_csv(std::ostream& os, const ValueField& field, const Metadata& meta);
/// 1D: "x v" lines. 2D: one line per x2 node holding v over x1 (gnuplot
/// `matrix` layout). Higher dimensions are rejected.
void write_field_matrix(std::ostream& os, const ValueField& field, std::size_t slice, const Metadata& meta);

/// Columns t, x1..xN, running_cost.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Metadata& meta);
/// Columns t, q1..qN, p1..pN, H.
void write_peakon_csv(std::ostream& os, const PeakonFlow& flow, const Metadata& meta);

}  // namespace hjb
