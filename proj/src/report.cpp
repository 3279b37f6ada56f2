#include "hjb/report.hpp"

#include <cstdio>

#include "hjb/errors.hpp"

namespace hjb {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_metadata(std::ostream& os, const Metadata& meta) {
    os << "# hjb " << meta.command << "\n";
    os << "# schema = " << kSchema << "\n";
    for (const auto& [k, v] : meta.config) os << "# " << k << " = " << v << "\n";
}

void write_csv_row(std::ostream& os, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        os << format_number(row[i]);
    }
    os << '\n';
}

void write_csv_header(std::ostream& os, const Metadata& meta, const std::vector<std::string>& columns) {
    write_metadata(os, meta);
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
}

nlohmann::ordered_json json_envelope(const Metadata& meta) {
    nlohmann::ordered_json j;
    j["schema"] = kSchema;
    j["command"] = meta.command;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta.config) cfg[k] = v;
    j["config"] = std::move(cfg);
    return j;
}

void write_field_csv(std::ostream& os, const ValueField& field, const Metadata& meta) {
    std::vector<std::string> cols;
    for (std::size_t a = 0; a < field.dim(); ++a) cols.push_back("x" + std::to_string(a + 1));
    cols.push_back("t");
    cols.push_back("v");
    write_csv_header(os, meta, cols);
    std::vector<double> row(field.dim() + 2);
    for (std::size_t k = 0; k <= field.nt(); ++k) {
        for (std::size_t node = 0; node < field.nodes(); ++node) {
            const auto x = field.node_point(node);
            std::copy(x.begin(), x.end(), row.begin());
            row[field.dim()] = field.time(k);
            row[field.dim() + 1] = field.at(k, node);
            write_csv_row(os, row);
        }
    }
}

void write_field_matrix(std::ostream& os, const ValueField& field, std::size_t slice, const Metadata& meta) {
    if (slice > field.nt()) throw ConfigError("slice index beyond nt");
    write_metadata(os, meta);
    os << "# slice = " << slice << ", t = " << format_number(field.time(slice)) << "\n";
    const auto values = field.slice(slice);
    if (field.dim() == 1) {
        for (std::size_t i = 0; i < field.nodes(); ++i)
            os << format_number(field.coord(0, i)) << ' ' << format_number(values[i]) << '\n';
    } else if (field.dim() == 2) {
        const std::size_t n1 = field.nx()[0];
        for (std::size_t j = 0; j < field.nx()[1]; ++j) {
            for (std::size_t i = 0; i < n1; ++i) os << (i ? " " : "") << format_number(values[j * n1 + i]);
            os << '\n';
        }
    } else {
        throw ConfigError("matrix output supports 1D and 2D fields only");
    }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Metadata& meta) {
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
    std::vector<std::string> cols{"t"};
    for (std::size_t a = 0; a < n; ++a) cols.push_back("x" + std::to_string(a + 1));
    cols.push_back("running_cost");
    write_csv_header(os, meta, cols);
    std::vector<double> row;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        row.assign(1, traj.times[i]);
        for (std::size_t a = 0; a < n; ++a) row.push_back(traj.states[i][a]);
        row.push_back(traj.running_cost[i]);
        write_csv_row(os, row);
    }
}

void write_peakon_csv(std::ostream& os, const PeakonFlow& flow, const Metadata& meta) {
    const std::size_t n = flow.states.empty() ? 0 : flow.states.front().q.size();
    std::vector<std::string> cols{"t"};
    for (std::size_t a = 0; a < n; ++a) cols.push_back("q" + std::to_string(a + 1));
    for (std::size_t a = 0; a < n; ++a) cols.push_back("p" + std::to_string(a + 1));
    cols.push_back("H");
    write_csv_header(os, meta, cols);
    std::vector<double> row;
    for (const auto& s : flow.states) {
        row.assign(1, s.t);
        row.insert(row.end(), s.q.begin(), s.q.end());
        row.insert(row.end(), s.p.begin(), s.p.end());
        row.push_back(s.h);
        write_csv_row(os, row);
    }
}

}  // namespace hjb
