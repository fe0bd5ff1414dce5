#include "incsel/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "json.hpp"

namespace incsel {

namespace {

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open output file: " + path);
    }
    return out;
}

void close_or_throw(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) {
        throw IoError("write failed for output file: " + path);
    }
}

void write_row(std::ostream& out, const std::vector<double>& row) {
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (j != 0) {
            out << ',';
        }
        out << format_double(row[j]);
    }
    out << '\n';
}

const char* kMomentHeader =
    "t,p_hat,q_hat,var_x,var_l,cov_xl,se_p,se_q,se_var_x,se_var_l,se_cov_xl";

std::vector<std::vector<double>> moment_rows(const MomentReport& report) {
    std::vector<std::vector<double>> rows;
    rows.reserve(report.grid.size());
    for (std::size_t i = 0; i < report.grid.size(); ++i) {
        rows.push_back({report.grid[i], report.p_hat[i], report.q_hat[i], report.var_x[i],
                        report.var_l[i], report.cov_xl[i], report.se_p[i], report.se_q[i],
                        report.se_var_x[i], report.se_var_l[i], report.se_cov_xl[i]});
    }
    return rows;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_moment_report_csv(std::ostream& out, const MomentReport& report) {
    out << "# nu=" << format_double(report.nu) << " reps=" << report.reps
        << " se_available=" << (report.se_available ? 1 : 0) << '\n';
    out << kMomentHeader << '\n';
    for (const std::vector<double>& row : moment_rows(report)) {
        write_row(out, row);
    }
}

void write_moment_report_csv(const std::string& path, const MomentReport& report) {
    std::ofstream out = open_or_throw(path);
    write_moment_report_csv(out, report);
    close_or_throw(out, path);
}

void write_moment_report_json(std::ostream& out, const MomentReport& report) {
    nlohmann::json doc;
    doc["nu"] = report.nu;
    doc["reps"] = report.reps;
    doc["se_available"] = report.se_available;
    doc["t"] = report.grid;
    doc["p_hat"] = report.p_hat;
    doc["q_hat"] = report.q_hat;
    doc["var_x"] = report.var_x;
    doc["var_l"] = report.var_l;
    doc["cov_xl"] = report.cov_xl;
    doc["se_p"] = report.se_p;
    doc["se_q"] = report.se_q;
    doc["se_var_x"] = report.se_var_x;
    doc["se_var_l"] = report.se_var_l;
    doc["se_cov_xl"] = report.se_cov_xl;
    out << doc.dump(2) << '\n';
}

void write_moment_report_json(const std::string& path, const MomentReport& report) {
    std::ofstream out = open_or_throw(path);
    write_moment_report_json(out, report);
    close_or_throw(out, path);
}

void write_ensemble_csv(std::ostream& out, const std::vector<GridSeries>& ensemble) {
    out << "rep,t";
    if (!ensemble.empty()) {
        for (const std::string& label : ensemble.front().labels) {
            out << ',' << label;
        }
    }
    out << '\n';
    for (std::size_t rep = 0; rep < ensemble.size(); ++rep) {
        const GridSeries& series = ensemble[rep];
        for (std::size_t i = 0; i < series.t.size(); ++i) {
            out << rep << ',' << format_double(series.t[i]);
            for (std::size_t c = 0; c < series.values.size(); ++c) {
                out << ',' << format_double(series.values[c][i]);
            }
            out << '\n';
        }
    }
}

void write_ensemble_csv(const std::string& path, const std::vector<GridSeries>& ensemble) {
    std::ofstream out = open_or_throw(path);
    write_ensemble_csv(out, ensemble);
    close_or_throw(out, path);
}

void write_ensemble_json(std::ostream& out, const std::vector<GridSeries>& ensemble) {
    nlohmann::json doc = nlohmann::json::array();
    for (std::size_t rep = 0; rep < ensemble.size(); ++rep) {
        const GridSeries& series = ensemble[rep];
        nlohmann::json entry;
        entry["rep"] = rep;
        entry["t"] = series.t;
        for (std::size_t c = 0; c < series.labels.size(); ++c) {
            entry[series.labels[c]] = series.values[c];
        }
        doc.push_back(entry);
    }
    out << doc.dump(2) << '\n';
}

void write_ensemble_json(const std::string& path, const std::vector<GridSeries>& ensemble) {
    std::ofstream out = open_or_throw(path);
    write_ensemble_json(out, ensemble);
    close_or_throw(out, path);
}

void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != 0) {
            out << ',';
        }
        out << header[j];
    }
    out << '\n';
    for (const std::vector<double>& row : rows) {
        write_row(out, row);
    }
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_or_throw(path);
    write_table_csv(out, header, rows);
    close_or_throw(out, path);
}

void write_table_json(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    nlohmann::json doc = nlohmann::json::array();
    for (const std::vector<double>& row : rows) {
        nlohmann::json entry;
        for (std::size_t j = 0; j < header.size() && j < row.size(); ++j) {
            entry[header[j]] = row[j];
        }
        doc.push_back(entry);
    }
    out << doc.dump(2) << '\n';
}

void write_table_json(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_or_throw(path);
    write_table_json(out, header, rows);
    close_or_throw(out, path);
}

} // namespace incsel
