#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "incsel/analysis.hpp"
#include "incsel/grid.hpp"

namespace incsel {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest stable decimal rendering used by every CSV column ("%.12g").
std::string format_double(double v);

// Each writer has a stream core plus a path wrapper. Path wrappers create or
// truncate the file and throw IoError naming the path when it cannot be
// opened or written. Column schemas are frozen; see the repo README.
void write_moment_report_csv(std::ostream& out, const MomentReport& report);
void write_moment_report_csv(const std::string& path, const MomentReport& report);
void write_moment_report_json(std::ostream& out, const MomentReport& report);
void write_moment_report_json(const std::string& path, const MomentReport& report);

// Long-format replicate dump: one row per (replicate, grid point).
void write_ensemble_csv(std::ostream& out, const std::vector<GridSeries>& ensemble);
void write_ensemble_csv(const std::string& path, const std::vector<GridSeries>& ensemble);
void write_ensemble_json(std::ostream& out, const std::vector<GridSeries>& ensemble);
void write_ensemble_json(const std::string& path, const std::vector<GridSeries>& ensemble);

// Generic numeric table with a caller-supplied header.
void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);
void write_table_json(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);
void write_table_json(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

} // namespace incsel
