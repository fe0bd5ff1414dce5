#include "incsel/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "incsel/control.hpp"
#include "incsel/engine.hpp"
#include "incsel/io.hpp"
#include "incsel/limit_diffusion.hpp"
#include "incsel/scatter.hpp"
#include "incsel/stats.hpp"

namespace incsel {

namespace {

template <class... Args>
std::string detail_text(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    return buf;
}

std::size_t effective_threads(const ExperimentConfig& config, std::size_t jobs) {
    std::size_t n = config.threads;
    if (n == 0) {
        n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    return std::min(std::max<std::size_t>(1, n), std::max<std::size_t>(1, jobs));
}

// Replicate i always uses stream (base + i), so results do not depend on the
// thread count.
void parallel_replicates(std::size_t jobs, std::size_t threads,
                         const std::function<void(std::size_t)>& work) {
    if (threads <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) {
            work(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) {
        pool.emplace_back([&, k] {
            for (std::size_t i = k; i < jobs; i += threads) {
                work(i);
            }
        });
    }
    for (std::thread& th : pool) {
        th.join();
    }
}

std::vector<SelectionPath> markwise_ensemble(const ControlSpec& control, double nu,
                                             std::size_t reps, Seed seed,
                                             std::uint64_t stream_base, std::size_t threads) {
    const Rect region{0.0, 1.0, 0.0, mark_height(control, 0.0)};
    std::vector<SelectionPath> paths(reps);
    parallel_replicates(reps, threads, [&](std::size_t i) {
        const std::vector<Atom> atoms =
            sample_scatter(nu, region, seed.stream(stream_base + i));
        paths[i] = select_markwise(control, atoms);
    });
    return paths;
}

bool is_feasible_kind(ControlKind kind) {
    return kind == ControlKind::greedy || kind == ControlKind::feasible_stationary ||
           kind == ControlKind::self_similar;
}

// Synthetic moment report violating the pq inequality at every grid point:
// p sits 0.1 below the diagonal while q stays on it.
MomentReport fixture_report(double nu, std::size_t reps, const std::vector<double>& grid) {
    MomentReport report;
    report.nu = nu;
    report.reps = reps;
    report.se_available = true;
    report.grid = grid;
    const std::size_t m = grid.size();
    report.p_hat.resize(m);
    report.q_hat.resize(m);
    report.var_x.assign(m, 1e-8);
    report.var_l.assign(m, 1e-8);
    report.cov_xl.assign(m, 0.0);
    report.se_p.assign(m, 1e-6);
    report.se_q.assign(m, 1e-6);
    report.se_var_x.assign(m, 1e-9);
    report.se_var_l.assign(m, 1e-9);
    report.se_cov_xl.assign(m, 1e-9);
    for (std::size_t i = 0; i < m; ++i) {
        report.p_hat[i] = grid[i] - 0.1;
        report.q_hat[i] = grid[i];
    }
    return report;
}

AuditLine inequality_line(const BoundAuditResult& audit, bool fixture) {
    AuditLine line;
    line.name = audit.bound_name + "-inequality";
    line.pass = audit.violations.empty();
    line.detail = detail_text("%zu violations on %zu-point grid%s", audit.violations.size(),
                              audit.grid.size(), fixture ? " (fixture)" : "");
    return line;
}

AuditLine squeeze_line(const BoundAuditResult& audit) {
    AuditLine line;
    line.name = audit.bound_name;
    line.pass = audit.violations.empty();
    if (std::isfinite(audit.fitted_constant)) {
        line.detail = detail_text("%zu violations on %zu-point grid, fitted constant %.6g",
                                  audit.violations.size(), audit.grid.size(),
                                  audit.fitted_constant);
    } else {
        line.detail = detail_text("%zu violations on %zu-point grid", audit.violations.size(),
                                  audit.grid.size());
    }
    return line;
}

std::string join_doubles(const std::vector<double>& values) {
    std::string text;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) {
            text += ", ";
        }
        text += format_double(values[i]);
    }
    return text;
}

// Derive "<stem>_paths<ext>" for the replicate dump written next to a report.
std::string sibling_path(const std::string& path, const std::string& suffix) {
    const std::size_t slash = path.find_last_of("/\\");
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + suffix;
    }
    return path.substr(0, dot) + suffix + path.substr(dot);
}

void write_audit_csv(std::ostream& out, const VerifyReport& report) {
    out << "audit,pass,detail\n";
    for (const AuditLine& line : report.audits) {
        std::string quoted = "\"";
        for (char c : line.detail) {
            quoted += c;
            if (c == '"') {
                quoted += '"';
            }
        }
        quoted += '"';
        out << line.name << ',' << (line.pass ? 1 : 0) << ',' << quoted << '\n';
    }
}

void write_verify_report(const std::string& path, const std::string& format,
                         const VerifyReport& report) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open output file: " + path);
    }
    if (format == "json") {
        out << "[\n";
        for (std::size_t i = 0; i < report.audits.size(); ++i) {
            const AuditLine& line = report.audits[i];
            std::string escaped;
            for (char c : line.detail) {
                if (c == '"' || c == '\\') {
                    escaped += '\\';
                }
                escaped += c;
            }
            out << "  {\"audit\": \"" << line.name << "\", \"pass\": "
                << (line.pass ? "true" : "false") << ", \"detail\": \"" << escaped << "\"}"
                << (i + 1 < report.audits.size() ? "," : "") << '\n';
        }
        out << "]\n";
    } else {
        write_audit_csv(out, report);
    }
    out.flush();
    if (!out) {
        throw IoError("write failed for output file: " + path);
    }
}

} // namespace

void validate_config(const ExperimentConfig& config) {
    if (config.command != "simulate" && config.command != "limit" &&
        config.command != "verify") {
        throw std::invalid_argument("config: unknown command '" + config.command + "'");
    }
    if (config.replicates < 1) {
        throw std::invalid_argument("config: replicates must be >= 1");
    }
    if (config.grid_points < 2) {
        throw std::invalid_argument("config: grid must have >= 2 points");
    }
    if (config.nus.empty()) {
        throw std::invalid_argument("config: at least one nu is required");
    }
    for (double nu : config.nus) {
        if (!(nu > 0.0) || !std::isfinite(nu)) {
            throw std::invalid_argument("config: nu must be positive and finite");
        }
    }
    if (config.format != "csv" && config.format != "json") {
        throw std::invalid_argument("config: format must be 'csv' or 'json'");
    }
    // Unknown strategy tags are usage errors; parse up front.
    (void)parse_control_tag(config.strategy, config.nus.front());
}

bool VerifyReport::all_pass() const {
    return std::all_of(audits.begin(), audits.end(),
                       [](const AuditLine& line) { return line.pass; });
}

MomentReport run_simulate(const ExperimentConfig& config,
                          std::vector<GridSeries>* ensemble_out) {
    validate_config(config);
    const double nu = config.nus.front();
    const ControlSpec control = parse_control_tag(config.strategy, nu);
    const std::vector<double> grid = uniform_grid(config.grid_points);
    const Seed seed{config.seed, 0};
    const std::size_t threads = effective_threads(config, config.replicates);
    const std::vector<SelectionPath> paths =
        markwise_ensemble(control, nu, config.replicates, seed, 0, threads);
    if (ensemble_out != nullptr) {
        ensemble_out->clear();
        ensemble_out->reserve(paths.size());
        for (const SelectionPath& path : paths) {
            GridSeries series;
            series.t = grid;
            series.labels = {"X", "L"};
            std::vector<double> x(grid.size()), l(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) {
                x[i] = path.mark_at(grid[i]);
                l[i] = static_cast<double>(path.len_at(grid[i]));
            }
            series.values = {std::move(x), std::move(l)};
            ensemble_out->push_back(std::move(series));
        }
    }
    return estimate_moments(paths, grid);
}

LimitTable run_limit(const ExperimentConfig& config) {
    validate_config(config);
    const std::vector<double> grid = uniform_grid(config.grid_points);
    const std::size_t m = grid.size();
    const std::size_t reps = config.replicates;
    const Seed seed{config.seed, 0};

    std::vector<std::vector<double>> y1(m, std::vector<double>(reps, 0.0));
    std::vector<std::vector<double>> y2(m, std::vector<double>(reps, 0.0));
    const std::size_t threads = effective_threads(config, reps);
    std::vector<GridSeries> draws(reps);
    parallel_replicates(reps, threads, [&](std::size_t i) {
        draws[i] = sample_limit_path(grid, seed.stream(i));
    });
    for (std::size_t i = 0; i < reps; ++i) {
        const std::vector<double>& p1 = draws[i].component("Y1");
        const std::vector<double>& p2 = draws[i].component("Y2");
        for (std::size_t g = 0; g < m; ++g) {
            y1[g][i] = p1[g];
            y2[g][i] = p2[g];
        }
    }
    draws.clear();

    LimitTable table;
    table.header = {"s",          "t",          "closed_y1y1", "mc_y1y1", "se_y1y1",
                    "closed_y1y2", "mc_y1y2",   "se_y1y2",     "closed_y2y1", "mc_y2y1",
                    "se_y2y1",    "closed_y2y2", "mc_y2y2",    "se_y2y2"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const Mat2 closed = cov_limit(grid[i], grid[j]);
            const double closed_vals[4] = {closed.a, closed.b, closed.c, closed.d};
            const std::vector<double>* left[4] = {&y1[i], &y1[i], &y2[i], &y2[i]};
            const std::vector<double>* right[4] = {&y1[j], &y2[j], &y1[j], &y2[j]};
            std::vector<double> row = {grid[i], grid[j]};
            for (int c = 0; c < 4; ++c) {
                double mc = nan;
                double se = nan;
                if (reps >= 2) {
                    mc = covariance(*left[c], *right[c]);
                    se = jackknife_cov_se(*left[c], *right[c]);
                }
                row.push_back(closed_vals[c]);
                row.push_back(mc);
                row.push_back(se);
                table.cells += 1;
                if (std::isfinite(se) && std::abs(mc - closed_vals[c]) <= 3.0 * se) {
                    table.within_three_se += 1;
                }
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

VerifyReport run_verify_audits(const ExperimentConfig& config) {
    validate_config(config);
    VerifyReport report;
    const double nu = config.nus.front();
    const Seed seed{config.seed, 0};
    const std::size_t reps = config.replicates;

    // Engine equivalence at a small intensity: markwise and knapsack drivers
    // must produce the same law for (X(1), L(1)).
    {
        const double nu_eq = 100.0;
        const ControlSpec control = parse_control_tag(config.strategy, nu_eq);
        const std::size_t threads = effective_threads(config, reps);
        const std::vector<SelectionPath> mark_paths =
            markwise_ensemble(control, nu_eq, reps, seed, 100000, threads);
        const double u_max = 1.1 * sup_window(control);
        std::vector<SelectionPath> knap_paths(reps);
        parallel_replicates(reps, threads, [&](std::size_t i) {
            const std::vector<Atom> reserve =
                sample_reserve(nu_eq, u_max, seed.stream(200000 + i));
            knap_paths[i] = select_knapsack(control, reserve);
        });
        std::vector<double> lm(reps), xm(reps), lk(reps), xk(reps);
        for (std::size_t i = 0; i < reps; ++i) {
            lm[i] = static_cast<double>(mark_paths[i].final_len());
            xm[i] = mark_paths[i].final_mark();
            lk[i] = static_cast<double>(knap_paths[i].final_len());
            xk[i] = knap_paths[i].final_mark();
        }
        const KsResult ks_l = two_sample_ks(lm, lk);
        const KsResult ks_x = two_sample_ks(xm, xk);
        AuditLine line;
        line.name = "engine-equivalence";
        line.pass = ks_l.p > 0.01 && ks_x.p > 0.01;
        line.detail = detail_text("KS p-values: L(1)=%.4g, X(1)=%.4g (nu=%g, %zu reps per engine)",
                                  ks_l.p, ks_x.p, nu_eq, reps);
        report.audits.push_back(line);
    }

    // The squeeze family needs a self-similar control; fall back to the
    // optimal-expansion control when the configured strategy is not one.
    const ControlSpec configured = parse_control_tag(config.strategy, nu);
    const ControlSpec squeeze_control = configured.kind == ControlKind::self_similar
                                            ? configured
                                            : parse_control_tag("self-similar:optimal", nu);
    bool have_constants = false;
    BoundConstants constants;
    try {
        constants = calibrate_beta(squeeze_control);
        if (std::isfinite(config.beta_override)) {
            constants.beta = config.beta_override;
            constants.beta_minus = config.beta_override;
            constants.beta_plus = config.beta_override;
        }
        if (std::isfinite(config.k_override)) {
            constants.K = config.k_override;
        }
        have_constants = true;
    } catch (const CalibrationFailure& failure) {
        report.audits.push_back({"calibration", false, failure.what()});
    }

    if (have_constants) {
        const std::size_t sandwich_reps = std::min<std::size_t>(reps, 1000);
        std::size_t ordered = 0;
        double first_violation = -1.0;
        std::vector<unsigned char> ok(sandwich_reps, 0);
        std::vector<double> violation(sandwich_reps, -1.0);
        const std::size_t threads = effective_threads(config, sandwich_reps);
        parallel_replicates(sandwich_reps, threads, [&](std::size_t i) {
            const SandwichAudit audit =
                run_sandwich(squeeze_control, constants, seed.stream(300000 + i));
            ok[i] = audit.ok ? 1 : 0;
            violation[i] = audit.violation_time;
        });
        for (std::size_t i = 0; i < sandwich_reps; ++i) {
            if (ok[i]) {
                ordered += 1;
            } else if (first_violation < 0.0) {
                first_violation = violation[i];
            }
        }
        AuditLine line;
        line.name = "sandwich";
        line.pass = ordered == sandwich_reps;
        if (line.pass) {
            line.detail = detail_text("%zu/%zu replicates pathwise ordered (nu=%g)",
                                      ordered, sandwich_reps, nu);
        } else {
            line.detail = detail_text("%zu/%zu ordered; first violation at t=%.6g (nu=%g)",
                                      ordered, sandwich_reps, first_violation, nu);
        }
        report.audits.push_back(line);
    }

    // Moment-level inequality audits run on a feasible strategy so the
    // boundary-sensitive bounds apply.
    const ControlSpec moment_control =
        is_feasible_kind(configured.kind) ? configured : squeeze_control;
    const std::vector<double> grid = uniform_grid(config.grid_points);
    {
        const std::size_t threads = effective_threads(config, reps);
        const std::vector<SelectionPath> paths =
            markwise_ensemble(moment_control, nu, reps, seed, 400000, threads);
        const MomentReport moment_report = estimate_moments(paths, grid);
        const MomentReport general_input =
            config.fixture_violate ? fixture_report(nu, reps, grid) : moment_report;
        const std::vector<BoundAuditResult> general = audit_general_inequalities(general_input);
        for (const BoundAuditResult& audit : general) {
            report.audits.push_back(inequality_line(audit, config.fixture_violate));
        }
        if (moment_control.kind == ControlKind::self_similar && have_constants) {
            const std::vector<BoundAuditResult> squeeze =
                audit_pq_bounds(moment_report, constants);
            for (const BoundAuditResult& audit : squeeze) {
                report.audits.push_back(squeeze_line(audit));
            }
        }
    }

    // Remainder scan across decades of nu.
    {
        std::vector<double> scan_nus = config.nus;
        if (scan_nus.size() < 3) {
            scan_nus = {nu, 10.0 * nu, 100.0 * nu};
        }
        std::sort(scan_nus.begin(), scan_nus.end());
        std::vector<double> means(scan_nus.size()), ses(scan_nus.size());
        for (std::size_t j = 0; j < scan_nus.size(); ++j) {
            const ControlSpec control = parse_control_tag(config.strategy, scan_nus[j]);
            const std::size_t threads = effective_threads(config, reps);
            const std::vector<SelectionPath> paths = markwise_ensemble(
                control, scan_nus[j], reps, seed, 500000 + j * reps, threads);
            std::vector<double> l1(reps);
            for (std::size_t i = 0; i < reps; ++i) {
                l1[i] = static_cast<double>(paths[i].final_len());
            }
            const Moments stats = moments(l1);
            means[j] = stats.mean;
            ses[j] = stats.se_mean;
        }
        const RemainderScan scan = remainder_scan(scan_nus, means, ses);
        double adjusted = 0.0;
        for (std::size_t a = 0; a < scan.remainders.size(); ++a) {
            for (std::size_t b = a + 1; b < scan.remainders.size(); ++b) {
                const double slack = 3.0 * (scan.ses[a] + scan.ses[b]);
                adjusted = std::max(
                    adjusted, std::abs(scan.remainders[a] - scan.remainders[b]) - slack);
            }
        }
        AuditLine line;
        line.name = "remainder";
        line.pass = adjusted < 0.5;
        line.detail = detail_text("r = {%s} at nu = {%s}; max pairwise diff %.4g (3-SE adjusted %.4g)",
                                  join_doubles(scan.remainders).c_str(),
                                  join_doubles(scan.nus).c_str(), scan.max_pairwise_diff,
                                  adjusted);
        report.audits.push_back(line);
    }

    return report;
}

int cmd_simulate(const ExperimentConfig& config) {
    std::vector<GridSeries> ensemble;
    const bool to_file = !config.out_path.empty();
    const MomentReport report = run_simulate(config, to_file ? &ensemble : nullptr);
    if (!to_file) {
        write_moment_report_csv(std::cout, report);
        return 0;
    }
    const std::string paths_file = sibling_path(config.out_path, "_paths");
    if (config.format == "json") {
        write_moment_report_json(config.out_path, report);
        write_ensemble_json(paths_file, ensemble);
    } else {
        write_moment_report_csv(config.out_path, report);
        write_ensemble_csv(paths_file, ensemble);
    }
    std::cout << "wrote " << config.out_path << " and " << paths_file << '\n';
    return 0;
}

int cmd_limit(const ExperimentConfig& config) {
    const LimitTable table = run_limit(config);
    if (config.out_path.empty()) {
        write_table_csv(std::cout, table.header, table.rows);
    } else if (config.format == "json") {
        write_table_json(config.out_path, table.header, table.rows);
    } else {
        write_table_csv(config.out_path, table.header, table.rows);
    }
    const double share =
        table.cells == 0 ? 0.0
                         : static_cast<double>(table.within_three_se) /
                               static_cast<double>(table.cells);
    std::cerr << "limit: MC within 3 SE of closed form at " << table.within_three_se << "/"
              << table.cells << " cells (" << format_double(100.0 * share) << "%)\n";
    return 0;
}

int cmd_verify(const ExperimentConfig& config) {
    const VerifyReport report = run_verify_audits(config);
    for (const AuditLine& line : report.audits) {
        std::cout << (line.pass ? "[PASS] " : "[FAIL] ") << line.name << ": " << line.detail
                  << '\n';
    }
    std::size_t passed = 0;
    for (const AuditLine& line : report.audits) {
        passed += line.pass ? 1 : 0;
    }
    std::cout << "verify: " << passed << "/" << report.audits.size() << " audits passed\n";
    if (!config.out_path.empty()) {
        write_verify_report(config.out_path, config.format, report);
    }
    return report.all_pass() ? 0 : 1;
}

} // namespace incsel
