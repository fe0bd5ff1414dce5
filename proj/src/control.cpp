#include "incsel/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace incsel {

double delta_eval(const DeltaSpec& spec, double m) {
    if (!(m >= 0.0)) throw std::invalid_argument("delta_eval: m must be >= 0");
    if (m == 0.0) return 1.0;
    double v = 0.0;
    switch (spec.kind) {
        case DeltaKind::stationary: v = std::sqrt(2.0 / m); break;
        case DeltaKind::optimal: v = std::sqrt(2.0 / m) - 1.0 / (3.0 * m); break;
        case DeltaKind::beta_perturbed: v = std::sqrt(2.0 / m) + spec.beta / m; break;
    }
    return std::clamp(v, 0.0, 1.0);
}

std::vector<double> delta_breakpoints(const DeltaSpec& spec) {
    // solve delta_raw(m) = 1 and = 0 in s = sqrt(m)
    std::vector<double> bp;
    switch (spec.kind) {
        case DeltaKind::stationary:
            bp.push_back(2.0); // sqrt(2/m) = 1
            break;
        case DeltaKind::optimal: {
            // sqrt(2/m) - 1/(3m) = 0  <=>  m = 1/18
            bp.push_back(1.0 / 18.0);
            // sqrt(2/m) - 1/(3m) = 1  <=>  3 s^2 - 3 sqrt(2) s + 1 = 0
            const double disc = std::sqrt(18.0 - 12.0) / 6.0;
            const double s1 = std::sqrt(2.0) / 2.0 - disc;
            const double s2 = std::sqrt(2.0) / 2.0 + disc;
            bp.push_back(s1 * s1);
            bp.push_back(s2 * s2);
            break;
        }
        case DeltaKind::beta_perturbed: {
            // sqrt(2/m) + beta/m = 0  <=>  m = beta^2/2 (beta < 0 only)
            if (spec.beta < 0.0) bp.push_back(spec.beta * spec.beta / 2.0);
            // sqrt(2/m) + beta/m = 1  <=>  s^2 - sqrt(2) s - beta = 0
            const double disc = 0.5 + spec.beta;
            if (disc >= 0.0) {
                const double r = std::sqrt(2.0) / 2.0 + std::sqrt(disc);
                if (r > 0.0) bp.push_back(r * r);
                const double r2 = std::sqrt(2.0) / 2.0 - std::sqrt(disc);
                if (r2 > 0.0) bp.push_back(r2 * r2);
            }
            break;
        }
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
}

double psi(const ControlSpec& control, double t, double x) {
    if (t >= 1.0) return 0.0;
    switch (control.kind) {
        case ControlKind::greedy:
            return x >= 1.0 ? 0.0 : 1.0 - x;
        case ControlKind::stationary:
            return std::sqrt(2.0 / control.nu);
        case ControlKind::feasible_stationary:
            return x >= 1.0 ? 0.0 : std::min(std::sqrt(2.0 / control.nu), 1.0 - x);
        case ControlKind::self_similar: {
            if (x >= 1.0) return 0.0;
            const double m = control.nu * (1.0 - t) * (1.0 - x);
            return (1.0 - x) * delta_eval(control.delta, m);
        }
        case ControlKind::constant_c:
            return std::sqrt(control.c / control.nu);
    }
    return 0.0;
}

FeasibilityReport feasibility_audit(const ControlSpec& control, int grid_density) {
    if (grid_density < 2)
        throw std::invalid_argument("feasibility_audit: grid_density must be >= 2");
    FeasibilityReport rep;
    const double step = 1.0 / grid_density;
    for (int i = 0; i < grid_density; ++i) {
        const double t = i * step;
        for (int j = 0; j < grid_density; ++j) {
            const double x = j * step;
            const double v = psi(control, t, x) - (1.0 - x);
            if (v > rep.worst_violation) {
                rep.worst_violation = v;
                rep.t = t;
                rep.x = x;
            }
        }
    }
    rep.feasible = rep.worst_violation == 0.0;
    return rep;
}

BoundConstants calibrate_beta(double nu, const std::function<double(double)>& delta_of_m,
                              int grid_density) {
    if (grid_density < 2)
        throw std::invalid_argument("calibrate_beta: grid_density must be >= 2");
    if (!(nu > 0.0)) throw std::invalid_argument("calibrate_beta: nu must be > 0");

    double beta_plus = 0.0, beta_minus = 0.0;
    double band_max[3] = {0.0, 0.0, 0.0}; // max |scaled deviation| per log-third of [1, nu]
    std::size_t band_count[3] = {0, 0, 0};
    const double band_width = std::max(std::log(nu) / 3.0, 1e-12);
    const double step = 1.0 / grid_density;
    for (int i = 0; i < grid_density; ++i) {
        const double t = i * step;
        for (int j = 0; j < grid_density; ++j) {
            const double x = j * step;
            const double m = nu * (1.0 - t) * (1.0 - x);
            if (m < 1.0) continue;
            // (psi - sqrt(2(1-x)/(nu(1-t)))) * nu(1-t) collapses to a pure
            // function of m for the self-similar family
            const double dev = m * delta_of_m(m) - std::sqrt(2.0 * m);
            beta_plus = std::max(beta_plus, dev);
            beta_minus = std::max(beta_minus, -dev);
            const int band = std::min(2, static_cast<int>(std::log(m) / band_width));
            band_max[band] = std::max(band_max[band], std::abs(dev));
            ++band_count[band];
        }
    }

    // sustained growth of the deviation across the scale bands means the
    // window does not track the sqrt(2/m) profile
    if (band_count[0] > 0 && band_count[1] > 0 && band_count[2] > 0 &&
        band_max[1] > 1.5 * band_max[0] && band_max[2] > 1.5 * band_max[1] &&
        band_max[2] > 2.0)
        throw CalibrationFailure("calibrate_beta: deviation grows across scales");

    BoundConstants out;
    out.beta_minus = beta_minus;
    out.beta_plus = beta_plus;
    out.beta = std::max({beta_minus, beta_plus, 1.0}) * 1.05;
    out.K = 10.0 * std::max(out.beta, 1.0);
    return out;
}

BoundConstants calibrate_beta(const ControlSpec& control, int grid_density) {
    if (control.kind != ControlKind::self_similar)
        throw std::invalid_argument("calibrate_beta: control must be self-similar");
    const DeltaSpec spec = control.delta;
    return calibrate_beta(
        control.nu, [spec](double m) { return delta_eval(spec, m); }, grid_density);
}

ControlSpec parse_control_tag(const std::string& tag, double nu) {
    ControlSpec c;
    c.nu = nu;
    if (tag == "greedy") {
        c.kind = ControlKind::greedy;
        return c;
    }
    if (tag == "stationary") {
        c.kind = ControlKind::stationary;
        return c;
    }
    if (tag == "feasible-stationary") {
        c.kind = ControlKind::feasible_stationary;
        return c;
    }
    if (tag == "self-similar:stationary") {
        c.kind = ControlKind::self_similar;
        c.delta = DeltaSpec{DeltaKind::stationary, 0.0};
        return c;
    }
    if (tag == "self-similar:optimal") {
        c.kind = ControlKind::self_similar;
        c.delta = DeltaSpec{DeltaKind::optimal, 0.0};
        return c;
    }
    const auto parse_number = [&](const std::string& text, const char* what) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("parse_control_tag: bad ") + what +
                                        " in '" + tag + "'");
        }
        if (used != text.size() || !std::isfinite(v))
            throw std::invalid_argument(std::string("parse_control_tag: bad ") + what +
                                        " in '" + tag + "'");
        return v;
    };
    const std::string ss_beta = "self-similar:beta=";
    if (tag.rfind(ss_beta, 0) == 0) {
        c.kind = ControlKind::self_similar;
        c.delta = DeltaSpec{DeltaKind::beta_perturbed, parse_number(tag.substr(ss_beta.size()), "beta")};
        return c;
    }
    const std::string constant = "constant:";
    if (tag.rfind(constant, 0) == 0) {
        c.kind = ControlKind::constant_c;
        c.c = parse_number(tag.substr(constant.size()), "c");
        if (!(c.c > 0.0))
            throw std::invalid_argument("parse_control_tag: c must be positive in '" + tag + "'");
        return c;
    }
    throw std::invalid_argument("parse_control_tag: unknown control tag '" + tag + "'");
}

std::string control_tag(const ControlSpec& control) {
    char buf[64];
    switch (control.kind) {
        case ControlKind::greedy: return "greedy";
        case ControlKind::stationary: return "stationary";
        case ControlKind::feasible_stationary: return "feasible-stationary";
        case ControlKind::self_similar:
            switch (control.delta.kind) {
                case DeltaKind::stationary: return "self-similar:stationary";
                case DeltaKind::optimal: return "self-similar:optimal";
                case DeltaKind::beta_perturbed:
                    std::snprintf(buf, sizeof(buf), "self-similar:beta=%.17g", control.delta.beta);
                    return buf;
            }
            break;
        case ControlKind::constant_c:
            std::snprintf(buf, sizeof(buf), "constant:%.17g", control.c);
            return buf;
    }
    throw std::invalid_argument("control_tag: unknown control kind");
}

double sup_window(const ControlSpec& control) {
    switch (control.kind) {
        case ControlKind::greedy: return 1.0;
        case ControlKind::stationary: return std::sqrt(2.0 / control.nu);
        case ControlKind::feasible_stationary:
            return std::min(1.0, std::sqrt(2.0 / control.nu));
        case ControlKind::constant_c: return std::sqrt(control.c / control.nu);
        case ControlKind::self_similar: {
            const DeltaSpec& d = control.delta;
            if (d.kind == DeltaKind::beta_perturbed && d.beta < 0.0) {
                // the raw profile peaks at m = 2 beta^2 and is increasing below
                const double m_peak = std::min(2.0 * d.beta * d.beta, control.nu);
                return delta_eval(d, m_peak);
            }
            return 1.0; // delta -> 1 (clip) as m -> 0 at x = 0
        }
    }
    return 1.0;
}

double mark_height(const ControlSpec& control, double x0) {
    double c_eff = 0.0;
    switch (control.kind) {
        case ControlKind::greedy:
        case ControlKind::feasible_stationary:
        case ControlKind::self_similar:
            return 1.0;
        case ControlKind::stationary: c_eff = 2.0; break;
        case ControlKind::constant_c: c_eff = control.c; break;
    }
    // drift c/2 over [0,1], variance c^{3/2}/(3 sqrt(nu)), one extra window
    const double sd = std::sqrt(std::pow(c_eff, 1.5) / (3.0 * std::sqrt(control.nu)));
    return x0 + c_eff / 2.0 + 14.0 * sd + std::sqrt(c_eff / control.nu);
}

} // namespace incsel
