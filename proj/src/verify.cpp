#include "nucshoot/verify.hpp"

#include "nucshoot/errors.hpp"
#include "nucshoot/integrator.hpp"
#include "nucshoot/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace nucshoot {

namespace {

std::string format(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

double sup_distance(const Trajectory& l, const Trajectory& r, double r_end, double step) {
    double worst = 0.0;
    for (double k = 0.0;; k += 1.0) {
        const double x = std::min(k * step, r_end);
        const PhasePoint p = l.state_at(x);
        const PhasePoint q = r.state_at(x);
        worst = std::max({worst, std::abs(p.f - q.f), std::abs(p.g - q.g)});
        if (x >= r_end) {
            return worst;
        }
    }
}

VerifyCheck coth_oracle(double scale) {
    const ModelParams params(2.5, 1.0);
    IntegratorConfig cfg;
    cfg.r_max = 10.0;
    const Trajectory t = integrate_radial(1.0, params, cfg);
    double worst = 0.0;
    for (double k = 0.0; k <= 10000.0; k += 1.0) {
        const double r = k * 1e-3;
        const PhasePoint p = t.state_at(r);
        const PhasePoint q = exact_coth(r, params);
        worst = std::max({worst, std::abs(p.f - q.f), std::abs(p.g - q.g)});
    }
    const double tol = 1e-6 * scale;
    return {"coth_oracle", worst <= tol, worst, tol, "sup-norm on [0, 10], (a, b) = (2.5, 1)"};
}

VerifyCheck conservative_energy(int starts, std::uint64_t seed, double scale) {
    const ModelParams params(9.0, 4.0);
    const double a = params.a();
    const double b = params.b();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    IntegratorConfig cfg;
    cfg.r_max = 50.0;
    double worst = 0.0;
    for (int i = 0; i < starts; ++i) {
        const double g = unit(rng);
        const double f = unit(rng) * std::sqrt((a * g * g + a - 2.0 * b) / 2.0);
        const Trajectory t = integrate_conservative({f, g, std::nullopt}, params, cfg);
        const double h0 = t.samples().front().H;
        for (const Sample& s : t.samples()) {
            worst = std::max(worst, std::abs(s.H - h0) / (1.0 + std::abs(h0)));
        }
    }
    const double tol = 1e-8 * scale;
    return {"conservative_energy", worst <= tol, worst, tol,
            std::to_string(starts) + " random starts in the admissible set, r in [0, 50]"};
}

VerifyCheck dissipation_identity(int shots, double scale) {
    const ModelParams params(9.0, 4.0);
    IntegratorConfig cfg;
    cfg.rtol = 1e-12;
    cfg.atol = 1e-15;
    const auto events = classification_events();
    double worst = 0.0;
    double x_worst = 0.0;
    for (int k = 1; k <= shots; ++k) {
        const double x = static_cast<double>(k) / (shots + 1);
        const Trajectory t = integrate_radial(x, params, cfg, events);
        const DissipationResidual res = dissipation_residual(t);
        if (res.worst > worst) {
            worst = res.worst;
            x_worst = x;
        }
    }
    const double tol = 1e-4 * scale;
    return {"dissipation_identity", worst <= tol, worst, tol,
            std::to_string(shots) + " shots at (9, 4), worst at x=" + format(x_worst)};
}

VerifyCheck nonexistence_grids(int points, double scale) {
    IntegratorConfig cfg;
    cfg.r_max = 200.0;
    int decayed = 0;
    int total = 0;
    for (const auto& [a, b] : {std::pair{4.0, 4.0}, {1.0, 4.0}, {3.0, 2.0}}) {
        const ModelParams params(a, b);
        for (int k = 1; k <= points; ++k) {
            const double x = static_cast<double>(k) / (points + 1);
            ++total;
            if (classify_shot(x, params, cfg).cls == ShotClass::Decayed) {
                ++decayed;
            }
        }
    }
    // The threshold is "no Decayed shot"; corruption turns it negative.
    const double tol = scale < 1.0 ? -1.0 : 0.0;
    return {"nonexistence_grids", decayed <= tol, static_cast<double>(decayed), tol,
            std::to_string(total) + " shots over (4, 4), (1, 4), (3, 2)"};
}

VerifyCheck shifted_convergence(double scale) {
    const ModelParams params(9.0, 4.0);
    const PhasePoint p0{0.3, 0.5, std::nullopt};
    IntegratorConfig cfg;
    cfg.r_max = 5.0;
    const Trajectory cons = integrate_conservative(p0, params, cfg);
    std::vector<double> dist;
    for (double rho : {10.0, 100.0, 1000.0}) {
        dist.push_back(sup_distance(integrate_shifted(p0, rho, params, cfg), cons, 5.0, 1e-3));
    }
    const bool monotone = dist[0] > dist[1] && dist[1] > dist[2];
    const double tol = 1e-2 * scale;
    return {"shifted_convergence", monotone && dist[2] <= tol, dist[2], tol,
            "sup distances " + format(dist[0]) + ", " + format(dist[1]) + ", " + format(dist[2])};
}

VerifyCheck ground_state_audit(double scale) {
    const ModelParams params(9.0, 4.0);
    const GroundState gs = bisect_ground_state(params, IntegratorConfig{});
    const double width = gs.x_lo.gap() - gs.x_hi.gap();
    const double tol = 1e-10 * scale;
    const bool inside = gs.x_lo.x() > std::sqrt(8.0 / 9.0) && gs.x_hi.x() < 1.0 &&
                        gs.x_hi.gap() > 0.0;
    std::string failed;
    for (const LemmaCheck& c : gs.report.checks) {
        if (!c.passed) {
            failed += (failed.empty() ? "" : ", ") + c.name;
        }
    }
    return {"ground_state_audit", width <= tol && inside && failed.empty(), width, tol,
            failed.empty() ? "bracket width; all lemma checks pass"
                           : "failed lemma checks: " + failed};
}

} // namespace

bool VerifyReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

VerifyReport run_verify(const VerifyOptions& options) {
    const double scale = options.corrupt_tolerances ? 1e-30 : 1.0;
    const std::vector<std::pair<std::string, std::function<VerifyCheck()>>> suite = {
        {"coth_oracle", [&] { return coth_oracle(scale); }},
        {"conservative_energy",
         [&] { return conservative_energy(options.quick ? 5 : 20, options.seed, scale); }},
        {"dissipation_identity", [&] { return dissipation_identity(options.quick ? 5 : 20, scale); }},
        {"nonexistence_grids", [&] { return nonexistence_grids(options.quick ? 10 : 50, scale); }},
        {"shifted_convergence", [&] { return shifted_convergence(scale); }},
        {"ground_state_audit", [&] { return ground_state_audit(scale); }},
    };
    VerifyReport report;
    for (const auto& [name, run] : suite) {
        try {
            report.checks.push_back(run());
        } catch (const std::exception& e) {
            report.checks.push_back({name, false, 0.0, 0.0, e.what()});
        }
    }
    return report;
}

} // namespace nucshoot
