// Acceptance run: one PASS/FAIL line per criterion, each with its measured
// metric and wall time. Exit status is nonzero if any criterion fails.

#include "nucshoot/integrator.hpp"
#include "nucshoot/model.hpp"
#include "nucshoot/physics.hpp"
#include "nucshoot/portrait.hpp"
#include "nucshoot/shooting.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace nucshoot;

namespace {

struct Outcome {
    bool passed;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit;
    std::function<Outcome()> body;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
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

Outcome coth_oracle() {
    const ModelParams p(2.5, 1.0);
    IntegratorConfig cfg;
    cfg.rtol = 1e-9;
    cfg.r_max = 10.0;
    const Trajectory t = integrate_radial(1.0, p, cfg);
    double worst = 0.0;
    for (double k = 0.0; k <= 10000.0; k += 1.0) {
        const double r = k * 1e-3;
        const PhasePoint a = t.state_at(r);
        const PhasePoint b = exact_coth(r, p);
        worst = std::max({worst, std::abs(a.f - b.f), std::abs(a.g - b.g)});
    }
    return {worst <= 1e-6, "sup error " + fmt(worst) + " <= 1e-6"};
}

Outcome conservative_energy() {
    const ModelParams p(9.0, 4.0);
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    IntegratorConfig cfg;
    cfg.r_max = 50.0;
    double worst = 0.0;
    int outside = 0;
    for (int i = 0; i < 20; ++i) {
        const double g = unit(rng);
        const double f = unit(rng) * std::sqrt((9.0 * g * g + 1.0) / 2.0);
        outside += admissible_contains({f, g}, p) ? 0 : 1;
        const Trajectory t = integrate_conservative({f, g}, p, cfg);
        const double h0 = t.samples().front().H;
        for (const Sample& s : t.samples()) {
            worst = std::max(worst, std::abs(s.H - h0));
        }
    }
    return {worst <= 1e-8 && outside == 0,
            "max |H - H0| " + fmt(worst) + " <= 1e-8 over 20 starts in the admissible set"};
}

Outcome dissipation_identity() {
    const ModelParams p(9.0, 4.0);
    IntegratorConfig cfg;
    cfg.rtol = 1e-12;
    cfg.atol = 1e-15;
    const auto events = classification_events();
    double worst = 0.0;
    std::size_t points = 0;
    for (int k = 1; k <= 20; ++k) {
        const Trajectory t = integrate_radial(k / 21.0, p, cfg, events);
        const DissipationResidual res = dissipation_residual(t);
        worst = std::max(worst, res.worst);
        points += res.points;
    }
    return {worst <= 1e-4 && points > 0,
            "worst relative error " + fmt(worst) + " <= 1e-4 at " + std::to_string(points) +
                " nodes on 20 shots"};
}

Outcome ground_state() {
    const ModelParams p(9.0, 4.0);
    const GroundState gs = bisect_ground_state(p, IntegratorConfig{});
    // Measured in the gap coordinate, where the bracket is resolved below a double ulp of x.
    const double width = gs.x_lo.gap() - gs.x_hi.gap();
    std::vector<std::string> failed;
    if (!(width <= 1e-10)) failed.push_back("width");
    if (!(gs.x_lo.x() > std::sqrt(8.0 / 9.0) && gs.x_hi.x() < 1.0 && gs.x_hi.gap() > 0.0)) {
        failed.push_back("bracket location");
    }
    bool signs = true;
    bool bounds = true;
    bool ratio = true;
    bool monotone = true;
    const auto s = gs.trajectory.samples();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].r > 0.0) {
            signs = signs && s[i].f < 0.0 && s[i].g > 0.0;
            ratio = ratio && std::abs(s[i].f) <= std::sqrt(4.5) * s[i].g;
        }
        bounds = bounds && s[i].g * s[i].g < 1.0 && s[i].f * s[i].f < 5.0;
        if (i > 0) {
            monotone = monotone && s[i].H <= s[i - 1].H + 1e-10;
        }
    }
    if (!signs) failed.push_back("f < 0, g > 0");
    if (!bounds) failed.push_back("g^2 < 1, f^2 < 5");
    if (!ratio) failed.push_back("|f| <= sqrt(4.5) g");
    if (!monotone) failed.push_back("H nonincreasing");
    const int winding = winding_count(gs.trajectory, s[1].r, s.back().r).count;
    if (winding != 0) failed.push_back("winding");
    const double floor = 7.0 / 9.0 - 0.05;
    if (!(gs.decay.rate >= floor)) failed.push_back("decay exponent");
    std::string detail = "width " + fmt(width) + ", 1 - x* " + fmt(gs.x_star.gap()) + ", rate " +
                         fmt(gs.decay.rate) + " >= " + fmt(floor) + ", winding " +
                         std::to_string(winding) + ", certified to r = " + fmt(gs.r_certified);
    for (const std::string& f : failed) {
        detail += "; failed " + f;
    }
    return {failed.empty(), detail};
}

Outcome nonexistence() {
    IntegratorConfig cfg;
    cfg.r_max = 200.0;
    // A second pass with only the decay event rules out a decay that the
    // classification events would have cut short.
    const std::vector<EventSpec> decay_only{{EventKind::DecayDetected}};
    int decayed = 0;
    int late_decay = 0;
    int shots = 0;
    for (const auto& [a, b] : {std::pair{4.0, 4.0}, {1.0, 4.0}, {3.0, 2.0}}) {
        const ModelParams p(a, b);
        for (int k = 1; k <= 50; ++k) {
            const double x = k / 51.0;
            ++shots;
            decayed += classify_shot(x, p, cfg).cls == ShotClass::Decayed ? 1 : 0;
            const Trajectory t = integrate_radial(x, p, cfg, decay_only);
            late_decay += t.termination().cause == TerminationCause::Event ? 1 : 0;
        }
    }
    return {decayed == 0 && late_decay == 0,
            std::to_string(decayed) + " decayed of " + std::to_string(shots) +
                " shots, horizon pass " + std::to_string(late_decay) + " decayed"};
}

Outcome trapping() {
    const ModelParams p(9.0, 4.0);
    double min_g2 = INFINITY;
    std::string classes;
    for (double x : {1.1, 1.5, 2.0}) {
        const ShotOutcome o = classify_shot(x, p, IntegratorConfig{});
        for (const Sample& s : o.trajectory.samples()) {
            min_g2 = std::min(min_g2, s.g * s.g);
        }
        classes += (classes.empty() ? "" : ",") + std::string(to_string(o.cls));
    }
    return {min_g2 >= 1.0 - 1e-10, "min g^2 " + fmt(min_g2) + " >= 1 - 1e-10 (" + classes + ")"};
}

Outcome plateau_ordering() {
    const GroundState g94 = bisect_ground_state(ModelParams(9.0, 4.0), IntegratorConfig{});
    const GroundState g41 = bisect_ground_state(ModelParams(4.0, 1.0), IntegratorConfig{});
    const double s94 = plateau_metrics(g94.trajectory).plateau_score;
    const double s41 = plateau_metrics(g41.trajectory).plateau_score;
    const PhysicalScales scales{1.0, 10.0};
    double vm = 0.0;
    double vp = 0.0;
    for (const Sample& s : g94.trajectory.samples()) {
        const Potentials v = potentials({s.f, s.g}, scales, g94.params);
        vm = std::max(vm, std::abs(v.VminusS));
        vp = std::max(vp, std::abs(v.VplusS));
    }
    const double ratio = vm / vp;
    return {s94 > s41 && ratio > 10.0, "score(9,4) " + fmt(s94) + " > score(4,1) " + fmt(s41) +
                                           ", max|V-S|/max|V+S| " + fmt(ratio) + " > 10"};
}

Outcome shifted_convergence() {
    const ModelParams p(9.0, 4.0);
    const PhasePoint p0{0.3, 0.5};
    IntegratorConfig cfg;
    cfg.r_max = 5.0;
    const Trajectory cons = integrate_conservative(p0, p, cfg);
    std::vector<double> d;
    for (double rho : {10.0, 100.0, 1000.0}) {
        d.push_back(sup_distance(integrate_shifted(p0, rho, p, cfg), cons, 5.0, 1e-3));
    }
    const bool ok = d[0] > d[1] && d[1] > d[2] && d[2] <= 1e-2;
    return {ok, "distances " + fmt(d[0]) + " > " + fmt(d[1]) + " > " + fmt(d[2]) + ", last <= 1e-2"};
}

Outcome seed_interval() {
    const ModelParams p(9.0, 4.0);
    const double lo = std::sqrt(4.0 / 9.0) + 0.01;
    const double hi = std::sqrt(8.0 / 9.0) - 0.01;
    int in_i = 0;
    double worst_g = -INFINITY;
    double worst_h = -INFINITY;
    bool bounds = true;
    for (int k = 0; k <= 10; ++k) {
        const ShotOutcome o = classify_shot(lo + (hi - lo) * k / 10.0, p, IntegratorConfig{});
        if (o.cls != ShotClass::InSetI) {
            continue;
        }
        ++in_i;
        worst_g = std::max(worst_g, *o.g_at_rx);
        worst_h = std::max(worst_h, *o.H_at_rx);
        bounds = bounds && *o.g_at_rx >= 0.0 && *o.g_at_rx <= p.g_minimum() + 1e-8 &&
                 *o.H_at_rx <= 1e-8;
    }
    return {in_i == 11 && bounds, std::to_string(in_i) + "/11 in I, max g(r_x) " + fmt(worst_g) +
                                      ", max H(r_x) " + fmt(worst_h)};
}

Outcome gradient_and_series() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_real_distribution<double> coupling(0.5, 10.0);
    double worst_grad = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const ModelParams p(coupling(rng), coupling(rng));
        const PhasePoint q{u(rng), u(rng)};
        const Gradient g = hamiltonian_gradient(q, p);
        const double h = 1e-5;
        const double df = (hamiltonian({q.f + h, q.g}, p) - hamiltonian({q.f - h, q.g}, p)) / (2 * h);
        const double dg = (hamiltonian({q.f, q.g + h}, p) - hamiltonian({q.f, q.g - h}, p)) / (2 * h);
        const double scale = std::max({1.0, std::abs(g.df), std::abs(g.dg)});
        worst_grad = std::max({worst_grad, std::abs(g.df - df) / scale, std::abs(g.dg - dg) / scale});
    }
    const ModelParams p(9.0, 4.0);
    std::uniform_real_distribution<double> ux(-1.5, 1.5);
    const double r0 = 1e-6;
    double worst_slope = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double x = ux(rng);
        const double expected = x * (4.0 - 9.0 * x * x) / 3.0;
        const double measured = series_start(x, p, r0).f / r0;
        worst_slope = std::max(worst_slope,
                               std::abs(measured - expected) / std::max(1.0, std::abs(expected)));
    }
    return {worst_grad <= 1e-6 && worst_slope <= 1e-12,
            "gradient " + fmt(worst_grad) + " <= 1e-6, series slope " + fmt(worst_slope) +
                " <= 1e-12"};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "coth_oracle", 1.0, coth_oracle},
        {2, "conservative_energy", 5.0, conservative_energy},
        {3, "dissipation_identity", 5.0, dissipation_identity},
        {4, "ground_state_9_4", 30.0, ground_state},
        {5, "nonexistence_grids", 60.0, nonexistence},
        {6, "trapping_above_one", 5.0, trapping},
        {7, "plateau_ordering", 60.0, plateau_ordering},
        {8, "shifted_convergence", 5.0, shifted_convergence},
        {9, "seed_interval_in_I", 10.0, seed_interval},
        {10, "gradient_and_series", 2.0, gradient_and_series},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.time_limit;
        const bool passed = o.passed && in_time;
        failures += passed ? 0 : 1;
        std::printf("[%s] %2d %-22s %s; %.3f s < %g s%s\n", passed ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.time_limit, in_time ? "" : " (too slow)");
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
