#include "nucshoot/shooting.hpp"

#include "nucshoot/errors.hpp"
#include "nucshoot/portrait.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nucshoot {

namespace {

bool same_value(const InitialValue& l, const InitialValue& r) {
    return l.x() == r.x() && l.gap() == r.gap();
}

std::string format(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// 1 - g^2 from the gap column, exact near g = 1.
double one_minus_g2(const Sample& s) { return s.gap * (2.0 - s.gap); }

ShotOutcome classify_trapped(ShotOutcome out) {
    double min_g2 = std::numeric_limits<double>::infinity();
    for (const Sample& s : out.trajectory.samples()) {
        min_g2 = std::min(min_g2, 1.0 - one_minus_g2(s));
    }
    out.cls = min_g2 >= 1.0 - 1e-10 ? ShotClass::Trapped : ShotClass::Undetermined;
    return out;
}

} // namespace

std::string_view to_string(ShotClass cls) {
    switch (cls) {
    case ShotClass::TrivialZero:
        return "trivial_zero";
    case ShotClass::InSetI:
        return "in_set_i";
    case ShotClass::FVanishedFirst:
        return "f_vanished_first";
    case ShotClass::GVanishedFirst:
        return "g_vanished_first";
    case ShotClass::Trapped:
        return "trapped";
    case ShotClass::Decayed:
        return "decayed";
    case ShotClass::Blowup:
        return "blowup";
    case ShotClass::Undetermined:
        return "undetermined";
    }
    return "unknown";
}

std::vector<EventSpec> classification_events() {
    EventSpec gamma{EventKind::FPrimeCrossesZero};
    gamma.terminal = false;
    return {{EventKind::FCrossesZero},
            {EventKind::GCrossesZero},
            {EventKind::GSquaredReachesOne},
            {EventKind::DecayDetected},
            gamma};
}

ShotOutcome classify_shot(double x0, const ModelParams& params, const IntegratorConfig& config) {
    return classify_shot(InitialValue::from_x(x0), params, config);
}

ShotOutcome classify_shot(const InitialValue& x0, const ModelParams& params,
                          const IntegratorConfig& config) {
    ShotOutcome out;
    out.x0 = x0;
    const double x = x0.x();
    if (x == 0.0) {
        config.validate();
        out.cls = ShotClass::TrivialZero;
        out.trajectory = exact_trivial(params, config.r_max);
        return out;
    }

    const auto events = classification_events();
    out.trajectory = integrate_radial(x0, params, config, events);
    const Trajectory& t = out.trajectory;
    for (const EventRecord& e : t.events()) {
        if (e.kind == EventKind::FPrimeCrossesZero) {
            out.gamma_x = e.r;
            break;
        }
    }
    if (x * x >= 1.0 || x0.gap() <= 0.0) {
        return classify_trapped(std::move(out));
    }

    const Termination& term = t.termination();
    if (term.cause == TerminationCause::Blowup) {
        out.cls = ShotClass::Blowup;
        return out;
    }
    if (term.cause == TerminationCause::ReachedRmax || term.kinds.size() != 1) {
        out.cls = ShotClass::Undetermined;
        return out;
    }

    const double s = x > 0.0 ? 1.0 : -1.0;
    const Sample& last = t.samples().back();
    switch (term.kinds.front()) {
    case EventKind::FCrossesZero: {
        out.r_x = term.r;
        out.g_at_rx = s * last.g;
        out.H_at_rx = last.H;
        bool signs = std::abs(x) > params.g_minimum();
        for (const Sample& smp : t.samples()) {
            if (smp.r > 0.0 && smp.r < term.r && !(s * smp.f < 0.0 && s * smp.g > 0.0)) {
                signs = false;
                break;
            }
        }
        if (!signs) {
            out.cls = ShotClass::FVanishedFirst;
        } else if (std::abs(last.f) <= 1e-9 * std::max(1.0, std::abs(last.g))) {
            out.cls = ShotClass::InSetI;
        } else {
            out.cls = ShotClass::Undetermined;
        }
        break;
    }
    case EventKind::GCrossesZero:
        out.r_g = term.r;
        out.cls = ShotClass::GVanishedFirst;
        break;
    case EventKind::GSquaredReachesOne:
        out.cls = ShotClass::Trapped;
        break;
    case EventKind::DecayDetected:
        out.cls = ShotClass::Decayed;
        break;
    case EventKind::FPrimeCrossesZero:
        out.cls = ShotClass::Undetermined;
        break;
    }
    return out;
}

SeedBracket seed_bracket(const ModelParams& params, const IntegratorConfig& config,
                         const SeedOptions& options) {
    if (!params.supercritical()) {
        throw DomainError("ground states require a - 2b > 0");
    }
    if (!(options.scan_step > 0.0) || !(options.delta > 0.0) || options.delta >= 1.0 ||
        options.refinements < 0 || !(options.gap_floor > 0.0)) {
        throw DomainError("invalid seed scan options");
    }
    SeedBracket out;
    const double lo_edge = params.g_minimum();
    const double hi_edge = params.g_zero_energy();
    out.x_lo = InitialValue::from_x(0.5 * (lo_edge + hi_edge));
    const ShotOutcome seed = classify_shot(out.x_lo, params, config);
    out.scan.push_back({out.x_lo, seed.cls});
    if (seed.cls != ShotClass::InSetI) {
        throw BracketError("seed midpoint x=" + format(out.x_lo.x()) + " classified " +
                           std::string(to_string(seed.cls)) + ", not in I");
    }

    // Shots in increasing x; returns true once a shot outside I is found.
    InitialValue last_in = out.x_lo;
    auto visit = [&](const InitialValue& x) {
        const ShotOutcome shot = classify_shot(x, params, config);
        out.scan.push_back({x, shot.cls});
        if (shot.cls == ShotClass::InSetI) {
            last_in = x;
            return false;
        }
        out.x_lo_scan = last_in;
        out.x_hi = x;
        out.hi_class = shot.cls;
        return true;
    };
    auto linear = [&](double step) {
        last_in = out.x_lo;
        const double top = 1.0 - options.delta;
        for (long k = 0;; ++k) {
            const double x = hi_edge + static_cast<double>(k) * step;
            if (x > top) {
                return false;
            }
            if (visit(InitialValue::from_x(x))) {
                return true;
            }
        }
    };
    auto geometric = [&]() {
        last_in = out.x_lo;
        for (int k = static_cast<int>(std::floor(-std::log10(options.delta))) + 1;; ++k) {
            const double gap = std::pow(10.0, -k);
            if (gap < options.gap_floor) {
                return false;
            }
            if (gap >= options.delta) {
                continue;
            }
            if (visit(InitialValue::from_gap(gap))) {
                return true;
            }
        }
    };

    if (linear(options.scan_step) || geometric()) {
        return out;
    }
    double step = options.scan_step;
    for (int i = 0; i < options.refinements; ++i) {
        step /= 10.0;
        if (linear(step)) {
            return out;
        }
    }
    throw BracketError("every scanned shot up to 1 - x = " + format(options.gap_floor) +
                       " lies in I; rerun with a finer scan step");
}

DecayFit fit_decay_rate(const Trajectory& traj, double window) {
    if (!(window > 0.0 && window <= 1.0)) {
        throw DomainError("decay window must lie in (0, 1]");
    }
    if (traj.empty()) {
        throw NotDecayingError("empty trajectory");
    }
    const double r_end = traj.r_back();
    const double r_begin = r_end - window * (r_end - traj.r_front());
    std::vector<double> rs;
    std::vector<double> ys;
    double prev = std::numeric_limits<double>::infinity();
    for (const Sample& s : traj.samples()) {
        if (s.r < r_begin || s.r <= 0.0) {
            continue;
        }
        const double amp = std::abs(s.f) + std::abs(s.g);
        if (!(amp > 0.0) || amp > prev) {
            throw NotDecayingError("|f| + |g| is not decreasing at r=" + format(s.r));
        }
        prev = amp;
        rs.push_back(s.r);
        ys.push_back(std::log(amp));
    }
    if (rs.size() < 20) {
        throw NotDecayingError("decay window holds " + std::to_string(rs.size()) +
                               " samples, need 20");
    }
    const double n = static_cast<double>(rs.size());
    double mr = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        mr += rs[i];
        my += ys[i];
    }
    mr /= n;
    my /= n;
    double srr = 0.0;
    double sry = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        srr += (rs[i] - mr) * (rs[i] - mr);
        sry += (rs[i] - mr) * (ys[i] - my);
    }
    const double slope = sry / srr;
    const double intercept = my - slope * mr;
    double ss = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const double e = ys[i] - (intercept + slope * rs[i]);
        ss += e * e;
    }
    if (!(slope < 0.0)) {
        throw NotDecayingError("fitted log-slope is not negative");
    }
    return {-slope, std::exp(intercept), std::sqrt(ss / n), rs.size(), rs.front(), rs.back()};
}

bool LemmaReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.passed; });
}

const LemmaCheck* LemmaReport::find(std::string_view name) const {
    for (const LemmaCheck& c : checks) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

LemmaReport audit_trajectory(const Trajectory& traj, const AuditOptions& options) {
    static constexpr const char* kNames[] = {
        "dissipation_identity",  "g_squared_below_one",  "f_squared_below_a_minus_b",
        "admissible_membership", "energy_nonincreasing", "sign_conditions",
        "f_bounded_by_g",        "decay_bound",          "winding_zero"};

    LemmaReport report;
    const bool zero = std::all_of(traj.samples().begin(), traj.samples().end(),
                                  [](const Sample& s) { return s.f == 0.0 && s.g == 0.0; });
    if (zero) {
        for (const char* name : kNames) {
            report.checks.push_back({name, true, 0.0, "vacuous on the zero solution"});
        }
        return report;
    }

    const ModelParams& params = traj.params();
    const double a = params.a();
    const double b = params.b();
    std::vector<Sample> pos;
    for (const Sample& s : traj.samples()) {
        if (s.r > 0.0) {
            pos.push_back(s);
        }
    }

    {
        const DissipationResidual res = dissipation_residual(traj);
        report.checks.push_back({kNames[0], res.worst <= options.dissipation_tolerance, res.worst,
                                 std::to_string(res.points) + " points, worst at r=" +
                                     format(res.r_worst)});
    }
    {
        double min_w = std::numeric_limits<double>::infinity();
        for (const Sample& s : traj.samples()) {
            min_w = std::min(min_w, one_minus_g2(s));
        }
        report.checks.push_back({kNames[1], min_w > 0.0, 1.0 - min_w, "max g^2"});
    }
    {
        double max_f2 = 0.0;
        for (const Sample& s : traj.samples()) {
            max_f2 = std::max(max_f2, s.f * s.f);
        }
        report.checks.push_back(
            {kNames[2], max_f2 < a - b, max_f2, "max f^2 against a - b = " + format(a - b)});
    }
    if (params.supercritical()) {
        std::size_t outside = 0;
        for (const Sample& s : traj.samples()) {
            if (!admissible_contains({s.f, s.g, s.r}, params)) {
                ++outside;
            }
        }
        report.checks.push_back({kNames[3], outside == 0, static_cast<double>(outside),
                                 "samples outside the admissible set"});
    } else {
        report.checks.push_back({kNames[3], false, 0.0, "admissible set needs a - 2b > 0"});
    }
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < traj.samples().size(); ++i) {
            worst = std::max(worst, traj.samples()[i].H - traj.samples()[i - 1].H);
        }
        report.checks.push_back({kNames[4], worst <= options.energy_slack, worst,
                                 "largest increase of H between samples"});
    }
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (const Sample& s : pos) {
            worst = std::max({worst, s.f, -s.g});
        }
        report.checks.push_back({kNames[5], worst < options.sign_tolerance, worst,
                                 "max of f and -g for r > 0"});
    }
    {
        const double k = std::sqrt(a / 2.0);
        double worst = -std::numeric_limits<double>::infinity();
        for (const Sample& s : pos) {
            worst = std::max(worst, std::abs(s.f) - k * s.g);
        }
        report.checks.push_back({kNames[6], worst <= options.sign_tolerance, worst,
                                 "max of |f| - sqrt(a/2) g"});
    }
    {
        LemmaCheck check{kNames[7], false, 0.0, ""};
        try {
            if (2.0 * a <= b) {
                throw DomainError("K_{a,b} needs 2a > b");
            }
            const double K = params.decay_bound_rate();
            const DecayFit fit = fit_decay_rate(traj, options.decay_window);
            check.metric = fit.rate;
            const double r_mid = 0.5 * (fit.r_begin + fit.r_end);
            double C = 0.0;
            for (const Sample& s : pos) {
                if (s.r >= fit.r_begin && s.r <= r_mid) {
                    C = std::max(C, (std::abs(s.f) + std::abs(s.g)) * std::exp(K * s.r));
                }
            }
            bool bound = true;
            for (const Sample& s : pos) {
                if (s.r > r_mid &&
                    std::abs(s.f) + std::abs(s.g) > C * std::exp(-K * s.r) * (1.0 + 1e-9)) {
                    bound = false;
                }
            }
            report.decay_C = C;
            check.passed = fit.rate >= K - options.rate_slack && bound;
            check.detail = "rate " + format(fit.rate) + " vs K " + format(K) + ", C " + format(C) +
                           (bound ? "" : ", pointwise bound violated");
        } catch (const Error& e) {
            check.detail = e.what();
        }
        report.checks.push_back(std::move(check));
    }
    {
        LemmaCheck check{kNames[8], false, 0.0, ""};
        if (pos.empty()) {
            check.detail = "no samples with r > 0";
        } else {
            try {
                const WindingResult w = winding_count(traj, pos.front().r, traj.r_back());
                check.metric = w.count;
                check.passed = w.count == 0;
                check.detail = "zeros of g";
            } catch (const Error& e) {
                check.detail = e.what();
            }
        }
        report.checks.push_back(std::move(check));
    }
    return report;
}

LemmaReport audit_lemmas(const GroundState& gs, const AuditOptions& options) {
    return audit_trajectory(gs.trajectory, options);
}

GroundState bisect_ground_state(const ModelParams& params, const IntegratorConfig& config,
                                const BisectOptions& options) {
    if (!(options.x_tol > 0.0) || options.gap_rtol < 0.0 || !(options.horizon_factor >= 1.0) ||
        !(options.certify_rtol > 0.0)) {
        throw DomainError("invalid bisection options");
    }
    const SeedBracket seed = seed_bracket(params, config, options.seed);

    GroundState gs;
    gs.params = params;
    gs.x_lo = seed.x_lo_scan;
    gs.x_hi = seed.x_hi;
    gs.hi_class = seed.hi_class;
    gs.r_max_used = config.r_max;

    auto resolved = [&]() {
        const InitialValue& lo = gs.x_lo;
        const InitialValue& hi = gs.x_hi;
        if (hi.x() - lo.x() > options.x_tol) {
            return false;
        }
        if (std::abs(lo.gap()) <= 0.5 && std::abs(hi.gap()) <= 0.5) {
            return std::abs(lo.gap() - hi.gap()) <=
                   options.gap_rtol * std::max(std::abs(lo.gap()), std::abs(hi.gap()));
        }
        return true;
    };

    int unresolved = 0;
    while (gs.iterations < options.max_iterations && !resolved()) {
        const InitialValue mid = InitialValue::midpoint(gs.x_lo, gs.x_hi);
        if (same_value(mid, gs.x_lo) || same_value(mid, gs.x_hi)) {
            break;
        }
        ++gs.iterations;
        IntegratorConfig cfg = config;
        ShotOutcome shot = classify_shot(mid, params, cfg);
        while (shot.cls == ShotClass::Undetermined &&
               cfg.r_max * 2.0 <= config.r_max * options.horizon_factor) {
            cfg.r_max *= 2.0;
            gs.r_max_used = std::max(gs.r_max_used, cfg.r_max);
            shot = classify_shot(mid, params, cfg);
        }
        if (shot.cls == ShotClass::InSetI) {
            gs.x_lo = mid;
            unresolved = 0;
            continue;
        }
        gs.x_hi = mid;
        gs.hi_class = shot.cls;
        if (shot.cls == ShotClass::Undetermined && ++unresolved > options.max_unresolved) {
            throw PrecisionExhaustedError("midpoints stay undetermined at r_max=" +
                                              format(cfg.r_max),
                                          gs.x_lo.x(), gs.x_hi.x());
        }
    }

    // The two bracket ends shadow the ground state as long as they agree.
    const ShotOutcome lo = classify_shot(gs.x_lo, params, config);
    const ShotOutcome hi = classify_shot(gs.x_hi, params, config);
    const double r_common = std::min(lo.trajectory.r_back(), hi.trajectory.r_back());
    double r_cert = r_common;
    double r_prev = 0.0;
    for (const Sample& s : lo.trajectory.samples()) {
        if (s.r > r_common) {
            break;
        }
        const PhasePoint q = hi.trajectory.state_at(s.r);
        const double diff = std::abs(s.f - q.f) + std::abs(s.g - q.g);
        if (diff > options.certify_rtol * (std::abs(s.f) + std::abs(s.g))) {
            r_cert = r_prev;
            break;
        }
        r_prev = s.r;
    }
    gs.r_certified = r_cert;

    gs.x_star = gs.x_lo;
    Trajectory full = lo.trajectory;
    const InitialValue mid = InitialValue::midpoint(gs.x_lo, gs.x_hi);
    if (!same_value(mid, gs.x_lo) && !same_value(mid, gs.x_hi)) {
        ShotOutcome shot = classify_shot(mid, params, config);
        if (shot.cls == ShotClass::Decayed) {
            gs.x_star = mid;
            full = std::move(shot.trajectory);
        }
    }
    gs.trajectory = full.truncated(r_cert);
    try {
        gs.decay = fit_decay_rate(gs.trajectory, options.audit.decay_window);
    } catch (const NotDecayingError&) {
        gs.decay = {};
    }
    gs.report = audit_trajectory(gs.trajectory, options.audit);
    return gs;
}

} // namespace nucshoot
