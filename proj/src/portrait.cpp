#include "nucshoot/portrait.hpp"

#include "nucshoot/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nucshoot {

namespace {

// Roundoff allowance when the discriminant or a radicand vanishes at an
// interval end.
double clamp_small(double v, double scale) {
    return (v < 0.0 && v > -1e-12 * scale) ? 0.0 : v;
}

bool is_factored_case(double level, const ModelParams& params) {
    const double scale = std::max({1.0, params.a(), params.b()});
    return params.regime() == Regime::Critical && std::abs(level) <= kRegimeTolerance * scale;
}

// Intervals in u = f^2 on which the branch is real, capped at u_max.
std::vector<Interval> u_intervals(Branch branch, double level, const ModelParams& params,
                                  double u_max) {
    const double a = params.a();
    const double b = params.b();
    std::vector<Interval> raw;
    const double disc = a * (a - 2.0 * b - 4.0 * level);
    if (disc < 0.0) {
        raw.push_back({0.0, u_max});
    } else {
        const double root = std::sqrt(disc);
        const double u_minus = a - b - root;
        const double u_plus = a - b + root;
        if (u_minus >= 0.0) {
            raw.push_back({0.0, std::min(u_minus, u_max)});
        }
        if (u_plus <= u_max) {
            raw.push_back({std::max(u_plus, 0.0), u_max});
        }
    }
    const bool second = branch == Branch::H2Plus || branch == Branch::H2Minus;
    const double floor = second ? std::max(0.0, 2.0 * level) : 0.0;

    std::vector<Interval> out;
    for (Interval iv : raw) {
        iv.lo = std::max(iv.lo, floor);
        if (iv.hi < iv.lo) {
            continue;
        }
        if (!out.empty() && iv.lo <= out.back().hi) {
            out.back().hi = std::max(out.back().hi, iv.hi);
        } else {
            out.push_back(iv);
        }
    }
    return out;
}

double branch_sign(Branch branch) {
    return (branch == Branch::H1Plus || branch == Branch::H2Plus) ? 1.0 : -1.0;
}

// Branch value with endpoint clamping, for sampling on a known domain.
double sampled_branch(Branch branch, double f, double level, const ModelParams& params) {
    const double f2 = f * f;
    const double scale = (f2 + params.b()) * (f2 + params.b()) + 1.0;
    const double h = std::max(0.0, clamp_small(level_discriminant(f, level, params), scale));
    const double root = std::sqrt(h);
    const bool first = branch == Branch::H1Plus || branch == Branch::H1Minus;
    const double inner = first ? f2 + params.b() + root : f2 + params.b() - root;
    return branch_sign(branch) * std::sqrt(std::max(0.0, inner) / params.a());
}

} // namespace

std::string_view to_string(Branch branch) {
    switch (branch) {
    case Branch::H1Plus:
        return "h1_plus";
    case Branch::H1Minus:
        return "h1_minus";
    case Branch::H2Plus:
        return "h2_plus";
    case Branch::H2Minus:
        return "h2_minus";
    }
    return "unknown";
}

double level_discriminant(double f, double level, const ModelParams& params) {
    const double f2 = f * f;
    const double s = f2 + params.b();
    return s * s - 2.0 * params.a() * (f2 - 2.0 * level);
}

std::optional<BranchValues> branch_functions(double f, double level, const ModelParams& params) {
    const double h = level_discriminant(f, level, params);
    if (h < 0.0) {
        return std::nullopt;
    }
    const double root = std::sqrt(h);
    const double s = f * f + params.b();
    BranchValues out{std::sqrt((s + root) / params.a()), std::nullopt};
    const double inner = s - root;
    if (inner >= 0.0) {
        out.h2 = std::sqrt(inner / params.a());
    }
    return out;
}

std::vector<Interval> branch_domain(Branch branch, double level, const ModelParams& params,
                                    double f_extent) {
    if (!(f_extent > 0.0)) {
        throw DomainError("f_extent must be positive");
    }
    std::vector<Interval> out;
    std::vector<Interval> negative;
    for (const Interval& u : u_intervals(branch, level, params, f_extent * f_extent)) {
        const double lo = std::sqrt(u.lo);
        const double hi = std::sqrt(u.hi);
        if (lo == 0.0) {
            out.push_back({-hi, hi});
        } else {
            out.push_back({lo, hi});
            negative.push_back({-hi, -lo});
        }
    }
    out.insert(out.end(), negative.begin(), negative.end());
    std::sort(out.begin(), out.end(), [](const Interval& l, const Interval& r) { return l.lo < r.lo; });
    return out;
}

double default_f_extent(const ModelParams& params) {
    return 1.5 * std::sqrt(std::max({params.a(), params.b(), 1.0}));
}

std::vector<LevelSetCurve> level_set(double level, const ModelParams& params, int resolution,
                                     std::optional<double> f_extent) {
    if (resolution < 2) {
        throw DomainError("resolution must be at least 2");
    }
    const double extent = f_extent.value_or(default_f_extent(params));
    const auto n = static_cast<std::size_t>(resolution);
    auto grid = [&](Interval iv, std::size_t i) {
        return i + 1 == n ? iv.hi : iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) /
                                                static_cast<double>(n - 1);
    };

    std::vector<LevelSetCurve> curves;
    constexpr Branch kBranches[] = {Branch::H1Plus, Branch::H1Minus, Branch::H2Plus,
                                    Branch::H2Minus};
    if (is_factored_case(level, params)) {
        // (b g^2 - f^2)(g^2 - 1) = 0.
        const double inv_sqrt_b = 1.0 / std::sqrt(params.b());
        const Interval iv{-extent, extent};
        for (Branch br : kBranches) {
            LevelSetCurve c{level, br, {}, iv};
            c.samples.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double f = grid(iv, i);
                const bool first = br == Branch::H1Plus || br == Branch::H1Minus;
                const double g = first ? 1.0 : f * inv_sqrt_b;
                c.samples.push_back({f, branch_sign(br) * g, std::nullopt});
            }
            curves.push_back(std::move(c));
        }
        return curves;
    }

    for (Branch br : kBranches) {
        for (const Interval& iv : branch_domain(br, level, params, extent)) {
            if (!(iv.hi > iv.lo)) {
                continue;
            }
            LevelSetCurve c{level, br, {}, iv};
            c.samples.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double f = grid(iv, i);
                c.samples.push_back({f, sampled_branch(br, f, level, params), std::nullopt});
            }
            curves.push_back(std::move(c));
        }
    }
    return curves;
}

std::vector<LevelSetCurve> zero_contour(const ModelParams& params, int resolution,
                                        std::optional<double> f_extent) {
    return level_set(0.0, params, resolution, f_extent);
}

double level_residual(const PhasePoint& p, double level, const ModelParams& params) {
    const double f2 = p.f * p.f;
    const double g2 = p.g * p.g;
    return params.a() * g2 * g2 - 2.0 * (f2 + params.b()) * g2 + 2.0 * f2 - 4.0 * level;
}

bool admissible_contains(const PhasePoint& p, const ModelParams& params) {
    if (!params.supercritical()) {
        throw DomainError("the admissible set is defined for a - 2b > 0 only");
    }
    const double a = params.a();
    const double b = params.b();
    // Rounding slack so boundary points such as (sqrt(a - b), 1) count as inside.
    const double lhs = 2.0 * p.f * p.f - a * p.g * p.g - (a - 2.0 * b);
    const double scale = 2.0 * p.f * p.f + a * p.g * p.g + (a - 2.0 * b);
    return lhs <= 1e-14 * scale && p.g * p.g <= 1.0;
}

AdmissibleRegionReport admissible_region(const ModelParams& params, int resolution) {
    if (!params.supercritical()) {
        throw DomainError("the admissible set is defined for a - 2b > 0 only");
    }
    if (resolution < 2) {
        throw DomainError("resolution must be at least 2");
    }
    const double a = params.a();
    const double b = params.b();
    const double corner = std::sqrt(a - b);
    const auto n = static_cast<std::size_t>(resolution);
    auto lerp = [&](double from, double to, std::size_t i) {
        return from + (to - from) * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    auto arc = [&](double g) { return std::sqrt((a * g * g + a - 2.0 * b) / 2.0); };

    AdmissibleRegionReport report{a, b, {}};
    auto& pts = report.boundary;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double g = lerp(-1.0, 1.0, i);
        pts.push_back({arc(g), g, std::nullopt});
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        pts.push_back({lerp(corner, -corner, i), 1.0, std::nullopt});
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double g = lerp(1.0, -1.0, i);
        pts.push_back({-arc(g), g, std::nullopt});
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        pts.push_back({lerp(-corner, corner, i), -1.0, std::nullopt});
    }
    pts.push_back(pts.front());
    return report;
}

EnergySignGrid energy_sign_grid(const ModelParams& params, Interval f_range, Interval g_range,
                                int nf, int ng) {
    if (nf < 2 || ng < 2 || !(f_range.hi > f_range.lo) || !(g_range.hi > g_range.lo)) {
        throw DomainError("sign grid needs at least 2x2 nodes on nonempty ranges");
    }
    EnergySignGrid grid{f_range.lo, f_range.hi, g_range.lo, g_range.hi, nf, ng, {}};
    grid.sign.reserve(static_cast<std::size_t>(nf) * static_cast<std::size_t>(ng));
    for (int j = 0; j < ng; ++j) {
        const double g = g_range.lo + (g_range.hi - g_range.lo) * j / (ng - 1);
        for (int i = 0; i < nf; ++i) {
            const double f = f_range.lo + (f_range.hi - f_range.lo) * i / (nf - 1);
            const double h = hamiltonian({f, g, std::nullopt}, params);
            grid.sign.push_back(static_cast<std::int8_t>((h > 0.0) - (h < 0.0)));
        }
    }
    return grid;
}

WindingResult winding_count(const Trajectory& traj, double r1, double r2) {
    if (traj.empty()) {
        throw DomainError("empty trajectory");
    }
    r1 = std::max(r1, traj.r_front());
    r2 = std::min(r2, traj.r_back());
    if (!(r2 >= r1)) {
        throw DomainError("winding interval is empty");
    }

    std::vector<PhasePoint> pts;
    pts.push_back(traj.state_at(r1));
    for (const Sample& s : traj.samples()) {
        if (s.r > r1 && s.r < r2) {
            pts.push_back({s.f, s.g, s.r});
        }
    }
    if (r2 > r1) {
        pts.push_back(traj.state_at(r2));
    }
    for (const PhasePoint& p : pts) {
        if (std::abs(p.f) + std::abs(p.g) <= 1e-10) {
            throw UndefinedLiftError("trajectory passes through the origin at r=" +
                                     std::to_string(p.r.value_or(0.0)));
        }
    }

    constexpr double pi = std::numbers::pi;
    auto raw = [](const PhasePoint& p) { return std::atan2(-p.f, p.g); };
    auto wrap = [](double d) {
        while (d > pi) d -= 2.0 * pi;
        while (d <= -pi) d += 2.0 * pi;
        return d;
    };

    WindingResult out{0, {}};
    out.lift.push_back({*pts.front().r, raw(pts.front())});
    // Appends the lift from `from` to `to`, bisecting in r while the step in
    // angle is pi/2 or more.
    auto extend = [&](auto&& self, const PhasePoint& from, const PhasePoint& to, int depth) -> void {
        const double d = wrap(raw(to) - raw(from));
        if (std::abs(d) >= pi / 2.0 && depth < 40) {
            const double rm = 0.5 * (*from.r + *to.r);
            const PhasePoint mid = traj.state_at(rm);
            if (std::abs(mid.f) + std::abs(mid.g) <= 1e-10) {
                throw UndefinedLiftError("trajectory passes through the origin at r=" +
                                         std::to_string(rm));
            }
            self(self, from, mid, depth + 1);
            self(self, mid, to, depth + 1);
            return;
        }
        out.lift.push_back({*to.r, out.lift.back().theta + d});
    };
    for (std::size_t i = 1; i < pts.size(); ++i) {
        extend(extend, pts[i - 1], pts[i], 0);
    }

    // g vanishes where theta = pi/2 + k pi.
    const double t1 = out.lift.front().theta;
    const double t2 = out.lift.back().theta;
    const auto k = [&](double t) { return std::floor((t - pi / 2.0) / pi); };
    out.count = static_cast<int>(std::abs(k(t2) - k(t1)));
    return out;
}

} // namespace nucshoot
