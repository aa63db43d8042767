#include "nucshoot/model.hpp"

#include "nucshoot/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

namespace nucshoot {

std::string_view to_string(Regime regime) {
    switch (regime) {
    case Regime::Supercritical:
        return "supercritical";
    case Regime::Critical:
        return "critical";
    case Regime::SubcriticalAB:
        return "subcritical_ab";
    case Regime::Degenerate:
        return "degenerate";
    case Regime::Subcritical:
        return "subcritical";
    }
    return "unknown";
}

std::string_view to_string(CriticalKind kind) {
    return kind == CriticalKind::LocalMin ? "local_min" : "saddle";
}

ModelParams::ModelParams(double a, double b) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b) || a <= 0.0 || b <= 0.0) {
        throw DomainError("model parameters must satisfy a > 0 and b > 0 (got a=" +
                          std::to_string(a) + ", b=" + std::to_string(b) + ")");
    }
}

Regime ModelParams::regime(double tolerance) const {
    const double scale = std::max({1.0, a_, b_});
    const double gap = a_ - 2.0 * b_;
    if (std::abs(gap) <= tolerance * scale) {
        return Regime::Critical;
    }
    if (gap > 0.0) {
        return Regime::Supercritical;
    }
    const double diff = a_ - b_;
    if (std::abs(diff) <= tolerance * scale) {
        return Regime::Degenerate;
    }
    return diff > 0.0 ? Regime::SubcriticalAB : Regime::Subcritical;
}

double ModelParams::decay_bound_rate() const {
    if (2.0 * a_ <= b_) {
        throw DomainError("decay rate K_{a,b} requires 2a > b");
    }
    return std::min(b_ / 2.0, (2.0 * a_ - b_) / (2.0 * a_));
}

double ModelParams::g_minimum() const { return std::sqrt(b_ / a_); }

double ModelParams::g_zero_energy() const { return std::sqrt(2.0 * b_ / a_); }

Regime classify_regime(const ModelParams& params, double tolerance) {
    return params.regime(tolerance);
}

Velocity rhs_radial(double r, const PhasePoint& p, const ModelParams& params) {
    if (r == 0.0) {
        throw SingularityError("radial field is singular at r = 0; start from series_start");
    }
    if (!(r > 0.0)) {
        throw DomainError("radial field requires r > 0");
    }
    const Velocity v = rhs_conservative(p, params);
    return {v.df - 2.0 / r * p.f, v.dg};
}

Velocity rhs_conservative(const PhasePoint& p, const ModelParams& params) {
    const double f = p.f;
    const double g = p.g;
    return {g * (f * f - params.a() * g * g + params.b()), f * (1.0 - g * g)};
}

double hamiltonian(const PhasePoint& p, const ModelParams& params) {
    const double f2 = p.f * p.f;
    const double g2 = p.g * p.g;
    return 0.5 * f2 * (1.0 - g2) + 0.25 * params.a() * g2 * g2 - 0.5 * params.b() * g2;
}

Gradient hamiltonian_gradient(const PhasePoint& p, const ModelParams& params) {
    const double f = p.f;
    const double g = p.g;
    return {f * (1.0 - g * g), -f * f * g + params.a() * g * g * g - params.b() * g};
}

std::vector<CriticalPoint> critical_points(const ModelParams& params) {
    const double a = params.a();
    const double b = params.b();
    std::vector<CriticalPoint> points;
    points.push_back({{0.0, 0.0, {}}, CriticalKind::Saddle});

    const Regime regime = params.regime();
    if (regime == Regime::Degenerate) {
        points.push_back({{0.0, 1.0, {}}, CriticalKind::Saddle});
        points.push_back({{0.0, -1.0, {}}, CriticalKind::Saddle});
        return points;
    }

    const double gm = std::sqrt(b / a);
    if (a > b) {
        points.push_back({{0.0, gm, {}}, CriticalKind::LocalMin});
        points.push_back({{0.0, -gm, {}}, CriticalKind::LocalMin});
        const double s = std::sqrt(a - b);
        for (double fs : {s, -s}) {
            for (double gs : {1.0, -1.0}) {
                points.push_back({{fs, gs, {}}, CriticalKind::Saddle});
            }
        }
    } else {
        points.push_back({{0.0, gm, {}}, CriticalKind::Saddle});
        points.push_back({{0.0, -gm, {}}, CriticalKind::Saddle});
    }
    return points;
}

PhasePoint exact_coth(double r, const ModelParams& params) {
    const double gap = params.a() - params.b();
    if (!(gap > 0.0)) {
        throw DomainError("coth solution requires a > b");
    }
    if (r < 0.0) {
        throw DomainError("coth solution is defined for r >= 0");
    }
    const double s = std::sqrt(gap);
    const double x = s * r;
    double f = 0.0;
    if (x < 0.5) {
        // 1/x - coth(x) = -sum 2^(2n) B_(2n) x^(2n-1) / (2n)!, truncated where
        // the next term is below one ulp.
        static constexpr double kCoeff[] = {
            -1.0 / 3.0,          1.0 / 45.0,          -2.0 / 945.0,
            1.0 / 4725.0,        -2.0 / 93555.0,      1382.0 / 638512875.0,
            -4.0 / 18243225.0,   3617.0 / 162820783125.0,
            -87734.0 / 38979295480125.0,
        };
        const double x2 = x * x;
        double sum = 0.0;
        for (int k = static_cast<int>(std::size(kCoeff)) - 1; k >= 0; --k) {
            sum = sum * x2 + kCoeff[k];
        }
        f = s * x * sum;
    } else {
        f = 1.0 / r - s / std::tanh(x);
    }
    return {f, 1.0, r};
}

ModelParams map_physical_params(double m, double lambda, double theta, double mu) {
    if (theta == 0.0) {
        throw DomainError("theta must be nonzero");
    }
    if (!(m > 0.0) || !(theta > 0.0)) {
        throw DomainError("mass and theta must be positive");
    }
    if (lambda < 0.0 || mu < 0.0) {
        throw DomainError("lambda and mu must be nonnegative");
    }
    return ModelParams(2.0 * m * lambda / theta, 2.0 * m * mu);
}

} // namespace nucshoot
