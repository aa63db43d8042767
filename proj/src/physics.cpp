#include "nucshoot/physics.hpp"

#include "nucshoot/errors.hpp"
#include "nucshoot/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace nucshoot {

void PhysicalScales::validate() const {
    if (!std::isfinite(m) || !std::isfinite(c) || !(m > 0.0) || !(c > 0.0)) {
        throw DomainError("mass and speed-of-light scale must be positive");
    }
}

Densities densities(const PhasePoint& p) {
    const double f2 = p.f * p.f;
    const double g2 = p.g * p.g;
    return {g2 - f2, g2 + f2};
}

Potentials potentials(const PhasePoint& p, const PhysicalScales& scales,
                      const ModelParams& params) {
    scales.validate();
    const double m = scales.m;
    const double mc2 = m * scales.c * scales.c;
    const double f2 = p.f * p.f;
    const double g2 = p.g * p.g;
    const double a = params.a();
    const double S = -mc2 * g2 + f2 / (4.0 * m);
    const double V = mc2 * g2 - a * g2 / (2.0 * m) + f2 / (4.0 * m);
    return {S, V, f2 / (2.0 * m) - a * g2 / (2.0 * m), 2.0 * mc2 * g2 - a * g2 / (2.0 * m)};
}

PlateauMetrics plateau_metrics(const Trajectory& traj) {
    const auto samples = traj.samples();
    if (samples.size() < 2) {
        throw InsufficientHorizonError("trajectory has fewer than two samples");
    }
    std::size_t peak = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].g * samples[i].g > samples[peak].g * samples[peak].g) {
            peak = i;
        }
    }
    const double gmax = samples[peak].g * samples[peak].g;
    if (!(gmax > 0.0)) {
        throw InsufficientHorizonError("g vanishes identically");
    }
    auto crossing = [&](double frac) {
        const double level = frac * gmax;
        for (std::size_t i = peak + 1; i < samples.size(); ++i) {
            const double y1 = samples[i].g * samples[i].g;
            if (y1 <= level) {
                const double y0 = samples[i - 1].g * samples[i - 1].g;
                const double t = (y0 - level) / (y0 - y1);
                return samples[i - 1].r + t * (samples[i].r - samples[i - 1].r);
            }
        }
        throw InsufficientHorizonError("g^2 stays above " + std::to_string(frac) +
                                       " of its peak within the horizon");
    };
    PlateauMetrics m{};
    m.gsq_max = gmax;
    m.r90 = crossing(0.9);
    m.r50 = crossing(0.5);
    m.r10 = crossing(0.1);
    m.surface_thickness = m.r10 - m.r90;
    m.plateau_score = m.r50 / m.surface_thickness;
    return m;
}

RadialNorms radial_norm(const Trajectory& traj, std::optional<double> decay_rate) {
    const auto samples = traj.samples();
    const bool zero = std::all_of(samples.begin(), samples.end(),
                                  [](const Sample& s) { return s.f == 0.0 && s.g == 0.0; });
    if (zero) {
        return {0.0, 0.0};
    }
    double rate = 0.0;
    if (decay_rate) {
        rate = *decay_rate;
    } else {
        try {
            rate = fit_decay_rate(traj).rate;
        } catch (const NotDecayingError& e) {
            throw DivergentNormError(std::string("norm diverges: ") + e.what());
        }
    }
    if (!(rate > 0.0)) {
        throw DivergentNormError("norm needs a positive decay rate");
    }

    auto integrand = [](const Sample& s, bool scalar) {
        const Densities d = densities({s.f, s.g, s.r});
        return (scalar ? d.rho_s : d.rho_0) * s.r * s.r;
    };
    // Quadratic through three consecutive samples, integrated over the
    // first two; the last interval falls back to the trapezoid.
    auto integrate = [&](bool scalar) {
        double total = 0.0;
        const std::size_t n = samples.size();
        std::size_t i = 0;
        for (; i + 2 < n; i += 2) {
            const double x0 = samples[i].r;
            const double h0 = samples[i + 1].r - x0;
            const double h1 = samples[i + 2].r - samples[i + 1].r;
            const double y0 = integrand(samples[i], scalar);
            const double y1 = integrand(samples[i + 1], scalar);
            const double y2 = integrand(samples[i + 2], scalar);
            const double h = h0 + h1;
            total += h / 6.0 *
                     ((2.0 - h1 / h0) * y0 + h * h / (h0 * h1) * y1 + (2.0 - h0 / h1) * y2);
        }
        if (i + 1 < n) {
            total += 0.5 * (samples[i + 1].r - samples[i].r) *
                     (integrand(samples[i], scalar) + integrand(samples[i + 1], scalar));
        }
        // rho decays like exp(-2 k r) beyond the last sample R:
        // int_R^inf rho(R) e^{-2k(r-R)} r^2 dr = rho(R) (R^2/q + 2R/q^2 + 2/q^3), q = 2k.
        const Sample& last = samples.back();
        const Densities d = densities({last.f, last.g, last.r});
        const double q = 2.0 * rate;
        const double R = last.r;
        total += (scalar ? d.rho_s : d.rho_0) * (R * R / q + 2.0 * R / (q * q) + 2.0 / (q * q * q));
        return 4.0 * std::numbers::pi * total;
    };
    return {integrate(false), integrate(true)};
}

} // namespace nucshoot
