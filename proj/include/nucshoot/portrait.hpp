#pragma once

// Phase-plane analytics for the conservative system: level sets of H, the
// admissible region and the angle lift used to count zeros of g.

#include "nucshoot/integrator.hpp"
#include "nucshoot/model.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace nucshoot {

/// Level set H = C written as g = +-h1(f) and g = +-h2(f).
enum class Branch { H1Plus, H1Minus, H2Plus, H2Minus };

std::string_view to_string(Branch branch);

struct Interval {
    double lo;
    double hi;
};

struct LevelSetCurve {
    double level;
    Branch branch;
    std::vector<PhasePoint> samples;
    /// f-interval covered by this piece of the branch.
    Interval domain;
};

/// h_C(f) = (f^2 + b)^2 - 2a(f^2 - 2C), the discriminant of H = C in g^2.
double level_discriminant(double f, double level, const ModelParams& params);

struct BranchValues {
    double h1;
    /// Absent where f^2 < 2C, i.e. where the inner radicand of h2 is negative.
    std::optional<double> h2;
};

/// h1 = sqrt((f^2 + b + sqrt(h_C))/a) and h2 = sqrt((f^2 + b - sqrt(h_C))/a).
/// Empty when h_C(f) < 0.
std::optional<BranchValues> branch_functions(double f, double level, const ModelParams& params);

/// f-intervals inside [-f_extent, f_extent] on which the branch is real.
/// Computed from the closed-form roots of h_C in f^2.
std::vector<Interval> branch_domain(Branch branch, double level, const ModelParams& params,
                                    double f_extent);

/// Default half-width of the f-window used for curve sampling.
double default_f_extent(const ModelParams& params);

/// All real pieces of Gamma_C inside |f| <= f_extent, each sampled at
/// `resolution` points including the interval ends. At a = 2b and C = 0 the
/// factored lines g = +-1 (H1 branches) and g = +-f/sqrt(b) (H2 branches)
/// are emitted over the whole window instead.
std::vector<LevelSetCurve> level_set(double level, const ModelParams& params, int resolution,
                                     std::optional<double> f_extent = std::nullopt);

/// Gamma_0.
std::vector<LevelSetCurve> zero_contour(const ModelParams& params, int resolution,
                                        std::optional<double> f_extent = std::nullopt);

/// a g^4 - 2(f^2 + b) g^2 + 2f^2 - 4C, zero exactly on Gamma_C.
double level_residual(const PhasePoint& p, double level, const ModelParams& params);

/// 2f^2 - a g^2 - (a - 2b) <= 0 (up to 1e-14 relative rounding) and g^2 <= 1.
/// Throws DomainError outside the supercritical regime.
bool admissible_contains(const PhasePoint& p, const ModelParams& params);

struct AdmissibleRegionReport {
    double a;
    double b;
    /// Closed counter-clockwise boundary polyline, first point repeated last.
    std::vector<PhasePoint> boundary;
};

/// Boundary of the admissible set: the arcs f = +-sqrt((a g^2 + a - 2b)/2)
/// for |g| <= 1 joined by the segments g = +-1, |f| <= sqrt(a - b).
AdmissibleRegionReport admissible_region(const ModelParams& params, int resolution);

/// Sign of H on a uniform grid, row-major with f varying fastest.
struct EnergySignGrid {
    double f_min;
    double f_max;
    double g_min;
    double g_max;
    int nf;
    int ng;
    std::vector<std::int8_t> sign;

    std::int8_t at(int i_f, int i_g) const { return sign[static_cast<std::size_t>(i_g * nf + i_f)]; }
};

EnergySignGrid energy_sign_grid(const ModelParams& params, Interval f_range, Interval g_range,
                                int nf, int ng);

struct AngleSample {
    double r;
    double theta;
};

struct WindingResult {
    /// Zeros of g on [r1, r2].
    int count;
    /// Continuous lift of theta = -arctan(f/g).
    std::vector<AngleSample> lift;
};

/// Lifts theta along the trajectory samples in [r1, r2], refining through the
/// dense output wherever consecutive angles jump by pi/2 or more. Throws
/// UndefinedLiftError when min |f| + |g| on the interval is at most 1e-10.
WindingResult winding_count(const Trajectory& traj, double r1, double r2);

} // namespace nucshoot
