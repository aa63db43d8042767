#pragma once

// Adaptive Dormand-Prince 5(4) integration of the radial, conservative and
// shifted systems, with Hairer's fourth-order dense output and event
// localization on the interpolant.

#include "nucshoot/model.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace nucshoot {

struct IntegratorConfig {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_max = 0.05;
    /// Radius at which the series start hands over to the integrator.
    double r_start = 1e-6;
    double r_max = 200.0;
    /// |f| + |g| above this terminates with Blowup.
    double blowup_threshold = 1e3;
    std::size_t max_steps = 10'000'000;
    /// When positive, error control is disabled and every step has this size
    /// (last step clipped to r_max). Used for convergence-order studies.
    double fixed_step = 0.0;

    /// Throws DomainError when a field is out of range.
    void validate() const;
};

enum class EventKind {
    FCrossesZero,
    GCrossesZero,
    GSquaredReachesOne,
    DecayDetected,
    FPrimeCrossesZero,
};

std::string_view to_string(EventKind kind);

enum class Direction { Any, Rising, Falling };

struct EventSpec {
    EventKind kind;
    Direction direction = Direction::Any;
    /// DecayDetected only fires beyond this radius.
    double r_min = 5.0;
    /// DecayDetected fires when |f| + |g| drops below this level.
    double eps_decay = 1e-8;
    /// Non-terminal events are recorded in Trajectory::events() and the
    /// integration continues.
    bool terminal = true;
};

struct Sample {
    double r;
    double f;
    double g;
    double H;
    /// 1 - g, integrated alongside g so it keeps full relative precision
    /// while g sits within a few ulps of 1.
    double gap;
};

struct EventRecord {
    EventKind kind;
    double r;
    double f;
    double g;
};

enum class TerminationCause { ReachedRmax, Event, Blowup };

std::string_view to_string(TerminationCause cause);

struct Termination {
    TerminationCause cause = TerminationCause::ReachedRmax;
    double r = 0.0;
    /// Event kinds that fired at r. More than one entry means a tie below
    /// 1e-12 in radius.
    std::vector<EventKind> kinds;
};

/// Dense-output coefficients of one accepted step on [r0, r0 + h], for the
/// state (f, g, 1 - g).
struct DenseSegment {
    double r0;
    double h;
    std::array<std::array<double, 3>, 5> coeff;

    std::array<double, 3> eval(double r) const;
};

/// Shooting parameter g(0) = x. The distance 1 - x is carried separately so
/// that values a few ulps below 1 keep full relative precision in 1 - x.
class InitialValue {
  public:
    static InitialValue from_x(double x) { return {x, 1.0 - x}; }
    static InitialValue from_gap(double gap) { return {1.0 - gap, gap}; }
    /// Midpoint of two values, taken in the gap coordinate near 1.
    static InitialValue midpoint(const InitialValue& lo, const InitialValue& hi);

    double x() const noexcept { return x_; }
    double gap() const noexcept { return gap_; }

  private:
    InitialValue(double x, double gap) : x_(x), gap_(gap) {}
    double x_;
    double gap_;
};

class Trajectory {
  public:
    Trajectory() = default;
    Trajectory(ModelParams params, InitialValue x0, std::vector<Sample> samples,
               Termination termination,
               std::vector<DenseSegment> segments = {}, std::vector<EventRecord> events = {});

    const ModelParams& params() const noexcept { return params_; }
    double x0() const noexcept { return x0_.x(); }
    const InitialValue& initial_value() const noexcept { return x0_; }
    std::span<const Sample> samples() const noexcept { return samples_; }
    const Termination& termination() const noexcept { return termination_; }
    std::span<const EventRecord> events() const noexcept { return events_; }
    std::span<const DenseSegment> segments() const noexcept { return segments_; }

    bool empty() const noexcept { return samples_.empty(); }
    double r_front() const { return samples_.front().r; }
    double r_back() const { return samples_.back().r; }

    /// State at r, from the dense output when r lies in an integrated step and
    /// by linear interpolation between samples otherwise.
    PhasePoint state_at(double r) const;
    /// (f, g, 1 - g) at r, interpolated like state_at.
    std::array<double, 3> dense_at(double r) const;

    /// Copy restricted to samples with r <= r_cut. Dense segments and events
    /// beyond r_cut are dropped; termination becomes ReachedRmax at r_cut.
    Trajectory truncated(double r_cut) const;

  private:
    ModelParams params_{1.0, 1.0};
    InitialValue x0_ = InitialValue::from_x(0.0);
    std::vector<Sample> samples_;
    Termination termination_;
    std::vector<DenseSegment> segments_;
    std::vector<EventRecord> events_;
};

/// The zero solution of the radial system on [0, r_max].
Trajectory exact_trivial(const ModelParams& params, double r_max);

/// Second-order Taylor state of the regular solution with g(0) = x0 at
/// r_start: f = c r, g = x0 + c (1 - x0^2) r^2 / 2 with c = x0 (b - a x0^2)/3.
PhasePoint series_start(double x0, const ModelParams& params, double r_start);

/// Same expansion, also returning 1 - g(r_start) without cancellation.
struct SeriesState {
    PhasePoint point;
    double gap;
};
SeriesState series_start(const InitialValue& x0, const ModelParams& params, double r_start);

/// f'(0) of the regular solution, x0 (b - a x0^2) / 3.
double series_slope(double x0, const ModelParams& params);

/// Radial system from r = 0 with f(0) = 0, g(0) = x0.
Trajectory integrate_radial(double x0, const ModelParams& params, const IntegratorConfig& config,
                            std::span<const EventSpec> events = {});
Trajectory integrate_radial(const InitialValue& x0, const ModelParams& params,
                            const IntegratorConfig& config, std::span<const EventSpec> events = {});

/// Conservative system from p0 at r = 0 (r is the evolution variable).
Trajectory integrate_conservative(const PhasePoint& p0, const ModelParams& params,
                                  const IntegratorConfig& config,
                                  std::span<const EventSpec> events = {});

/// Radial system shifted by rho: f' + 2/(rho + r) f = g(f^2 - a g^2 + b).
Trajectory integrate_shifted(const PhasePoint& p0, double rho, const ModelParams& params,
                             const IntegratorConfig& config,
                             std::span<const EventSpec> events = {});

struct DissipationResidual {
    /// Largest relative error of the differenced energy.
    double worst = 0.0;
    double r_worst = 0.0;
    std::size_t points = 0;
};

/// Compares a five-point central difference of H along the dense output with
/// -(2/r) f^2 (1 - g^2) on a uniform grid of the given spacing, at every
/// node with |f| > f_floor whose stencil fits inside the trajectory. The
/// stencil width shrinks to 1% of the local scale |y|/|y'| where that is
/// smaller, and near g^2 = 1 the energy is evaluated as H - H(0,1) in terms
/// of 1 - g^2 so that no leading digits cancel.
DissipationResidual dissipation_residual(const Trajectory& traj, double spacing = 1e-3,
                                         double f_floor = 1e-6);

} // namespace nucshoot
