#pragma once

// Shooting from g(0) = x: shot classification, the bracket and bisection
// towards x* = sup I, the decay fit and the structural audit of the result.

#include "nucshoot/integrator.hpp"
#include "nucshoot/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nucshoot {

enum class ShotClass {
    TrivialZero,
    /// f vanished first, with f < 0 and g > 0 before it.
    InSetI,
    /// f vanished first without the sign conditions of I (x below sqrt(b/a)
    /// starts with f > 0).
    FVanishedFirst,
    GVanishedFirst,
    /// g^2 >= 1 persists, or g^2 reached 1.
    Trapped,
    Decayed,
    Blowup,
    /// Horizon reached without a decisive event, or a tie between events.
    Undetermined,
};

std::string_view to_string(ShotClass cls);

struct ShotOutcome {
    InitialValue x0 = InitialValue::from_x(0.0);
    ShotClass cls = ShotClass::Undetermined;
    /// Radius where f vanished, and the state there (f-first shots).
    std::optional<double> r_x;
    std::optional<double> g_at_rx;
    std::optional<double> H_at_rx;
    /// Radius where g vanished (GVanishedFirst).
    std::optional<double> r_g;
    /// First zero of f', recorded as a diagnostic.
    std::optional<double> gamma_x;
    Trajectory trajectory;

    double x() const noexcept { return x0.x(); }
};

/// The event set used for classification: all terminal kinds plus a
/// non-terminal FPrimeCrossesZero.
std::vector<EventSpec> classification_events();

/// Integrates with classification_events() and maps the first event to a
/// class. Shots with x^2 >= 1 are Trapped when g^2 >= 1 - 1e-10 on every
/// sample and Undetermined otherwise. Negative x is handled through the sign
/// map (f, g) -> (-f, -g).
ShotOutcome classify_shot(const InitialValue& x0, const ModelParams& params,
                          const IntegratorConfig& config);
ShotOutcome classify_shot(double x0, const ModelParams& params, const IntegratorConfig& config);

struct SeedOptions {
    double scan_step = 1e-2;
    /// The linear scans stop at 1 - delta.
    double delta = 1e-6;
    /// Number of tenfold step refinements of the linear scan.
    int refinements = 2;
    /// Smallest 1 - x tried by the geometric scan below 1 - delta.
    double gap_floor = 1e-200;
};

struct ScanRecord {
    InitialValue x;
    ShotClass cls;
};

struct SeedBracket {
    /// Midpoint of (sqrt(b/a), sqrt(2b/a)), verified InSetI.
    InitialValue x_lo = InitialValue::from_x(0.0);
    /// Last InSetI value of the scan below x_hi.
    InitialValue x_lo_scan = InitialValue::from_x(0.0);
    InitialValue x_hi = InitialValue::from_x(0.0);
    ShotClass hi_class = ShotClass::Undetermined;
    /// Every scanned shot in order.
    std::vector<ScanRecord> scan;
};

/// Scans upward from sqrt(2b/a) for the first shot outside I: a linear scan
/// up to 1 - delta, then a geometric scan of 1 - x = 10^-k below delta, then
/// the refined linear scans. Throws DomainError outside the supercritical
/// regime and BracketError when every scanned shot lies in I.
SeedBracket seed_bracket(const ModelParams& params, const IntegratorConfig& config,
                         const SeedOptions& options = {});

struct DecayFit {
    double rate = 0.0;
    /// exp of the fitted intercept.
    double prefactor = 0.0;
    /// RMS residual of the log-linear fit.
    double residual = 0.0;
    std::size_t samples = 0;
    double r_begin = 0.0;
    double r_end = 0.0;
};

/// Least-squares slope of log(|f| + |g|) over the trailing `window` fraction
/// of the trajectory. Throws NotDecayingError when fewer than 20 samples fall
/// in the window or |f| + |g| increases between consecutive samples there.
DecayFit fit_decay_rate(const Trajectory& traj, double window = 0.3);

struct LemmaCheck {
    std::string name;
    bool passed = false;
    double metric = 0.0;
    std::string detail;
};

struct LemmaReport {
    std::vector<LemmaCheck> checks;
    /// Prefactor C of |f| + |g| <= C exp(-K r), fitted on the first half of
    /// the decay window.
    double decay_C = 0.0;

    bool all_passed() const;
    const LemmaCheck* find(std::string_view name) const;
};

struct AuditOptions {
    double decay_window = 0.3;
    double sign_tolerance = 1e-10;
    double energy_slack = 1e-10;
    double dissipation_tolerance = 1e-4;
    double rate_slack = 0.05;
};

/// Runs the named checks along a trajectory: dissipation_identity,
/// g_squared_below_one, f_squared_below_a_minus_b, admissible_membership,
/// energy_nonincreasing, sign_conditions, f_bounded_by_g, decay_bound and
/// winding_zero. The zero solution passes every check vacuously with C = 0.
LemmaReport audit_trajectory(const Trajectory& traj, const AuditOptions& options = {});

struct BisectOptions {
    double x_tol = 1e-12;
    /// Near x = 1 the bracket is also narrowed until the gap 1 - x is
    /// resolved to this relative width.
    double gap_rtol = 1e-15;
    /// Undetermined midpoints are retried with r_max doubled up to this factor.
    double horizon_factor = 4.0;
    /// Consecutive unresolved midpoints tolerated before giving up.
    int max_unresolved = 8;
    int max_iterations = 400;
    /// Trajectories of x_lo and x_hi agree to this relative level up to the
    /// certified radius.
    double certify_rtol = 1e-3;
    SeedOptions seed;
    AuditOptions audit;
};

struct GroundState {
    ModelParams params{1.0, 1.0};
    InitialValue x_star = InitialValue::from_x(0.0);
    InitialValue x_lo = InitialValue::from_x(0.0);
    InitialValue x_hi = InitialValue::from_x(0.0);
    ShotClass hi_class = ShotClass::Undetermined;
    int iterations = 0;
    double r_max_used = 0.0;
    /// Radius up to which x_lo and x_hi shots agree; the trajectory is cut here.
    double r_certified = 0.0;
    Trajectory trajectory;
    DecayFit decay;
    LemmaReport report;
};

/// Bisects the seed bracket keeping x_lo in I and x_hi outside, then
/// certifies the trajectory of x* and audits it. Throws PrecisionExhaustedError
/// when midpoints stay Undetermined at the largest horizon.
GroundState bisect_ground_state(const ModelParams& params, const IntegratorConfig& config,
                                const BisectOptions& options = {});

LemmaReport audit_lemmas(const GroundState& gs, const AuditOptions& options = {});

} // namespace nucshoot
