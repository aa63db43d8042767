#pragma once

// Radial single-nucleon model in the nonrelativistic limit.
//
// The unknowns are the radial amplitudes f (lower spinor) and g (upper spinor)
// of the ansatz. The radial system reads
//
//     f' + (2/r) f = g (f^2 - a g^2 + b)
//     g'           = f (1 - g^2)
//
// with f(0) = 0. Dropping the friction term 2f/r gives an autonomous
// Hamiltonian system with energy
//
//     H(f, g) = 1/2 f^2 (1 - g^2) + a/4 g^4 - b/2 g^2.

#include <optional>
#include <string_view>
#include <vector>

namespace nucshoot {

enum class Regime {
    Supercritical, ///< a - 2b > 0: ground states exist
    Critical,      ///< a = 2b (within the tolerance band)
    SubcriticalAB, ///< b < a < 2b
    Degenerate,    ///< a = b
    Subcritical,   ///< a < b
};

std::string_view to_string(Regime regime);

/// Relative width of the band around a = 2b (and a = b) that is treated as
/// equality by classify_regime.
inline constexpr double kRegimeTolerance = 1e-12;

/// Couplings (a, b) after rescaling. Both are strictly positive.
class ModelParams {
  public:
    /// Throws DomainError unless a > 0 and b > 0 (and both finite).
    ModelParams(double a, double b);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    Regime regime(double tolerance = kRegimeTolerance) const;
    bool supercritical(double tolerance = kRegimeTolerance) const {
        return regime(tolerance) == Regime::Supercritical;
    }

    /// Guaranteed exponential decay rate min{b/2, (2a - b)/(2a)} of ground
    /// states. Throws DomainError when 2a <= b.
    double decay_bound_rate() const;

    /// sqrt(b/a), the g-coordinate of the energy minima.
    double g_minimum() const;
    /// sqrt(2b/a), where H(0, g) changes sign.
    double g_zero_energy() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

  private:
    double a_;
    double b_;
};

/// Point (f, g) of the phase plane. Radial-system points also carry r.
struct PhasePoint {
    double f = 0.0;
    double g = 0.0;
    std::optional<double> r;
};

/// (f', g') of one of the vector fields.
struct Velocity {
    double df = 0.0;
    double dg = 0.0;
};

/// (dH/df, dH/dg).
struct Gradient {
    double df = 0.0;
    double dg = 0.0;
};

enum class CriticalKind { LocalMin, Saddle };

std::string_view to_string(CriticalKind kind);

struct CriticalPoint {
    PhasePoint location;
    CriticalKind kind;
};

Regime classify_regime(const ModelParams& params, double tolerance = kRegimeTolerance);

/// Right-hand side of the radial system. Throws SingularityError at r = 0 and
/// DomainError for r < 0.
Velocity rhs_radial(double r, const PhasePoint& p, const ModelParams& params);

/// Right-hand side of the conservative (friction-free) system.
Velocity rhs_conservative(const PhasePoint& p, const ModelParams& params);

double hamiltonian(const PhasePoint& p, const ModelParams& params);
Gradient hamiltonian_gradient(const PhasePoint& p, const ModelParams& params);

/// Rest points of the conservative field with their energy classification.
std::vector<CriticalPoint> critical_points(const ModelParams& params);

/// The closed-form solution with g = 1 and f = 1/r - s coth(s r), s = sqrt(a-b).
/// Requires a > b. While s r < 1/2 the Laurent series of 1/x - coth(x),
/// -x/3 + x^3/45 - ..., is summed instead of the cancelling difference.
PhasePoint exact_coth(double r, const ModelParams& params);

/// Physical parameters to couplings: a = 2 m lambda / theta, b = 2 m mu.
/// The meson masses and couplings enter only through lambda and theta.
ModelParams map_physical_params(double m, double lambda, double theta, double mu);

} // namespace nucshoot
