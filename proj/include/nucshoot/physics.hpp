#pragma once

// Physical observables along a radial solution: spinor densities, the
// leading-order scalar and vector potentials, plateau diagnostics and norms.

#include "nucshoot/integrator.hpp"
#include "nucshoot/model.hpp"

#include <optional>

namespace nucshoot {

struct PhysicalScales {
    double m = 1.0;
    /// Display scale only; never enters the ODE.
    double c = 10.0;

    /// Throws DomainError unless both are positive and finite.
    void validate() const;
};

struct Densities {
    /// g^2 - f^2
    double rho_s;
    /// g^2 + f^2
    double rho_0;
};

Densities densities(const PhasePoint& p);

struct Potentials {
    double S;
    double V;
    double VplusS;
    double VminusS;
};

/// S = -m c^2 g^2 + f^2/(4m), V = m c^2 g^2 - a g^2/(2m) + f^2/(4m).
Potentials potentials(const PhasePoint& p, const PhysicalScales& scales,
                      const ModelParams& params);

struct PlateauMetrics {
    double r90;
    double r50;
    double r10;
    double surface_thickness;
    /// r50 / (r10 - r90). A repo-defined measure of how flat the interior is.
    double plateau_score;
    double gsq_max;
};

/// Radii past the peak of g^2 where it falls to 90%, 50% and 10% of the
/// peak, by linear interpolation between samples. Throws
/// InsufficientHorizonError when g^2 stays above 10% of its peak.
PlateauMetrics plateau_metrics(const Trajectory& traj);

struct RadialNorms {
    double norm_rho0;
    double norm_rho_s;
};

/// 4 pi int rho r^2 dr with piecewise-quadratic quadrature over the samples
/// and an exponential tail beyond the last sample. The tail rate is the
/// fitted decay rate unless given. Throws DivergentNormError when the
/// trajectory does not decay.
RadialNorms radial_norm(const Trajectory& traj, std::optional<double> decay_rate = std::nullopt);

} // namespace nucshoot
