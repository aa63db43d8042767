#pragma once

// Cross-module verification suite behind `nucshoot verify`.

#include <cstdint>
#include <string>
#include <vector>

namespace nucshoot {

struct VerifyOptions {
    /// Smaller grids and fewer random starts.
    bool quick = false;
    std::uint64_t seed = 20240611;
    /// Test hook: shrinks every pass threshold by 1e-30 so the suite fails.
    bool corrupt_tolerances = false;
};

struct VerifyCheck {
    std::string name;
    bool passed = false;
    double metric = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_passed() const;
};

/// Runs coth_oracle, conservative_energy, dissipation_identity,
/// nonexistence_grids, shifted_convergence and ground_state_audit. A check
/// whose computation throws is reported as failed with the message.
VerifyReport run_verify(const VerifyOptions& options);

} // namespace nucshoot
