#pragma once

// Command-line front end. Every command returns a process exit code and
// writes its artifacts below the output directory.

#include "nucshoot/integrator.hpp"
#include "nucshoot/physics.hpp"
#include "nucshoot/shooting.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nucshoot::cli {

enum ExitCode : int {
    kSuccess = 0,
    kCheckFailure = 1,
    kRegimeRejected = 2,
    kNumericalFailure = 3,
    kUsage = 64,
};

inline constexpr const char* kSchemaVersion = "nucshoot/1";

/// 17 significant digits with a '.' decimal point, independent of the
/// locale, so values round-trip exactly.
std::string format_double(double v);

struct Formats {
    bool csv = true;
    bool json = true;
    bool svg = true;
};

/// Settings shared by every command.
struct RunConfig {
    std::string command;
    double a = 9.0;
    double b = 4.0;
    IntegratorConfig integrator;
    std::filesystem::path out_dir = ".";
    Formats formats;
    std::uint64_t seed = 20240611;
    PhysicalScales scales;
};

struct GroundStateArgs {
    double x_tol = 1e-12;
};

struct ClassifyArgs {
    double x = 0.8;
    /// When set, the shot is g(0) = 1 - gap and x is ignored.
    std::optional<double> gap;
};

struct PortraitArgs {
    std::vector<double> levels{0.0};
    int resolution = 400;
    std::optional<double> f_extent;
    int grid = 120;
};

struct SweepArgs {
    std::vector<double> a_grid{9.0, 4.0};
    std::vector<double> b_grid{4.0, 1.0};
    unsigned jobs = 1;
};

struct VerifyArgs {
    bool quick = false;
    bool inject_failure = false;
};

int cmd_ground_state(const RunConfig& run, const GroundStateArgs& args, std::ostream& out,
                     std::ostream& err);
int cmd_classify(const RunConfig& run, const ClassifyArgs& args, std::ostream& out,
                 std::ostream& err);
int cmd_portrait(const RunConfig& run, const PortraitArgs& args, std::ostream& out,
                 std::ostream& err);
int cmd_sweep(const RunConfig& run, const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& run, const VerifyArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Flags override the --config file, which
/// overrides built-in defaults; NUCSHOOT_JOBS backs --jobs.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace nucshoot::cli
