#include "nucshoot/cli.hpp"

#include "nucshoot/errors.hpp"
#include "nucshoot/portrait.hpp"
#include "nucshoot/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace nucshoot::cli {

namespace {

using Json = nlohmann::ordered_json;

class IoError : public Error {
  public:
    using Error::Error;
};

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json config_json(const RunConfig& run) {
    const IntegratorConfig& ic = run.integrator;
    Json formats = Json::array();
    if (run.formats.csv) formats.push_back("csv");
    if (run.formats.json) formats.push_back("json");
    if (run.formats.svg) formats.push_back("svg");
    return Json{{"command", run.command},
                {"a", run.a},
                {"b", run.b},
                {"integrator",
                 {{"rtol", ic.rtol},
                  {"atol", ic.atol},
                  {"h_init", ic.h_init},
                  {"h_max", ic.h_max},
                  {"r_start", ic.r_start},
                  {"r_max", ic.r_max},
                  {"blowup_threshold", ic.blowup_threshold},
                  {"max_steps", ic.max_steps}}},
                {"out_dir", run.out_dir.generic_string()},
                {"formats", formats},
                {"seed", run.seed},
                {"scales", {{"m", run.scales.m}, {"c", run.scales.c}}}};
}

Json document(const RunConfig& run, Json config_extra, Json result) {
    Json cfg = config_json(run);
    for (auto it = config_extra.begin(); it != config_extra.end(); ++it) {
        cfg[it.key()] = it.value();
    }
    return Json{{"schema_version", kSchemaVersion}, {"config", cfg}, {"result", std::move(result)}};
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw IoError("cannot write " + path.string());
    }
    return os;
}

void write_json(const std::filesystem::path& path, const Json& doc) {
    auto os = open_out(path);
    os << doc.dump(2) << '\n';
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
        : os_(open_out(path)) {
        bool first = true;
        for (std::string_view h : header) {
            os_ << (first ? "" : ",") << h;
            first = false;
        }
        os_ << '\n';
    }

    CsvWriter& cell(double v) { return text(format_double(v)); }
    CsvWriter& cell(std::string_view s) { return text(s); }
    CsvWriter& cell(long v) { return text(std::to_string(v)); }
    void end() {
        os_ << '\n';
        first_ = true;
    }

  private:
    CsvWriter& text(std::string_view s) {
        os_ << (first_ ? "" : ",") << s;
        first_ = false;
        return *this;
    }

    std::ofstream os_;
    bool first_ = true;
};

Json termination_json(const Termination& t) {
    Json kinds = Json::array();
    for (EventKind k : t.kinds) {
        kinds.push_back(std::string(to_string(k)));
    }
    return Json{{"cause", std::string(to_string(t.cause))}, {"r", t.r}, {"kinds", kinds}};
}

Json shot_json(const ShotOutcome& shot) {
    return Json{{"x0", shot.x()},
                {"gap", shot.x0.gap()},
                {"class", std::string(to_string(shot.cls))},
                {"r_x", optional_json(shot.r_x)},
                {"g_at_rx", optional_json(shot.g_at_rx)},
                {"H_at_rx", optional_json(shot.H_at_rx)},
                {"r_g", optional_json(shot.r_g)},
                {"gamma_x", optional_json(shot.gamma_x)},
                {"termination", termination_json(shot.trajectory.termination())},
                {"samples", shot.trajectory.samples().size()}};
}

Json report_json(const LemmaReport& report) {
    Json checks = Json::array();
    for (const LemmaCheck& c : report.checks) {
        checks.push_back(
            {{"name", c.name}, {"passed", c.passed}, {"metric", c.metric}, {"detail", c.detail}});
    }
    return Json{{"all_passed", report.all_passed()}, {"decay_C", report.decay_C}, {"checks", checks}};
}

std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

// Maps library exceptions onto exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

bool reject_regime(const ModelParams& params, std::ostream& err) {
    if (params.supercritical()) {
        return false;
    }
    err << "no ground state for a=" << format_double(params.a())
        << ", b=" << format_double(params.b()) << ": regime " << to_string(params.regime())
        << "; nontrivial decaying solutions require a - 2b > 0\n";
    return true;
}

// Fixed 800x800 canvas over [f0, f1] x [g0, g1].
class Svg {
  public:
    Svg(double f0, double f1, double g0, double g1) : f0_(f0), f1_(f1), g0_(g0), g1_(g1) {
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\" width=\"800\" "
               "height=\"800\">\n<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
    }

    double x(double f) const { return 800.0 * (f - f0_) / (f1_ - f0_); }
    double y(double g) const { return 800.0 * (g1_ - g) / (g1_ - g0_); }
    bool inside(const PhasePoint& p) const {
        return p.f >= f0_ && p.f <= f1_ && p.g >= g0_ && p.g <= g1_;
    }

    void rect(double f_lo, double g_lo, double f_hi, double g_hi, std::string_view fill) {
        os_ << "<rect x=\"" << num(x(f_lo)) << "\" y=\"" << num(y(g_hi)) << "\" width=\""
            << num(x(f_hi) - x(f_lo)) << "\" height=\"" << num(y(g_lo) - y(g_hi)) << "\" fill=\""
            << fill << "\"/>\n";
    }

    // Splits the polyline where it leaves the canvas.
    void polyline(const std::vector<PhasePoint>& pts, std::string_view stroke, double width) {
        std::string buf;
        std::size_t count = 0;
        auto flush = [&] {
            if (count >= 2) {
                os_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
                    << num(width) << "\" points=\"" << buf << "\"/>\n";
            }
            buf.clear();
            count = 0;
        };
        for (const PhasePoint& p : pts) {
            if (!inside(p)) {
                flush();
                continue;
            }
            buf += (count ? " " : "") + num(x(p.f)) + "," + num(y(p.g));
            ++count;
        }
        flush();
    }

    void circle(const PhasePoint& p, std::string_view fill) {
        if (inside(p)) {
            os_ << "<circle cx=\"" << num(x(p.f)) << "\" cy=\"" << num(y(p.g))
                << "\" r=\"4\" fill=\"" << fill << "\"/>\n";
        }
    }

    std::string finish() {
        os_ << "</svg>\n";
        return os_.str();
    }

  private:
    static std::string num(double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
        return std::string(buf, res.ptr);
    }

    double f0_, f1_, g0_, g1_;
    std::ostringstream os_;
};

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

int cmd_ground_state(const RunConfig& run, const GroundStateArgs& args, std::ostream& out,
                     std::ostream& err) {
    return guarded(err, [&] {
        const ModelParams params(run.a, run.b);
        if (reject_regime(params, err)) {
            return static_cast<int>(kRegimeRejected);
        }
        BisectOptions options;
        options.x_tol = args.x_tol;
        const GroundState gs = bisect_ground_state(params, run.integrator, options);
        const Trajectory& t = gs.trajectory;

        Json observables = Json::object();
        try {
            const PlateauMetrics pm = plateau_metrics(t);
            observables["plateau"] = {{"r90", pm.r90},
                                      {"r50", pm.r50},
                                      {"r10", pm.r10},
                                      {"surface_thickness", pm.surface_thickness},
                                      {"plateau_score", pm.plateau_score},
                                      {"gsq_max", pm.gsq_max}};
        } catch (const Error& e) {
            observables["plateau"] = {{"error", e.what()}};
        }
        try {
            const RadialNorms n = radial_norm(t);
            observables["norms"] = {{"norm_rho0", n.norm_rho0}, {"norm_rho_s", n.norm_rho_s}};
        } catch (const Error& e) {
            observables["norms"] = {{"error", e.what()}};
        }
        double max_vms = 0.0;
        double max_vps = 0.0;
        for (const Sample& s : t.samples()) {
            const Potentials p = potentials({s.f, s.g, s.r}, run.scales, params);
            max_vms = std::max(max_vms, std::abs(p.VminusS));
            max_vps = std::max(max_vps, std::abs(p.VplusS));
        }
        observables["potentials"] = {{"max_abs_V_minus_S", max_vms},
                                     {"max_abs_V_plus_S", max_vps},
                                     {"ratio", max_vps > 0.0 ? Json(max_vms / max_vps) : Json(nullptr)}};

        Json result{{"x_star", gs.x_star.x()},
                    {"x_star_gap", gs.x_star.gap()},
                    {"bracket",
                     {{"x_lo", gs.x_lo.x()},
                      {"x_hi", gs.x_hi.x()},
                      {"gap_lo", gs.x_lo.gap()},
                      {"gap_hi", gs.x_hi.gap()},
                      {"width", gs.x_lo.gap() - gs.x_hi.gap()},
                      {"hi_class", std::string(to_string(gs.hi_class))}}},
                    {"iterations", gs.iterations},
                    {"r_max_used", gs.r_max_used},
                    {"r_certified", gs.r_certified},
                    {"decay_rate", gs.decay.rate},
                    {"decay",
                     {{"rate", gs.decay.rate},
                      {"prefactor", gs.decay.prefactor},
                      {"residual", gs.decay.residual},
                      {"samples", gs.decay.samples},
                      {"r_begin", gs.decay.r_begin},
                      {"r_end", gs.decay.r_end},
                      {"K_ab", params.decay_bound_rate()}}},
                    {"lemma_report", report_json(gs.report)},
                    {"observables", observables}};

        ensure_dir(run.out_dir);
        if (run.formats.json) {
            write_json(run.out_dir / "ground_state.json",
                       document(run, {{"x_tol", args.x_tol}}, std::move(result)));
        }
        if (run.formats.csv) {
            CsvWriter csv(run.out_dir / "trajectory.csv",
                          {"r", "f", "g", "H", "g2", "f2", "rho_s", "rho_0", "S", "V", "V_plus_S",
                           "V_minus_S"});
            for (const Sample& s : t.samples()) {
                const PhasePoint p{s.f, s.g, s.r};
                const Densities d = densities(p);
                const Potentials v = potentials(p, run.scales, params);
                csv.cell(s.r).cell(s.f).cell(s.g).cell(s.H).cell(s.g * s.g).cell(s.f * s.f);
                csv.cell(d.rho_s).cell(d.rho_0).cell(v.S).cell(v.V).cell(v.VplusS).cell(v.VminusS);
                csv.end();
            }
        }
        out << "x_star = " << format_double(gs.x_star.x())
            << " (1 - x_star = " << format_double(gs.x_star.gap()) << ")\n"
            << "bracket width = " << format_double(gs.x_lo.gap() - gs.x_hi.gap())
            << ", certified to r = " << format_double(gs.r_certified) << "\n"
            << "decay rate = " << format_double(gs.decay.rate)
            << " (K = " << format_double(params.decay_bound_rate()) << ")\n";
        for (const LemmaCheck& c : gs.report.checks) {
            out << (c.passed ? "PASS " : "FAIL ") << c.name << " " << format_double(c.metric)
                << '\n';
        }
        return static_cast<int>(gs.report.all_passed() ? kSuccess : kCheckFailure);
    });
}

int cmd_classify(const RunConfig& run, const ClassifyArgs& args, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&] {
        const ModelParams params(run.a, run.b);
        const InitialValue x0 =
            args.gap ? InitialValue::from_gap(*args.gap) : InitialValue::from_x(args.x);
        const ShotOutcome shot = classify_shot(x0, params, run.integrator);
        Json extra{{"x", x0.x()}, {"gap", args.gap ? Json(*args.gap) : Json(nullptr)}};
        out << document(run, extra, shot_json(shot)).dump(2) << '\n';
        return static_cast<int>(kSuccess);
    });
}

int cmd_portrait(const RunConfig& run, const PortraitArgs& args, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&] {
        const ModelParams params(run.a, run.b);
        if (args.grid < 2) {
            throw DomainError("--grid must be at least 2");
        }
        const double extent = args.f_extent.value_or(default_f_extent(params));
        std::vector<LevelSetCurve> curves;
        for (double level : args.levels) {
            auto c = level_set(level, params, args.resolution, extent);
            curves.insert(curves.end(), c.begin(), c.end());
        }
        const auto critical = critical_points(params);
        std::optional<AdmissibleRegionReport> region;
        if (params.supercritical()) {
            region = admissible_region(params, args.resolution);
        }
        IntegratorConfig cfg = run.integrator;
        cfg.r_max = 10.0;
        std::vector<std::pair<double, Trajectory>> orbits;
        for (double g0 : {0.2, 0.4, 0.6, 0.8, 0.95}) {
            orbits.emplace_back(g0, integrate_conservative({0.0, g0, std::nullopt}, params, cfg));
        }

        ensure_dir(run.out_dir);
        if (run.formats.csv) {
            CsvWriter cv(run.out_dir / "portrait_curves.csv", {"level", "branch", "piece", "f", "g"});
            long piece = 0;
            for (const LevelSetCurve& c : curves) {
                for (const PhasePoint& p : c.samples) {
                    cv.cell(c.level).cell(to_string(c.branch)).cell(piece).cell(p.f).cell(p.g);
                    cv.end();
                }
                ++piece;
            }
            CsvWriter cp(run.out_dir / "portrait_critical.csv", {"kind", "f", "g", "H"});
            for (const CriticalPoint& c : critical) {
                cp.cell(to_string(c.kind)).cell(c.location.f).cell(c.location.g);
                cp.cell(hamiltonian(c.location, params));
                cp.end();
            }
            if (region) {
                CsvWriter ca(run.out_dir / "portrait_admissible.csv", {"f", "g"});
                for (const PhasePoint& p : region->boundary) {
                    ca.cell(p.f).cell(p.g);
                    ca.end();
                }
            }
            CsvWriter ct(run.out_dir / "portrait_trajectories.csv", {"g0", "r", "f", "g", "H"});
            for (const auto& [g0, t] : orbits) {
                for (const Sample& s : t.samples()) {
                    ct.cell(g0).cell(s.r).cell(s.f).cell(s.g).cell(s.H);
                    ct.end();
                }
            }
        }
        if (run.formats.svg) {
            const double g_ext = std::max(1.5, 1.25 * std::sqrt(std::max(1.0, params.b() / params.a() * 2.0)));
            Svg svg(-extent, extent, -g_ext, g_ext);
            const EnergySignGrid grid = energy_sign_grid(params, {-extent, extent}, {-g_ext, g_ext},
                                                         args.grid, args.grid);
            const double df = 2.0 * extent / (grid.nf - 1);
            const double dg = 2.0 * g_ext / (grid.ng - 1);
            for (int j = 0; j < grid.ng; ++j) {
                // Runs of negative-energy cells become one rectangle.
                int i = 0;
                while (i < grid.nf) {
                    if (grid.at(i, j) >= 0) {
                        ++i;
                        continue;
                    }
                    int k = i;
                    while (k + 1 < grid.nf && grid.at(k + 1, j) < 0) {
                        ++k;
                    }
                    const double f_lo = std::max(-extent, -extent + (i - 0.5) * df);
                    const double f_hi = std::min(extent, -extent + (k + 0.5) * df);
                    const double g_c = -g_ext + j * dg;
                    svg.rect(f_lo, std::max(-g_ext, g_c - 0.5 * dg), f_hi,
                             std::min(g_ext, g_c + 0.5 * dg), "#c8c8c8");
                    i = k + 1;
                }
            }
            svg.polyline({{-extent, 0.0, {}}, {extent, 0.0, {}}}, "#888888", 0.5);
            svg.polyline({{0.0, -g_ext, {}}, {0.0, g_ext, {}}}, "#888888", 0.5);
            if (region) {
                svg.polyline(region->boundary, "#2b8a3e", 1.5);
            }
            for (const auto& [g0, t] : orbits) {
                std::vector<PhasePoint> pts;
                for (const Sample& s : t.samples()) {
                    pts.push_back({s.f, s.g, s.r});
                }
                svg.polyline(pts, "#1c7ed6", 1.0);
            }
            for (const LevelSetCurve& c : curves) {
                svg.polyline(c.samples, "#c92a2a", 1.5);
            }
            for (const CriticalPoint& c : critical) {
                svg.circle(c.location, c.kind == CriticalKind::LocalMin ? "#2f9e44" : "#000000");
            }
            auto os = open_out(run.out_dir / "portrait.svg");
            os << svg.finish();
        }
        if (run.formats.json) {
            Json levels = Json::array();
            for (double l : args.levels) levels.push_back(l);
            Json cp = Json::array();
            for (const CriticalPoint& c : critical) {
                cp.push_back({{"kind", std::string(to_string(c.kind))},
                              {"f", c.location.f},
                              {"g", c.location.g}});
            }
            Json extra{{"levels", levels},
                       {"resolution", args.resolution},
                       {"f_extent", extent},
                       {"grid", args.grid}};
            Json result{{"regime", std::string(to_string(params.regime()))},
                        {"curves", curves.size()},
                        {"critical_points", cp},
                        {"admissible_region", region.has_value()}};
            write_json(run.out_dir / "portrait_summary.json", document(run, extra, result));
        }
        out << curves.size() << " level-set pieces, " << critical.size()
            << " critical points written to " << run.out_dir.string() << '\n';
        return static_cast<int>(kSuccess);
    });
}

int cmd_sweep(const RunConfig& run, const SweepArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (args.a_grid.empty() || args.b_grid.empty()) {
            throw DomainError("sweep grids must be nonempty");
        }
        std::vector<std::pair<double, double>> tasks;
        for (double a : args.a_grid) {
            for (double b : args.b_grid) {
                tasks.emplace_back(a, b);
            }
        }
        std::sort(tasks.begin(), tasks.end());
        tasks.erase(std::unique(tasks.begin(), tasks.end()), tasks.end());
        for (const auto& [a, b] : tasks) {
            (void)ModelParams(a, b);
        }
        run.integrator.validate();

        struct Row {
            std::string status;
            std::string regime;
            double x_star = std::nan("");
            double gap_star = std::nan("");
            double r_certified = std::nan("");
            double decay_rate = std::nan("");
            double plateau_score = std::nan("");
            double pass_rate = std::nan("");
            std::string error;
        };
        std::vector<Row> rows(tasks.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < tasks.size(); i = next++) {
                Row& row = rows[i];
                const ModelParams params(tasks[i].first, tasks[i].second);
                row.regime = std::string(to_string(params.regime()));
                if (!params.supercritical()) {
                    row.status = "nonexistence";
                    continue;
                }
                try {
                    const GroundState gs = bisect_ground_state(params, run.integrator);
                    row.status = "ok";
                    row.x_star = gs.x_star.x();
                    row.gap_star = gs.x_star.gap();
                    row.r_certified = gs.r_certified;
                    row.decay_rate = gs.decay.rate;
                    std::size_t passed = 0;
                    for (const LemmaCheck& c : gs.report.checks) {
                        passed += c.passed ? 1 : 0;
                    }
                    row.pass_rate = static_cast<double>(passed) /
                                    static_cast<double>(gs.report.checks.size());
                    try {
                        row.plateau_score = plateau_metrics(gs.trajectory).plateau_score;
                    } catch (const Error& e) {
                        row.error = e.what();
                    }
                } catch (const std::exception& e) {
                    row.status = "numerical_failure";
                    row.error = e.what();
                }
            }
        };
        const unsigned jobs = std::max(1u, std::min<unsigned>(args.jobs, static_cast<unsigned>(tasks.size())));
        std::vector<std::thread> pool;
        for (unsigned j = 1; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
        worker();
        for (std::thread& t : pool) {
            t.join();
        }

        ensure_dir(run.out_dir);
        bool failed = false;
        CsvWriter csv(run.out_dir / "sweep.csv",
                      {"a", "b", "regime", "status", "x_star", "gap_star", "r_certified",
                       "decay_rate", "plateau_score", "lemma_pass_rate", "error"});
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            const Row& r = rows[i];
            failed = failed || r.status == "numerical_failure";
            csv.cell(tasks[i].first).cell(tasks[i].second).cell(r.regime).cell(r.status);
            csv.cell(r.x_star).cell(r.gap_star).cell(r.r_certified).cell(r.decay_rate);
            csv.cell(r.plateau_score).cell(r.pass_rate).cell(csv_safe(r.error));
            csv.end();
        }
        out << tasks.size() << " parameter pairs written to "
            << (run.out_dir / "sweep.csv").string() << '\n';
        return static_cast<int>(failed ? kNumericalFailure : kSuccess);
    });
}

int cmd_verify(const RunConfig& run, const VerifyArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        VerifyOptions options;
        options.quick = args.quick;
        options.seed = run.seed;
        options.corrupt_tolerances = args.inject_failure;
        const VerifyReport report = run_verify(options);

        Json checks = Json::array();
        for (const VerifyCheck& c : report.checks) {
            out << (c.passed ? "PASS " : "FAIL ") << c.name << " metric=" << format_double(c.metric)
                << " threshold=" << format_double(c.threshold) << " (" << c.detail << ")\n";
            checks.push_back({{"name", c.name},
                              {"passed", c.passed},
                              {"metric", c.metric},
                              {"threshold", c.threshold},
                              {"detail", c.detail}});
        }
        if (run.formats.json) {
            ensure_dir(run.out_dir);
            write_json(run.out_dir / "verify_report.json",
                       document(run, {{"quick", args.quick}, {"inject_failure", args.inject_failure}},
                                {{"all_passed", report.all_passed()}, {"checks", checks}}));
        }
        return static_cast<int>(report.all_passed() ? kSuccess : kCheckFailure);
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Radial ground states of the nonrelativistic single-nucleon mean-field model",
                 "nucshoot"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value file");

    RunConfig rc;
    std::vector<std::string> formats{"csv", "json", "svg"};
    std::string out_dir = ".";
    app.add_option("--a", rc.a, "Quartic coupling a > 0")->capture_default_str();
    app.add_option("--b", rc.b, "Eigenvalue coupling b > 0")->capture_default_str();
    app.add_option("--rtol", rc.integrator.rtol, "Relative tolerance")->capture_default_str();
    app.add_option("--atol", rc.integrator.atol, "Absolute tolerance")->capture_default_str();
    app.add_option("--h-max", rc.integrator.h_max, "Largest step")->capture_default_str();
    app.add_option("--r-start", rc.integrator.r_start, "Series handoff radius")
        ->capture_default_str();
    app.add_option("--r-max", rc.integrator.r_max, "Integration horizon")->capture_default_str();
    app.add_option("--blowup-threshold", rc.integrator.blowup_threshold,
                   "Blowup level for |f| + |g|")
        ->capture_default_str();
    app.add_option("--max-steps", rc.integrator.max_steps, "Step budget per integration")
        ->capture_default_str();
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--format", formats, "Output formats among csv, json, svg")
        ->delimiter(',')
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    app.add_option("--seed", rc.seed, "Random seed for sampled test points")->capture_default_str();
    app.add_option("--m", rc.scales.m, "Nucleon mass scale")->capture_default_str();
    app.add_option("--c", rc.scales.c, "Speed-of-light display scale")->capture_default_str();

    GroundStateArgs gs_args;
    auto* gs_cmd = app.add_subcommand("ground-state", "Locate x* = sup I and audit the solution");
    gs_cmd->add_option("--x-tol", gs_args.x_tol, "Bisection tolerance in x")->capture_default_str();

    ClassifyArgs cl_args;
    auto* cl_cmd = app.add_subcommand("classify", "Classify the shot g(0) = x");
    cl_cmd->add_option("--x", cl_args.x, "Initial value g(0)")->capture_default_str();
    cl_cmd->add_option("--gap", cl_args.gap, "Shoot from g(0) = 1 - gap instead of --x");

    PortraitArgs pt_args;
    auto* pt_cmd = app.add_subcommand("portrait", "Level sets, critical points and admissible set");
    pt_cmd->add_option("--levels", pt_args.levels, "Energy levels C")->delimiter(',');
    pt_cmd->add_option("--resolution", pt_args.resolution, "Samples per curve piece")
        ->capture_default_str();
    pt_cmd->add_option("--f-extent", pt_args.f_extent, "Half-width of the f window");
    pt_cmd->add_option("--grid", pt_args.grid, "Nodes per axis of the energy-sign grid")
        ->capture_default_str();

    SweepArgs sw_args;
    sw_args.jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* sw_cmd = app.add_subcommand("sweep", "Ground states over an (a, b) grid");
    sw_cmd->add_option("--a-grid", sw_args.a_grid, "Values of a")->delimiter(',');
    sw_cmd->add_option("--b-grid", sw_args.b_grid, "Values of b")->delimiter(',');
    auto* jobs_opt = sw_cmd->add_option("--jobs", sw_args.jobs,
                                        "Worker threads (default: NUCSHOOT_JOBS, then all cores)")
                         ->check(CLI::PositiveNumber);

    VerifyArgs vf_args;
    auto* vf_cmd = app.add_subcommand("verify", "Run the verification suite");
    vf_cmd->add_flag("--quick", vf_args.quick, "Run the reduced suite");
    vf_cmd->add_flag("--inject-failure", vf_args.inject_failure,
                     "Corrupt every tolerance so that the suite fails")
        ->group("");

    for (CLI::App* sub : {gs_cmd, cl_cmd, pt_cmd, sw_cmd, vf_cmd}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? static_cast<int>(kSuccess) : static_cast<int>(kUsage);
    }

    rc.out_dir = out_dir;
    rc.formats = {false, false, false};
    for (const std::string& f : formats) {
        rc.formats.csv = rc.formats.csv || f == "csv";
        rc.formats.json = rc.formats.json || f == "json";
        rc.formats.svg = rc.formats.svg || f == "svg";
    }
    try {
        rc.integrator.validate();
        rc.scales.validate();
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    if (*gs_cmd) {
        rc.command = "ground-state";
        return cmd_ground_state(rc, gs_args, out, err);
    }
    if (*cl_cmd) {
        rc.command = "classify";
        return cmd_classify(rc, cl_args, out, err);
    }
    if (*pt_cmd) {
        rc.command = "portrait";
        return cmd_portrait(rc, pt_args, out, err);
    }
    if (*sw_cmd) {
        rc.command = "sweep";
        // Read by hand: CLI11 silently drops environment values that fail validation.
        if (const char* env = std::getenv("NUCSHOOT_JOBS"); env && jobs_opt->count() == 0) {
            unsigned jobs = 0;
            const std::string_view text(env);
            const auto res = std::from_chars(text.data(), text.data() + text.size(), jobs);
            if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || jobs == 0) {
                err << "error: NUCSHOOT_JOBS must be a positive integer, got '" << env << "'\n";
                return kUsage;
            }
            sw_args.jobs = jobs;
        }
        return cmd_sweep(rc, sw_args, out, err);
    }
    rc.command = "verify";
    return cmd_verify(rc, vf_args, out, err);
}

} // namespace nucshoot::cli
