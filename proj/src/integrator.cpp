#include "nucshoot/integrator.hpp"

#include "nucshoot/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

namespace nucshoot {

namespace {

// (f, g, u) with u = 1 - g.
using State = std::array<double, 3>;
constexpr std::size_t kDim = 3;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense output weights (Hairer, dopri5 contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

enum class FieldKind { Radial, Conservative, Shifted };

struct Field {
    FieldKind kind;
    double rho;
    double a;
    double b;

    State operator()(double r, const State& y) const {
        const double f = y[0];
        const double g = y[1];
        const double u = y[2];
        double df = g * (f * f - a * g * g + b);
        // 1 - g^2 from the gap coordinate.
        const double dg = f * (u * (2.0 - u));
        if (kind == FieldKind::Radial) {
            df -= 2.0 / r * f;
        } else if (kind == FieldKind::Shifted) {
            df -= 2.0 / (rho + r) * f;
        }
        return {df, dg, -dg};
    }
};

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (std::size_t i = 0; i < kDim; ++i) {
        double acc = 0.0;
        for (const auto& [w, k] : terms) {
            acc += w * (*k)[i];
        }
        out[i] += h * acc;
    }
    return out;
}

struct Step {
    State y1;
    State k7;
    State err;
    DenseSegment segment;
};

Step dopri_step(const Field& field, double r, const State& y, const State& k1, double h) {
    const State k2 = field(r + c2 * h, axpy(y, h, {{a21, &k1}}));
    const State k3 = field(r + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const State k4 = field(r + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 =
        field(r + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 =
        field(r + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State y1 =
        axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const State k7 = field(r + h, y1);

    Step s{y1, k7, {}, {r, h, {}}};
    for (std::size_t i = 0; i < kDim; ++i) {
        s.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                        e7 * k7[i]);
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        s.segment.coeff[0][i] = y[i];
        s.segment.coeff[1][i] = ydiff;
        s.segment.coeff[2][i] = bspl;
        s.segment.coeff[3][i] = ydiff - h * k7[i] - bspl;
        s.segment.coeff[4][i] =
            h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    return s;
}

// Max norm, so every component meets atol + rtol |y| on its own.
double error_norm(const Step& s, const State& y0, const IntegratorConfig& cfg) {
    double norm = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        const double sk = cfg.atol + cfg.rtol * std::max(std::abs(y0[i]), std::abs(s.y1[i]));
        norm = std::max(norm, std::abs(s.err[i]) / sk);
    }
    // The gap is controlled relative to its own size; it only matters where it
    // is far below atol.
    const double gap_scale = (cfg.rtol + cfg.atol) * std::max(std::abs(y0[2]), std::abs(s.y1[2]));
    if (gap_scale > 0.0) {
        norm = std::max(norm, std::abs(s.err[2]) / gap_scale);
    }
    return std::isfinite(norm) ? norm : std::numeric_limits<double>::infinity();
}

double event_value(const EventSpec& spec, const Field& field, double r, const State& y) {
    switch (spec.kind) {
    case EventKind::FCrossesZero:
        return y[0];
    case EventKind::GCrossesZero:
        return y[1];
    case EventKind::GSquaredReachesOne:
        return -y[2] * (2.0 - y[2]);
    case EventKind::DecayDetected:
        return std::abs(y[0]) + std::abs(y[1]) - spec.eps_decay;
    case EventKind::FPrimeCrossesZero:
        return field(r, y)[0];
    }
    return 0.0;
}

// d/dr of the event function along the flow, where cheap and smooth.
std::optional<double> event_rate(const EventSpec& spec, const Field& field, double r,
                                 const State& y) {
    const State v = field(r, y);
    switch (spec.kind) {
    case EventKind::FCrossesZero:
        return v[0];
    case EventKind::GCrossesZero:
        return v[1];
    case EventKind::GSquaredReachesOne:
        return 2.0 * y[1] * v[1];
    default:
        return std::nullopt;
    }
}

bool crossed(Direction dir, double v0, double v1) {
    const bool rising = v0 < 0.0 && v1 >= 0.0;
    const bool falling = v0 > 0.0 && v1 <= 0.0;
    switch (dir) {
    case Direction::Rising:
        return rising;
    case Direction::Falling:
        return falling;
    case Direction::Any:
        return rising || falling;
    }
    return false;
}

constexpr double kEventTolerance = 1e-10;
constexpr double kTieTolerance = 1e-12;

struct Hit {
    EventKind kind;
    bool terminal;
    double r;
    State y;
};

class Engine {
  public:
    Engine(Field field, const ModelParams& params, const IntegratorConfig& cfg,
           std::span<const EventSpec> events)
        : field_(field), params_(params), cfg_(cfg), events_(events.begin(), events.end()) {}

    Trajectory run(InitialValue x0, std::vector<Sample> prefix, double r_begin, State y_begin) {
        std::vector<Sample> samples = std::move(prefix);
        std::vector<DenseSegment> segments;
        std::vector<EventRecord> records;
        Termination term;

        samples.push_back(make_sample(r_begin, y_begin));

        double r = r_begin;
        State y = y_begin;
        State k1 = field_(r, y);
        const bool fixed = cfg_.fixed_step > 0.0;
        double h = fixed ? cfg_.fixed_step : std::min(cfg_.h_init, cfg_.h_max);
        double facold = 1e-4;
        bool last_rejected = false;
        std::size_t steps = 0;

        std::vector<double> ev_prev(events_.size());
        for (std::size_t i = 0; i < events_.size(); ++i) {
            ev_prev[i] = event_value(events_[i], field_, r, y);
        }

        while (r < cfg_.r_max) {
            if (++steps > cfg_.max_steps) {
                throw StiffnessError("step budget exhausted at r=" + std::to_string(r), r);
            }
            if ((r + 1.01 * h - cfg_.r_max) > 0.0) {
                h = cfg_.r_max - r;
            }
            const Step step = dopri_step(field_, r, y, k1, h);

            if (!fixed) {
                const double err = error_norm(step, y, cfg_) / std::min(1.0, h);
                constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
                constexpr double facc1 = 5.0, facc2 = 0.1;
                const double fac11 = std::isfinite(err) ? std::pow(err, expo1) : facc1 * safe;
                if (err > 1.0) {
                    h /= std::min(facc1, fac11 / safe);
                    last_rejected = true;
                    if (h < 1e-14 * std::max(1.0, std::abs(r))) {
                        throw StiffnessError("step size underflow at r=" + std::to_string(r), r);
                    }
                    continue;
                }
                double fac = fac11 / std::pow(facold, beta);
                fac = std::max(facc2, std::min(facc1, fac / safe));
                double hnew = std::min(h / fac, cfg_.h_max);
                if (last_rejected) {
                    hnew = std::min(hnew, h);
                }
                facold = std::max(err, 1e-4);
                last_rejected = false;
                accept(step, r, y, k1, h, samples, segments, records, term, ev_prev);
                h = hnew;
            } else {
                if (!std::isfinite(step.y1[0]) || !std::isfinite(step.y1[1])) {
                    term = {TerminationCause::Blowup, r, {}};
                    break;
                }
                accept(step, r, y, k1, h, samples, segments, records, term, ev_prev);
                h = cfg_.fixed_step;
            }
            if (done_) {
                break;
            }
        }
        if (!done_) {
            term = {TerminationCause::ReachedRmax, samples.back().r, {}};
        }
        return Trajectory(params_, x0, std::move(samples), std::move(term), std::move(segments),
                          std::move(records));
    }

  private:
    Sample make_sample(double r, const State& y) const {
        return {r, y[0], y[1], hamiltonian({y[0], y[1], r}, params_), y[2]};
    }

    void accept(const Step& step, double& r, State& y, State& k1, double h,
                std::vector<Sample>& samples, std::vector<DenseSegment>& segments,
                std::vector<EventRecord>& records, Termination& term,
                std::vector<double>& ev_prev) {
        const double r1 = r + h;
        std::vector<Hit> hits;
        std::vector<double> ev_next(events_.size());
        for (std::size_t i = 0; i < events_.size(); ++i) {
            const EventSpec& spec = events_[i];
            ev_next[i] = event_value(spec, field_, r1, step.y1);
            if (auto hit = locate(spec, step, r, y, k1, ev_prev[i], ev_next[i])) {
                hits.push_back(*hit);
            }
        }
        ev_prev = std::move(ev_next);
        segments.push_back(step.segment);

        std::sort(hits.begin(), hits.end(), [](const Hit& l, const Hit& r) { return l.r < r.r; });
        const auto first_terminal =
            std::find_if(hits.begin(), hits.end(), [](const Hit& x) { return x.terminal; });
        if (first_terminal != hits.end()) {
            const double r_stop = first_terminal->r;
            for (const Hit& hit : hits) {
                if (hit.r < r_stop - kTieTolerance || (!hit.terminal && hit.r <= r_stop)) {
                    records.push_back({hit.kind, hit.r, hit.y[0], hit.y[1]});
                }
            }
            term.cause = TerminationCause::Event;
            term.r = r_stop;
            for (const Hit& hit : hits) {
                if (hit.terminal && hit.r - r_stop <= kTieTolerance) {
                    term.kinds.push_back(hit.kind);
                }
            }
            if (r_stop > samples.back().r) {
                samples.push_back(make_sample(r_stop, first_terminal->y));
            }
            done_ = true;
            return;
        }
        for (const Hit& hit : hits) {
            records.push_back({hit.kind, hit.r, hit.y[0], hit.y[1]});
        }

        r = r1;
        y = step.y1;
        k1 = step.k7;
        samples.push_back(make_sample(r, y));

        if (std::abs(y[0]) + std::abs(y[1]) > cfg_.blowup_threshold) {
            term = {TerminationCause::Blowup, r, {}};
            done_ = true;
        }
    }

    std::optional<Hit> locate(const EventSpec& spec, const Step& step, double r0, const State& y0,
                              const State& k1, double v0, double v1) const {
        const double r1 = r0 + step.segment.h;
        auto on_interp = [&](double r) {
            return event_value(spec, field_, r, step.segment.eval(r));
        };

        double lo = r0;
        double vlo = v0;
        if (spec.kind == EventKind::DecayDetected) {
            if (!(v1 < 0.0) || r1 < spec.r_min) {
                return std::nullopt;
            }
            if (r0 < spec.r_min) {
                lo = spec.r_min;
                vlo = on_interp(lo);
            }
            if (vlo <= 0.0) {
                return Hit{spec.kind, spec.terminal, lo, restep(r0, y0, k1, lo)};
            }
        } else if (!crossed(spec.direction, v0, v1)) {
            return std::nullopt;
        }

        double root = r1;
        if (v1 != 0.0) {
            std::uintmax_t iters = 200;
            auto tol = [](double x, double y) { return std::abs(y - x) <= kEventTolerance; };
            const auto bracket =
                boost::math::tools::toms748_solve(on_interp, lo, r1, vlo, v1, tol, iters);
            root = 0.5 * (bracket.first + bracket.second);
        }
        State yr = restep(r0, y0, k1, root);

        // Newton polish against the actual one-step map so the event
        // function is small on the returned state, not just the interpolant.
        for (int it = 0; it < 3; ++it) {
            const auto rate = event_rate(spec, field_, root, yr);
            const double val = event_value(spec, field_, root, yr);
            if (!rate || *rate == 0.0 || val == 0.0) {
                break;
            }
            const double cand = root - val / *rate;
            if (!(cand > r0) || cand > r1) {
                break;
            }
            const State yc = restep(r0, y0, k1, cand);
            if (std::abs(event_value(spec, field_, cand, yc)) >= std::abs(val)) {
                break;
            }
            root = cand;
            yr = yc;
        }
        return Hit{spec.kind, spec.terminal, root, yr};
    }

    State restep(double r0, const State& y0, const State& k1, double r) const {
        if (r <= r0) {
            return y0;
        }
        return dopri_step(field_, r0, y0, k1, r - r0).y1;
    }

    Field field_;
    ModelParams params_;
    IntegratorConfig cfg_;
    std::vector<EventSpec> events_;
    bool done_ = false;
};

Field make_field(FieldKind kind, double rho, const ModelParams& params) {
    return Field{kind, rho, params.a(), params.b()};
}

void check_finite(const PhasePoint& p) {
    if (!std::isfinite(p.f) || !std::isfinite(p.g)) {
        throw DomainError("initial point must be finite");
    }
}

} // namespace

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::FCrossesZero:
        return "f_crosses_zero";
    case EventKind::GCrossesZero:
        return "g_crosses_zero";
    case EventKind::GSquaredReachesOne:
        return "g_squared_reaches_one";
    case EventKind::DecayDetected:
        return "decay_detected";
    case EventKind::FPrimeCrossesZero:
        return "f_prime_crosses_zero";
    }
    return "unknown";
}

std::string_view to_string(TerminationCause cause) {
    switch (cause) {
    case TerminationCause::ReachedRmax:
        return "reached_rmax";
    case TerminationCause::Event:
        return "event";
    case TerminationCause::Blowup:
        return "blowup";
    }
    return "unknown";
}

void IntegratorConfig::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(rtol) || rtol < 1e-14) {
        throw DomainError("rtol must be >= 1e-14");
    }
    if (!positive(atol) || !positive(h_init) || !positive(h_max) || !positive(r_start) ||
        !positive(r_max) || !positive(blowup_threshold)) {
        throw DomainError("integrator tolerances, steps and horizons must be positive");
    }
    if (!(r_start < r_max)) {
        throw DomainError("r_start must be smaller than r_max");
    }
    if (fixed_step < 0.0 || !std::isfinite(fixed_step)) {
        throw DomainError("fixed_step must be nonnegative");
    }
    if (max_steps == 0) {
        throw DomainError("max_steps must be positive");
    }
}

std::array<double, 3> DenseSegment::eval(double r) const {
    const double s = (r - r0) / h;
    const double s1 = 1.0 - s;
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = coeff[0][i] +
                 s * (coeff[1][i] + s1 * (coeff[2][i] + s * (coeff[3][i] + s1 * coeff[4][i])));
    }
    return out;
}

Trajectory::Trajectory(ModelParams params, InitialValue x0, std::vector<Sample> samples,
                       Termination termination, std::vector<DenseSegment> segments,
                       std::vector<EventRecord> events)
    : params_(params), x0_(x0), samples_(std::move(samples)), termination_(std::move(termination)),
      segments_(std::move(segments)), events_(std::move(events)) {}

PhasePoint Trajectory::state_at(double r) const {
    const auto y = dense_at(r);
    return {y[0], y[1], std::clamp(r, samples_.empty() ? r : samples_.front().r,
                                   samples_.empty() ? r : samples_.back().r)};
}

std::array<double, 3> Trajectory::dense_at(double r) const {
    if (samples_.empty()) {
        throw DomainError("empty trajectory");
    }
    if (r <= samples_.front().r) {
        const Sample& s = samples_.front();
        return {s.f, s.g, s.gap};
    }
    if (r >= samples_.back().r) {
        const Sample& s = samples_.back();
        return {s.f, s.g, s.gap};
    }
    const auto seg = std::upper_bound(segments_.begin(), segments_.end(), r,
                                      [](double x, const DenseSegment& d) { return x < d.r0; });
    if (seg != segments_.begin()) {
        const DenseSegment& d = *std::prev(seg);
        if (r <= d.r0 + d.h) {
            return d.eval(r);
        }
    }
    const auto hi = std::upper_bound(samples_.begin(), samples_.end(), r,
                                     [](double x, const Sample& s) { return x < s.r; });
    const Sample& s1 = *hi;
    const Sample& s0 = *std::prev(hi);
    const double t = (r - s0.r) / (s1.r - s0.r);
    return {s0.f + t * (s1.f - s0.f), s0.g + t * (s1.g - s0.g),
            s0.gap + t * (s1.gap - s0.gap)};
}

Trajectory Trajectory::truncated(double r_cut) const {
    std::vector<Sample> samples;
    for (const Sample& s : samples_) {
        if (s.r <= r_cut) {
            samples.push_back(s);
        }
    }
    std::vector<DenseSegment> segments;
    for (const DenseSegment& d : segments_) {
        if (d.r0 < r_cut) {
            segments.push_back(d);
        }
    }
    std::vector<EventRecord> events;
    for (const EventRecord& e : events_) {
        if (e.r <= r_cut) {
            events.push_back(e);
        }
    }
    const double r_end = samples.empty() ? r_cut : samples.back().r;
    return Trajectory(params_, x0_, std::move(samples), {TerminationCause::ReachedRmax, r_end, {}},
                      std::move(segments), std::move(events));
}

InitialValue InitialValue::midpoint(const InitialValue& lo, const InitialValue& hi) {
    const bool near_one = std::abs(lo.gap()) <= 0.5 && std::abs(hi.gap()) <= 0.5;
    if (near_one) {
        return from_gap(0.5 * (lo.gap() + hi.gap()));
    }
    return from_x(0.5 * (lo.x() + hi.x()));
}

double series_slope(double x0, const ModelParams& params) {
    return x0 * (params.b() - params.a() * x0 * x0) / 3.0;
}

SeriesState series_start(const InitialValue& x0, const ModelParams& params, double r_start) {
    if (!(r_start > 0.0)) {
        throw DomainError("series start radius must be positive");
    }
    const double x = x0.x();
    const double gap = x0.gap();
    const double c = series_slope(x, params);
    // 1 - x^2 = gap (2 - gap) keeps precision when x is within ulps of 1.
    const double g2_coeff = 0.5 * c * (gap * (2.0 - gap)) * r_start * r_start;
    return {{c * r_start, x + g2_coeff, r_start}, gap - g2_coeff};
}

PhasePoint series_start(double x0, const ModelParams& params, double r_start) {
    return series_start(InitialValue::from_x(x0), params, r_start).point;
}

Trajectory exact_trivial(const ModelParams& params, double r_max) {
    if (!(r_max > 0.0)) {
        throw DomainError("r_max must be positive");
    }
    std::vector<Sample> samples{{0.0, 0.0, 0.0, 0.0, 1.0}, {r_max, 0.0, 0.0, 0.0, 1.0}};
    return Trajectory(params, InitialValue::from_x(0.0), std::move(samples),
                      {TerminationCause::ReachedRmax, r_max, {}});
}

Trajectory integrate_radial(double x0, const ModelParams& params, const IntegratorConfig& config,
                            std::span<const EventSpec> events) {
    return integrate_radial(InitialValue::from_x(x0), params, config, events);
}

Trajectory integrate_radial(const InitialValue& x0, const ModelParams& params,
                            const IntegratorConfig& config, std::span<const EventSpec> events) {
    config.validate();
    if (!std::isfinite(x0.x()) || !std::isfinite(x0.gap())) {
        throw DomainError("initial value must be finite");
    }
    const SeriesState start = series_start(x0, params, config.r_start);
    const double x = x0.x();
    std::vector<Sample> prefix{{0.0, 0.0, x, hamiltonian({0.0, x, 0.0}, params), x0.gap()}};
    Engine engine(make_field(FieldKind::Radial, 0.0, params), params, config, events);
    return engine.run(x0, std::move(prefix), config.r_start,
                      {start.point.f, start.point.g, start.gap});
}

Trajectory integrate_conservative(const PhasePoint& p0, const ModelParams& params,
                                  const IntegratorConfig& config,
                                  std::span<const EventSpec> events) {
    config.validate();
    check_finite(p0);
    Engine engine(make_field(FieldKind::Conservative, 0.0, params), params, config, events);
    return engine.run(InitialValue::from_x(p0.g), {}, 0.0, {p0.f, p0.g, 1.0 - p0.g});
}

Trajectory integrate_shifted(const PhasePoint& p0, double rho, const ModelParams& params,
                             const IntegratorConfig& config, std::span<const EventSpec> events) {
    config.validate();
    check_finite(p0);
    if (!(rho > 0.0)) {
        throw DomainError("shift rho must be positive");
    }
    Engine engine(make_field(FieldKind::Shifted, rho, params), params, config, events);
    return engine.run(InitialValue::from_x(p0.g), {}, 0.0, {p0.f, p0.g, 1.0 - p0.g});
}

DissipationResidual dissipation_residual(const Trajectory& traj, double spacing, double f_floor) {
    if (!(spacing > 0.0)) {
        throw DomainError("spacing must be positive");
    }
    DissipationResidual out;
    if (traj.empty()) {
        return out;
    }
    const ModelParams& params = traj.params();
    const double a = params.a();
    const double b = params.b();
    // H - (a - 2b)/4 = w f^2/2 - (a - b) w/2 + a w^2/4 with w = 1 - g^2.
    auto energy = [&](double r, bool shifted) {
        const auto y = traj.dense_at(r);
        if (!shifted) {
            return hamiltonian({y[0], y[1], r}, params);
        }
        const double w = y[2] * (2.0 - y[2]);
        return 0.5 * y[0] * y[0] * w - 0.5 * (a - b) * w + 0.25 * a * w * w;
    };

    const double r_lo = std::max(traj.r_front(), 0.0);
    const double r_hi = traj.r_back();
    for (double k = std::ceil(r_lo / spacing);; k += 1.0) {
        const double r = k * spacing;
        if (r + 2.0 * spacing > r_hi) {
            break;
        }
        if (r - 2.0 * spacing < r_lo || r <= 0.0) {
            continue;
        }
        const auto y = traj.dense_at(r);
        if (!(std::abs(y[0]) > f_floor)) {
            continue;
        }
        const Velocity v = rhs_radial(r, {y[0], y[1], r}, params);
        const double scale =
            (std::abs(y[0]) + std::abs(y[1])) / (std::abs(v.df) + std::abs(v.dg) + 1e-300);
        const double h = std::min(spacing, 0.01 * scale);
        const bool shifted = y[1] * y[1] >= 0.5;
        const double dh = (-energy(r + 2.0 * h, shifted) + 8.0 * energy(r + h, shifted) -
                           8.0 * energy(r - h, shifted) + energy(r - 2.0 * h, shifted)) /
                          (12.0 * h);
        const double w = y[2] * (2.0 - y[2]);
        const double exact = -2.0 / r * y[0] * y[0] * w;
        const double rel = exact != 0.0 ? std::abs(dh - exact) / std::abs(exact)
                                        : (dh == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        ++out.points;
        if (rel > out.worst || !std::isfinite(rel)) {
            out.worst = rel;
            out.r_worst = r;
        }
    }
    return out;
}

} // namespace nucshoot
