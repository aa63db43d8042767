#include "nucshoot/errors.hpp"
#include "nucshoot/integrator.hpp"
#include "nucshoot/model.hpp"
#include "nucshoot/portrait.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace nucshoot;

namespace {

double sup_error_vs_coth(const Trajectory& t, const ModelParams& p, double r0, double r1,
                         double step) {
    double worst = 0.0;
    for (double r = r0; r <= r1 + 1e-12; r += step) {
        const PhasePoint a = t.state_at(r);
        const PhasePoint b = exact_coth(r, p);
        worst = std::max({worst, std::abs(a.f - b.f), std::abs(a.g - b.g)});
    }
    return worst;
}

} // namespace

TEST_CASE("series start") {
    const ModelParams p(9, 4);
    const PhasePoint zero = series_start(0.0, p, 1e-6);
    CHECK(zero.f == 0.0);
    CHECK(zero.g == 0.0);
    const PhasePoint s = series_start(0.8, p, 1e-6);
    CHECK(s.f == doctest::Approx(-4.6933333333e-7).epsilon(1e-9));
    CHECK(s.g == doctest::Approx(0.8).epsilon(1e-12));
    const PhasePoint flat = series_start(2.0 / 3.0, p, 1e-6);
    CHECK(std::abs(flat.f) <= 1e-18);
    CHECK_THROWS_AS(series_start(0.8, p, 0.0), DomainError);
}

TEST_CASE("series slope matches x(b - a x^2)/3 at random x") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const ModelParams p(9, 4);
    const double r0 = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng);
        const double slope = x * (4.0 - 9.0 * x * x) / 3.0;
        CHECK(std::abs(series_slope(x, p) - slope) <= 1e-12 * std::max(1.0, std::abs(slope)));
        CHECK(std::abs(series_start(x, p, r0).f / r0 - slope) <= 1e-12 * std::max(1.0, std::abs(slope)));
    }
}

TEST_CASE("series start in the gap coordinate keeps 1 - g") {
    const ModelParams p(9, 4);
    const SeriesState st = series_start(InitialValue::from_gap(1e-20), p, 1e-6);
    CHECK(st.gap > 0.0);
    CHECK(st.gap == doctest::Approx(1e-20).epsilon(1e-6));
}

TEST_CASE("initial values") {
    const InitialValue a = InitialValue::from_x(0.25);
    CHECK(a.gap() == 0.75);
    const InitialValue b = InitialValue::from_gap(1e-30);
    CHECK(b.x() == 1.0);
    CHECK(b.gap() == 1e-30);
    const InitialValue m = InitialValue::midpoint(InitialValue::from_gap(1e-20),
                                                  InitialValue::from_gap(3e-20));
    CHECK(m.gap() == doctest::Approx(2e-20));
}

TEST_CASE("configuration validation") {
    IntegratorConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    IntegratorConfig bad = cfg;
    bad.rtol = 1e-16;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = cfg;
    bad.atol = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = cfg;
    bad.r_start = 300.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = cfg;
    bad.max_steps = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("zero shot stays at the origin") {
    const ModelParams p(9, 4);
    IntegratorConfig cfg;
    cfg.r_max = 20.0;
    const Trajectory t = integrate_radial(0.0, p, cfg);
    CHECK(t.termination().cause == TerminationCause::ReachedRmax);
    for (const Sample& s : t.samples()) {
        CHECK(s.f == 0.0);
        CHECK(s.g == 0.0);
        CHECK(s.H == 0.0);
    }
    const Trajectory z = exact_trivial(p, 10.0);
    for (double r : {0.0, 1.0, 10.0}) {
        const PhasePoint q = z.state_at(r);
        CHECK(q.f == 0.0);
        CHECK(q.g == 0.0);
        CHECK(hamiltonian(q, p) == 0.0);
        if (r > 0.0) {
            const Velocity v = rhs_radial(r, q, p);
            CHECK(v.df == 0.0);
            CHECK(v.dg == 0.0);
        }
    }
}

TEST_CASE("trajectory invariants") {
    const ModelParams p(9, 4);
    IntegratorConfig cfg;
    cfg.r_max = 30.0;
    for (double x : {0.3, 0.8, 0.95, 1.2, -0.7}) {
        const Trajectory t = integrate_radial(x, p, cfg);
        const auto s = t.samples();
        REQUIRE(s.size() > 2);
        CHECK(s.front().r == 0.0);
        CHECK(s.front().f == 0.0);
        CHECK(s.front().g == x);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i > 0) {
                CHECK(s[i].r > s[i - 1].r);
            }
            CHECK(s[i].H == hamiltonian({s[i].f, s[i].g}, p));
        }
    }
}

TEST_CASE("coth oracle at default tolerance") {
    const ModelParams p(2.5, 1);
    IntegratorConfig cfg;
    cfg.r_max = 10.0;
    const Trajectory t = integrate_radial(1.0, p, cfg);
    CHECK(sup_error_vs_coth(t, p, 0.0, 10.0, 1e-3) <= 1e-6);
    for (const Sample& s : t.samples()) {
        CHECK(s.g == 1.0);
        CHECK(s.gap == 0.0);
    }
}

TEST_CASE("fixed-step convergence order against the coth oracle") {
    const ModelParams p(2.5, 1);
    auto err = [&](double h) {
        IntegratorConfig cfg;
        cfg.r_max = 6.0;
        cfg.fixed_step = h;
        const Trajectory t = integrate_radial(1.0, p, cfg);
        return sup_error_vs_coth(t, p, 1.0, 6.0, h);
    };
    const double e1 = err(0.2);
    const double e2 = err(0.1);
    REQUIRE(e2 > 0.0);
    const double order = std::log2(e1 / e2);
    MESSAGE("measured order " << order);
    CHECK(order >= 4.5);
}

TEST_CASE("f-crossing event is localized on the interpolant") {
    const ModelParams p(9, 4);
    const std::vector<EventSpec> events{{EventKind::FCrossesZero}};
    const Trajectory t = integrate_radial(0.8, p, IntegratorConfig{}, events);
    REQUIRE(t.termination().cause == TerminationCause::Event);
    REQUIRE(t.termination().kinds.size() == 1);
    CHECK(t.termination().kinds[0] == EventKind::FCrossesZero);
    const double r_x = t.termination().r;
    CHECK(r_x > 0.0);
    CHECK(r_x < 200.0);
    const Sample& last = t.samples().back();
    CHECK(last.r == r_x);
    CHECK(std::abs(last.f) <= 1e-9 * std::max(1.0, std::abs(last.g)));
    // The root lies within 1e-10 of the reported radius.
    const std::vector<EventSpec> none;
    IntegratorConfig cfg;
    cfg.r_max = r_x + 0.1;
    const Trajectory longer = integrate_radial(0.8, p, cfg, none);
    CHECK(longer.state_at(r_x - 1e-10).f * longer.state_at(r_x + 1e-10).f <= 0.0);
}

TEST_CASE("non-terminal events are recorded") {
    const ModelParams p(9, 4);
    const std::vector<EventSpec> events{
        {EventKind::FPrimeCrossesZero, Direction::Any, 5.0, 1e-8, false},
        {EventKind::FCrossesZero}};
    const Trajectory t = integrate_radial(0.9, p, IntegratorConfig{}, events);
    CHECK(t.termination().cause == TerminationCause::Event);
    for (const EventRecord& e : t.events()) {
        CHECK(e.r <= t.termination().r);
    }
}

TEST_CASE("blowup terminates the integration") {
    const ModelParams p(1, 4);
    IntegratorConfig cfg;
    cfg.blowup_threshold = 50.0;
    const Trajectory t = integrate_radial(0.5, p, cfg);
    CHECK(t.termination().cause == TerminationCause::Blowup);
    const Sample& last = t.samples().back();
    CHECK(std::abs(last.f) + std::abs(last.g) >= 50.0);
}

TEST_CASE("step budget exhaustion reports the radius") {
    const ModelParams p(9, 4);
    IntegratorConfig cfg;
    cfg.max_steps = 10;
    try {
        integrate_radial(0.8, p, cfg);
        FAIL("expected StiffnessError");
    } catch (const StiffnessError& e) {
        CHECK(e.radius() > 0.0);
    }
}

TEST_CASE("conservative energy drift over random admissible starts") {
    const ModelParams p(9, 4);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    IntegratorConfig cfg;
    cfg.r_max = 50.0;
    for (int i = 0; i < 10; ++i) {
        const double g = u(rng);
        const double f = u(rng) * std::sqrt((9.0 * g * g + 1.0) / 2.0);
        REQUIRE(admissible_contains({f, g}, p));
        const Trajectory t = integrate_conservative({f, g}, p, cfg);
        const double h0 = t.samples().front().H;
        for (const Sample& s : t.samples()) {
            CHECK(std::abs(s.H - h0) <= 1e-8 * (1.0 + std::abs(h0)));
            CHECK(admissible_contains({s.f, s.g}, p));
        }
    }
}

TEST_CASE("conservative rest point is constant") {
    const ModelParams p(9, 4);
    IntegratorConfig cfg;
    cfg.r_max = 20.0;
    const Trajectory t = integrate_conservative({0.0, 2.0 / 3.0}, p, cfg);
    for (const Sample& s : t.samples()) {
        CHECK(std::abs(s.f) <= 1e-14);
        CHECK(std::abs(s.g - 2.0 / 3.0) <= 1e-14);
    }
}

TEST_CASE("conservative flow on g = 1 runs down to -sqrt(a - b)") {
    const ModelParams p(9, 4);
    IntegratorConfig cfg;
    cfg.r_max = 20.0;
    const Trajectory t = integrate_conservative({1.5, 1.0}, p, cfg);
    double prev = 1.5;
    for (const Sample& s : t.samples()) {
        CHECK(s.g == 1.0);
        CHECK(s.f <= prev + 1e-15);
        CHECK(s.f > -std::sqrt(5.0) - 1e-9);
        prev = s.f;
    }
    CHECK(t.samples().back().f == doctest::Approx(-std::sqrt(5.0)).epsilon(1e-6));
}

TEST_CASE("trajectories started near critical points stay there") {
    const ModelParams p(9, 4);
    for (const CriticalPoint& c : critical_points(p)) {
        // A saddle repels at rate sqrt(-det Hessian); the horizon keeps the
        // linear growth of a 1e-12 offset below 1e-6.
        IntegratorConfig cfg;
        cfg.r_max = c.kind == CriticalKind::LocalMin ? 10.0 : 2.0;
        for (const auto& [df, dg] : {std::pair{1e-12, 0.0}, {0.0, 1e-12}, {-1e-12, 1e-12}}) {
            const PhasePoint start{c.location.f + df, c.location.g + dg};
            const Trajectory t = integrate_conservative(start, p, cfg);
            for (const Sample& s : t.samples()) {
                CHECK(std::hypot(s.f - c.location.f, s.g - c.location.g) <= 1e-6);
            }
        }
    }
}

TEST_CASE("shifted system") {
    const ModelParams p(9, 4);
    IntegratorConfig cfg;
    cfg.r_max = 10.0;
    const Trajectory zero = integrate_shifted({0.0, 0.0}, 1.0, p, cfg);
    for (const Sample& s : zero.samples()) {
        CHECK(s.f == 0.0);
        CHECK(s.g == 0.0);
    }
    CHECK_THROWS_AS(integrate_shifted({0.1, 0.1}, 0.0, p, cfg), DomainError);

    for (double rho : {0.5, 5.0, 50.0}) {
        const Trajectory t = integrate_shifted({0.3, 0.5}, rho, p, cfg);
        const auto s = t.samples();
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (s[i].g * s[i].g < 1.0 && s[i - 1].g * s[i - 1].g < 1.0) {
                CHECK(s[i].H <= s[i - 1].H + 1e-10);
            }
        }
    }
}

TEST_CASE("shifted system approaches the conservative one as rho grows") {
    const ModelParams p(9, 4);
    IntegratorConfig cfg;
    cfg.r_max = 5.0;
    const PhasePoint p0{0.3, 0.5};
    const Trajectory cons = integrate_conservative(p0, p, cfg);
    std::vector<double> dist;
    for (double rho : {10.0, 100.0, 1000.0}) {
        const Trajectory t = integrate_shifted(p0, rho, p, cfg);
        double worst = 0.0;
        for (double r = 0.0; r <= 5.0; r += 1e-3) {
            const PhasePoint a = t.state_at(r);
            const PhasePoint b = cons.state_at(r);
            worst = std::max({worst, std::abs(a.f - b.f), std::abs(a.g - b.g)});
        }
        dist.push_back(worst);
    }
    CHECK(dist[0] > dist[1]);
    CHECK(dist[1] > dist[2]);
    CHECK(dist[2] <= 1e-2);
}

TEST_CASE("energy dissipation identity along radial shots") {
    const ModelParams p(9, 4);
    IntegratorConfig cfg;
    cfg.rtol = 1e-12;
    cfg.atol = 1e-15;
    cfg.r_max = 40.0;
    for (double x : {0.2, 0.5, 0.8, 0.9}) {
        const std::vector<EventSpec> events{{EventKind::FCrossesZero}, {EventKind::GCrossesZero}};
        const Trajectory t = integrate_radial(x, p, cfg, events);
        const DissipationResidual res = dissipation_residual(t);
        CHECK(res.points > 0);
        CHECK(res.worst <= 1e-4);
    }
}

TEST_CASE("dense output agrees with the samples") {
    const ModelParams p(9, 4);
    IntegratorConfig cfg;
    cfg.r_max = 15.0;
    const Trajectory t = integrate_radial(0.9, p, cfg);
    for (const Sample& s : t.samples()) {
        const PhasePoint q = t.state_at(s.r);
        CHECK(q.f == doctest::Approx(s.f).epsilon(1e-12));
        CHECK(q.g == doctest::Approx(s.g).epsilon(1e-12));
    }
    const Trajectory cut = t.truncated(5.0);
    CHECK(cut.r_back() <= 5.0);
    CHECK(cut.termination().cause == TerminationCause::ReachedRmax);
}

TEST_CASE("shots from just below one keep a positive gap") {
    const ModelParams p(9, 4);
    IntegratorConfig cfg;
    cfg.r_max = 10.0;
    const Trajectory t = integrate_radial(InitialValue::from_gap(1e-14), p, cfg);
    for (const Sample& s : t.samples()) {
        CHECK(s.gap > 0.0);
        CHECK(s.g < 1.0);
    }
}
