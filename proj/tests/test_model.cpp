#include "nucshoot/errors.hpp"
#include "nucshoot/model.hpp"

#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>

using namespace nucshoot;

TEST_CASE("regime classification") {
    CHECK(classify_regime(ModelParams(9, 4)) == Regime::Supercritical);
    CHECK(classify_regime(ModelParams(4, 1)) == Regime::Supercritical);
    CHECK(classify_regime(ModelParams(4, 4)) == Regime::Degenerate);
    CHECK(classify_regime(ModelParams(8, 4)) == Regime::Critical);
    CHECK(classify_regime(ModelParams(3, 2)) == Regime::SubcriticalAB);
    CHECK(classify_regime(ModelParams(1, 4)) == Regime::Subcritical);
    // Inside the tolerance band around a = 2b.
    CHECK(classify_regime(ModelParams(8 + 1e-13, 4)) == Regime::Critical);
    CHECK(classify_regime(ModelParams(8 + 1e-6, 4)) == Regime::Supercritical);
    CHECK(ModelParams(9, 4).supercritical());
    CHECK_FALSE(ModelParams(8, 4).supercritical());
}

TEST_CASE("nonpositive couplings are rejected") {
    CHECK_THROWS_AS(ModelParams(0, 1), DomainError);
    CHECK_THROWS_AS(ModelParams(1, -1), DomainError);
    CHECK_THROWS_AS(ModelParams(std::nan(""), 1), DomainError);
}

TEST_CASE("decay bound rate") {
    CHECK(ModelParams(9, 4).decay_bound_rate() == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
    CHECK(ModelParams(4, 1).decay_bound_rate() == doctest::Approx(0.5));
    CHECK(ModelParams(1, 1.5).decay_bound_rate() > 0.0);
    CHECK_THROWS_AS(ModelParams(1, 2).decay_bound_rate(), DomainError);
}

TEST_CASE("radial field") {
    const ModelParams p(9, 4);
    const Velocity v0 = rhs_radial(1.0, {0, 0, 1.0}, p);
    CHECK(v0.df == 0.0);
    CHECK(v0.dg == 0.0);
    const Velocity v1 = rhs_radial(1.0, {0, 1, 1.0}, p);
    CHECK(v1.df == doctest::Approx(-5.0));
    CHECK(v1.dg == 0.0);
    const Velocity v2 = rhs_radial(2.0, {-1, 0.5, 2.0}, p);
    CHECK(v2.df == doctest::Approx(2.375));
    CHECK(v2.dg == doctest::Approx(-0.75));
    CHECK_THROWS_AS(rhs_radial(0.0, {0.1, 0.2}, p), SingularityError);
    CHECK_THROWS_AS(rhs_radial(-1.0, {0.1, 0.2}, p), DomainError);
}

TEST_CASE("conservative field") {
    const ModelParams p(9, 4);
    const Velocity rest1 = rhs_conservative({0, 2.0 / 3.0}, p);
    CHECK(rest1.df == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(rest1.dg == 0.0);
    const Velocity rest2 = rhs_conservative({std::sqrt(5.0), 1.0}, p);
    CHECK(std::abs(rest2.df) < 1e-14);
    CHECK(rest2.dg == 0.0);
    const Velocity v = rhs_conservative({1, 0}, p);
    CHECK(v.df == 0.0);
    CHECK(v.dg == 1.0);
}

TEST_CASE("energy values") {
    const ModelParams p(9, 4);
    CHECK(hamiltonian({0, 0}, p) == 0.0);
    CHECK(hamiltonian({0, 1}, p) == doctest::Approx(0.25));
    CHECK(hamiltonian({1, 0}, p) == doctest::Approx(0.5));
}

TEST_CASE("energy symmetries and odd fields") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const ModelParams p(9, 4);
    for (int i = 0; i < 500; ++i) {
        const double f = u(rng);
        const double g = u(rng);
        const double h = hamiltonian({f, g}, p);
        CHECK(hamiltonian({-f, -g}, p) == h);
        CHECK(hamiltonian({-f, g}, p) == h);
        CHECK(hamiltonian({f, -g}, p) == h);
        const Velocity v = rhs_conservative({f, g}, p);
        const Velocity w = rhs_conservative({-f, -g}, p);
        CHECK(w.df == -v.df);
        CHECK(w.dg == -v.dg);
        const Velocity vr = rhs_radial(1.5, {f, g}, p);
        const Velocity wr = rhs_radial(1.5, {-f, -g}, p);
        CHECK(wr.df == -vr.df);
        CHECK(wr.dg == -vr.dg);
    }
}

TEST_CASE("gradient matches central differences of the energy") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_real_distribution<double> coupling(0.5, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const ModelParams p(coupling(rng), coupling(rng));
        const double f = u(rng);
        const double g = u(rng);
        const Gradient grad = hamiltonian_gradient({f, g}, p);
        const double h = 1e-5;
        const double df = (hamiltonian({f + h, g}, p) - hamiltonian({f - h, g}, p)) / (2 * h);
        const double dg = (hamiltonian({f, g + h}, p) - hamiltonian({f, g - h}, p)) / (2 * h);
        const double scale = std::max({1.0, std::abs(grad.df), std::abs(grad.dg)});
        CHECK(std::abs(grad.df - df) <= 1e-6 * scale);
        CHECK(std::abs(grad.dg - dg) <= 1e-6 * scale);
    }
}

TEST_CASE("critical points per regime") {
    SUBCASE("a > b") {
        const ModelParams p(9, 4);
        const auto pts = critical_points(p);
        REQUIRE(pts.size() == 7);
        int minima = 0;
        for (const CriticalPoint& c : pts) {
            if (c.kind == CriticalKind::LocalMin) {
                ++minima;
                CHECK(c.location.f == 0.0);
                CHECK(std::abs(c.location.g) == doctest::Approx(2.0 / 3.0));
            }
        }
        CHECK(minima == 2);
    }
    SUBCASE("a = b") {
        const auto pts = critical_points(ModelParams(4, 4));
        REQUIRE(pts.size() == 3);
        for (const CriticalPoint& c : pts) {
            CHECK(c.kind == CriticalKind::Saddle);
            CHECK(c.location.f == 0.0);
        }
    }
    SUBCASE("a < b") {
        const auto pts = critical_points(ModelParams(1, 4));
        REQUIRE(pts.size() == 3);
        for (const CriticalPoint& c : pts) {
            CHECK(c.kind == CriticalKind::Saddle);
            CHECK((c.location.g == 0.0 || std::abs(c.location.g) == doctest::Approx(2.0)));
        }
    }
}

TEST_CASE("both fields vanish at every critical point over a parameter grid") {
    for (double a : {0.5, 1.0, 2.0, 3.0, 4.0, 8.0, 9.0, 12.0}) {
        for (double b : {0.5, 1.0, 2.0, 4.0}) {
            const ModelParams p(a, b);
            for (const CriticalPoint& c : critical_points(p)) {
                const Velocity v = rhs_conservative(c.location, p);
                CHECK(std::abs(v.df) < 1e-12);
                CHECK(std::abs(v.dg) < 1e-12);
                const Gradient grad = hamiltonian_gradient(c.location, p);
                CHECK(std::abs(grad.df) < 1e-12);
                CHECK(std::abs(grad.dg) < 1e-12);
            }
        }
    }
}

TEST_CASE("critical point kinds agree with the energy Hessian") {
    // Numerical Hessian determinant: positive at minima, negative at saddles.
    for (const ModelParams& p : {ModelParams(9, 4), ModelParams(3, 2), ModelParams(1, 4)}) {
        for (const CriticalPoint& c : critical_points(p)) {
            const double h = 1e-4;
            auto H = [&](double df, double dg) {
                return hamiltonian({c.location.f + df, c.location.g + dg}, p);
            };
            const double hff = (H(h, 0) - 2 * H(0, 0) + H(-h, 0)) / (h * h);
            const double hgg = (H(0, h) - 2 * H(0, 0) + H(0, -h)) / (h * h);
            const double hfg = (H(h, h) - H(h, -h) - H(-h, h) + H(-h, -h)) / (4 * h * h);
            const double det = hff * hgg - hfg * hfg;
            if (c.kind == CriticalKind::LocalMin) {
                CHECK(det > 0.0);
                CHECK(hff > 0.0);
            } else {
                CHECK(det < 0.0);
            }
        }
    }
}

TEST_CASE("coth solution against a 50-digit oracle") {
    using big = boost::multiprecision::cpp_bin_float_50;
    const ModelParams p(2.5, 1);
    for (double r : {1e-6, 1e-5, 5e-5, 2e-4, 1e-3, 0.1, 1.0, 3.0, 10.0}) {
        const big s = boost::multiprecision::sqrt(big(1.5));
        const big br(r);
        const big exact = 1 / br - s / boost::multiprecision::tanh(s * br);
        const PhasePoint q = exact_coth(r, p);
        CHECK(q.g == 1.0);
        CHECK(std::abs(q.f - exact.convert_to<double>()) <= 1e-13 * std::max(1.0, std::abs(q.f)));
    }
    CHECK(exact_coth(0.0, p).f == 0.0);
    CHECK(exact_coth(0.0, p).g == 1.0);
    CHECK(exact_coth(200.0, p).f == doctest::Approx(1.0 / 200.0 - std::sqrt(1.5)));
    CHECK_THROWS_AS(exact_coth(1.0, ModelParams(1, 1)), DomainError);
    CHECK_THROWS_AS(exact_coth(-1.0, p), DomainError);
}

TEST_CASE("coth solution satisfies the radial system") {
    // Residual of f' + 2f/r - g(f^2 - a g^2 + b) with f' from the closed form.
    using big = boost::multiprecision::cpp_bin_float_50;
    const ModelParams p(2.5, 1);
    const big s = boost::multiprecision::sqrt(big(1.5));
    double worst = 0.0;
    for (double r = 1e-3; r <= 20.0; r *= 1.05) {
        const big br(r);
        const big sh = boost::multiprecision::sinh(s * br);
        const big dfdr = -1 / (br * br) + s * s / (sh * sh);
        const PhasePoint q = exact_coth(r, p);
        const Velocity v = rhs_radial(r, q, p);
        worst = std::max(worst, std::abs(v.df - dfdr.convert_to<double>()));
        CHECK(v.dg == 0.0);
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("physical parameter map") {
    const ModelParams p1 = map_physical_params(1, 2, 1, 2);
    CHECK(p1.a() == 4.0);
    CHECK(p1.b() == 4.0);
    const ModelParams p2 = map_physical_params(1, 4.5, 1, 2);
    CHECK(p2.a() == 9.0);
    CHECK(p2.b() == 4.0);
    const ModelParams p3 = map_physical_params(2, 1, 4, 0.25);
    CHECK(p3.a() == 1.0);
    CHECK(p3.b() == 1.0);
    CHECK_THROWS_AS(map_physical_params(1, 1, 0, 1), DomainError);
    CHECK_THROWS_AS(map_physical_params(-1, 1, 1, 1), DomainError);
}
