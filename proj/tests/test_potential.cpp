#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include <parindex/potential.hpp>

using namespace parindex;

namespace {

// independent derivative oracles: central differences on the value itself
double fdFirst(const AnglePotential& p, double th, double h = 1e-5) {
    return (p.value(th + h) - p.value(th - h)) / (2 * h);
}
double fdSecond(const AnglePotential& p, double th, double h = 1e-4) {
    return (p.value(th + h) - 2 * p.value(th) + p.value(th - h)) / (h * h);
}

}  // namespace

TEST_CASE("closed-form derivatives match finite differences", "[potential]") {
    auto check = [](const AnglePotential& p, double lo, double hi) {
        for (int i = 0; i <= 40; i++) {
            double th = lo + (hi - lo) * i / 40.0;
            if (p.singularNear(th, 1e-2)) continue;
            double scale = std::max(1.0, std::fabs(p.value(th)));
            REQUIRE(p.dTheta(th) == Catch::Approx(fdFirst(p, th)).margin(1e-6 * scale));
            REQUIRE(p.d2Theta(th) == Catch::Approx(fdSecond(p, th)).margin(1e-4 * scale));
        }
    };
    check(AnglePotential::anisotropic(1.0, 2.0), -PI, PI);
    check(AnglePotential::anisotropic(0.5, 1.3), -PI, PI);
    check(AnglePotential::isosceles(1.0, 1.0), -PI, PI);
    check(AnglePotential::isosceles(1.0, 0.05), -PI, PI);
    check(AnglePotential::fourier(1.0, {0.3, 0.1}, {0.0, 0.05}, 2.0), -PI, PI);
}

TEST_CASE("anisotropic values at the axes", "[potential]") {
    auto p = AnglePotential::anisotropic(1.0, 2.0);
    // U = (mu cos^2 + sin^2)^(-1/2): U(0) = mu^(-1/2), U(pi/2) = 1
    REQUIRE(p.value(0) == Catch::Approx(0.7071067811865476).epsilon(1e-14));
    REQUIRE(p.value(PI / 2) == Catch::Approx(1.0).epsilon(1e-14));
    // U''(0) = (mu-1) mu^(-3/2), U''(pi/2) = 1 - mu
    REQUIRE(p.d2Theta(0) == Catch::Approx(0.35355339059327373).epsilon(1e-13));
    REQUIRE(p.d2Theta(PI / 2) == Catch::Approx(-1.0).epsilon(1e-13));
    // delta(pi/2) = (2-a)^2/2 + 4(1-mu) at a=1, mu=2
    REQUIRE(p.delta(PI / 2) == Catch::Approx(-3.5).epsilon(1e-13));
}

TEST_CASE("isosceles values at the symmetric configuration", "[potential]") {
    auto p = AnglePotential::isosceles(1.0, 1.0);
    // U(0) = m^(5/2)/sqrt(2) + 2 sqrt(2) m^(3/2)
    REQUIRE(p.value(0) == Catch::Approx(3.5355339059327378).epsilon(1e-14));
    // U''(0) = m^(5/2)/sqrt(2) - 4 sqrt(2) m^(5/2) = -7 m^(5/2)/sqrt(2)
    REQUIRE(p.d2Theta(0) == Catch::Approx(-4.949747468305833).epsilon(1e-13));
    REQUIRE_THROWS_AS(p.value(PI / 2), SingularAngle);
    REQUIRE(p.singularNear(PI / 2 + 1e-9));
    REQUIRE_FALSE(p.singularNear(0.3));
}

TEST_CASE("degeneracy thresholds located by bisection", "[potential]") {
    // anisotropic, a = 1: delta(pi/2) changes sign at mu = 9/8
    auto dAniso = [](double mu) {
        return AnglePotential::anisotropic(1.0, mu).delta(PI / 2);
    };
    double lo = 1.01, hi = 2.0;
    REQUIRE(dAniso(lo) > 0);
    REQUIRE(dAniso(hi) < 0);
    for (int i = 0; i < 200; i++) {
        double mid = 0.5 * (lo + hi);
        (dAniso(mid) > 0 ? lo : hi) = mid;
    }
    REQUIRE(0.5 * (lo + hi) == Catch::Approx(9.0 / 8.0).margin(1e-9));

    // isosceles, a = 1: delta(0) changes sign at m = 4/55
    auto dIso = [](double m) { return AnglePotential::isosceles(1.0, m).delta(0); };
    lo = 0.01, hi = 0.5;
    REQUIRE(dIso(lo) > 0);
    REQUIRE(dIso(hi) < 0);
    for (int i = 0; i < 200; i++) {
        double mid = 0.5 * (lo + hi);
        (dIso(mid) > 0 ? lo : hi) = mid;
    }
    REQUIRE(0.5 * (lo + hi) == Catch::Approx(4.0 / 55.0).margin(1e-9));
}

TEST_CASE("critical point scan on the anisotropic family", "[potential]") {
    auto p = AnglePotential::anisotropic(1.0, 2.0);
    CriticalPointSet cps = criticalPoints(p);
    REQUIRE_FALSE(cps.continuum);
    REQUIRE(cps.points.size() == 4);
    int minima = 0, globalMins = 0;
    for (const CriticalPoint& c : cps.points) {
        // the four axes of symmetry, each either a minimum or a maximum of U
        bool onAxis = sameAngle(c.theta0, 0) || sameAngle(c.theta0, PI) ||
                      sameAngle(c.theta0, PI / 2) || sameAngle(c.theta0, -PI / 2);
        REQUIRE(onAxis);
        REQUIRE_FALSE(c.degenerate);
        minima += c.localMin;
        globalMins += c.globalMin;
    }
    // U is smaller along the heavy axis, so theta = 0 and pi are the global minima
    REQUIRE(minima == 2);
    REQUIRE(globalMins == 2);
    for (const CriticalPoint& c : cps.points)
        if (c.globalMin) REQUIRE((sameAngle(c.theta0, 0) || sameAngle(c.theta0, PI)));
}

TEST_CASE("constant potential reports a continuum of critical angles", "[potential]") {
    auto p = AnglePotential::keplerConstant(1.0, 1.0);
    CriticalPointSet cps = criticalPoints(p);
    REQUIRE(cps.continuum);
    REQUIRE_NOTHROW(requireCritical(p, 0.789));
    auto f = AnglePotential::fourier(1.0, {}, {}, 1.5);
    REQUIRE(criticalPoints(f).continuum);
}

TEST_CASE("fourier potential evaluates its trigonometric series", "[potential]") {
    auto p = AnglePotential::fourier(0.8, {0.2, -0.05}, {0.1}, 1.4);
    for (double th : {0.0, 0.7, -2.1, 3.0}) {
        double want = 1.4 + 0.2 * std::cos(th) - 0.05 * std::cos(2 * th) + 0.1 * std::sin(th);
        REQUIRE(p.value(th) == Catch::Approx(want).epsilon(1e-14));
    }
    // a series that dips below zero is not a potential on the circle
    REQUIRE_THROWS_AS(AnglePotential::fourier(1.0, {2.0}, {}, 1.0), Error);
}

TEST_CASE("critical point polish rejects non-critical seeds", "[potential]") {
    auto p = AnglePotential::anisotropic(1.0, 1.7);
    REQUIRE_THROWS_AS(requireCritical(p, 0.4), NotACriticalPoint);
    REQUIRE_NOTHROW(requireCritical(p, 0.0));
    REQUIRE_NOTHROW(requireCritical(p, PI / 2));
}

TEST_CASE("angle helpers wrap and measure distances", "[common]") {
    REQUIRE(wrapAngle(3 * PI) == Catch::Approx(PI));
    REQUIRE(wrapAngle(-3 * PI) == Catch::Approx(PI));
    REQUIRE(angleDist(0.1, 2 * PI - 0.1) == Catch::Approx(0.2).margin(1e-15));
    REQUIRE(sameAngle(0.0, 2 * PI));
    REQUIRE_FALSE(sameAngle(0.0, PI));
}
