#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include <Eigen/Dense>
#include <parindex/dynamics.hpp>
#include <parindex/shooting.hpp>

using namespace parindex;
using Eigen::Vector2d;
using Eigen::Vector4d;

TEST_CASE("blown-up field at a shell state of the constant potential", "[dynamics]") {
    double m = 1.3, alpha = 0.7;
    auto p = AnglePotential::keplerConstant(alpha, m);
    McGeheeState s{0.0, std::sqrt(2 * m), 1.0, 0.0};
    Vector4d f = mcgeheeRhs(p, s.vec());
    REQUIRE(f[0] == Catch::Approx((2 - alpha) * m).epsilon(1e-14));  // u^2 - a U
    REQUIRE(f[1] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(f[2] == Catch::Approx(0.0).margin(1e-15));               // r v
    REQUIRE(f[3] == Catch::Approx(std::sqrt(2 * m)).epsilon(1e-14));
}

TEST_CASE("energy relation is a first integral of the blown-up flow", "[dynamics]") {
    auto p = AnglePotential::anisotropic(1.4, 1.7);
    for (double h : {0.0, -0.25, 0.4}) {
        // start on the energy level: pick (r, theta, v) and solve for u
        double r = 1.2, th = 0.6;
        double u2 = 2 * (p.value(th) + std::pow(r, p.alpha()) * h) - 0.09;
        REQUIRE(u2 > 0);
        McGeheeState s0{-0.3, std::sqrt(u2), r, th};
        REQUIRE(energyResidual(p, s0, h) == Catch::Approx(0.0).margin(1e-14));
        auto rhs = [&](double, const Vector4d& y) {
            return mcgeheeRhs(p, y);
        };
        OdeOptions<Vector4d> opt;
        opt.rtol = opt.atol = 1e-12;
        // positive energy escapes to r = infinity at finite rescaled time, so
        // stop once r is large and sample inside the span actually covered
        OdeEvent<Vector4d> far;
        far.g = [](double, const Vector4d& y) { return y[2] - 10.0; };
        far.direction = +1;
        far.stop = true;
        opt.events.push_back(far);
        auto sol = integrate(rhs, 0.0, 6.0, s0.vec(), opt);
        double end = sol.t.back();
        for (double f : {0.3, 0.65, 1.0}) {
            McGeheeState s = McGeheeState::fromVec(sol.eval(f * end));
            REQUIRE(std::fabs(energyResidual(p, s, h)) < 1e-9);
        }
    }
}

TEST_CASE("manifold chart agrees with the full flow at r frozen by scaling", "[dynamics]") {
    // the (psi, theta) chart of the collision manifold must reproduce the
    // (v, u, theta) components of the 4D field with r arbitrary; the smooth
    // potential keeps the angular motion clear of collision rays
    auto p = AnglePotential::anisotropic(0.8, 1.6);
    Vector2d y0(0.3, 0.2);
    auto chartRhs = [&](double, const Vector2d& y) { return collisionRhs(p, y); };
    OdeOptions<Vector2d> copt;
    copt.rtol = copt.atol = 1e-12;
    auto chart = integrate(chartRhs, 0.0, 4.0, y0, copt);

    auto shell = [&](const Vector2d& ps) {
        double b = std::sqrt(2 * p.value(ps[1]));
        return Vector2d(b * std::sin(ps[0]), b * std::cos(ps[0]));  // (v, u)
    };
    McGeheeState s0{shell(y0)[0], shell(y0)[1], 1.0, y0[1]};
    auto fullRhs = [&](double, const Vector4d& y) {
        return mcgeheeRhs(p, y);
    };
    OdeOptions<Vector4d> fopt;
    fopt.rtol = fopt.atol = 1e-12;
    auto full = integrate(fullRhs, 0.0, 4.0, s0.vec(), fopt);
    for (double tau : {0.7, 2.1, 4.0}) {
        Vector2d ps = chart.eval(tau);
        Vector2d vu = shell(ps);
        Vector4d y = full.eval(tau);
        REQUIRE(y[0] == Catch::Approx(vu[0]).margin(1e-8));
        REQUIRE(y[1] == Catch::Approx(vu[1]).margin(1e-8));
        REQUIRE(y[3] == Catch::Approx(ps[1]).margin(1e-8));
    }
}

TEST_CASE("constant-potential meridian flow has a closed form", "[dynamics]") {
    // psi' = c cos psi with c = (1 - a/2) sqrt(2m):
    // tan(psi/2 + pi/4) = tan(psi0/2 + pi/4) exp(c tau)
    double m = 1.0, alpha = 1.0;
    auto p = AnglePotential::keplerConstant(alpha, m);
    double c = (1 - alpha / 2) * std::sqrt(2 * m);
    Vector2d y0(-1.2, 0.0);
    auto rhs = [&](double, const Vector2d& y) { return collisionRhs(p, y); };
    OdeOptions<Vector2d> opt;
    opt.rtol = opt.atol = 1e-12;
    auto sol = integrate(rhs, 0.0, 8.0, y0, opt);
    double k = std::tan(y0[0] / 2 + PI / 4);
    for (double tau : {0.5, 2.0, 5.0, 8.0}) {
        double psi = 2 * (std::atan(k * std::exp(c * tau)) - PI / 4);
        REQUIRE(sol.eval(tau)[0] == Catch::Approx(psi).margin(1e-9));
    }
    // theta advances by dpsi * 2/(2-a) along the way
    double psiEnd = sol.eval(8.0)[0];
    REQUIRE(sol.eval(8.0)[1] ==
            Catch::Approx((psiEnd - y0[0]) * 2 / (2 - alpha)).margin(1e-9));
}

TEST_CASE("zero-energy lift integrates the radial factor", "[dynamics]") {
    auto p = AnglePotential::keplerConstant(1.0, 1.0);
    double c = (1 - p.alpha() / 2) * std::sqrt(2.0);
    double k = std::tan(-0.6 + PI / 4);  // psi0 = -1.2
    auto state = [&](double tau) {
        double psi = 2 * (std::atan(k * std::exp(c * tau)) - PI / 4);
        return Vector2d(psi, 0.4);
    };
    LiftedOrbit lift = liftZeroEnergy(p, state, -6.0, 6.0);
    // r' = r v checked by central differences of log r
    for (double tau : {-3.0, 0.0, 2.5}) {
        double v = std::sqrt(2.0) * std::sin(state(tau)[0]);
        double fd = (lift.logr(tau + 1e-5) - lift.logr(tau - 1e-5)) / 2e-5;
        REQUIRE(fd == Catch::Approx(v).margin(1e-7));
    }
    // physical time is strictly increasing and invertible
    auto tr = lift.tRange();
    REQUIRE(tr[0] < tr[1]);
    double tq = 0.5 * (tr[0] + tr[1]);
    REQUIRE(lift.t(lift.tauOfT(tq)) == Catch::Approx(tq).margin(1e-9));
}

TEST_CASE("shot from the heavy-axis saddle locks onto the light axis", "[shooting]") {
    auto p = AnglePotential::anisotropic(1.0, 1.05);
    auto all = findEquilibria(p);
    const Equilibrium* src = nullptr;
    for (const auto& eq : all)
        if (sameAngle(eq.psi0, PI / 2) && sameAngle(eq.theta0, 0.0)) src = &eq;
    REQUIRE(src != nullptr);

    for (int sign : {+1, -1}) {
        ShootOutcome out = shootHeteroclinic(p, all, *src, sign);
        REQUIRE(out.converged);
        const HeteroclinicOrbit& orb = *out.orbit;
        REQUIRE(orb.type == HetType::II);
        REQUIRE(sameAngle(orb.sink.psi0, PI / 2, 1e-6));
        REQUIRE(sameAngle(orb.sink.theta0, sign * PI / 2, 1e-5));
        // the sink is a node below the spiral threshold; the approach resolves
        REQUIRE(orb.sinkDir != ApproachDirection::spiral);
        // endpoint states really sit near the rest points
        Eigen::Vector2d s0 = orb.state(orb.tauSourceAsym());
        REQUIRE(std::hypot(angleDist(s0[0], PI / 2), angleDist(s0[1], 0)) < 2e-6);
        Eigen::Vector2d s1 = orb.state(orb.tauSinkAsym());
        REQUIRE(std::hypot(angleDist(s1[0], PI / 2), angleDist(s1[1], sign * PI / 2)) <
                2e-6);
    }
}

TEST_CASE("reversal is an involution exchanging ejection and collision", "[shooting]") {
    auto p = AnglePotential::anisotropic(1.0, 1.05);
    auto all = findEquilibria(p);
    const Equilibrium* src = nullptr;
    for (const auto& eq : all)
        if (sameAngle(eq.psi0, PI / 2) && sameAngle(eq.theta0, 0.0)) src = &eq;
    ShootOutcome out = shootHeteroclinic(p, all, *src, +1);
    REQUIRE(out.converged);
    const HeteroclinicOrbit& orb = *out.orbit;

    HeteroclinicOrbit rev = reverseOrbit(orb);
    REQUIRE(rev.type == HetType::III);
    REQUIRE(sameAngle(rev.source.psi0, -PI / 2, 1e-9));
    REQUIRE(sameAngle(rev.source.theta0, orb.sink.theta0, 1e-9));
    // state correspondence (psi + pi, theta)(-tau)
    for (double tau : {0.0, 1.7, 5.0}) {
        Eigen::Vector2d a = orb.state(tau), b = rev.state(-tau);
        REQUIRE(angleDist(b[0], a[0] + PI) < 1e-12);
        REQUIRE(b[1] == Catch::Approx(a[1]).margin(1e-12));
    }
    HeteroclinicOrbit back = reverseOrbit(rev);
    REQUIRE(back.type == orb.type);
    REQUIRE(back.tauMin == Catch::Approx(orb.tauMin));
    REQUIRE(back.uZeros.size() == orb.uZeros.size());
    // u flips sign under reversal, zeros map to negated times
    for (size_t i = 0; i < orb.uZeros.size(); i++)
        REQUIRE(rev.uZeros[i] == Catch::Approx(-orb.uZeros[orb.uZeros.size() - 1 - i]));
}

TEST_CASE("constant-potential shot realizes the classical swing angle", "[shooting]") {
    for (double alpha : {0.5, 1.0}) {
        auto p = AnglePotential::keplerConstant(alpha, 1.0);
        Equilibrium src = makeEquilibrium(p, -PI / 2, 0.0);
        ShootOutcome out = shootHeteroclinic(p, {}, src, +1);
        REQUIRE(out.converged);
        REQUIRE(out.orbit->type == HetType::I);
        // total turning of theta between the ends
        double dtheta = out.orbit->state(out.orbit->tauMax)[1] -
                        out.orbit->state(out.orbit->tauMin)[1];
        REQUIRE(dtheta == Catch::Approx(2 * PI / (2 - alpha)).margin(2e-4));
    }
}
