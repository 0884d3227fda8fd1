#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include <Eigen/Dense>
#include <parindex/ode.hpp>

using namespace parindex;
using Eigen::Vector2d;
using V1 = Eigen::Matrix<double, 1, 1>;

TEST_CASE("exponential decay against the closed form", "[ode]") {
    auto rhs = [](double, const V1& y) { return V1(-y[0]); };
    OdeOptions<V1> opt;
    auto sol = integrate(rhs, 0.0, 5.0, V1(1.0), opt);
    REQUIRE(sol.reason == StopReason::reachedEnd);
    REQUIRE(sol.y.back()[0] == Catch::Approx(std::exp(-5.0)).epsilon(1e-8));
    // dense output stays at integrator accuracy between accepted points
    for (double t : {0.13, 0.77, 1.9, 3.33, 4.99})
        REQUIRE(sol.eval(t)[0] == Catch::Approx(std::exp(-t)).epsilon(1e-8));
}

TEST_CASE("harmonic oscillator conserves energy over many periods", "[ode]") {
    auto rhs = [](double, const Vector2d& y) { return Vector2d(y[1], -y[0]); };
    OdeOptions<Vector2d> opt;
    auto sol = integrate(rhs, 0.0, 20 * PI, Vector2d(1, 0), opt);
    Vector2d yf = sol.y.back();
    REQUIRE(yf[0] == Catch::Approx(1.0).margin(1e-7));
    REQUIRE(yf[1] == Catch::Approx(0.0).margin(1e-7));
    // accumulated drift over ~60 time units at rtol 1e-10
    REQUIRE(yf.squaredNorm() == Catch::Approx(1.0).epsilon(5e-8));
}

TEST_CASE("events locate analytic zero crossings", "[ode]") {
    // y1(t) = cos t: zeros at pi/2 + k pi, alternating crossing directions
    auto rhs = [](double, const Vector2d& y) { return Vector2d(y[1], -y[0]); };
    OdeOptions<Vector2d> opt;
    OdeEvent<Vector2d> ev;
    ev.g = [](double, const Vector2d& y) { return y[0]; };
    opt.events.push_back(ev);
    auto sol = integrate(rhs, 0.0, 10.0, Vector2d(1, 0), opt);
    REQUIRE(sol.hits.size() == 3);
    for (size_t k = 0; k < sol.hits.size(); k++)
        REQUIRE(sol.hits[k].t == Catch::Approx(PI / 2 + k * PI).margin(1e-9));

    // direction filter keeps only the descending crossings
    opt.events[0].direction = -1;
    sol = integrate(rhs, 0.0, 10.0, Vector2d(1, 0), opt);
    REQUIRE(sol.hits.size() == 2);
    REQUIRE(sol.hits[0].t == Catch::Approx(PI / 2).margin(1e-9));
    REQUIRE(sol.hits[1].t == Catch::Approx(PI / 2 + 2 * PI).margin(1e-9));
}

TEST_CASE("stopping event truncates the run", "[ode]") {
    auto rhs = [](double, const Vector2d& y) { return Vector2d(y[1], -y[0]); };
    OdeOptions<Vector2d> opt;
    OdeEvent<Vector2d> ev;
    ev.g = [](double, const Vector2d& y) { return y[0]; };
    ev.stop = true;
    opt.events.push_back(ev);
    auto sol = integrate(rhs, 0.0, 100.0, Vector2d(1, 0), opt);
    REQUIRE(sol.reason == StopReason::eventStop);
    REQUIRE(sol.t.back() == Catch::Approx(PI / 2).margin(1e-9));
    REQUIRE(sol.hits.size() == 1);
}

TEST_CASE("integration runs backward in time", "[ode]") {
    auto rhs = [](double, const V1& y) { return V1(y[0]); };
    OdeOptions<V1> opt;
    auto sol = integrate(rhs, 0.0, -1.0, V1(1.0), opt);
    REQUIRE(sol.y.back()[0] == Catch::Approx(std::exp(-1.0)).epsilon(1e-8));
    REQUIRE(sol.eval(-0.4)[0] == Catch::Approx(std::exp(-0.4)).epsilon(1e-8));
}

TEST_CASE("guard violation raises DomainExit", "[ode]") {
    auto rhs = [](double, const V1& y) { return V1(y[0]); };
    OdeOptions<V1> opt;
    opt.guard = [](double, const V1& y) { return y[0] < 10.0; };
    REQUIRE_THROWS_AS(integrate(rhs, 0.0, 5.0, V1(1.0), opt), DomainExit);
}

TEST_CASE("step budget exhaustion is an error, not a silent stop", "[ode]") {
    auto rhs = [](double, const V1& y) { return V1(-y[0]); };
    OdeOptions<V1> opt;
    opt.maxSteps = 3;
    opt.hMax = 1e-3;
    REQUIRE_THROWS_AS(integrate(rhs, 0.0, 1.0, V1(1.0), opt), Error);
}

TEST_CASE("two events in one step are both reported in order", "[ode]") {
    // forcing large steps so the pair of nearby roots lands inside one segment
    auto rhs = [](double, const V1&) { return V1(1.0); };
    OdeOptions<V1> opt;
    opt.hInit = 1.0;
    OdeEvent<V1> e1, e2;
    e1.g = [](double t, const V1&) { return t - 0.301; };
    e2.g = [](double t, const V1&) { return t - 0.302; };
    opt.events.push_back(e1);
    opt.events.push_back(e2);
    auto sol = integrate(rhs, 0.0, 1.0, V1(0.0), opt);
    REQUIRE(sol.hits.size() == 2);
    REQUIRE(sol.hits[0].index == 0);
    REQUIRE(sol.hits[1].index == 1);
    REQUIRE(sol.hits[0].t == Catch::Approx(0.301).margin(1e-9));
    REQUIRE(sol.hits[1].t == Catch::Approx(0.302).margin(1e-9));
    REQUIRE(sol.hits[0].t < sol.hits[1].t);
}
