#pragma once
/// \file  dynamics.hpp
/// \brief McGehee-regularized equations of motion near total collision:
///        the 4d blown-up system, its restriction to the collision manifold,
///        the energy defect, and the radial/time lift of zero-energy orbits
#include <Eigen/Core>
#include <array>
#include <cmath>

#include "ode.hpp"
#include "potential.hpp"

namespace parindex {

/// blown-up coordinates: v = scaled radial velocity, u = scaled angular velocity,
/// r = distance to total collision, theta = configuration angle
struct McGeheeState {
    double v, u, r, theta;
    Eigen::Vector4d vec() const { return {v, u, r, theta}; }
    static McGeheeState fromVec(const Eigen::Vector4d& y) { return {y[0], y[1], y[2], y[3]}; }
};

/// total-collision blow-up of the planar r^-alpha U(theta) system in the
/// rescaled time d tau = r^(-1-alpha/2) dt:
///   v' = (a/2) v^2 + u^2 - a U,  u' = (a/2-1) u v + U',  r' = r v,  theta' = u
inline Eigen::Vector4d mcgeheeRhs(const AnglePotential& pot, const Eigen::Vector4d& y) {
    double a = pot.alpha(), v = y[0], u = y[1], r = y[2], th = y[3];
    double U = pot.value(th), Ut = pot.dTheta(th);
    return {a / 2 * v * v + u * u - a * U, (a / 2 - 1) * u * v + Ut, r * v, u};
}

/// flow on the collision manifold {r = 0} in torus coordinates (psi, theta),
/// where u = b cos(psi), v = b sin(psi), b = sqrt(2 U(theta)):
///   psi' = (1-a/2) b cos(psi) - U' sin(psi)/b,   theta' = b cos(psi)
inline Eigen::Vector2d collisionRhs(const AnglePotential& pot, const Eigen::Vector2d& y) {
    double a = pot.alpha(), psi = y[0], th = y[1];
    double U = pot.value(th), Ut = pot.dTheta(th);
    double b = std::sqrt(2 * U);
    double c = std::cos(psi), s = std::sin(psi);
    return {(1 - a / 2) * b * c - Ut * s / b, b * c};
}

/// energy defect (1/2)(u^2+v^2) - U(theta) - r^alpha h; identically zero along
/// exact orbits of energy h, and along anything on the collision manifold
inline double energyResidual(const AnglePotential& pot, const McGeheeState& s, double h) {
    return 0.5 * (s.u * s.u + s.v * s.v) - pot.value(s.theta) -
           std::pow(s.r, pot.alpha()) * h;
}

/// reconstruct (v, u) on the zero-energy / collision-manifold shell from (psi, theta)
inline std::array<double, 2> shellVelocities(const AnglePotential& pot, double psi,
                                             double theta) {
    double b = std::sqrt(2 * pot.value(theta));
    return {b * std::sin(psi), b * std::cos(psi)};
}

/// cap on the radial coordinate beyond which the time lift is truncated.  Slow
/// heteroclinics accumulate hundreds of units of log r; the binding limit is
/// the time rate r^(1+alpha/2), which stays inside double range up to here for
/// every alpha < 2
constexpr double LIFT_RMAX = 1e150;

/// radial and physical-time profiles over a zero-energy orbit of the manifold flow.
/// The pair (log r, t) solves  (log r)' = v(tau),  t' = r^(1+alpha/2)  with
/// r(tau0) = r0, t(tau0) = 0; integration stops where r exceeds LIFT_RMAX.
struct LiftedOrbit {
    double r0 = 1, tau0 = 0;
    OdeSolution<Eigen::Vector2d> fwd, bwd;  ///< state (log r, t) from tau0 outward
    double tauLo = 0, tauHi = 0;            ///< span actually covered
    bool cutHi = false, cutLo = false;      ///< truncated at LIFT_RMAX

    Eigen::Vector2d at(double tau) const {
        return tau >= tau0 ? fwd.eval(tau) : bwd.eval(tau);
    }
    double logr(double tau) const { return at(tau)[0]; }
    double r(double tau) const { return std::exp(at(tau)[0]); }
    double t(double tau) const { return at(tau)[1]; }
    std::array<double, 2> tRange() const { return {t(tauLo), t(tauHi)}; }

    /// invert the strictly increasing map tau -> t by bisection
    double tauOfT(double tq) const {
        double lo = tauLo, hi = tauHi;
        if (tq <= t(lo)) return lo;
        if (tq >= t(hi)) return hi;
        for (int it = 0; it < 200 && hi - lo > 1e-12 * (1 + std::fabs(hi)); it++) {
            double mid = 0.5 * (lo + hi);
            (t(mid) < tq ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
};

/// integrate the radial/time lift of a zero-energy manifold orbit given by a
/// state evaluator (psi, theta)(tau) over [tauA, tauB] with r(tau0) = r0
template <class StateFn>
LiftedOrbit liftZeroEnergy(const AnglePotential& pot, StateFn&& state, double tauA,
                           double tauB, double r0 = 1.0, double tau0 = 0.0,
                           double tol = 1e-10) {
    if (!(tau0 >= tauA && tau0 <= tauB))
        throw std::invalid_argument("lift anchor tau0 outside orbit span");
    LiftedOrbit L;
    L.r0 = r0;
    L.tau0 = tau0;
    auto rhs = [&](double tau, const Eigen::Vector2d& y) -> Eigen::Vector2d {
        Eigen::Vector2d ps = state(tau);
        double v = std::sqrt(2 * pot.value(ps[1])) * std::sin(ps[0]);
        return {v, std::exp((1 + pot.alpha() / 2) * y[0])};
    };
    OdeOptions<Eigen::Vector2d> opt;
    opt.rtol = opt.atol = tol;
    OdeEvent<Eigen::Vector2d> cap;
    cap.g = [](double, const Eigen::Vector2d& y) { return y[0] - std::log(LIFT_RMAX); };
    cap.direction = +1;
    cap.stop = true;
    opt.events.push_back(cap);
    OdeEvent<Eigen::Vector2d> floor;  // keeps r^(-1-alpha/2) weights representable
    floor.g = [](double, const Eigen::Vector2d& y) { return y[0] + std::log(LIFT_RMAX); };
    floor.direction = -1;
    floor.stop = true;
    opt.events.push_back(floor);

    Eigen::Vector2d y0(std::log(r0), 0.0);
    L.fwd = integrate(rhs, tau0, tauB, y0, opt);
    L.bwd = integrate(rhs, tau0, tauA, y0, opt);
    L.cutHi = L.fwd.reason == StopReason::eventStop;
    L.cutLo = L.bwd.reason == StopReason::eventStop;
    L.tauHi = L.fwd.t.back();
    L.tauLo = L.bwd.t.back();
    return L;
}

}  // namespace parindex
