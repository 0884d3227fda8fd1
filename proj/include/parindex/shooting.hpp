#pragma once
/// \file  shooting.hpp
/// \brief heteroclinic orbits of the collision-manifold flow: shooting from an
///        unstable direction, lock-in detection, endpoint classification and the
///        time-reversal involution (psi, theta)(tau) -> (psi + pi, theta)(-tau)
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "equilibria.hpp"

namespace parindex {

/// connection classes by the radial behaviour of the zero-energy lift:
/// I  escapes at both time ends (source psi=-pi/2, sink psi=+pi/2),
/// II ejects from collision in finite past time (both endpoints at psi=+pi/2),
/// III falls into collision in finite future time (both at psi=-pi/2)
enum class HetType { I, II, III };

enum class ApproachDirection { ePlus, eMinus, spiral };

inline const char* typeName(HetType t) {
    switch (t) {
        case HetType::I: return "I";
        case HetType::II: return "II";
        case HetType::III: return "III";
    }
    return "?";
}

inline const char* directionName(ApproachDirection d) {
    switch (d) {
        case ApproachDirection::ePlus: return "ePlus";
        case ApproachDirection::eMinus: return "eMinus";
        case ApproachDirection::spiral: return "spiral";
    }
    return "?";
}

struct ShootSettings {
    double eps = 1e-6;        ///< seed offset along the unstable eigendirection
    double tauMax = 600;      ///< giving-up horizon; near-threshold rates run ~0.06
    double tol = 1e-11;       ///< integrator relative/absolute tolerance
    double lockRadius = 1e-6; ///< endpoint acceptance distance on the torus
    double extendTau = 12;    ///< extra span integrated past the lock for windows
    std::uint64_t seed = 20260815;  ///< RNG seed for focus shot directions
    bool halvedEpsCheck = true;     ///< re-shoot at eps/2, require the same sink
};

/// heteroclinic orbit between two rest points of the manifold flow.
/// Stored as a forward integration; when reversedView is set the accessors
/// present the time-reversed orbit (psi + pi, theta)(-tau) instead, so every
/// consumer sees a single increasing-tau parametrization either way.
struct HeteroclinicOrbit {
    AnglePotential pot;
    OdeSolution<Eigen::Vector2d> base;  ///< underlying forward solution
    bool reversedView = false;
    double tauMin = 0, tauMax = 0;      ///< presented span, source end first
    Equilibrium source, sink;
    HetType type = HetType::I;
    ApproachDirection sourceDir = ApproachDirection::ePlus;
    ApproachDirection sinkDir = ApproachDirection::ePlus;
    std::vector<double> uZeros;  ///< presented times of u = 0, increasing
    double lockTau = 0;          ///< presented time at which lock-in fired
    double eps = 0;
    int sign = +1;
    std::uint64_t rngSeed = 0;
    double shootTol = 0;

    explicit HeteroclinicOrbit(const AnglePotential& p) : pot(p) {}

    /// presented times at which the orbit first sits within lockRadius of each
    /// endpoint: the seed instant on the source side, the lock instant on the
    /// sink side (swapped by the reversed view, which negates lockTau)
    double tauSourceAsym() const { return std::min(0.0, lockTau); }
    double tauSinkAsym() const { return std::max(0.0, lockTau); }

    /// unwrapped (psi, theta) at presented time tau
    Eigen::Vector2d state(double tau) const {
        if (!reversedView) return base.eval(tau);
        Eigen::Vector2d y = base.eval(-tau);
        return {y[0] + PI, y[1]};
    }
    double psi(double tau) const { return state(tau)[0]; }
    double theta(double tau) const { return state(tau)[1]; }
    double u(double tau) const {
        Eigen::Vector2d s = state(tau);
        return std::sqrt(2 * pot.value(s[1])) * std::cos(s[0]);
    }
    double v(double tau) const {
        Eigen::Vector2d s = state(tau);
        return std::sqrt(2 * pot.value(s[1])) * std::sin(s[0]);
    }
    /// presented accepted-step grid, increasing
    std::vector<double> sampleTaus() const {
        std::vector<double> ts(base.t.begin(), base.t.end());
        if (reversedView) {
            for (double& t : ts) t = -t;
            std::reverse(ts.begin(), ts.end());
        }
        return ts;
    }
};

namespace detail {

inline double torusDist(const Eigen::Vector2d& a, double psi0, double theta0) {
    return std::hypot(angleDist(a[0], psi0), angleDist(a[1], theta0));
}

/// append a continuation run to an existing solution (b starts where a ends)
template <class Vec>
void appendSolution(OdeSolution<Vec>& a, const OdeSolution<Vec>& b) {
    a.t.insert(a.t.end(), b.t.begin() + 1, b.t.end());
    a.y.insert(a.y.end(), b.y.begin() + 1, b.y.end());
    a.f.insert(a.f.end(), b.f.begin() + 1, b.f.end());
    a.dense.insert(a.dense.end(), b.dense.begin(), b.dense.end());
    a.hits.insert(a.hits.end(), b.hits.begin(), b.hits.end());
    a.reason = b.reason;
}

inline HetType classifyType(double psiSource, double psiSink) {
    bool srcUp = sameAngle(psiSource, PI / 2, 1e-6);
    bool snkUp = sameAngle(psiSink, PI / 2, 1e-6);
    if (!srcUp && snkUp) return HetType::I;
    if (srcUp && snkUp) return HetType::II;
    if (!srcUp && !snkUp) return HetType::III;
    throw Error("connection from psi=+pi/2 down to psi=-pi/2 violates monotonicity of v");
}

}  // namespace detail

/// measured asymptotic direction at one end of a heteroclinic orbit: samples at
/// torus distance in [distLo, distHi] from the endpoint are fitted against the
/// two eigenlines of the endpoint linearization.  Focus endpoints are spirals by
/// definition; the constant potential uses its exact slope dpsi/dtheta = (2-a)/2.
inline ApproachDirection detectApproachDirection(const HeteroclinicOrbit& orbit,
                                                 bool sourceEnd, double distLo = 1e-5,
                                                 double distHi = 1e-3) {
    const Equilibrium& eq = sourceEnd ? orbit.source : orbit.sink;
    if (eq.cls == EqClass::stableFocus || eq.cls == EqClass::unstableFocus)
        return ApproachDirection::spiral;
    if (orbit.pot.kind() == AnglePotential::Kind::keplerConstant)
        return sourceEnd ? ApproachDirection::ePlus : ApproachDirection::eMinus;

    std::vector<double> taus = orbit.sampleTaus();
    if (sourceEnd) std::reverse(taus.begin(), taus.end());  // iterate toward the end
    double scorePlus = 0, scoreMinus = 0;
    int used = 0;
    for (double tau : taus) {
        Eigen::Vector2d s = orbit.state(tau);
        Eigen::Vector2d w(std::remainder(s[0] - eq.psi0, 2 * PI),
                          std::remainder(s[1] - eq.theta0, 2 * PI));
        double d = w.norm();
        if (d < distLo || d > distHi) continue;
        w /= d;
        // distance of the unit deviation to each eigenline (sin of the angle)
        auto lineDist = [&](const Eigen::Vector2d& e) {
            return std::fabs(w[0] * e[1] - w[1] * e[0]);
        };
        scorePlus = std::max(scorePlus, lineDist(eq.ePlus));
        scoreMinus = std::max(scoreMinus, lineDist(eq.eMinus));
        if (++used >= 48) break;
    }
    if (used < 3)
        throw AmbiguousDirection("too few samples near the endpoint for a direction fit");
    const double fitTol = 3e-2;
    if (eq.repeatedRoot) return ApproachDirection::ePlus;  // single eigenline
    if (scorePlus < fitTol && scorePlus <= scoreMinus) return ApproachDirection::ePlus;
    if (scoreMinus < fitTol) return ApproachDirection::eMinus;
    throw AmbiguousDirection("endpoint approach matches neither eigenline, max line distances " +
                             std::to_string(scorePlus) + " / " + std::to_string(scoreMinus));
}

/// time-reversal involution: presents the same connection run backwards, which
/// swaps source and sink (shifted by pi in psi), exchanges types II and III, and
/// exchanges the ePlus / eMinus approach labels
inline HeteroclinicOrbit reverseOrbit(const HeteroclinicOrbit& o) {
    HeteroclinicOrbit r = o;
    r.reversedView = !o.reversedView;
    r.tauMin = -o.tauMax;
    r.tauMax = -o.tauMin;
    r.lockTau = -o.lockTau;
    r.source = makeEquilibrium(o.pot, o.sink.psi0 + PI, o.sink.theta0);
    r.sink = makeEquilibrium(o.pot, o.source.psi0 + PI, o.source.theta0);
    auto swapPM = [](ApproachDirection d) {
        if (d == ApproachDirection::ePlus) return ApproachDirection::eMinus;
        if (d == ApproachDirection::eMinus) return ApproachDirection::ePlus;
        return ApproachDirection::spiral;
    };
    r.sourceDir = swapPM(o.sinkDir);
    r.sinkDir = swapPM(o.sourceDir);
    r.type = o.type == HetType::II   ? HetType::III
             : o.type == HetType::III ? HetType::II
                                      : HetType::I;
    r.uZeros.assign(o.uZeros.rbegin(), o.uZeros.rend());
    for (double& z : r.uZeros) z = -z;
    return r;
}

struct ShootOutcome {
    bool converged = false;
    std::string note;
    std::optional<HeteroclinicOrbit> orbit;
};

/// shoot from the unstable direction of a rest point and follow the orbit until
/// it locks onto another rest point (torus distance < lockRadius).  sign picks
/// the branch of the one-dimensional unstable manifold; focus sources shoot in
/// a seeded random direction.  The orbit is integrated extendTau past the lock
/// so later window-based computations have margin on the sink side.
inline ShootOutcome shootHeteroclinic(const AnglePotential& pot,
                                      const std::vector<Equilibrium>& all,
                                      const Equilibrium& source, int sign,
                                      const ShootSettings& st = {}) {
    ShootOutcome out;
    Eigen::Vector2d dir;
    bool spiralSource = false;
    if (source.realEigen && source.lambdaPlus.real() > 1e-8) {
        dir = source.ePlus;
    } else if (source.cls == EqClass::unstableFocus) {
        std::mt19937_64 gen(st.seed);
        double phi = std::uniform_real_distribution<double>(0, 2 * PI)(gen);
        dir = {std::cos(phi), std::sin(phi)};
        spiralSource = true;
    } else {
        throw std::invalid_argument("shooting requires an unstable direction at the source");
    }

    auto rhs = [&pot](double, const Eigen::Vector2d& y) { return collisionRhs(pot, y); };
    Eigen::Vector2d y0(source.psi0 + sign * st.eps * dir[0],
                       source.theta0 + sign * st.eps * dir[1]);

    const bool kepler = pot.kind() == AnglePotential::Kind::keplerConstant;
    auto minDistToTargets = [&](const Eigen::Vector2d& y) {
        if (kepler)  // rest points fill the antipodal circle psi = psi0 + pi
            return angleDist(y[0], source.psi0 + PI);
        double dmin = std::numeric_limits<double>::infinity();
        for (const Equilibrium& eq : all) {
            if (sameAngle(eq.psi0, source.psi0, 1e-9) && sameAngle(eq.theta0, source.theta0, 1e-9))
                continue;  // never lock back onto the source
            dmin = std::min(dmin, detail::torusDist(y, eq.psi0, eq.theta0));
        }
        return dmin;
    };

    OdeOptions<Eigen::Vector2d> opt;
    opt.rtol = opt.atol = st.tol;
    opt.hMax = 0.25;
    OdeEvent<Eigen::Vector2d> uZero;
    uZero.g = [](double, const Eigen::Vector2d& y) { return std::cos(y[0]); };
    opt.events.push_back(uZero);
    OdeEvent<Eigen::Vector2d> lock;
    lock.g = [&](double, const Eigen::Vector2d& y) { return minDistToTargets(y) - st.lockRadius; };
    lock.direction = -1;
    lock.stop = true;
    opt.events.push_back(lock);

    OdeSolution<Eigen::Vector2d> sol = integrate(rhs, 0.0, st.tauMax, y0, opt);
    if (sol.reason != StopReason::eventStop) {
        out.note = "no lock-in within tauMax";
        return out;
    }
    double tauLock = sol.t.back();
    // continue past the lock without the stopping event
    OdeOptions<Eigen::Vector2d> optExt;
    optExt.rtol = optExt.atol = st.tol;
    optExt.hMax = 0.25;
    optExt.events.push_back(uZero);
    detail::appendSolution(sol, integrate(rhs, tauLock, tauLock + st.extendTau, sol.y.back(), optExt));

    HeteroclinicOrbit orb(pot);
    orb.base = std::move(sol);
    orb.tauMin = 0;
    orb.tauMax = orb.base.t.back();
    orb.lockTau = tauLock;
    orb.source = source;
    orb.eps = st.eps;
    orb.sign = sign;
    orb.rngSeed = st.seed;
    orb.shootTol = st.tol;
    for (const auto& h : orb.base.hits)
        if (h.index == 0) orb.uZeros.push_back(h.t);

    // identify the sink
    Eigen::Vector2d yEnd = orb.base.y.back();
    if (kepler) {
        orb.sink = makeEquilibrium(pot, source.psi0 + PI, yEnd[1]);
    } else {
        double dmin = std::numeric_limits<double>::infinity();
        const Equilibrium* best = nullptr;
        for (const Equilibrium& eq : all) {
            double d = detail::torusDist(yEnd, eq.psi0, eq.theta0);
            if (d < dmin) {
                dmin = d;
                best = &eq;
            }
        }
        orb.sink = *best;
    }
    orb.type = detail::classifyType(orb.source.psi0, orb.sink.psi0);
    orb.sourceDir = spiralSource ? ApproachDirection::spiral : ApproachDirection::ePlus;
    orb.sinkDir = detectApproachDirection(orb, /*sourceEnd=*/false);

    if (st.halvedEpsCheck) {
        ShootSettings st2 = st;
        st2.eps = st.eps / 2;
        st2.halvedEpsCheck = false;
        ShootOutcome check = shootHeteroclinic(pot, all, source, sign, st2);
        if (!check.converged || !sameAngle(check.orbit->sink.psi0, orb.sink.psi0, 1e-6) ||
            !sameAngle(check.orbit->sink.theta0, orb.sink.theta0, 1e-6)) {
            out.note = "halved-offset reshoot locked onto a different sink";
            return out;
        }
    }
    out.converged = true;
    out.orbit = std::move(orb);
    return out;
}

}  // namespace parindex
