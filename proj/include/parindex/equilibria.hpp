#pragma once
/// \file  equilibria.hpp
/// \brief rest points of the collision-manifold flow, their closed-form spectra
///        and five-way classification
#include <Eigen/Core>
#include <complex>
#include <vector>

#include "potential.hpp"

namespace parindex {

enum class EqClass { saddle, stableNode, unstableNode, stableFocus, unstableFocus, degenerate };

inline const char* className(EqClass c) {
    switch (c) {
        case EqClass::saddle: return "saddle";
        case EqClass::stableNode: return "stableNode";
        case EqClass::unstableNode: return "unstableNode";
        case EqClass::stableFocus: return "stableFocus";
        case EqClass::unstableFocus: return "unstableFocus";
        case EqClass::degenerate: return "degenerate";
    }
    return "?";
}

/// rest point (psi0, theta0) of the collision-manifold field, psi0 = +-pi/2,
/// theta0 a critical angle of U; carries the full linearization data
struct Equilibrium {
    double psi0;      ///< wrapped to (-pi, pi]; only +-pi/2 occur
    double theta0;    ///< wrapped critical angle
    double uValue;    ///< U(theta0)
    double uDd;       ///< U''(theta0)
    double delta;     ///< discriminant at theta0
    std::complex<double> lambdaMinus, lambdaPlus;  ///< ordered Re- first when real
    bool realEigen;
    Eigen::Vector2d eMinus, ePlus;  ///< unit eigenvectors, defined when realEigen
    EqClass cls;
    bool repeatedRoot;         ///< equal real eigenvalues (discriminant == 0)
    bool degenerateCritical;   ///< |U''(theta0)| < DEGENERATE_TOL
};

/// Jacobian of the collision-manifold field at a rest point: the field is
/// (psi' , theta') = ((1-a/2) b cos(psi) - U' sin(psi)/b , b cos(psi)) with
/// b = sqrt(2 U); differentiating at (psi0, theta0) where cos(psi0)=0, U'=0 gives
/// rows [ (a/2-1) b s , -U'' s / b ; -b s , 0 ] with s = sin(psi0)
inline Eigen::Matrix2d linearizationMatrix(const AnglePotential& pot, double psi0,
                                           double theta0) {
    double b = std::sqrt(2 * pot.value(theta0));
    double s = std::sin(psi0);
    double a = pot.alpha();
    Eigen::Matrix2d M;
    M << (a / 2 - 1) * b * s, -pot.d2Theta(theta0) * s / b, -b * s, 0;
    return M;
}

/// construct the rest point over a critical angle; theta0 is residual-checked
inline Equilibrium makeEquilibrium(const AnglePotential& pot, double psi0, double theta0) {
    if (!sameAngle(psi0, PI / 2) && !sameAngle(psi0, -PI / 2))
        throw std::invalid_argument("rest points require psi0 = +-pi/2");
    theta0 = requireCritical(pot, theta0);
    Equilibrium eq;
    eq.psi0 = wrapAngle(psi0);
    eq.theta0 = wrapAngle(theta0);
    eq.uValue = pot.value(theta0);
    eq.uDd = pot.d2Theta(theta0);
    eq.delta = pot.delta(theta0);
    eq.degenerateCritical = std::fabs(eq.uDd) < DEGENERATE_TOL;

    double a = pot.alpha(), s = std::sin(eq.psi0);
    double b = std::sqrt(2 * eq.uValue);
    double re = -(2 - a) / 4 * b * s;
    const double tolDeg = 1e-8;
    // a discriminant at roundoff scale is a repeated root, whichever side of
    // zero it landed on
    if (std::fabs(eq.delta) < tolDeg * tolDeg * std::max(1.0, eq.uValue)) eq.delta = 0;
    eq.realEigen = eq.delta >= 0;
    eq.repeatedRoot = false;
    if (eq.realEigen) {
        double half = 0.5 * std::sqrt(eq.delta);
        eq.lambdaMinus = re - half;
        eq.lambdaPlus = re + half;
        eq.repeatedRoot = half < tolDeg;
        // eigenvector of lambda: (-lambda/(b s), 1), normalized with positive
        // theta-component so directions are reproducible
        auto evec = [&](double lam) {
            Eigen::Vector2d e(-lam / (b * s), 1.0);
            return Eigen::Vector2d(e / e.norm());
        };
        eq.eMinus = evec(eq.lambdaMinus.real());
        eq.ePlus = evec(eq.lambdaPlus.real());
        double lm = eq.lambdaMinus.real(), lp = eq.lambdaPlus.real();
        if (std::fabs(lm) < tolDeg || std::fabs(lp) < tolDeg)
            eq.cls = EqClass::degenerate;
        else if (lm < 0 && lp > 0)
            eq.cls = EqClass::saddle;
        else if (lp < 0)
            eq.cls = EqClass::stableNode;
        else
            eq.cls = EqClass::unstableNode;
    } else {
        double im = 0.5 * std::sqrt(-eq.delta);
        eq.lambdaMinus = {re, -im};
        eq.lambdaPlus = {re, im};
        eq.eMinus.setZero();
        eq.ePlus.setZero();
        eq.cls = re < 0 ? EqClass::stableFocus : EqClass::unstableFocus;
    }
    return eq;
}

/// all rest points of the collision-manifold flow: two per critical angle of U.
/// The constant potential has a circle of rest points and raises ContinuumEquilibria.
inline std::vector<Equilibrium> findEquilibria(const AnglePotential& pot, int gridN = 4096) {
    CriticalPointSet cps = criticalPoints(pot, gridN);
    if (cps.continuum)
        throw ContinuumEquilibria("constant angular potential: rest points form two circles");
    std::vector<Equilibrium> out;
    for (const CriticalPoint& cp : cps.points) {
        out.push_back(makeEquilibrium(pot, -PI / 2, cp.theta0));
        out.push_back(makeEquilibrium(pot, PI / 2, cp.theta0));
    }
    return out;
}

}  // namespace parindex
