#pragma once
/// \file  linearflow.hpp
/// \brief linearized Hamiltonian flow along zero-energy orbits in blown-up
///        coordinates: the coefficient matrices B and B-hat, their rest-point
///        limits and eigendata, invariant Lagrangian bundles and their frames
///
/// Conventions.  Phase coordinates are momentum-first, z = (p1, p2, r, theta),
/// so the vertical plane R^2 + 0 is the Dirichlet reference.  The linearized
/// flow in rescaled time is  xi' = J B(tau) xi  with B = r^(1+a/2) Hess H, and
/// the normalization  xi-hat = R xi  with the symplectic diagonal scaling R
/// turns it into  xi-hat' = J BHat(tau) xi-hat  whose coefficient matrix has
/// identity momentum block; that positivity is what makes every crossing
/// against the vertical reference count positively.
#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "lagrangian.hpp"
#include "maslov.hpp"
#include "ode.hpp"
#include "shooting.hpp"

namespace parindex {

using Matrix42 = Eigen::Matrix<double, 4, 2>;
using Vector8 = Eigen::Matrix<double, 8, 1>;

/// coefficient matrix of the linearized flow in (p1, p2, r, theta), evaluated
/// at a blown-up state with r > 0:  B = r^(1+a/2) Hess H
inline Eigen::Matrix4d bMatrix(const AnglePotential& pot, const McGeheeState& s) {
    if (!(s.r > 0)) throw std::invalid_argument("bMatrix requires r > 0");
    double a = pot.alpha(), r = s.r, th = s.theta;
    double U = pot.value(th), Ut = pot.dTheta(th), Utt = pot.d2Theta(th);
    double p2 = s.u * std::pow(r, 1 - a / 2);
    Eigen::Matrix4d B = Eigen::Matrix4d::Zero();
    B(0, 0) = std::pow(r, 1 + a / 2);
    B(1, 1) = std::pow(r, a / 2 - 1);
    B(1, 2) = B(2, 1) = -2 * p2 * std::pow(r, a / 2 - 2);
    B(2, 2) = 3 * p2 * p2 * std::pow(r, a / 2 - 3) - a * (a + 1) * U * std::pow(r, -1 - a / 2);
    B(2, 3) = B(3, 2) = a * Ut * std::pow(r, -a / 2);
    B(3, 3) = -Utt * std::pow(r, 1 - a / 2);
    return B;
}

/// symplectic diagonal normalization R(tau) = diag(r^(1/2+a/4), r^(a/4-1/2),
/// r^(-1/2-a/4), r^(1/2-a/4)); satisfies R J R = J
inline Eigen::Matrix4d rMatrix(const AnglePotential& pot, double r) {
    if (!(r > 0)) throw std::invalid_argument("rMatrix requires r > 0");
    double a = pot.alpha();
    Eigen::Vector4d e(0.5 + a / 4, a / 4 - 0.5, -0.5 - a / 4, 0.5 - a / 4);
    return Eigen::Vector4d(std::pow(r, e[0]), std::pow(r, e[1]), std::pow(r, e[2]),
                           std::pow(r, e[3]))
        .asDiagonal();
}

/// normalized coefficient matrix in shell variables (v, u, theta); independent
/// of r, which is why the whole index computation lives on the collision manifold
inline Eigen::Matrix4d bHatMatrix(const AnglePotential& pot, double v, double u,
                                  double theta) {
    double a = pot.alpha();
    double U = pot.value(theta), Ut = pot.dTheta(theta), Utt = pot.d2Theta(theta);
    Eigen::Matrix4d B = Eigen::Matrix4d::Zero();
    B(0, 0) = B(1, 1) = 1;
    B(0, 2) = B(2, 0) = -(2 + a) * v / 4;
    B(1, 2) = B(2, 1) = -2 * u;
    B(1, 3) = B(3, 1) = (2 - a) * v / 4;
    B(2, 2) = 3 * u * u - a * (a + 1) * U;
    B(2, 3) = B(3, 2) = a * Ut;
    B(3, 3) = -Utt;
    return B;
}

/// rest-point limit of BHat splits into two 2x2 blocks acting on the coordinate
/// pairs (1,3) and (2,4); block 1 carries the radial/scaling directions and
/// block 2 the angular ones
struct AsymptoticBlocks {
    Eigen::Matrix2d B1, B2;
};

inline AsymptoticBlocks bHatLimit(const AnglePotential& pot, const Equilibrium& eq) {
    double a = pot.alpha(), s = std::sin(eq.psi0);
    double b = std::sqrt(2 * eq.uValue);
    AsymptoticBlocks ab;
    ab.B1 << 1, -(2 + a) / 4 * b * s, -(2 + a) / 4 * b * s, -a * (a + 1) * eq.uValue;
    ab.B2 << 1, (2 - a) / 4 * b * s, (2 - a) / 4 * b * s, -eq.uDd;
    return ab;
}

/// embed block coordinates into R^4: block 1 acts on components (1,3),
/// block 2 on components (2,4) (momentum-first ordering)
inline Eigen::Vector4d embedBlock1(const Eigen::Vector2d& w) { return {w[0], 0, w[1], 0}; }
inline Eigen::Vector4d embedBlock2(const Eigen::Vector2d& w) { return {0, w[0], 0, w[1]}; }

struct BlockEigen {
    double lamMinus, lamPlus;
    Eigen::Vector2d eMinus, ePlus;  ///< (momentum, position) block coordinates
};

/// closed-form spectrum of J2 * block: for a symmetric block [[1, s],[s, d]] the
/// eigenvalues are +-sqrt(s^2 - d) with eigenvectors (lambda - s, 1)
inline BlockEigen blockEigen(const Eigen::Matrix2d& blk, double hyperbolicityTol = 1e-8) {
    double s = blk(0, 1), d = blk(1, 1);
    double disc = s * s - d;
    if (disc <= hyperbolicityTol * hyperbolicityTol)
        throw NonHyperbolicBlock("asymptotic block has no real spectral gap, s^2-d=" +
                                 std::to_string(disc));
    double lam = std::sqrt(disc);
    BlockEigen be;
    be.lamMinus = -lam;
    be.lamPlus = lam;
    be.eMinus = Eigen::Vector2d(-lam - s, 1).normalized();
    be.ePlus = Eigen::Vector2d(lam - s, 1).normalized();
    return be;
}

/// eigendata of the rest-point limit blocks; block 1 is always hyperbolic with
/// rates +-(2+3a)/4 sqrt(2U), block 2 is hyperbolic iff the discriminant of the
/// potential at theta0 is positive (rates +-sqrt(delta)/2)
inline BlockEigen asymptoticEigen(const AnglePotential& pot, const Equilibrium& eq,
                                  int block) {
    AsymptoticBlocks ab = bHatLimit(pot, eq);
    if (block == 1) return blockEigen(ab.B1);
    if (block == 2) return blockEigen(ab.B2);
    throw std::invalid_argument("block index must be 1 or 2");
}

/// direction vectors spanning the invariant plane V(tau) along a zero-energy
/// orbit: the normalized orbit velocity and the generator of the scaling
/// symmetry.  The span is r-free even though the actual solutions carry
/// r-power prefactors (see etaVectors).
inline Matrix42 etaSpanRaw(const AnglePotential& pot, double v, double u, double theta) {
    double a = pot.alpha();
    double U = pot.value(theta), Ut = pot.dTheta(theta);
    Matrix42 F;
    F.col(0) << u * u - a * U, Ut, v, u;
    F.col(1) << a * v / (2 + a), (a - 2) / (2 + a) * u, -2 / (2 + a), 0;
    return F;
}

/// the actual eta solutions along a lifted orbit: eta1 = R * (d z / d t) solves
/// the normalized linear flow; eta2 = R * (scaling generator) spans V(tau) with
/// eta1 but is a solution only modulo an eta1 component
inline Matrix42 etaVectors(const AnglePotential& pot, double v, double u, double theta,
                           double r) {
    double a = pot.alpha();
    Matrix42 raw = etaSpanRaw(pot, v, u, theta);
    Matrix42 F;
    F.col(0) = std::pow(r, -(2 + 3 * a) / 4) * raw.col(0);
    F.col(1) = std::pow(r, (2 - a) / 4) * (-(2 + a) / 2) * raw.col(1);
    return F;
}

/// checkpointed propagation of the normalized linearized flow along a
/// heteroclinic orbit, with Lagrangian-frame transport and the invariant
/// bundles seeded from the rest-point eigenplanes
class LinearFlowCache {
public:
    explicit LinearFlowCache(const HeteroclinicOrbit& orbit, double tol = 1e-11,
                             double checkpointDt = 0.5)
        : orbit_(orbit), tol_(tol), dt_(checkpointDt), J_(symplecticJ(2)) {}

    const HeteroclinicOrbit& orbit() const { return orbit_; }

    Eigen::Matrix4d bHatAt(double tau) const {
        Eigen::Vector2d s = orbit_.state(tau);
        double b = std::sqrt(2 * orbit_.pot.value(s[1]));
        return bHatMatrix(orbit_.pot, b * std::sin(s[0]), b * std::cos(s[0]), s[1]);
    }

    /// transition matrix of xi' = J BHat xi from tau1 to tau2, with one
    /// first-order symplectic correction applied when the drift warrants it
    Eigen::Matrix4d fundamentalSolution(double tau1, double tau2) const {
        Eigen::Matrix4d G = integrateMatrix(tau1, tau2, Eigen::Matrix4d::Identity());
        Eigen::Matrix4d E = G.transpose() * J_ * G - J_;
        if (E.cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, G.cwiseAbs().maxCoeff()))
            G = G + 0.5 * G * J_ * E;
        return G;
    }

    double symplecticDefect(const Eigen::Matrix4d& G) const {
        return (G.transpose() * J_ * G - J_).cwiseAbs().maxCoeff();
    }

    /// gauge-continuous Lagrangian path tau -> closure(gamma(tau, tau0) span(F0)),
    /// realized by checkpointed transport with symplectic re-orthonormalization
    std::function<LagrangianFrame(double)> propagatedPath(const Eigen::MatrixXd& F0,
                                                          double tau0, double tauEnd) const {
        auto chain = std::make_shared<std::vector<std::pair<double, Matrix42>>>();
        bool fwd = tauEnd >= tau0;
        double step = fwd ? dt_ : -dt_;
        Matrix42 F = symplecticOrthonormalize(F0, J_);
        chain->push_back({tau0, F});
        for (double t = tau0; fwd ? t < tauEnd : t > tauEnd;) {
            double tn = fwd ? std::min(t + step, tauEnd) : std::max(t + step, tauEnd);
            F = symplecticOrthonormalize(integrateFrame(t, tn, F), J_);
            chain->push_back({tn, F});
            t = tn;
        }
        auto self = *this;
        return [chain, self, fwd](double tau) {
            // nearest checkpoint not past tau in propagation order
            size_t best = 0;
            for (size_t i = 0; i < chain->size(); i++) {
                double tc = (*chain)[i].first;
                if (fwd ? tc <= tau + 1e-12 : tc >= tau - 1e-12) best = i;
                else break;
            }
            const auto& [tc, Fc] = (*chain)[best];
            Matrix42 F = self.integrateFrame(tc, tau, Fc);
            LagrangianFrame out = LagrangianFrame::fromColumns(F);
            return out;
        };
    }

    /// unstable bundle V^-(tau): decays under backward flow; seeded at the
    /// source end from the expanding eigenplane span{e1+, e2+} and transported
    /// forward (transverse errors contract in this direction)
    std::function<LagrangianFrame(double)> unstablePath() const {
        Eigen::MatrixXd F0(4, 2);
        BlockEigen b1 = asymptoticEigen(orbit_.pot, orbit_.source, 1);
        BlockEigen b2 = asymptoticEigen(orbit_.pot, orbit_.source, 2);
        F0.col(0) = embedBlock1(b1.ePlus);
        F0.col(1) = embedBlock2(b2.ePlus);
        return propagatedPath(F0, orbit_.tauMin, orbit_.tauMax);
    }

    /// stable bundle V^+(tau): seeded at the sink end from span{e1-, e2-} and
    /// transported backward
    std::function<LagrangianFrame(double)> stablePath() const {
        Eigen::MatrixXd F0(4, 2);
        BlockEigen b1 = asymptoticEigen(orbit_.pot, orbit_.sink, 1);
        BlockEigen b2 = asymptoticEigen(orbit_.pot, orbit_.sink, 2);
        F0.col(0) = embedBlock1(b1.eMinus);
        F0.col(1) = embedBlock2(b2.eMinus);
        return propagatedPath(F0, orbit_.tauMax, orbit_.tauMin);
    }

    /// invariant plane V(tau) spanned by the orbit velocity and the scaling
    /// generator; intersects the vertical reference exactly where u(tau) = 0
    LagrangianFrame etaPlane(double tau) const {
        Eigen::Vector2d s = orbit_.state(tau);
        double b = std::sqrt(2 * orbit_.pot.value(s[1]));
        Matrix42 F = etaSpanRaw(orbit_.pot, b * std::sin(s[0]), b * std::cos(s[0]), s[1]);
        // near the rest points the two spanning directions almost align, which
        // amplifies the isotropy roundoff; the span itself is exactly isotropic
        return LagrangianFrame::fromColumns(F, nullptr, 1e-10, 1e-5);
    }

    std::function<LagrangianFrame(double)> etaPath() const {
        auto self = *this;
        return [self](double tau) { return self.etaPlane(tau); };
    }

    /// asymptotic limit of V(tau) at either end: span{e1_j, e2_pm} where the
    /// block-1 label is + at psi0 = -pi/2 and - at psi0 = +pi/2, and the
    /// block-2 label matches the measured approach direction
    LagrangianFrame limitFrame(bool sourceEnd) const {
        const Equilibrium& eq = sourceEnd ? orbit_.source : orbit_.sink;
        ApproachDirection dir = sourceEnd ? orbit_.sourceDir : orbit_.sinkDir;
        if (dir == ApproachDirection::spiral)
            throw NonHyperbolicBlock("spiral endpoint: V(tau) has no limit plane");
        BlockEigen b1 = asymptoticEigen(orbit_.pot, eq, 1);
        BlockEigen b2 = asymptoticEigen(orbit_.pot, eq, 2);
        Eigen::Vector2d e1 = sameAngle(eq.psi0, -PI / 2) ? b1.ePlus : b1.eMinus;
        Eigen::Vector2d e2 = dir == ApproachDirection::ePlus ? b2.ePlus : b2.eMinus;
        Eigen::MatrixXd F(4, 2);
        F.col(0) = embedBlock1(e1);
        F.col(1) = embedBlock2(e2);
        return LagrangianFrame::fromColumns(F);
    }

    /// transport a 4x2 frame matrix without re-orthonormalization (short spans)
    Matrix42 integrateFrame(double tau1, double tau2, const Matrix42& F0) const {
        if (tau1 == tau2) return F0;
        Vector8 y0;
        y0 << F0.col(0), F0.col(1);
        auto rhs = [this](double tau, const Vector8& y) {
            Eigen::Matrix4d JB = J_ * bHatAt(tau);
            Vector8 dy;
            dy << JB * y.template head<4>(), JB * y.template tail<4>();
            return dy;
        };
        OdeOptions<Vector8> opt;
        opt.rtol = opt.atol = tol_;
        auto sol = integrate(rhs, tau1, tau2, y0, opt);
        Vector8 yf = sol.y.back();
        Matrix42 F;
        F.col(0) = yf.head<4>();
        F.col(1) = yf.tail<4>();
        return F;
    }

private:
    Eigen::Matrix4d integrateMatrix(double tau1, double tau2, const Eigen::Matrix4d& G0) const {
        if (tau1 == tau2) return G0;
        using Vec16 = Eigen::Matrix<double, 16, 1>;
        Vec16 y0 = Eigen::Map<const Vec16>(G0.data());
        auto rhs = [this](double tau, const Vec16& y) {
            Eigen::Matrix4d G = Eigen::Map<const Eigen::Matrix4d>(y.data());
            Eigen::Matrix4d dG = J_ * bHatAt(tau) * G;
            Vec16 dy = Eigen::Map<Vec16>(dG.data());
            return dy;
        };
        OdeOptions<Vec16> opt;
        opt.rtol = opt.atol = tol_;
        auto sol = integrate(rhs, tau1, tau2, y0, opt);
        Eigen::Matrix4d G = Eigen::Map<const Eigen::Matrix4d>(sol.y.back().data());
        if (!G.allFinite()) throw Error("transition matrix overflowed; shrink the window");
        return G;
    }

    HeteroclinicOrbit orbit_;
    double tol_, dt_;
    Eigen::Matrix4d J_;
};

}  // namespace parindex
