#pragma once
/// \file  morse.hpp
/// \brief Morse index of the fixed-endpoint action by finite elements
///
/// The second variation of the action along a zero-energy orbit, written in
/// rescaled time with radial variation rho = delta r and arc variation
/// w = r delta theta, is
///
///   d2F = int  r^(-1-a/2) [ (rho' - u w)^2 + (w' + u rho)^2
///                           + a(a+1) U rho^2 - 2(a+1) U_th rho w
///                           + (U_thth - a U) w^2 ] dtau .
///
/// The pointwise change of variables (delta r, delta theta) -> (rho, w) is an
/// isomorphism of H^1_0 on compact windows, so the index is unchanged.  We
/// assemble the form with P1 elements on a uniform mesh (two degrees of
/// freedom per node), count negative pivots of the banded LDL^T factorization,
/// and accept only counts stable under mesh doubling.
#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "dynamics.hpp"
#include "shooting.hpp"

namespace parindex {

/// symmetric banded matrix in LAPACK-like lower storage: band(d, i) holds
/// A(i+d, i) for diagonals d = 0..bw
class BandedSymmetric {
public:
    BandedSymmetric(int n, int bw) : n_(n), bw_(bw), a_((bw + 1) * n, 0.0) {}
    int size() const { return n_; }
    int bandwidth() const { return bw_; }
    double& at(int i, int j) {
        if (i < j) std::swap(i, j);
        return a_[(i - j) * n_ + j];
    }
    double get(int i, int j) const {
        if (i < j) std::swap(i, j);
        return i - j > bw_ ? 0.0 : a_[(i - j) * n_ + j];
    }

    /// symmetric diagonal equilibration; congruence, so inertia is preserved
    void equilibrate() {
        std::vector<double> s(n_);
        for (int i = 0; i < n_; i++) {
            double d = std::abs(get(i, i));
            s[i] = d > 0 ? 1.0 / std::sqrt(d) : 1.0;
        }
        for (int j = 0; j < n_; j++)
            for (int d = 0; d <= bw_ && j + d < n_; d++) a_[d * n_ + j] *= s[j] * s[j + d];
    }

    /// negative pivot count of the in-place LDL^T factorization; the matrix is
    /// destroyed.  Zero pivots are nudged, which can only matter for directions
    /// that are numerically null anyway.
    int negativeInertia() {
        std::vector<double> diag(n_);
        std::vector<std::vector<double>> L(n_, std::vector<double>(bw_, 0.0));
        int neg = 0;
        for (int k = 0; k < n_; k++) {
            double d = get(k, k);
            for (int m = std::max(0, k - bw_); m < k; m++) {
                double l = L[k][k - 1 - m];
                d -= l * l * diag[m];
            }
            if (d == 0) d = 1e-300;
            diag[k] = d;
            if (d < 0) neg++;
            for (int i = k + 1; i <= std::min(n_ - 1, k + bw_); i++) {
                double v = get(i, k);
                for (int m = std::max(0, i - bw_); m < k; m++)
                    v -= L[i][i - 1 - m] * L[k][k - 1 - m] * diag[m];
                L[i][i - 1 - k] = v / diag[k];
            }
        }
        return neg;
    }

private:
    int n_, bw_;
    std::vector<double> a_;
};

namespace detail {

struct QuadData {
    double logW;        ///< log of the weight r^(-1-a/2)
    double u;           ///< shell velocity theta'
    double Arr, Arw, Aww;
};

inline QuadData quadDataAt(const HeteroclinicOrbit& orbit, const LiftedOrbit& lift,
                           double tau) {
    const AnglePotential& pot = orbit.pot;
    double a = pot.alpha();
    Eigen::Vector2d s = orbit.state(tau);
    double U = pot.value(s[1]), Ut = pot.dTheta(s[1]), Utt = pot.d2Theta(s[1]);
    double u = std::sqrt(2 * U) * std::cos(s[0]);
    QuadData q;
    q.logW = (-1 - a / 2) * lift.logr(tau);
    q.u = u;
    q.Arr = u * u + a * (a + 1) * U;
    q.Arw = -(a + 1) * Ut;
    q.Aww = u * u + Utt - a * U;
    return q;
}

/// assemble the P1 stiffness matrix of the second variation on [tau1, tau2]
/// with n elements and Dirichlet ends; dofs are (rho_j, w_j) at interior nodes.
/// The weight r^(-1-a/2) can span hundreds of orders of magnitude across a long
/// window, so each dof is pre-scaled by exp(+(1+a/2)/2 log r) at its node; a
/// diagonal congruence, leaving the inertia unchanged and all entries O(1).
inline BandedSymmetric assembleHessian(const HeteroclinicOrbit& orbit,
                                       const LiftedOrbit& lift, double tau1, double tau2,
                                       int n) {
    double h = (tau2 - tau1) / n;
    int ndof = 2 * (n - 1);
    BandedSymmetric K(ndof, 3);
    double halfAp = 0.5 * (1 + orbit.pot.alpha() / 2);
    // two-point Gauss on the reference element
    const double g[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    for (int e = 0; e < n; e++) {
        double a = tau1 + e * h;
        double lL = halfAp * lift.logr(a), lR = halfAp * lift.logr(a + h);
        const double lloc[4] = {lL, lL, lR, lR};
        Eigen::Matrix4d Ke = Eigen::Matrix4d::Zero();
        for (double gp : g) {
            double tau = a + gp * h;
            QuadData q = quadDataAt(orbit, lift, tau);
            double N1 = 1 - gp, N2 = gp;
            Eigen::Vector4d vr(N1, 0, N2, 0), vw(0, N1, 0, N2);
            Eigen::Vector4d dr(-1 / h, 0, 1 / h, 0), dw(0, -1 / h, 0, 1 / h);
            Eigen::Matrix4d M = dr * dr.transpose() + dw * dw.transpose() +
                                q.u * (vr * dw.transpose() + dw * vr.transpose() -
                                       dr * vw.transpose() - vw * dr.transpose()) +
                                q.Arr * vr * vr.transpose() +
                                q.Arw * (vr * vw.transpose() + vw * vr.transpose()) +
                                q.Aww * vw * vw.transpose();
            for (int i = 0; i < 4; i++)
                for (int j = 0; j < 4; j++)
                    Ke(i, j) += 0.5 * h * std::exp(q.logW + lloc[i] + lloc[j]) * M(i, j);
        }
        // scatter, skipping the Dirichlet end nodes
        for (int i = 0; i < 4; i++) {
            int node_i = e + i / 2, comp_i = i % 2;
            if (node_i == 0 || node_i == n) continue;
            for (int j = 0; j <= i; j++) {
                int node_j = e + j / 2, comp_j = j % 2;
                if (node_j == 0 || node_j == n) continue;
                K.at(2 * (node_i - 1) + comp_i, 2 * (node_j - 1) + comp_j) += Ke(i, j);
            }
        }
    }
    return K;
}

}  // namespace detail

/// Morse index of the action restricted to the window [tau1, tau2] with fixed
/// ends, via negative inertia of the P1 Galerkin matrix.  Counts converge from
/// below as the mesh refines; we require agreement under doubling.
inline int morseByHessian(const HeteroclinicOrbit& orbit, const LiftedOrbit& lift,
                          double tau1, double tau2, int n = 2000, int maxDoublings = 3) {
    if (!(tau2 > tau1)) throw std::invalid_argument("empty Morse window");
    int prev = -1;
    for (int k = 0; k <= maxDoublings; k++, n *= 2) {
        BandedSymmetric K = detail::assembleHessian(orbit, lift, tau1, tau2, n);
        K.equilibrate();
        int cnt = K.negativeInertia();
        if (cnt == prev) return cnt;
        prev = cnt;
    }
    throw MeshNotConverged("negative-inertia count kept changing under mesh doubling");
}

/// Morse index of a homothetic motion over the normal-form window [0, L]:
/// the second variation reduces to  int xi'^2 + (delta/4) xi^2  with Dirichlet
/// ends, so the count is the number of modes k >= 1 with (k pi / L)^2 < -delta/4
inline int homotheticNegativeCount(double L, double delta) {
    if (delta >= 0) return 0;
    double r = L * std::sqrt(-delta) / (2 * PI);
    int k = static_cast<int>(std::floor(r));
    // an exact boundary mode is null, not negative
    if (k >= 1 && r - k < 1e-12) k--;
    return std::max(k, 0);
}

/// finite-element count for the homothetic normal form, to cross-check the
/// closed formula; bandwidth-1 banded inertia
inline int homotheticMorse(const AnglePotential& pot, double theta0, double L, int n = 0) {
    requireCritical(pot, theta0);
    double delta = pot.delta(theta0);
    if (delta >= 0) return 0;
    if (n <= 0) n = std::max(400, static_cast<int>(40 * L * std::sqrt(-delta)));
    double h = L / n;
    BandedSymmetric K(n - 1, 1);
    for (int e = 0; e < n; e++) {
        // exact element integrals for constant coefficients
        double kd = 1 / h, m0 = h / 3, m1 = h / 6;
        double c = delta / 4;
        double d00 = kd + c * m0, d01 = -kd + c * m1;
        if (e > 0) K.at(e - 1, e - 1) += d00;
        if (e < n - 1) K.at(e, e) += d00;
        if (e > 0 && e < n - 1) K.at(e, e - 1) += d01;
    }
    K.equilibrate();
    return K.negativeInertia();
}

}  // namespace parindex
