#pragma once
/// \file  potential.hpp
/// \brief angular factors U(theta) of (-alpha)-homogeneous planar potentials
///        r^-alpha * U(theta), their derivatives, discriminant and critical points
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "common.hpp"

namespace parindex {

/// half-width of the excluded wedge around binary-collision angles of the
/// isosceles potential; evaluation inside the wedge throws SingularAngle
constexpr double SINGULAR_PAD = 1e-6;

/// threshold below which a critical point counts as degenerate (|U''| < tol)
constexpr double DEGENERATE_TOL = 1e-8;

/// Angular part U(theta) > 0 of a potential r^-alpha U(theta) with 0 < alpha < 2.
/// Instances are immutable value types; all evaluations are pure.
class AnglePotential {
public:
    enum class Kind { anisotropic, isosceles, keplerConstant, fourier };

    /// two-centre anisotropy U = (mu cos^2 + sin^2)^(-1/2), requires mu > 1
    static AnglePotential anisotropic(double alpha, double mu) {
        if (!(mu > 1))
            throw std::invalid_argument("anisotropic potential requires mu > 1");
        AnglePotential p(alpha, Kind::anisotropic);
        p.mu_ = mu;
        return p;
    }

    /// symmetric three-body configuration potential with mass ratio m > 0;
    /// singular at theta = +-pi/2 (binary collision of the symmetric pair)
    static AnglePotential isosceles(double alpha, double m) {
        if (!(m > 0))
            throw std::invalid_argument("isosceles potential requires m > 0");
        AnglePotential p(alpha, Kind::isosceles);
        p.m_ = m;
        return p;
    }

    /// rotationally invariant U == m (central force), requires m > 0
    static AnglePotential keplerConstant(double alpha, double m) {
        if (!(m > 0))
            throw std::invalid_argument("keplerConstant potential requires m > 0");
        AnglePotential p(alpha, Kind::keplerConstant);
        p.m_ = m;
        return p;
    }

    /// trigonometric polynomial c0 + sum_k (a_k cos k theta + b_k sin k theta);
    /// rejected unless strictly positive on a dense sampling grid
    static AnglePotential fourier(double alpha, std::vector<double> cosCoeffs,
                                  std::vector<double> sinCoeffs, double constant) {
        AnglePotential p(alpha, Kind::fourier);
        p.cos_ = std::move(cosCoeffs);
        p.sin_ = std::move(sinCoeffs);
        p.c0_ = constant;
        const int N = 8192;
        for (int i = 0; i < N; i++) {
            if (p.value(-PI + 2 * PI * i / N) <= 0)
                throw Error("fourier potential must be strictly positive");
        }
        return p;
    }

    double alpha() const { return alpha_; }
    Kind kind() const { return kind_; }
    double mu() const { return mu_; }
    double massRatio() const { return m_; }
    const std::vector<double>& cosCoeffs() const { return cos_; }
    const std::vector<double>& sinCoeffs() const { return sin_; }
    double fourierConstant() const { return c0_; }

    /// true when the potential has an excluded singular angle within pad of theta
    bool singularNear(double theta, double pad = SINGULAR_PAD) const {
        if (kind_ != Kind::isosceles)
            return false;
        return angleDist(theta, PI / 2) < pad || angleDist(theta, -PI / 2) < pad;
    }

    double value(double theta) const {
        switch (kind_) {
            case Kind::anisotropic:
                return 1 / std::sqrt(aniG(theta));
            case Kind::isosceles: {
                guard(theta);
                return isoA() / std::fabs(std::cos(theta)) + isoB() / std::sqrt(isoH(theta));
            }
            case Kind::keplerConstant:
                return m_;
            case Kind::fourier: {
                double s = c0_;
                for (size_t k = 0; k < cos_.size(); k++) s += cos_[k] * std::cos((k + 1) * theta);
                for (size_t k = 0; k < sin_.size(); k++) s += sin_[k] * std::sin((k + 1) * theta);
                return s;
            }
        }
        return 0;  // unreachable
    }

    double dTheta(double theta) const {
        switch (kind_) {
            case Kind::anisotropic: {
                double g = aniG(theta), gp = -(mu_ - 1) * std::sin(2 * theta);
                return -0.5 * gp / (g * std::sqrt(g));
            }
            case Kind::isosceles: {
                guard(theta);
                double c = std::cos(theta), s = std::sin(theta);
                double h = isoH(theta), hp = 2 * m_ * std::sin(2 * theta);
                double sgn = c > 0 ? 1.0 : -1.0;
                return isoA() * s * sgn / (c * c) - 0.5 * isoB() * hp / (h * std::sqrt(h));
            }
            case Kind::keplerConstant:
                return 0;
            case Kind::fourier: {
                double s = 0;
                for (size_t k = 0; k < cos_.size(); k++)
                    s -= (k + 1) * cos_[k] * std::sin((k + 1) * theta);
                for (size_t k = 0; k < sin_.size(); k++)
                    s += (k + 1) * sin_[k] * std::cos((k + 1) * theta);
                return s;
            }
        }
        return 0;
    }

    double d2Theta(double theta) const {
        switch (kind_) {
            case Kind::anisotropic: {
                double g = aniG(theta);
                double gp = -(mu_ - 1) * std::sin(2 * theta);
                double gpp = -2 * (mu_ - 1) * std::cos(2 * theta);
                double g32 = g * std::sqrt(g);
                return 0.75 * gp * gp / (g32 * g) - 0.5 * gpp / g32;
            }
            case Kind::isosceles: {
                guard(theta);
                double c = std::cos(theta), s = std::sin(theta);
                double h = isoH(theta);
                double hp = 2 * m_ * std::sin(2 * theta), hpp = 4 * m_ * std::cos(2 * theta);
                double h32 = h * std::sqrt(h);
                return isoA() * (1 + s * s) / (std::fabs(c) * c * c) +
                       isoB() * (0.75 * hp * hp / (h32 * h) - 0.5 * hpp / h32);
            }
            case Kind::keplerConstant:
                return 0;
            case Kind::fourier: {
                double s = 0;
                for (size_t k = 0; k < cos_.size(); k++) {
                    double w = k + 1.0;
                    s -= w * w * cos_[k] * std::cos(w * theta);
                }
                for (size_t k = 0; k < sin_.size(); k++) {
                    double w = k + 1.0;
                    s -= w * w * sin_[k] * std::sin(w * theta);
                }
                return s;
            }
        }
        return 0;
    }

    /// discriminant (2-alpha)^2/2 * U + 4 U'' controlling the linearized
    /// rotation/hyperbolicity balance at rest points; its sign decides between
    /// nodal and focal collision-manifold equilibria and the homothetic Morse index
    double delta(double theta) const {
        double w = 2 - alpha_;
        return 0.5 * w * w * value(theta) + 4 * d2Theta(theta);
    }

private:
    AnglePotential(double alpha, Kind k) : alpha_(alpha), kind_(k) {
        if (!(alpha > 0 && alpha < 2))
            throw std::invalid_argument("homogeneity degree must satisfy 0 < alpha < 2");
    }

    void guard(double theta) const {
        if (singularNear(theta))
            throw SingularAngle(theta);
    }

    double aniG(double theta) const {  // mu cos^2 + sin^2 = 1 + (mu-1) cos^2
        double c = std::cos(theta);
        return 1 + (mu_ - 1) * c * c;
    }
    double isoA() const { return m_ * m_ * std::sqrt(m_) / std::sqrt(2.0); }  // m^(5/2)/sqrt(2)
    double isoB() const { return 2 * std::sqrt(2.0) * m_ * std::sqrt(m_); }   // 2 sqrt(2) m^(3/2)
    double isoH(double theta) const {
        double s = std::sin(theta);
        return 1 + 2 * m_ * s * s;
    }

    double alpha_;
    Kind kind_;
    double mu_ = 0, m_ = 0, c0_ = 0;
    std::vector<double> cos_, sin_;
};

/// an isolated nondegenerate-or-flagged zero of U'
struct CriticalPoint {
    double theta0;     ///< angle in (-pi, pi]
    double value;      ///< U(theta0)
    double d2;         ///< U''(theta0)
    double delta;      ///< discriminant at theta0
    bool degenerate;   ///< |U''| below DEGENERATE_TOL
    bool localMin;     ///< U'' > 0
    bool globalMin;    ///< attains the minimum of U over all critical points
};

struct CriticalPointSet {
    std::vector<CriticalPoint> points;
    bool continuum = false;  ///< every angle critical (constant potential)
};

namespace detail {

/// polish a bracketed simple zero of U' by safeguarded Newton iteration
inline double polishCritical(const AnglePotential& pot, double lo, double hi) {
    double flo = pot.dTheta(lo);
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 80; it++) {
        double f = pot.dTheta(x), fp = pot.d2Theta(x);
        double step = (fp != 0) ? f / fp : 0;
        double xn = x - step;
        if (!(xn > lo && xn < hi) || fp == 0) {  // Newton left the bracket: bisect
            double fm = pot.dTheta(x);
            if ((fm > 0) == (flo > 0)) {
                lo = x;
                flo = fm;
            } else
                hi = x;
            xn = 0.5 * (lo + hi);
        }
        if (std::fabs(xn - x) < 1e-15 * (1 + std::fabs(x))) return xn;
        x = xn;
    }
    return x;
}

}  // namespace detail

/// locate all zeros of U' by sign-change scanning on a uniform grid followed by
/// Newton polish; singular wedges of the isosceles potential are skipped
inline CriticalPointSet criticalPoints(const AnglePotential& pot, int gridN = 4096) {
    CriticalPointSet out;
    if (pot.kind() == AnglePotential::Kind::keplerConstant) {
        out.continuum = true;
        return out;
    }
    const double h = 2 * PI / gridN;
    if (pot.kind() == AnglePotential::Kind::fourier) {  // constant trig polynomial
        double mx = 0;
        for (int i = 0; i < gridN; i++) mx = std::max(mx, std::fabs(pot.dTheta(-PI + i * h)));
        if (mx < 1e-14) {
            out.continuum = true;
            return out;
        }
    }
    double prevTheta = 0, prevF = 0;
    bool havePrev = false;
    std::vector<double> roots;
    // one extra cell past the seam so a root exactly at +-pi is bracketed
    for (int i = 0; i <= gridN + 1; i++) {
        double theta = -PI + i * h;
        if (pot.singularNear(theta, 4 * SINGULAR_PAD)) {
            havePrev = false;
            continue;
        }
        double f = pot.dTheta(theta);
        if (havePrev) {
            if (f == 0) {
                roots.push_back(theta);
            } else if ((prevF > 0) != (f > 0) && prevF != 0) {
                roots.push_back(detail::polishCritical(pot, prevTheta, theta));
            }
        }
        prevTheta = theta;
        prevF = f;
        havePrev = true;
    }
    // deduplicate modulo 2 pi (endpoint of the scan wraps onto its start)
    std::vector<double> uniq;
    for (double r : roots) {
        double rw = wrapAngle(r);
        bool dup = false;
        for (double u : uniq)
            if (angleDist(u, rw) < 1e-7) dup = true;
        if (!dup) uniq.push_back(rw);
    }
    std::sort(uniq.begin(), uniq.end());
    double minVal = std::numeric_limits<double>::infinity();
    for (double r : uniq) minVal = std::min(minVal, pot.value(r));
    for (double r : uniq) {
        CriticalPoint cp;
        cp.theta0 = r;
        cp.value = pot.value(r);
        cp.d2 = pot.d2Theta(r);
        cp.delta = pot.delta(r);
        cp.degenerate = std::fabs(cp.d2) < DEGENERATE_TOL;
        cp.localMin = cp.d2 > 0;
        cp.globalMin = cp.value < minVal * (1 + 1e-10) + 1e-12;
        out.points.push_back(cp);
    }
    return out;
}

/// verify that theta0 is critical (|U'| small in the natural derivative scale);
/// throws NotACriticalPoint otherwise and returns the polished angle on success
inline double requireCritical(const AnglePotential& pot, double theta0, double tol = 1e-6) {
    double scale = std::fabs(pot.d2Theta(theta0)) + std::fabs(pot.value(theta0)) + 1;
    if (std::fabs(pot.dTheta(theta0)) > tol * scale)
        throw NotACriticalPoint("U' does not vanish at theta=" + std::to_string(theta0));
    // one polish pass tightens grid-level inputs to full precision
    double lo = theta0 - 1e-3, hi = theta0 + 1e-3;
    if (pot.dTheta(lo) == 0 || pot.dTheta(hi) == 0 || (pot.dTheta(lo) > 0) == (pot.dTheta(hi) > 0))
        return theta0;  // no clean bracket (degenerate or flat): keep the input
    return detail::polishCritical(pot, lo, hi);
}

}  // namespace parindex
