#pragma once
/// \file  maslov.hpp
/// \brief Maslov-type intersection counting for paths of Lagrangian planes
///
/// The count of a path t -> L(t) against a fixed reference plane over [a, b] is
///     n+(Gamma_a) + sum over interior crossings of sign(Gamma_t) - n-(Gamma_b),
/// where Gamma_t is the crossing form at a crossing t (the t-derivative of the
/// local graph representation of the path, restricted to the intersection with
/// the reference).  For systems whose crossing forms are positive definite this
/// reduces to the dimension sum of the left endpoint and interior intersections,
/// which is the convention under which the Morse index identity and the zero
/// counting theorems below hold verbatim.
#include <algorithm>
#include <vector>

#include "lagrangian.hpp"

namespace parindex {

struct CrossingRecord {
    double t;
    int dim;        ///< dim(L(t) ^ ref)
    int nPlus, nMinus;
    int signature;  ///< nPlus - nMinus
    bool atLeft = false, atRight = false;
};

struct MaslovResult {
    int count = 0;
    std::vector<CrossingRecord> crossings;
    bool allInteriorPositive = true;  ///< every interior crossing form was positive definite
};

struct MaslovOptions {
    int samples = 2000;
    double refineTol = 1e-10;    ///< bisection window for crossing times
    double fdStep = 1e-6;        ///< finite-difference step of the crossing form
    double sigTol = 1e-9;        ///< |eigenvalue| below this is tangential
    double dimTol = 1e-8;        ///< singular-value threshold for intersections
    double dipThreshold = 1e-4;  ///< |det| minima below this become candidates
};

namespace detail {

/// localized graph coordinate of path frame G over base frame Fstar:
/// G = Fstar A + (J Fstar) B with the symmetric part of B A^{-1} the local form
inline Eigen::MatrixXd localForm(const Eigen::MatrixXd& Fstar, const Eigen::MatrixXd& C,
                                 const Eigen::MatrixXd& G) {
    Eigen::MatrixXd A = Fstar.transpose() * G;
    Eigen::MatrixXd B = C.transpose() * G;
    Eigen::MatrixXd phi = B * A.inverse();
    return 0.5 * (phi + phi.transpose());
}

}  // namespace detail

/// count Lagrangian intersections of path(t) with ref over [a, b] under the
/// endpoint convention described in the header comment.  path must return
/// frames whose spans vary continuously; consecutive sample planes closer than
/// distance ~0.5 are required, coarser sampling throws.
template <class PathFn>
MaslovResult maslovCount(const LagrangianFrame& ref, PathFn&& path, double a, double b,
                         const Eigen::MatrixXd& J, const MaslovOptions& opt = {}) {
    MaslovResult res;
    const int N = opt.samples;
    const Eigen::MatrixXd R = ref.matrix();
    const double span = b - a;
    if (!(span > 0)) throw std::invalid_argument("maslovCount requires a < b");
    const double endTol = std::max(4 * opt.refineTol, 1e-9 * std::fabs(span));

    // sample determinants with a gauge-parity correction: frame gauge jumps flip
    // det(ref^T J F) without a geometric crossing, and are detected through the
    // sign of det(F_prev^T F_next)
    std::vector<double> ts(N + 1), dets(N + 1);
    std::vector<int> parity(N + 1, 1);
    std::vector<Eigen::MatrixXd> frames(N + 1);
    for (int i = 0; i <= N; i++) {
        ts[i] = a + span * i / N;
        frames[i] = path(ts[i]).matrix();
        dets[i] = pairingMatrix(R, frames[i], J).determinant();
        if (i > 0) {
            double g = (frames[i - 1].transpose() * frames[i]).determinant();
            if (std::fabs(g) < 0.3)
                throw Error("Lagrangian path sampled too coarsely near t=" + std::to_string(ts[i]));
            parity[i] = parity[i - 1] * (g > 0 ? 1 : -1);
        }
    }

    std::vector<double> candidates;
    // interior sign changes, located by bisection against a gauge anchor
    for (int i = 1; i <= N; i++) {
        double e0 = parity[i - 1] * dets[i - 1], e1 = parity[i] * dets[i];
        if (std::fabs(dets[i - 1]) < 1e-13) continue;  // handled as a dip candidate
        if ((e0 > 0) == (e1 > 0) || std::fabs(dets[i]) < 1e-13) continue;
        const Eigen::MatrixXd& anchor = frames[i - 1];
        auto signedDet = [&](double t) {
            Eigen::MatrixXd F = path(t).matrix();
            double g = (anchor.transpose() * F).determinant();
            return (g > 0 ? 1.0 : -1.0) * pairingMatrix(R, F, J).determinant();
        };
        double lo = ts[i - 1], hi = ts[i], flo = signedDet(lo);
        while (hi - lo > opt.refineTol) {
            double mid = 0.5 * (lo + hi), fm = signedDet(mid);
            if ((fm > 0) == (flo > 0))
                lo = mid, flo = fm;
            else
                hi = mid;
        }
        candidates.push_back(0.5 * (lo + hi));
    }
    // |det| dips: even-dimensional or tangential crossings without a sign change
    for (int i = 1; i < N; i++) {
        double di = std::fabs(dets[i]);
        if (di > opt.dipThreshold || di > std::fabs(dets[i - 1]) || di > std::fabs(dets[i + 1]))
            continue;
        double lo = ts[i - 1], hi = ts[i + 1];
        const double gr = 0.5 * (std::sqrt(5.0) - 1);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        auto absDet = [&](double t) {
            return std::fabs(pairingMatrix(R, path(t).matrix(), J).determinant());
        };
        double f1 = absDet(x1), f2 = absDet(x2);
        for (int it = 0; it < 80 && hi - lo > opt.refineTol; it++) {
            if (f1 < f2) {
                hi = x2, x2 = x1, f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = absDet(x1);
            } else {
                lo = x1, x1 = x2, f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = absDet(x2);
            }
        }
        candidates.push_back(0.5 * (lo + hi));
    }
    // samples landing exactly on a crossing
    for (int i = 1; i < N; i++)
        if (std::fabs(dets[i]) < 1e-13) candidates.push_back(ts[i]);

    std::sort(candidates.begin(), candidates.end());
    std::vector<double> locs;
    for (double c : candidates) {
        if (c < a + endTol || c > b - endTol) continue;  // endpoints handled below
        if (!locs.empty() && c - locs.back() < 20 * opt.refineTol) continue;
        locs.push_back(c);
    }

    auto makeRecord = [&](double t0, int side) -> bool {  // side: -1 left end, +1 right end, 0 interior
        Eigen::MatrixXd Fstar = path(t0).matrix();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(pairingMatrix(R, Fstar, J), Eigen::ComputeFullV);
        int n = ref.n(), k = 0;
        for (int i = 0; i < n; i++)
            if (svd.singularValues()(i) < opt.dimTol) k++;
        if (k == 0) return false;
        Eigen::MatrixXd Cstar = svd.matrixV().rightCols(k);
        Eigen::MatrixXd Jort = J * Fstar;  // Lagrangian complement of the base
        double h = opt.fdStep;
        Eigen::MatrixXd gamma;
        if (side < 0)
            gamma = (detail::localForm(Fstar, Jort, path(t0 + h).matrix()) -
                     detail::localForm(Fstar, Jort, Fstar)) / h;
        else if (side > 0)
            gamma = (detail::localForm(Fstar, Jort, Fstar) -
                     detail::localForm(Fstar, Jort, path(t0 - h).matrix())) / h;
        else
            gamma = (detail::localForm(Fstar, Jort, path(t0 + h).matrix()) -
                     detail::localForm(Fstar, Jort, path(t0 - h).matrix())) / (2 * h);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Cstar.transpose() * gamma * Cstar);
        CrossingRecord rec;
        rec.t = t0;
        rec.dim = k;
        rec.nPlus = rec.nMinus = 0;
        for (int i = 0; i < k; i++) {
            double ev = es.eigenvalues()(i);
            if (ev > opt.sigTol)
                rec.nPlus++;
            else if (ev < -opt.sigTol)
                rec.nMinus++;
            else
                throw TangentialCrossingUnresolved(t0);
        }
        rec.signature = rec.nPlus - rec.nMinus;
        rec.atLeft = side < 0;
        rec.atRight = side > 0;
        res.crossings.push_back(rec);
        return true;
    };

    if (intersectionDim(R, path(a).matrix(), J, opt.dimTol) > 0) makeRecord(a, -1);
    for (double t0 : locs)
        if (makeRecord(t0, 0) && res.crossings.back().nMinus > 0) res.allInteriorPositive = false;
    if (intersectionDim(R, path(b).matrix(), J, opt.dimTol) > 0) makeRecord(b, +1);

    for (const CrossingRecord& rec : res.crossings)
        res.count += rec.atLeft ? rec.nPlus : rec.atRight ? -rec.nMinus : rec.signature;
    return res;
}

/// relative count of two moving Lagrangian paths, reduced to a fixed-reference
/// count of the product path L1(t) x L2(t) against the diagonal in the
/// anti-diagonal symplectic structure (-omega) + omega on R^(2n) x R^(2n).
/// When L1 is constant this equals maslovCount(L1, L2, ...).
template <class P1, class P2>
MaslovResult relativeMaslov(P1&& path1, P2&& path2, double a, double b,
                            const MaslovOptions& opt = {}) {
    LagrangianFrame probe = path1(a);
    int n = probe.n();
    Eigen::MatrixXd J = symplecticJ(n);
    Eigen::MatrixXd Jbar = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    Jbar.topLeftCorner(2 * n, 2 * n) = -J;
    Jbar.bottomRightCorner(2 * n, 2 * n) = J;

    Eigen::MatrixXd diag(4 * n, 2 * n);
    diag.topRows(2 * n).setIdentity();
    diag.bottomRows(2 * n).setIdentity();
    LagrangianFrame ref = LagrangianFrame::fromColumns(diag, &Jbar);

    auto prod = [&](double t) {
        Eigen::MatrixXd F = Eigen::MatrixXd::Zero(4 * n, 2 * n);
        F.block(0, 0, 2 * n, n) = path1(t).matrix();
        F.block(2 * n, n, 2 * n, n) = path2(t).matrix();
        return LagrangianFrame::fromColumns(F, &Jbar);
    };
    return maslovCount(ref, prod, a, b, Jbar, opt);
}

/// difference mu(V0, L(t)) - mu(V1, L(t)) along any Lagrangian path from L0 to
/// L1; independent of the connecting path.  When all four graph representations
/// over the horizontal plane exist and the pairwise differences are
/// nonsingular, the closed-form half-signature expression is used; otherwise a
/// geodesic connecting path is counted directly.  Bounded by 2n in magnitude.
inline int hormanderIndex(const LagrangianFrame& V0, const LagrangianFrame& V1,
                          const LagrangianFrame& L0, const LagrangianFrame& L1,
                          const MaslovOptions& opt = {}) {
    int n = V0.n();
    Eigen::MatrixXd J = symplecticJ(n);
    // graph of a symmetric matrix over the position plane: {(A y, y)}
    auto graphOf = [&](const LagrangianFrame& f, Eigen::MatrixXd& A) {
        Eigen::MatrixXd X = f.matrix().topRows(n), Y = f.matrix().bottomRows(n);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y);
        if (svd.singularValues()(n - 1) < 1e-8) return false;
        A = X * Y.inverse();
        if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-8) return false;
        A = 0.5 * (A + A.transpose());
        return true;
    };
    Eigen::MatrixXd A0, A1, B0, B1;
    bool ok = graphOf(V0, A0) && graphOf(V1, A1) && graphOf(L0, B0) && graphOf(L1, B1);
    if (ok) {
        auto halfSig = [&](const Eigen::MatrixXd& M, bool& sing) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
            int s = 0;
            for (int i = 0; i < n; i++) {
                double ev = es.eigenvalues()(i);
                if (std::fabs(ev) < 1e-9) {
                    sing = true;
                    return 0.0;
                }
                s += ev > 0 ? 1 : -1;
            }
            return 0.5 * s;
        };
        bool sing = false;
        // positive crossings are branches of spec(B(t) - A) moving downward, so
        // the count against A is the growth of the negative inertia along the path
        double s = halfSig(B1 - A1, sing) + halfSig(B0 - A0, sing) - halfSig(B0 - A1, sing) -
                   halfSig(B1 - A0, sing);
        if (!sing) return int(std::lround(s));
    }
    // path fallback: count the geodesic from L0 to L1 against both references
    LagrangianGeodesic geo(L0, L1);
    auto path = [&](double t) { return geo.at(t); };
    MaslovOptions o = opt;
    o.samples = std::max(o.samples, 800);
    int m0 = maslovCount(V0, path, 0.0, 1.0, J, o).count;
    int m1 = maslovCount(V1, path, 0.0, 1.0, J, o).count;
    return m0 - m1;
}

}  // namespace parindex
