#pragma once
/// \file  indices.hpp
/// \brief the three indices of a heteroclinic orbit and the identities that
///        tie them together: oscillation count, crossing count of the unstable
///        bundle against the Dirichlet plane, and the Morse index of the action
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "linearflow.hpp"
#include "morse.hpp"

namespace parindex {

/// number of zeros of u(tau) = theta'(tau).  Spiral endpoints force infinitely
/// many zeros, reported as the cap with the saturation flag set; tailRate gives
/// the asymptotic zero density Im(lambda)/pi of the focus for context.
struct OscillationIndex {
    int count = 0;
    bool saturated = false;
    int detected = 0;     ///< zeros actually located inside the computed span
    double tailRate = 0;  ///< zeros per unit tau at a spiral end, 0 otherwise
};

inline OscillationIndex oscillationIndex(const HeteroclinicOrbit& orbit, int cap = 50) {
    OscillationIndex oi;
    oi.detected = static_cast<int>(orbit.uZeros.size());
    bool srcSpiral = orbit.sourceDir == ApproachDirection::spiral;
    bool snkSpiral = orbit.sinkDir == ApproachDirection::spiral;
    if (srcSpiral || snkSpiral) {
        oi.saturated = true;
        oi.count = cap;
        const Equilibrium& eq = snkSpiral ? orbit.sink : orbit.source;
        oi.tailRate = std::sqrt(-eq.delta) / (2 * PI);
    } else {
        oi.count = oi.detected;
    }
    return oi;
}

/// crossing count of the unstable bundle against the Dirichlet plane over the
/// full connection.  The bundle is realized by the invariant plane spanned by
/// the orbit velocity and the scaling direction: the two coincide whenever the
/// connection leaves its source along the expanding chart direction, which
/// every shot orbit does, and the algebraic realization is immune to the
/// transport drift that pulls a propagated eigenplane toward the generic
/// forward limit (along degenerate connections the drift is strong enough to
/// register spurious crossings).  Not defined when the source blocks are not
/// hyperbolic; not stabilized when crossings keep accumulating at a spiral
/// sink.  For ejection orbits (type II) the count is taken on the
/// time-reversed orbit, whose asymptotics match the theorem hypotheses.
struct MaslovOfX {
    int count = 0;
    bool defined = false;
    bool stable = false;
    bool viaReversal = false;
    int countAnchor = 0;    ///< over [tauSourceAsym, tauSinkAsym]
    int countExtended = 0;  ///< over the widest available margin window
    std::string note;
};

inline MaslovOfX maslovOfX(const HeteroclinicOrbit& orbit, const MaslovOptions& mo = {},
                           double odeTol = 1e-11) {
    if (orbit.type == HetType::II) {
        MaslovOfX mx = maslovOfX(reverseOrbit(orbit), mo, odeTol);
        mx.viaReversal = true;
        return mx;
    }
    MaslovOfX mx;
    if (orbit.source.delta <= 0 || orbit.sink.delta <= 0) {
        mx.note = "endpoint angular block is not hyperbolic; the count does not stabilize";
        return mx;
    }
    try {
        LinearFlowCache cache(orbit, odeTol);
        auto vminus = cache.etaPath();
        LagrangianFrame vd = LagrangianFrame::vertical(2);
        Eigen::MatrixXd J = symplecticJ(2);
        // the margin windows stop two units past the locks: further out the two
        // raw spanning directions are parallel to working precision
        double a0 = orbit.tauSourceAsym(), b0 = orbit.tauSinkAsym();
        double a1 = std::max(orbit.tauMin + 0.25, a0 - 2);
        double b1 = std::min(orbit.tauMax - 0.25, b0 + 2);
        mx.countAnchor = maslovCount(vd, vminus, a0, b0, J, mo).count;
        mx.countExtended = maslovCount(vd, vminus, a1, b1, J, mo).count;
        mx.count = mx.countExtended;
        mx.stable = mx.countAnchor == mx.countExtended;
        mx.defined = true;
        if (!mx.stable) mx.note = "crossing count changed under window extension";
    } catch (const std::exception& e) {
        mx.note = e.what();
    }
    return mx;
}

/// Morse index of the action over [tau1, tau2] read off the linearized flow:
/// transport the Dirichlet plane and count crossings, then remove the double
/// crossing the path starts with
inline int morseByMaslov(const LinearFlowCache& cache, double tau1, double tau2,
                         const MaslovOptions& mo = {}) {
    LagrangianFrame vd = LagrangianFrame::vertical(2);
    auto path = cache.propagatedPath(vd.matrix(), tau1, tau2);
    return maslovCount(vd, path, tau1, tau2, symplecticJ(2), mo).count - 2;
}

struct WindowCounts {
    double tau1 = 0, tau2 = 0;
    int hessian = 0;        ///< negative inertia of the finite-element Hessian
    int maslovMinusTwo = 0; ///< transported-plane crossings minus two
    bool ok = false;
};

struct IndexOptions {
    int meshN = 2000;
    int cap = 50;
    double odeTol = 1e-11;
    MaslovOptions maslov;
    int traceWindows = 3;
};

/// everything we can measure about one connection, with per-stage errors
/// collected instead of thrown.  Verdicts are set only when the quantities
/// they compare are defined.
struct IndexReport {
    HetType type = HetType::I;
    double sourceTheta = 0, sinkTheta = 0;
    std::string sourceDir, sinkDir;
    double sourceDelta = 0, sinkDelta = 0;

    OscillationIndex oscillation;
    MaslovOfX maslov;
    bool morseDefined = false;  ///< finite only when both endpoint blocks are hyperbolic
    bool morseStable = false;
    int morseFull = 0;
    std::vector<WindowCounts> intervalTrace;

    std::optional<bool> zerosMatchCrossings;               ///< zeros == bundle crossings (windowed)
    std::optional<bool> morseIndexTheoremHolds; ///< hessian == crossings - 2 on all windows
    std::optional<bool> globalIndexMatch;          ///< full Morse index == maslov count
    std::optional<bool> gapZeroOrOne;          ///< Morse minus oscillation in {0, 1}
    std::optional<bool> indicesAllZero;                ///< both indices vanish
    std::vector<std::string> errors;

    bool allSetVerdictsHold() const {
        for (auto v : {zerosMatchCrossings, morseIndexTheoremHolds, globalIndexMatch,
                       gapZeroOrOne})
            if (v.has_value() && !*v) return false;
        return true;
    }
};

inline IndexReport verifyTheorems(const HeteroclinicOrbit& orbit,
                                  const IndexOptions& opt = {}) {
    IndexReport rep;
    rep.type = orbit.type;
    rep.sourceTheta = wrapAngle(orbit.source.theta0);
    rep.sinkTheta = wrapAngle(orbit.sink.theta0);
    rep.sourceDir = directionName(orbit.sourceDir);
    rep.sinkDir = directionName(orbit.sinkDir);
    rep.sourceDelta = orbit.source.delta;
    rep.sinkDelta = orbit.sink.delta;

    rep.oscillation = oscillationIndex(orbit, opt.cap);
    rep.maslov = maslovOfX(orbit, opt.maslov, opt.odeTol);
    if (!rep.maslov.defined) rep.errors.push_back("maslov: " + rep.maslov.note);

    LinearFlowCache cache(orbit, opt.odeTol);
    // anchor the radial lift mid-span so the coverage caps bite symmetrically
    auto lift = liftZeroEnergy(
        orbit.pot, [&](double tau) { return orbit.state(tau); }, orbit.tauMin,
        orbit.tauMax, 1.0, 0.5 * (orbit.tauMin + orbit.tauMax));

    // widest window clear of the data edges and of any lift truncation
    double lo = std::max(orbit.tauMin + 0.25, lift.tauLo + 0.05);
    double hi = std::min(orbit.tauMax - 0.25, lift.tauHi - 0.05);
    double a = std::max(lo, orbit.tauSourceAsym());
    double b = std::min(hi, orbit.tauSinkAsym());

    // oscillation count versus crossings of the invariant plane, over one and
    // the same window so the comparison is exact.  Two units past the locks the
    // raw spanning directions are parallel to working precision, so clamp there.
    double cmpLo = std::max(lo, orbit.tauSourceAsym() - 2);
    double cmpHi = std::min(hi, orbit.tauSinkAsym() + 2);
    try {
        int zeros = 0;
        for (double z : orbit.uZeros) zeros += (z >= cmpLo && z <= cmpHi) ? 1 : 0;
        int etaCross = maslovCount(LagrangianFrame::vertical(2), cache.etaPath(), cmpLo,
                                   cmpHi, symplecticJ(2), opt.maslov)
                           .count;
        rep.zerosMatchCrossings = (zeros == etaCross);
    } catch (const std::exception& e) {
        rep.errors.push_back(std::string("eta crossings: ") + e.what());
    }

    // The transported plane is only as good as its integration: once roundoff
    // seeded along a soft tail splitting outgrows the true content, the plane
    // drifts toward the generic limit and fabricates crossings.  Two
    // independent discretizations agree while the transport is faithful, and
    // their divergence point caps the windows compared below.
    double span = b - a;
    bool traceOk = span > 0.5;
    double bTrust = b;
    if (traceOk) {
        const Eigen::MatrixXd vdm = LagrangianFrame::vertical(2).matrix();
        auto agreeUpTo = [&](double upTo) {
            auto p1 = cache.propagatedPath(vdm, a, upTo);
            LinearFlowCache alt(orbit, opt.odeTol, 0.31);
            auto p2 = alt.propagatedPath(vdm, a, upTo);
            double good = a;
            for (int i = 1; i <= 120; i++) {
                double t = a + (upTo - a) * i / 120;
                if (frameDistance(p1(t), p2(t)) > 1e-6) return good;
                good = t;
            }
            return upTo;
        };
        try {
            bTrust = agreeUpTo(b);
        } catch (const std::exception&) {
            try {
                bTrust = agreeUpTo(a + 0.5 * span);
            } catch (const std::exception&) {
                traceOk = false;
            }
        }
        span = bTrust - a;
        traceOk = traceOk && span > 0.5;
    }

    // Morse index over nested windows against the transported-plane count
    for (int k = 0; k < opt.traceWindows && traceOk; k++) {
        WindowCounts wc;
        wc.tau1 = a + 0.0902 * k * span;
        wc.tau2 = bTrust - 0.1459 * k * span;
        for (int attempt = 0; attempt < 2; attempt++) {
            try {
                wc.hessian = morseByHessian(orbit, lift, wc.tau1, wc.tau2, opt.meshN);
                wc.maslovMinusTwo = morseByMaslov(cache, wc.tau1, wc.tau2, opt.maslov);
                wc.ok = true;
                break;
            } catch (const MeshNotConverged&) {
                // a conjugate point sits on a window end; nudge inward and retry
                wc.tau1 += 0.0371 * span;
                wc.tau2 -= 0.0233 * span;
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "window [" << wc.tau1 << ", " << wc.tau2 << "]: " << e.what();
                rep.errors.push_back(os.str());
                break;
            }
        }
        rep.intervalTrace.push_back(wc);
    }
    if (!rep.intervalTrace.empty()) {
        bool all = true, any = false;
        for (const WindowCounts& wc : rep.intervalTrace)
            if (wc.ok) {
                any = true;
                all = all && wc.hessian == wc.maslovMinusTwo;
            }
        if (any) rep.morseIndexTheoremHolds = all;
    }

    // full Morse index, defined only with hyperbolic blocks at both ends
    rep.morseDefined = orbit.source.delta > 0 && orbit.sink.delta > 0;
    if (rep.morseDefined && traceOk) {
        try {
            int anchor = morseByHessian(orbit, lift, a, b, opt.meshN);
            int margin = morseByHessian(orbit, lift, lo, hi, opt.meshN);
            rep.morseFull = margin;
            rep.morseStable = anchor == margin;
            if (rep.maslov.defined && rep.maslov.stable)
                rep.globalIndexMatch = (rep.morseFull == rep.maslov.count);
            if (!rep.oscillation.saturated) {
                int gap = rep.morseFull - rep.oscillation.count;
                rep.gapZeroOrOne = (gap == 0 || gap == 1);
                rep.indicesAllZero = (rep.morseFull == 0 && rep.oscillation.count == 0);
            }
        } catch (const std::exception& e) {
            rep.errors.push_back(std::string("full Morse index: ") + e.what());
            rep.morseDefined = false;
        }
    }
    return rep;
}

}  // namespace parindex
