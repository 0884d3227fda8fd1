#pragma once
/// \file  ode.hpp
/// \brief embedded Dormand-Prince 5(4) integrator with quartic dense output and
///        event location by bisection on the interpolant
///
/// The solver is deliberately small: fixed-dimension Eigen states, PI step
/// control, first-same-as-last reuse, and per-step Hermite-free dense output
/// using the classical five-coefficient continuous extension.
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "common.hpp"

namespace parindex {

/// sign-change trigger evaluated along the solution
template <class Vec>
struct OdeEvent {
    std::function<double(double, const Vec&)> g;
    int direction = 0;  ///< +1: count -..+ only, -1: +..- only, 0: both
    bool stop = false;  ///< truncate the integration at the event
};

template <class Vec>
struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double hInit = 0;  ///< 0: choose automatically
    double hMax = std::numeric_limits<double>::infinity();
    long maxSteps = 4000000;
    std::vector<OdeEvent<Vec>> events;
    /// optional admissibility predicate; leaving the region throws DomainExit
    std::function<bool(double, const Vec&)> guard;
};

template <class Vec>
struct EventHit {
    double t;
    Vec y;
    int index;  ///< which event in OdeOptions::events fired
};

enum class StopReason { reachedEnd, eventStop };

/// one accepted step's continuous extension, valid for t in [t0, t0+h]
template <class Vec>
struct DenseSegment {
    double t0, h;
    Vec c1, c2, c3, c4, c5;
    Vec eval(double t) const {
        double s = (t - t0) / h, s1 = 1 - s;
        return c1 + s * (c2 + s1 * (c3 + s * (c4 + s1 * c5)));
    }
};

template <class Vec>
struct OdeSolution {
    std::vector<double> t;
    std::vector<Vec> y;
    std::vector<Vec> f;  ///< field at the accepted points
    std::vector<DenseSegment<Vec>> dense;
    std::vector<EventHit<Vec>> hits;
    StopReason reason = StopReason::reachedEnd;

    /// interpolate the solution anywhere inside the integrated span
    Vec eval(double tq) const {
        const auto& d = segmentFor(tq);
        return d.eval(tq);
    }
    const DenseSegment<Vec>& segmentFor(double tq) const {
        // binary search over monotone (possibly decreasing) segment starts
        size_t lo = 0, hi = dense.size();
        bool fwd = dense.front().h > 0;
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            if (fwd ? dense[mid].t0 <= tq : dense[mid].t0 >= tq)
                lo = mid;
            else
                hi = mid;
        }
        return dense[lo];
    }
};

namespace detail {

// Dormand-Prince RK5(4)7FM coefficients
constexpr double DP_C[7] = {0, 1. / 5, 3. / 10, 4. / 5, 8. / 9, 1, 1};
constexpr double DP_A[7][6] = {
    {},
    {1. / 5},
    {3. / 40, 9. / 40},
    {44. / 45, -56. / 15, 32. / 9},
    {19372. / 6561, -25360. / 2187, 64448. / 6561, -212. / 729},
    {9017. / 3168, -355. / 33, 46732. / 5247, 49. / 176, -5103. / 18656},
    {35. / 384, 0, 500. / 1113, 125. / 192, -2187. / 6784, 11. / 84}};
constexpr double DP_E[7] = {71. / 57600,      0,         -71. / 16695, 71. / 1920,
                            -17253. / 339200, 22. / 525, -1. / 40};
// dense-output weights of the continuous extension
constexpr double DP_D[7] = {-12715105075. / 11282082432.,  0,
                            87487479700. / 32700410799.,  -10690763975. / 1880347072.,
                            701980252875. / 199316789632., -1453857185. / 822651844.,
                            69997945. / 29380423.};

}  // namespace detail

/// integrate y' = rhs(t, y) from t0 to t1 (either direction)
template <class Vec, class Rhs>
OdeSolution<Vec> integrate(Rhs&& rhs, double t0, double t1, const Vec& y0,
                           const OdeOptions<Vec>& opt = {}) {
    using detail::DP_A;
    using detail::DP_C;
    using detail::DP_D;
    using detail::DP_E;
    OdeSolution<Vec> sol;
    // a span at roundoff scale cannot be resolved by any step the floor below
    // would accept; the state change over it is below tolerance anyway
    if (std::fabs(t1 - t0) <= 1e-14 * (std::fabs(t0) + std::fabs(t1) + 1)) {
        sol.t.push_back(t0);
        sol.y.push_back(y0);
        sol.f.push_back(rhs(t0, y0));
        DenseSegment<Vec> d{t0, 1, y0, Vec::Zero(y0.size()), Vec::Zero(y0.size()),
                            Vec::Zero(y0.size()), Vec::Zero(y0.size())};
        sol.dense.push_back(d);
        return sol;
    }
    const double dir = t1 > t0 ? 1 : -1;
    const double span = std::fabs(t1 - t0);
    const double hFloor = std::max(1e-14 * span, 1e-15 * (std::fabs(t0) + std::fabs(t1)));

    double t = t0;
    Vec y = y0;
    if (opt.guard && !opt.guard(t, y))
        throw DomainExit("initial state outside admissible domain");
    Vec k[7];
    k[0] = rhs(t, y);

    double h = opt.hInit != 0 ? std::fabs(opt.hInit) : 0;
    if (h == 0) {
        double fn = k[0].norm(), yn = y.norm();
        h = 0.01 * (yn > 1e-8 && fn > 1e-8 ? yn / fn : 1.0);
    }
    h = std::min({h, span, opt.hMax});

    std::vector<double> gPrev(opt.events.size());
    for (size_t i = 0; i < opt.events.size(); i++) gPrev[i] = opt.events[i].g(t, y);

    sol.t.push_back(t);
    sol.y.push_back(y);
    sol.f.push_back(k[0]);

    bool rejected = false;
    for (long step = 0; step < opt.maxSteps; step++) {
        if (dir * (t - t1) >= 0) return sol;
        h = std::min(h, std::fabs(t1 - t));
        if (h < hFloor)
            throw StepSizeUnderflow("step size underflow at t=" + std::to_string(t));
        double hs = dir * h;

        // trial stages; a singular evaluation is treated like a rejected step
        Vec ytmp, y1, k7;
        bool singular = false;
        try {
            for (int i = 1; i < 7; i++) {
                ytmp = y;
                for (int j = 0; j < i; j++) ytmp += hs * DP_A[i][j] * k[j];
                k[i] = rhs(t + DP_C[i] * hs, ytmp);
            }
            y1 = ytmp;  // stage 7 abscissa is t+h with the 5th-order weights
            k7 = k[6];
        } catch (const SingularAngle&) {
            singular = true;
        }
        if (singular) {
            h *= 0.25;
            rejected = true;
            continue;
        }

        // scaled RMS error estimate of the embedded 4th-order difference
        double err = 0;
        const int n = int(y.size());
        for (int c = 0; c < n; c++) {
            double e = 0;
            for (int i = 0; i < 7; i++) e += DP_E[i] * k[i][c];
            e *= hs;
            double sc = opt.atol + opt.rtol * std::max(std::fabs(y[c]), std::fabs(y1[c]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / n);

        if (err > 1) {  // reject
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            rejected = true;
            continue;
        }

        // accept: build the continuous extension
        DenseSegment<Vec> d;
        d.t0 = t;
        d.h = hs;
        Vec ydiff = y1 - y;
        Vec bspl = hs * k[0] - ydiff;
        d.c1 = y;
        d.c2 = ydiff;
        d.c3 = bspl;
        d.c4 = ydiff - hs * k7 - bspl;
        d.c5 = Vec::Zero(y.size());
        for (int i = 0; i < 7; i++) d.c5 += (hs * DP_D[i]) * k[i];
        sol.dense.push_back(d);

        double tNew = t + hs;
        if (opt.guard && !opt.guard(tNew, y1))
            throw DomainExit("trajectory left admissible domain at t=" + std::to_string(tNew));

        // locate every event crossing inside this segment, in time order
        bool stopped = false;
        double tStop = tNew;
        std::vector<EventHit<Vec>> segHits;
        for (size_t i = 0; i < opt.events.size(); i++) {
            double g1 = opt.events[i].g(tNew, y1);
            double g0 = gPrev[i];
            bool crossed = (g0 < 0 && g1 >= 0 && opt.events[i].direction >= 0) ||
                           (g0 > 0 && g1 <= 0 && opt.events[i].direction <= 0);
            if (crossed) {
                double lo = t, hi = tNew, glo = g0;
                while (std::fabs(hi - lo) > 1e-10) {
                    double mid = 0.5 * (lo + hi);
                    double gm = opt.events[i].g(mid, d.eval(mid));
                    if ((gm > 0) == (glo > 0))
                        lo = mid, glo = gm;
                    else
                        hi = mid;
                }
                double te = 0.5 * (lo + hi);
                segHits.push_back({te, d.eval(te), int(i)});
            }
            gPrev[i] = g1;
        }
        std::sort(segHits.begin(), segHits.end(),
                  [dir](const auto& a, const auto& b) { return dir * (a.t - b.t) < 0; });
        for (const auto& hit : segHits) {
            sol.hits.push_back(hit);
            if (opt.events[hit.index].stop) {
                stopped = true;
                tStop = hit.t;
                break;
            }
        }

        if (stopped) {
            sol.t.push_back(tStop);
            sol.y.push_back(d.eval(tStop));
            sol.f.push_back(rhs(tStop, sol.y.back()));
            sol.reason = StopReason::eventStop;
            return sol;
        }

        t = tNew;
        y = y1;
        k[0] = k7;  // FSAL
        sol.t.push_back(t);
        sol.y.push_back(y);
        sol.f.push_back(k[0]);

        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        fac = std::min(rejected ? 1.0 : 5.0, std::max(0.2, fac));
        h = std::min(h * fac, opt.hMax);
        rejected = false;
    }
    throw Error("integration exceeded the step budget");
}

}  // namespace parindex
