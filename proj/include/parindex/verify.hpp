#pragma once

#include <parindex/indices.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

/// Acceptance harness.  Ten end-to-end checks, each pinning one headline
/// guarantee of the library with fixed tolerances and a deterministic seed.
/// Every runner returns a verdict plus a one-line measurement summary so a
/// failing run states what was off without a debugger.

namespace parindex {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20260815;
    unsigned threads = 0;  ///< 0 picks hardware concurrency
};

namespace detail {

inline std::string vfmt(const char* f, ...) {
    va_list ap;
    va_start(ap, f);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline unsigned acceptThreads(unsigned requested) {
    if (requested) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// run body(i) for i in [0,n) on a worker pool; the first exception wins and
/// is rethrown after every worker has joined
template <class Body>
void parallelFor(std::size_t n, unsigned threads, Body&& body) {
    std::size_t workers = std::min<std::size_t>(acceptThreads(threads), n ? n : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; i++) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex errMu;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(errMu);
                if (!err) err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < workers; k++) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

/// sign-change bisection to bracket width eps
template <class F>
double bisectRoot(F&& f, double lo, double hi, double eps) {
    double flo = f(lo);
    if (!(flo * f(hi) < 0)) throw Error("bisection bracket does not change sign");
    while (hi - lo > eps) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid);
        if (fm == 0) return mid;
        if (flo * fm < 0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

/// sources a shooting run can start from: real unstable eigenline or focus
inline bool shootableSource(const Equilibrium& eq) {
    return (eq.realEigen && eq.lambdaPlus.real() > 1e-8) || eq.cls == EqClass::unstableFocus;
}

/// every index a report carries is zero, finite, and window-stable
inline bool zeroIndexReport(const IndexReport& rep, std::string& why) {
    auto fail = [&](const char* w) {
        why = w;
        return false;
    };
    if (rep.oscillation.saturated || rep.oscillation.count != 0) return fail("oscillation nonzero");
    if (!rep.maslov.defined || rep.maslov.count != 0) return fail("crossing count nonzero");
    if (!rep.maslov.stable) return fail("crossing count not window-stable");
    if (!rep.morseDefined || rep.morseFull != 0) return fail("hessian index nonzero");
    if (!rep.morseStable) return fail("hessian index not window-stable");
    for (const auto& w : rep.intervalTrace)
        if (!w.ok || w.hessian != 0 || w.maslovMinusTwo != 0) return fail("nonzero trace window");
    if (!rep.indicesAllZero || !*rep.indicesAllZero) return fail("vanishing-index verdict unset or false");
    if (!rep.allSetVerdictsHold()) return fail("a set verdict is false");
    return true;
}

// ---------------------------------------------------------------------------
// 1. collapse thresholds by bisection on the discriminant

inline std::pair<bool, std::string> critThresholds(const AcceptanceOptions&) {
    auto dAniso = [](double mu) { return AnglePotential::anisotropic(1.0, mu).delta(PI / 2); };
    auto dIso = [](double m) { return AnglePotential::isosceles(1.0, m).delta(0.0); };
    double muStar = bisectRoot(dAniso, 1.01, 1.5, 1e-13);
    double mStar = bisectRoot(dIso, 0.02, 0.3, 1e-13);
    double errMu = std::fabs(muStar - 1.125);
    double errM = std::fabs(mStar - 4.0 / 55.0);
    bool ok = errMu <= 1e-9 && errM <= 1e-9;
    return {ok, vfmt("mu*=%.12f (err %.1e), m*=%.12f (err %.1e), tol 1e-9", muStar, errMu,
                     mStar, errM)};
}

// ---------------------------------------------------------------------------
// 2. energy-shell residual and radial-velocity monotonicity on manifold orbits

inline std::pair<bool, std::string> critShell(const AcceptanceOptions& ao) {
    struct Seed {
        double mu, alpha, theta;
        int sign;
    };
    std::vector<Seed> seeds;
    for (double mu : {1.05, 1.2, 2.0})
        for (double alpha : {0.5, 1.0, 1.5})
            for (double theta : {0.0, PI})
                for (int sign : {+1, -1}) seeds.push_back({mu, alpha, theta, sign});

    // residual and worst per-sample v decrement over the first 100 units of
    // each shot orbit; the off-shell defect of a raw 4-variable integration
    // obeys E' = alpha v E and is unusable over this span, so orbits are shot
    // in torus coordinates and (u, v) reconstructed through the shell identity
    std::vector<double> res(seeds.size(), 0.0), drop(seeds.size(), 0.0);
    std::vector<char> shot(seeds.size(), 0);
    parallelFor(seeds.size(), ao.threads, [&](std::size_t i) {
        const Seed& s = seeds[i];
        AnglePotential pot = AnglePotential::anisotropic(s.alpha, s.mu);
        Equilibrium eq = makeEquilibrium(pot, -PI / 2, s.theta);
        ShootSettings st;
        st.halvedEpsCheck = false;
        auto out = shootHeteroclinic(pot, findEquilibria(pot), eq, s.sign, st);
        if (!out.converged) return;
        const HeteroclinicOrbit& o = *out.orbit;
        shot[i] = 1;
        double hi = std::min(o.tauMax, o.tauMin + 100.0);
        double worstRes = 0, worstDrop = 0, prevV = 0;
        for (int k = 0; k <= 2000; k++) {
            double tau = o.tauMin + (hi - o.tauMin) * k / 2000;
            double u = o.u(tau), v = o.v(tau);
            Eigen::Vector2d ps = o.state(tau);
            worstRes = std::max(worstRes, std::fabs(u * u + v * v - 2 * pot.value(ps[1])));
            if (k) worstDrop = std::min(worstDrop, v - prevV);
            prevV = v;
        }
        res[i] = worstRes;
        drop[i] = worstDrop;
    });
    std::size_t n = 0;
    for (char c : shot) n += c;
    double worstRes = *std::max_element(res.begin(), res.end());
    double worstDrop = *std::min_element(drop.begin(), drop.end());
    bool ok = n >= 20 && worstRes < 1e-6 && worstDrop >= -1e-10;
    return {ok, vfmt("%zu orbits shot, max shell residual %.2e (tol 1e-6), worst v step %.2e "
                     "(floor -1e-10)",
                     n, worstRes, worstDrop)};
}

// ---------------------------------------------------------------------------
// 3. turning points match vertical crossings on a mixed connection roster

inline std::pair<bool, std::string> critZeroCrossings(const AcceptanceOptions& ao) {
    std::vector<HeteroclinicOrbit> orbits;
    for (double mu : {1.05, 2.0}) {
        AnglePotential pot = AnglePotential::anisotropic(1.0, mu);
        auto eqs = findEquilibria(pot);
        for (const auto& eq : eqs) {
            if (!shootableSource(eq)) continue;
            for (int sign : {+1, -1}) {
                ShootSettings st;
                st.halvedEpsCheck = false;
                auto out = shootHeteroclinic(pot, eqs, eq, sign, st);
                if (out.converged) orbits.push_back(std::move(*out.orbit));
            }
        }
    }
    // the reversed view of every ejection orbit is a capture orbit
    std::size_t forward = orbits.size();
    for (std::size_t i = 0; i < forward; i++)
        if (orbits[i].type == HetType::II) orbits.push_back(reverseOrbit(orbits[i]));

    int seenI = 0, seenII = 0, seenIII = 0;
    bool hyperbolicRegime = false, focusRegime = false;
    for (const auto& o : orbits) {
        seenI += o.type == HetType::I;
        seenII += o.type == HetType::II;
        seenIII += o.type == HetType::III;
        (std::min(o.source.delta, o.sink.delta) > 0 ? hyperbolicRegime : focusRegime) = true;
    }

    std::vector<int> zeros(orbits.size()), crossings(orbits.size());
    parallelFor(orbits.size(), ao.threads, [&](std::size_t i) {
        const HeteroclinicOrbit& o = orbits[i];
        LinearFlowCache cache(o);
        // beyond two units past the locks the raw spanning directions of the
        // solution plane go parallel, so the comparison is windowed
        double lo = std::max(o.tauMin + 0.25, o.tauSourceAsym() - 2);
        double hi = std::min(o.tauMax - 0.25, o.tauSinkAsym() + 2);
        int z = 0;
        for (double t : o.uZeros) z += (t >= lo && t <= hi) ? 1 : 0;
        zeros[i] = z;
        crossings[i] = maslovCount(LagrangianFrame::vertical(2), cache.etaPath(), lo, hi,
                                   symplecticJ(2))
                           .count;
    });
    int mismatch = 0;
    for (std::size_t i = 0; i < orbits.size(); i++) mismatch += zeros[i] != crossings[i];
    bool ok = orbits.size() >= 10 && mismatch == 0 && seenI && seenII && seenIII &&
              hyperbolicRegime && focusRegime;
    return {ok, vfmt("%zu orbits (I/II/III = %d/%d/%d, both discriminant regimes %s), "
                     "%d count mismatches",
                     orbits.size(), seenI, seenII, seenIII,
                     hyperbolicRegime && focusRegime ? "covered" : "NOT covered", mismatch)};
}

// ---------------------------------------------------------------------------
// 4. finite-element index + 2 equals transported-plane crossing count on
//    nested windows

inline std::pair<bool, std::string> critWindowTrace(const AcceptanceOptions& ao) {
    struct Case {
        AnglePotential pot;
        double psi, theta;
    };
    std::vector<Case> cases = {
        {AnglePotential::anisotropic(1.0, 1.05), -PI / 2, 0.0},
        {AnglePotential::anisotropic(1.0, 1.1), -PI / 2, -PI / 2},
        {AnglePotential::anisotropic(1.0, 2.0), PI / 2, 0.0},
        {AnglePotential::anisotropic(1.0, 2.0), -PI / 2, PI / 2},
        {AnglePotential::keplerConstant(1.0, 1.0), -PI / 2, 0.0},
    };
    std::vector<char> okv(cases.size(), 0);
    std::vector<std::string> notes(cases.size());
    parallelFor(cases.size(), ao.threads, [&](std::size_t i) {
        const Case& c = cases[i];
        std::vector<Equilibrium> eqs;
        if (c.pot.kind() != AnglePotential::Kind::keplerConstant) eqs = findEquilibria(c.pot);
        Equilibrium src = makeEquilibrium(c.pot, c.psi, c.theta);
        ShootSettings st;
        st.halvedEpsCheck = false;
        auto out = shootHeteroclinic(c.pot, eqs, src, +1, st);
        if (!out.converged) {
            notes[i] = "shot failed: " + out.note;
            return;
        }
        IndexReport rep = verifyTheorems(*out.orbit);
        bool good = rep.intervalTrace.size() == 3 && rep.morseIndexTheoremHolds &&
                    *rep.morseIndexTheoremHolds;
        std::string w;
        for (const auto& wc : rep.intervalTrace) {
            good = good && wc.ok && wc.hessian == wc.maslovMinusTwo;
            w += vfmt("%s%d=%d", w.empty() ? "" : ",", wc.hessian, wc.maslovMinusTwo);
        }
        okv[i] = good;
        notes[i] = w;
    });
    bool ok = true;
    std::string joined;
    for (std::size_t i = 0; i < cases.size(); i++) {
        ok = ok && okv[i];
        joined += (i ? "; " : "") + notes[i];
    }
    return {ok, vfmt("5 orbits x 3 windows, hessian=crossings-2 per window: %s", joined.c_str())};
}

// ---------------------------------------------------------------------------
// 5. gap between hessian index and turning-point count on hyperbolic
//    parabolic connections

inline std::pair<bool, std::string> critIndexGap(const AcceptanceOptions& ao) {
    struct Shot {
        double mu;
        Equilibrium src;
        int sign;
    };
    std::vector<Shot> shots;
    for (double mu : {1.05, 1.1}) {
        AnglePotential pot = AnglePotential::anisotropic(1.0, mu);
        auto eqs = findEquilibria(pot);
        for (const auto& eq : eqs) {
            if (!shootableSource(eq)) continue;
            for (int sign : {+1, -1}) shots.push_back({mu, eq, sign});
        }
    }
    std::vector<int> verdict(shots.size(), -1);  // -1 skip, 0 fail, 1 pass
    std::vector<std::string> notes(shots.size());
    std::atomic<int> typeOne{0}, minimizerSources{0};
    parallelFor(shots.size(), ao.threads, [&](std::size_t i) {
        const Shot& s = shots[i];
        AnglePotential pot = AnglePotential::anisotropic(1.0, s.mu);
        auto eqs = findEquilibria(pot);
        ShootSettings st;
        st.halvedEpsCheck = false;
        auto out = shootHeteroclinic(pot, eqs, s.src, s.sign, st);
        if (!out.converged || out.orbit->type != HetType::I) return;
        typeOne++;
        IndexOptions io;
        io.traceWindows = 0;  // the gap check needs the global indices only
        IndexReport rep = verifyTheorems(*out.orbit, io);
        bool srcMin = s.src.uDd > 0;
        minimizerSources += srcMin;
        int gap = rep.morseFull - rep.oscillation.count;
        bool good = !rep.oscillation.saturated && rep.morseDefined && rep.morseStable &&
                    (gap == 0 || gap == 1) && (!srcMin || gap == 0);
        verdict[i] = good;
        notes[i] = vfmt("mu=%.2f th=%.2f%+d: i=%d m=%d gap=%d%s", s.mu, s.src.theta0, s.sign,
                        rep.oscillation.count, rep.morseFull, gap, srcMin ? " min-src" : "");
    });
    int pass = 0, fail = 0;
    std::string firstBad;
    for (std::size_t i = 0; i < shots.size(); i++) {
        if (verdict[i] < 0) continue;
        if (verdict[i]) pass++;
        else {
            fail++;
            if (firstBad.empty()) firstBad = notes[i];
        }
    }
    bool ok = typeOne >= 8 && fail == 0 && minimizerSources >= 4;
    return {ok, vfmt("%d parabolic connections (%d with minimizer source), %d gap failures%s%s",
                     typeOne.load(), minimizerSources.load(), fail,
                     firstBad.empty() ? "" : ", first: ", firstBad.c_str())};
}

// ---------------------------------------------------------------------------
// 6. a minimizer-to-minimizer connection has vanishing indices.  Four equal
//    wells pin a codimension-one saddle connection; bisecting the well depth
//    across a sink-basin change lands on it.

inline std::pair<bool, std::string> critMinimizerConnection(const AcceptanceOptions& ao) {
    auto quadWell = [](double a) {
        return AnglePotential::fourier(1.0, std::vector<double>{0, 0, 0, -a},
                                       std::vector<double>{}, 1.0);
    };
    auto sourceOf = [](const std::vector<Equilibrium>& eqs) -> const Equilibrium& {
        for (const auto& e : eqs)
            if (sameAngle(e.psi0, -PI / 2, 1e-6) && sameAngle(e.theta0, 0.0, 1e-6)) return e;
        throw Error("seed rest point missing");
    };
    // sink basin of the + branch, read off a raw integration that needs no
    // lock: which focus neighbourhood the orbit enters first
    auto channel = [&](double a) -> int {
        AnglePotential pot = quadWell(a);
        auto eqs = findEquilibria(pot);
        const Equilibrium& src = sourceOf(eqs);
        Eigen::Vector2d y0(src.psi0 + 1e-6 * src.ePlus[0], src.theta0 + 1e-6 * src.ePlus[1]);
        auto rhs = [&pot](double, const Eigen::Vector2d& y) { return collisionRhs(pot, y); };
        OdeOptions<Eigen::Vector2d> opt;
        opt.rtol = opt.atol = 1e-11;
        opt.hMax = 0.25;
        OdeEvent<Eigen::Vector2d> basin;
        basin.g = [&eqs](double, const Eigen::Vector2d& y) {
            double dmin = std::numeric_limits<double>::infinity();
            for (const auto& eq : eqs)
                if (eq.cls == EqClass::stableFocus)
                    dmin = std::min(dmin, std::hypot(angleDist(y[0], eq.psi0),
                                                     angleDist(y[1], eq.theta0)));
            return dmin - 0.3;
        };
        basin.direction = -1;
        basin.stop = true;
        opt.events.push_back(basin);
        auto sol = integrate(rhs, 0.0, 600.0, y0, opt);
        if (sol.reason != StopReason::eventStop) throw Error("no basin entry within the span");
        return static_cast<int>(std::lround(wrapAngle(sol.y.back()[1]) / (PI / 4)));
    };

    int found = 0, reportsOk = 0;
    std::string note;
    for (auto [lo, hi] : {std::pair{0.15, 0.20}, std::pair{0.55, 0.60}}) {
        int keyLo = channel(lo);
        if (channel(hi) == keyLo) {
            note += vfmt("[%.2f,%.2f] no basin change; ", lo, hi);
            continue;
        }
        for (int it = 0; it < 80 && hi - lo > 1e-16 * std::max(1.0, lo); it++) {
            double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (channel(mid) == keyLo ? lo : hi) = mid;
        }
        // across the basin change the branch tracks the stable line of the
        // saddle over the intervening well; a short post-lock extension keeps
        // the near-connection from escaping before the run ends.  Turning
        // points recorded at or past the lock sit below the lock radius and
        // are escape artifacts of the residual miss, so those shots are
        // rejected in favour of the bracket endpoint that escapes forward.
        std::optional<HeteroclinicOrbit> hit;
        for (double ext : {2.0, 1.0, 0.5}) {
            for (double a : {0.5 * (lo + hi), lo, hi}) {
                AnglePotential pot = quadWell(a);
                auto eqs = findEquilibria(pot);
                ShootSettings st;
                st.halvedEpsCheck = false;
                st.extendTau = ext;
                try {
                    auto out = shootHeteroclinic(pot, eqs, sourceOf(eqs), +1, st);
                    if (!out.converged || out.orbit->sink.cls != EqClass::saddle ||
                        out.orbit->sink.uDd <= 0 ||
                        !sameAngle(out.orbit->sink.psi0, PI / 2, 1e-6))
                        continue;
                    bool tainted = false;
                    for (double z : out.orbit->uZeros) tainted |= z >= out.orbit->lockTau;
                    if (tainted) continue;
                    hit = std::move(out.orbit);
                    break;
                } catch (const Error&) {
                    // near-miss escaped during the extension: tighten further
                }
            }
            if (hit) break;
        }
        if (!hit) {
            note += vfmt("[%g,%g] basin change at %.12g but no saddle lock; ", lo, hi,
                         0.5 * (lo + hi));
            continue;
        }
        found++;
        const HeteroclinicOrbit& o = *hit;
        auto cps = criticalPoints(o.pot);
        auto wellAt = [&](double theta0) {
            for (const auto& cp : cps.points)
                if (sameAngle(cp.theta0, theta0, 1e-6)) return cp.globalMin && !cp.degenerate;
            return false;
        };
        bool endpointsOk =
            o.type == HetType::I && wellAt(o.source.theta0) && wellAt(o.sink.theta0);
        std::string why;
        bool fwdOk = zeroIndexReport(verifyTheorems(o), why);
        if (!fwdOk) note += vfmt("a=%.12g forward: %s; ", 0.5 * (lo + hi), why.c_str());
        bool revOk = zeroIndexReport(verifyTheorems(reverseOrbit(o)), why);
        if (!revOk) note += vfmt("a=%.12g reversed: %s; ", 0.5 * (lo + hi), why.c_str());
        if (endpointsOk && fwdOk && revOk) reportsOk++;
        note += vfmt("a=%.12g well %.2f -> well %.2f zeros=%zu; ", 0.5 * (lo + hi),
                     o.source.theta0, o.sink.theta0, o.uZeros.size());
    }
    bool ok = found == 2 && reportsOk == 2;
    return {ok, vfmt("%d saddle connections, %d with all indices zero both ways: %s", found,
                     reportsOk, note.c_str())};
}

// ---------------------------------------------------------------------------
// 7. focus endpoints saturate the turning-point cap and the finite-element
//    count grows strictly across nested windows

inline std::pair<bool, std::string> critSaturation(const AcceptanceOptions& ao) {
    AnglePotential pot = AnglePotential::anisotropic(1.0, 2.0);
    auto eqs = findEquilibria(pot);
    Equilibrium src = makeEquilibrium(pot, PI / 2, 0.0);
    std::vector<char> okv(2, 0);
    std::vector<std::string> notes(2);
    parallelFor(2, ao.threads, [&](std::size_t i) {
        int sign = i == 0 ? +1 : -1;
        ShootSettings st;
        st.halvedEpsCheck = false;
        auto out = shootHeteroclinic(pot, eqs, src, sign, st);
        if (!out.converged) {
            notes[i] = "shot failed: " + out.note;
            return;
        }
        const HeteroclinicOrbit& o = *out.orbit;
        OscillationIndex osc = oscillationIndex(o, 50);
        if (!osc.saturated || osc.count != 50) {
            notes[i] = vfmt("no saturation: count=%d", osc.count);
            return;
        }
        auto lift = liftZeroEnergy(
            o.pot, [&](double tau) { return o.state(tau); }, o.tauMin, o.tauMax, 1.0,
            0.5 * (o.tauMin + o.tauMax));
        // windows end midway between consecutive turning points, so each
        // extension adds exactly one conjugate event
        std::vector<int> counts;
        std::size_t nz = o.uZeros.size();
        double t1 = o.tauMin + 0.3;
        for (std::size_t k = (nz >= 7 ? nz - 7 : 0); k + 1 < nz; k++) {
            double t2 = 0.5 * (o.uZeros[k] + o.uZeros[k + 1]);
            if (t2 > lift.tauHi - 0.05) break;
            counts.push_back(morseByHessian(o, lift, t1, t2, 2000));
        }
        bool increasing = counts.size() >= 5;
        for (std::size_t k = 0; k + 1 < counts.size(); k++)
            increasing = increasing && counts[k + 1] > counts[k];
        okv[i] = increasing;
        std::string w;
        for (int c : counts) w += vfmt("%s%d", w.empty() ? "" : ",", c);
        notes[i] = vfmt("SATURATED(50), windows [%s]", w.c_str());
    });
    bool ok = okv[0] && okv[1];
    return {ok, vfmt("branch +: %s | branch -: %s", notes[0].c_str(), notes[1].c_str())};
}

// ---------------------------------------------------------------------------
// 8. homothetic negative-eigenvalue counts against the closed-form spectrum

inline std::pair<bool, std::string> critHomothetic(const AcceptanceOptions&) {
    const double Ls[] = {1, 10, 100};
    bool ok = true;
    std::string note;

    // flat and positive-discriminant directions stay index zero at every L
    AnglePotential aniso = AnglePotential::anisotropic(1.0, 2.0);
    AnglePotential kepler = AnglePotential::keplerConstant(1.0, 1.0);
    for (double L : Ls) {
        int c1 = homotheticMorse(aniso, 0.0, L);
        int c2 = homotheticMorse(kepler, 0.7, L);
        ok = ok && c1 == 0 && c2 == 0;
    }
    note += "nonnegative discriminant: all zero; ";

    // negative discriminant: count tracks floor(L sqrt(-delta) / 2pi)
    struct Neg {
        AnglePotential pot;
        double theta0;
        const int* frozen;  ///< pinned counts for the frozen instance, or null
    };
    static const int frozenAniso[] = {0, 2, 29};
    std::vector<Neg> negs;
    negs.push_back({aniso, PI / 2, frozenAniso});
    negs.push_back({AnglePotential::isosceles(1.0, 0.1), 0.0, nullptr});
    for (const Neg& n : negs) {
        double delta = n.pot.delta(n.theta0);
        if (!(delta < 0)) {
            ok = false;
            note += vfmt("expected negative discriminant at theta=%.2f; ", n.theta0);
            continue;
        }
        for (int j = 0; j < 3; j++) {
            double L = Ls[j];
            int oracle = homotheticNegativeCount(L, delta);
            int fe = homotheticMorse(n.pot, n.theta0, L);
            ok = ok && std::abs(fe - oracle) <= 1;
            if (n.frozen) ok = ok && oracle == n.frozen[j];
            note += vfmt("L=%g: fe=%d oracle=%d; ", L, fe, oracle);
        }
    }
    return {ok, note};
}

// ---------------------------------------------------------------------------
// 9. constant-profile parabolic connections carry zero index everywhere

inline std::pair<bool, std::string> critConstantProfile(const AcceptanceOptions& ao) {
    const double masses[] = {0.5, 1.0, 2.0};
    std::vector<char> okv(3, 0);
    std::vector<std::string> notes(3);
    parallelFor(3, ao.threads, [&](std::size_t i) {
        AnglePotential pot = AnglePotential::keplerConstant(1.0, masses[i]);
        Equilibrium src = makeEquilibrium(pot, -PI / 2, 0.0);
        ShootSettings st;
        st.halvedEpsCheck = false;
        auto out = shootHeteroclinic(pot, {}, src, +1, st);
        if (!out.converged) {
            notes[i] = "shot failed: " + out.note;
            return;
        }
        std::string why;
        bool good = zeroIndexReport(verifyTheorems(*out.orbit), why);
        okv[i] = good;
        notes[i] = vfmt("m=%.1f: %s", masses[i], good ? "all zero" : why.c_str());
    });
    bool ok = okv[0] && okv[1] && okv[2];
    return {ok, notes[0] + "; " + notes[1] + "; " + notes[2]};
}

// ---------------------------------------------------------------------------
// 10. crossing-count axioms on randomized paths and the four-plane bound

/// geodesic between two frames, usable as a path functor
struct GeoPath {
    LagrangianGeodesic geo;
    LagrangianFrame operator()(double t) const { return geo.at(t); }
};

inline std::pair<bool, std::string> critPathAxioms(const AcceptanceOptions& ao) {
    const int N = 200;
    enum { Reparam, Split, Symplectic, Blocks, Swap, Bound, NProps };
    static const char* propNames[] = {"reparametrization", "split",  "symplectic",
                                      "block-sum",         "swap",   "bound"};
    std::array<std::atomic<int>, NProps> fails{};
    Eigen::MatrixXd J2 = symplecticJ(2), J1 = symplecticJ(1);
    LagrangianFrame vd1 = LagrangianFrame::vertical(1);

    parallelFor(static_cast<std::size_t>(N) * NProps, ao.threads, [&](std::size_t idx) {
        int prop = static_cast<int>(idx / N);
        int k = static_cast<int>(idx % N);
        std::mt19937_64 gen(splitmix64(ao.seed + 1000003ull * prop + k));
        auto transversalPair = [&](int n, const Eigen::MatrixXd& J, LagrangianFrame& ref,
                                   GeoPath& path) {
            for (int tries = 0; tries < 32; tries++) {
                ref = randomLagrangianFrame(n, gen);
                LagrangianFrame A = randomLagrangianFrame(n, gen);
                LagrangianFrame B = randomLagrangianFrame(n, gen);
                if (intersectionDim(ref.matrix(), A.matrix(), J) == 0 &&
                    intersectionDim(ref.matrix(), B.matrix(), J) == 0) {
                    path = GeoPath{LagrangianGeodesic(A, B)};
                    return;
                }
            }
            throw Error("no transversal endpoints after 32 draws");
        };
        bool good = false, settled = false;
        for (int attempt = 0; attempt < 8 && !settled; attempt++) {
            try {
                switch (prop) {
                    case Reparam: {
                        LagrangianFrame ref = vd1;
                        GeoPath path{LagrangianGeodesic(vd1, vd1)};
                        transversalPair(2, J2, ref, path);
                        int direct = maslovCount(ref, path, 0.0, 1.0, J2).count;
                        const double scale = std::exp(3.0) - 1;
                        auto warped = [&](double s) {
                            return path((std::exp(3.0 * s) - 1) / scale);
                        };
                        good = maslovCount(ref, warped, 0.0, 1.0, J2).count == direct;
                        break;
                    }
                    case Split: {
                        LagrangianFrame ref = vd1;
                        GeoPath path{LagrangianGeodesic(vd1, vd1)};
                        transversalPair(2, J2, ref, path);
                        std::uniform_real_distribution<double> Uc(0.2, 0.8);
                        double c = Uc(gen);
                        int guard = 0;
                        while (intersectionDim(ref.matrix(), path(c).matrix(), J2) != 0 &&
                               guard++ < 32)
                            c = Uc(gen);
                        int whole = maslovCount(ref, path, 0.0, 1.0, J2).count;
                        int left = maslovCount(ref, path, 0.0, c, J2).count;
                        int right = maslovCount(ref, path, c, 1.0, J2).count;
                        good = whole == left + right;
                        break;
                    }
                    case Symplectic: {
                        LagrangianFrame ref = vd1;
                        GeoPath path{LagrangianGeodesic(vd1, vd1)};
                        transversalPair(2, J2, ref, path);
                        Eigen::MatrixXd G(4, 4);
                        std::normal_distribution<double> Z(0.0, 0.5);
                        for (int r = 0; r < 4; r++)
                            for (int c = 0; c < 4; c++) G(r, c) = Z(gen);
                        Eigen::MatrixXd S = 0.5 * (G + G.transpose());
                        Eigen::MatrixXd M = (J2 * S).exp();  // exp(J S) is symplectic
                        LagrangianFrame refM = LagrangianFrame::fromColumns(M * ref.matrix());
                        auto pathM = [&](double t) {
                            return LagrangianFrame::fromColumns(M * path(t).matrix());
                        };
                        good = maslovCount(refM, pathM, 0.0, 1.0, J2).count ==
                               maslovCount(ref, path, 0.0, 1.0, J2).count;
                        break;
                    }
                    case Blocks: {
                        LagrangianFrame r1 = vd1, r2 = vd1;
                        GeoPath p1{LagrangianGeodesic(vd1, vd1)}, p2Path = p1;
                        transversalPair(1, J1, r1, p1);
                        transversalPair(1, J1, r2, p2Path);
                        auto embed = [](const LagrangianFrame& a, const LagrangianFrame& b) {
                            Eigen::MatrixXd cols(4, 2);
                            cols.col(0) = embedBlock1(Eigen::Vector2d(a.matrix().col(0)));
                            cols.col(1) = embedBlock2(Eigen::Vector2d(b.matrix().col(0)));
                            return LagrangianFrame::fromColumns(cols);
                        };
                        LagrangianFrame refSum = embed(r1, r2);
                        auto pathSum = [&](double t) { return embed(p1(t), p2Path(t)); };
                        int total = maslovCount(refSum, pathSum, 0.0, 1.0, J2).count;
                        int parts = maslovCount(r1, p1, 0.0, 1.0, J1).count +
                                    maslovCount(r2, p2Path, 0.0, 1.0, J1).count;
                        good = total == parts;
                        break;
                    }
                    case Swap: {
                        GeoPath p1{LagrangianGeodesic(vd1, vd1)}, p2 = p1;
                        int guard = 0;
                        for (;; guard++) {
                            if (guard >= 32) throw Error("no transversal endpoints");
                            p1 = GeoPath{LagrangianGeodesic(randomLagrangianFrame(2, gen),
                                                            randomLagrangianFrame(2, gen))};
                            p2 = GeoPath{LagrangianGeodesic(randomLagrangianFrame(2, gen),
                                                            randomLagrangianFrame(2, gen))};
                            if (intersectionDim(p1(0.0).matrix(), p2(0.0).matrix(), J2) == 0 &&
                                intersectionDim(p1(1.0).matrix(), p2(1.0).matrix(), J2) == 0)
                                break;
                        }
                        int dimA = intersectionDim(p1(0.0).matrix(), p2(0.0).matrix(), J2);
                        int dimB = intersectionDim(p1(1.0).matrix(), p2(1.0).matrix(), J2);
                        int oneTwo = relativeMaslov(p1, p2, 0.0, 1.0).count;
                        int twoOne = relativeMaslov(p2, p1, 0.0, 1.0).count;
                        good = oneTwo == dimA - dimB - twoOne;
                        break;
                    }
                    case Bound: {
                        LagrangianFrame V0 = randomLagrangianFrame(2, gen);
                        LagrangianFrame V1 = randomLagrangianFrame(2, gen);
                        LagrangianFrame L0 = randomLagrangianFrame(2, gen);
                        LagrangianFrame L1 = randomLagrangianFrame(2, gen);
                        good = std::abs(hormanderIndex(V0, V1, L0, L1)) <= 4;
                        break;
                    }
                }
                settled = true;
            } catch (const Error&) {
                // tangential or ill-posed draw: resample from the same stream
            }
        }
        if (!settled || !good) fails[prop]++;
    });
    bool ok = true;
    std::string note;
    for (int p = 0; p < NProps; p++) {
        ok = ok && fails[p] == 0;
        note += vfmt("%s%s %d/%d", p ? ", " : "", propNames[p], N - fails[p].load(), N);
    }
    return {ok, note};
}

struct CriterionSpec {
    int id;
    const char* name;
    std::pair<bool, std::string> (*fn)(const AcceptanceOptions&);
};

inline const std::array<CriterionSpec, 10>& criteria() {
    static const std::array<CriterionSpec, 10> table = {{
        {1, "collapse thresholds by bisection", critThresholds},
        {2, "energy-shell residual and v-monotonicity", critShell},
        {3, "turning points match vertical crossings", critZeroCrossings},
        {4, "windowed hessian index equals crossing count", critWindowTrace},
        {5, "index gap on hyperbolic parabolic connections", critIndexGap},
        {6, "minimizer-to-minimizer connection has zero indices", critMinimizerConnection},
        {7, "focus saturation with strictly growing windows", critSaturation},
        {8, "homothetic negative-eigenvalue spectrum", critHomothetic},
        {9, "constant-profile parabolic connections are index-free", critConstantProfile},
        {10, "crossing-count axioms and four-plane bound", critPathAxioms},
    }};
    return table;
}

}  // namespace detail

inline CriterionResult runCriterion(int id, const AcceptanceOptions& opt = {}) {
    CriterionResult r;
    r.id = id;
    for (const auto& spec : detail::criteria()) {
        if (spec.id != id) continue;
        r.name = spec.name;
        auto t0 = std::chrono::steady_clock::now();
        try {
            auto [pass, detail] = spec.fn(opt);
            r.pass = pass;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }
    r.name = "unknown criterion";
    r.detail = "no such id";
    return r;
}

inline std::vector<CriterionResult> runAcceptance(const AcceptanceOptions& opt = {},
                                                  std::vector<int> only = {}) {
    if (only.empty())
        for (const auto& spec : detail::criteria()) only.push_back(spec.id);
    std::vector<CriterionResult> out;
    out.reserve(only.size());
    for (int id : only) out.push_back(runCriterion(id, opt));
    return out;
}

}  // namespace parindex
