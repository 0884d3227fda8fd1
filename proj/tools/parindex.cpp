// parindex: command-line front end over the header library.  Subcommands
// compute equilibrium atlases, phase-portrait polylines, orbit dumps, index
// reports, homothetic spectra, parameter sweeps, and the acceptance run.
// Artifacts land in the config output directory, written atomically, each
// JSON stamped with the schema tag, config hash, and RNG seed; identical
// configs reproduce identical bytes.
#include <CLI11.hpp>

#include <parindex/io.hpp>
#include <parindex/verify.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace parindex;
using parindex::detail::vfmt;

namespace {

// exit codes: 0 success, 1 usage, 2 config, 3 computation did not produce
// the requested artifact
constexpr int EXIT_USAGE = 1, EXIT_CONFIG = 2, EXIT_RUNTIME = 3;

struct GlobalArgs {
    std::string configPath;
    std::string outDir;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
};

RunConfig loadConfig(const GlobalArgs& g) {
    RunConfig rc;
    if (!g.configPath.empty()) rc = runConfigFromJson(parseJsonFile(g.configPath));
    if (g.seed) rc.seed = *g.seed;
    if (g.tol) {
        if (!(*g.tol > 0 && *g.tol <= 1e-4))
            throw ConfigError("--tol must lie in (0, 1e-4]");
        rc.tol = *g.tol;
    }
    if (!g.outDir.empty()) rc.outDir = g.outDir;
    return rc;
}

void writeJson(const RunConfig& rc, const char* name, Json j) {
    stampMeta(j, rc);
    atomicWrite(fs::path(rc.outDir) / name, j.dump(2) + "\n");
}

void writeText(const RunConfig& rc, const char* name, const std::string& body) {
    atomicWrite(fs::path(rc.outDir) / name, body);
}

std::string cfmt(const std::complex<double>& z) {
    if (z.imag() == 0) return vfmt("%+.6f", z.real());
    return vfmt("%+.6f%+.6fi", z.real(), z.imag());
}

// ---------------------------------------------------------------------------

int cmdEquilibria(const RunConfig& rc) {
    std::vector<Equilibrium> eqs;
    try {
        eqs = findEquilibria(rc.pot);
    } catch (const ContinuumEquilibria& e) {
        std::printf("%s\n", e.what());
        Json j;
        j["continuum"] = true;
        j["notice"] = e.what();
        j["potential"] = potentialToJson(rc.pot);
        writeJson(rc, "equilibria.json", std::move(j));
        return 0;
    }
    std::printf("%8s %8s  %-13s %-20s %-20s %12s\n", "psi0", "theta0", "class", "lambda-",
                "lambda+", "delta");
    for (const Equilibrium& eq : eqs)
        std::printf("%+8.4f %+8.4f  %-13s %-20s %-20s %+12.6f\n", eq.psi0, eq.theta0,
                    className(eq.cls), cfmt(eq.lambdaMinus).c_str(), cfmt(eq.lambdaPlus).c_str(),
                    eq.delta);
    Json j;
    j["continuum"] = false;
    j["potential"] = potentialToJson(rc.pot);
    Json arr = Json::array();
    for (const Equilibrium& eq : eqs) arr.push_back(equilibriumToJson(eq));
    j["equilibria"] = arr;
    writeJson(rc, "equilibria.json", std::move(j));
    return 0;
}

// ---------------------------------------------------------------------------

int cmdPortrait(const RunConfig& rc, int gridPsi, int gridTheta, double span, bool svg,
                unsigned threads) {
    std::vector<Eigen::Vector2d> seeds;
    for (int i = 0; i < gridPsi; i++)
        for (int j = 0; j < gridTheta; j++)
            seeds.push_back({-PI + 2 * PI * (i + 0.5) / gridPsi,
                             -PI + 2 * PI * (j + 0.5) / gridTheta});

    // forward and backward strokes per seed; failed seeds leave gaps but do
    // not abort the portrait
    std::vector<Polyline> lines(2 * seeds.size());
    std::vector<std::string> failures(seeds.size());
    parindex::detail::parallelFor(seeds.size(), threads, [&](std::size_t i) {
        auto rhs = [&](double, const Eigen::Vector2d& y) { return collisionRhs(rc.pot, y); };
        OdeOptions<Eigen::Vector2d> opt;
        opt.rtol = opt.atol = rc.tol;
        opt.hMax = 0.25;
        for (int dir = 0; dir < 2; dir++) {
            try {
                auto sol = integrate(rhs, 0.0, dir ? -span : span, seeds[i], opt);
                Polyline& pl = lines[2 * i + dir];
                for (std::size_t k = 0; k < sol.t.size(); k++)
                    pl.pts.push_back({sol.y[k][1], sol.y[k][0]});
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    });
    std::size_t failed = 0;
    for (std::size_t i = 0; i < seeds.size(); i++)
        if (!failures[i].empty()) {
            failed++;
            std::fprintf(stderr, "portrait: seed (%.4f, %.4f) skipped: %s\n", seeds[i][0],
                         seeds[i][1], failures[i].c_str());
        }

    std::vector<Equilibrium> eqs;
    try {
        eqs = findEquilibria(rc.pot);
    } catch (const ContinuumEquilibria&) {
        // constant profile: no isolated rest points to draw
    }
    Json j = portraitToJson(lines, eqs);
    j["span"] = span;
    j["grid"] = {{"psi", gridPsi}, {"theta", gridTheta}};
    writeJson(rc, "portrait.json", std::move(j));
    if (svg) writeText(rc, "portrait.svg", portraitToSvg(lines, eqs));
    std::printf("portrait: %zu seeds, %zu failed, %zu polylines -> %s\n", seeds.size(), failed,
                lines.size(), rc.outDir.c_str());
    return failed == seeds.size() ? EXIT_RUNTIME : 0;
}

// ---------------------------------------------------------------------------

struct OrbitSpec {
    double srcPsi = -PI / 2, srcTheta = 0;
    int sign = +1;
    std::optional<double> homothetic;
};

HeteroclinicOrbit shootFromSpec(const RunConfig& rc, const OrbitSpec& spec) {
    Equilibrium src = makeEquilibrium(rc.pot, spec.srcPsi, spec.srcTheta);
    std::vector<Equilibrium> eqs;
    try {
        eqs = findEquilibria(rc.pot);
    } catch (const ContinuumEquilibria&) {
        // kepler shots resolve the antipodal lock internally
    }
    auto out = shootHeteroclinic(rc.pot, eqs, src, spec.sign, rc.shootSettings());
    if (!out.converged) throw Error("shot did not converge: " + out.note);
    return std::move(*out.orbit);
}

// pure radial motion over a critical angle: the torus point is stationary and
// the lift is elementary, r = e^{v tau}, t = (e^{(1+a/2) v tau} - 1)/((1+a/2) v)
int cmdOrbitHomothetic(const RunConfig& rc, double theta0, int sign, double span) {
    Equilibrium eq = makeEquilibrium(rc.pot, sign > 0 ? PI / 2 : -PI / 2, theta0);
    double b = std::sqrt(2 * eq.uValue), v = sign * b;
    double g = (1 + rc.pot.alpha() / 2) * v;
    CsvBuilder csv({"tau", "psi", "theta", "v", "u", "r", "t"});
    const int n = 512;
    for (int k = 0; k <= n; k++) {
        double tau = span * k / n;
        csv.numericRow({tau, eq.psi0, eq.theta0, v, 0.0, std::exp(v * tau),
                        (std::exp(g * tau) - 1) / g});
    }
    writeText(rc, "orbit.csv", csv.str());
    Json j;
    j["potential"] = potentialToJson(rc.pot);
    j["homothetic"] = true;
    j["branch"] = sign > 0 ? "ejection" : "collision";
    j["equilibrium"] = equilibriumToJson(eq);
    j["radialVelocity"] = v;
    j["tauSpan"] = span;
    j["collisionTime"] = sign > 0 ? Json() : Json(-1 / g);
    writeJson(rc, "orbit.json", std::move(j));
    std::printf("homothetic %s branch at theta0=%.6f: delta=%.6f -> %s\n", sign > 0 ? "ejection"
                : "collision", eq.theta0, eq.delta, rc.outDir.c_str());
    return 0;
}

int cmdOrbit(const RunConfig& rc, const OrbitSpec& spec, double span) {
    if (spec.homothetic) return cmdOrbitHomothetic(rc, *spec.homothetic, spec.sign, span);
    HeteroclinicOrbit o = shootFromSpec(rc, spec);
    auto lift = liftZeroEnergy(
        rc.pot, [&](double tau) { return o.state(tau); }, o.tauMin, o.tauMax, 1.0,
        0.5 * (o.tauMin + o.tauMax), rc.tol);
    writeText(rc, "orbit.csv", orbitCsv(o, &lift));
    Json j = orbitSidecarJson(o, &lift);
    writeJson(rc, "orbit.json", std::move(j));
    std::printf("orbit type %s: (%.4f, %.4f) -> (%.4f, %.4f), %zu turning points, "
                "tau span [%.3f, %.3f] -> %s\n",
                typeName(o.type), o.source.psi0, o.source.theta0, o.sink.psi0, o.sink.theta0,
                o.uZeros.size(), o.tauMin, o.tauMax, rc.outDir.c_str());
    return 0;
}

// ---------------------------------------------------------------------------

Json homotheticJson(const RunConfig& rc, double theta0, const std::vector<double>& lengths) {
    Equilibrium eq = makeEquilibrium(rc.pot, PI / 2, theta0);
    Json j;
    j["potential"] = potentialToJson(rc.pot);
    j["theta0"] = eq.theta0;
    j["delta"] = eq.delta;
    j["unbounded"] = eq.delta < 0;  // negative modes grow linearly with the window
    Json rows = Json::array();
    for (double L : lengths) {
        int fe = homotheticMorse(rc.pot, eq.theta0, L);
        int closed = homotheticNegativeCount(L, eq.delta);
        rows.push_back({{"L", L}, {"morse", fe}, {"closedForm", closed}});
    }
    j["windows"] = rows;
    return j;
}

int cmdHomothetic(const RunConfig& rc, double theta0, std::vector<double> lengths) {
    if (lengths.empty()) lengths = {1, 10, 100};
    Json j = homotheticJson(rc, theta0, lengths);
    std::printf("homothetic theta0=%.6f: delta=%.6f (%s)\n", j["theta0"].get<double>(),
                j["delta"].get<double>(),
                j["unbounded"].get<bool>() ? "count grows with the window" : "index zero");
    std::printf("%10s %8s %12s\n", "L", "morse", "closedForm");
    for (const auto& row : j["windows"])
        std::printf("%10g %8d %12d\n", row["L"].get<double>(), row["morse"].get<int>(),
                    row["closedForm"].get<int>());
    writeJson(rc, "homothetic.json", std::move(j));
    return 0;
}

// ---------------------------------------------------------------------------

int cmdIndices(const RunConfig& rc, const OrbitSpec& spec) {
    if (spec.homothetic) {
        Json j = homotheticJson(rc, *spec.homothetic, {1, 10, 100});
        writeJson(rc, "indices.json", std::move(j));
        std::printf("homothetic index report -> %s\n", rc.outDir.c_str());
        return 0;
    }
    HeteroclinicOrbit o = shootFromSpec(rc, spec);
    IndexReport rep = verifyTheorems(o, rc.indexOptions());
    CsvBuilder trace({"tau1", "tau2", "hessian", "maslovMinusTwo", "ok"});
    for (const WindowCounts& w : rep.intervalTrace)
        trace.row({g17(w.tau1), g17(w.tau2), std::to_string(w.hessian),
                   std::to_string(w.maslovMinusTwo), w.ok ? "1" : "0"});
    writeText(rc, "trace.csv", trace.str());
    Json j = indexReportToJson(rep);
    writeJson(rc, "indices.json", std::move(j));
    std::printf("indices type %s: oscillation=%d%s crossings=%s morse=%s verdicts %s -> %s\n",
                typeName(rep.type), rep.oscillation.count,
                rep.oscillation.saturated ? " (saturated)" : "",
                rep.maslov.defined ? std::to_string(rep.maslov.count).c_str() : "undefined",
                rep.morseDefined ? std::to_string(rep.morseFull).c_str() : "undefined",
                rep.allSetVerdictsHold() ? "hold" : "FAIL", rc.outDir.c_str());
    return rep.errors.empty() || rep.allSetVerdictsHold() ? 0 : EXIT_RUNTIME;
}

// ---------------------------------------------------------------------------

int cmdSweep(const RunConfig& rc, const std::string& par, double from, double to, int steps,
             unsigned threads) {
    Json base = potentialToJson(rc.pot);
    std::string kind = base["kind"].get<std::string>();
    if (par == "mu" && kind != "anisotropic")
        throw ConfigError("--parameter mu requires an anisotropic potential");
    if (par == "m" && kind != "isosceles" && kind != "keplerConstant")
        throw ConfigError("--parameter m requires an isosceles or keplerConstant potential");
    auto potAt = [&](double p) {
        Json d = base;
        d[par == "alpha" ? "alpha" : par == "mu" ? "mu" : "m"] = p;
        return potentialFromJson(d);
    };

    struct Row {
        double theta, delta;
        std::string cls;
        bool globalMin;
        int hom10;
    };
    std::vector<double> params(steps);
    for (int i = 0; i < steps; i++) params[i] = from + (to - from) * i / (steps - 1);
    std::vector<std::vector<Row>> rows(steps);
    std::vector<std::string> failures(steps);
    parindex::detail::parallelFor(steps, threads, [&](std::size_t i) {
        try {
            AnglePotential pot = potAt(params[i]);
            CriticalPointSet cps = criticalPoints(pot);
            if (cps.continuum) {
                double d = pot.delta(0.0);
                rows[i].push_back({0.0, d, "continuum", true, homotheticNegativeCount(10, d)});
                return;
            }
            for (const CriticalPoint& cp : cps.points) {
                Equilibrium eq = makeEquilibrium(pot, PI / 2, cp.theta0);
                rows[i].push_back({cp.theta0, cp.delta, className(eq.cls), cp.globalMin,
                                   homotheticNegativeCount(10, cp.delta)});
            }
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    CsvBuilder csv({par, "theta", "delta", "class", "globalMin", "homotheticMorseL10"});
    for (int i = 0; i < steps; i++) {
        if (!failures[i].empty()) {
            std::fprintf(stderr, "sweep: %s=%.12g skipped: %s\n", par.c_str(), params[i],
                         failures[i].c_str());
            continue;
        }
        for (const Row& r : rows[i])
            csv.row({g17(params[i]), g17(r.theta), g17(r.delta), r.cls,
                     r.globalMin ? "1" : "0", std::to_string(r.hom10)});
    }
    writeText(rc, "sweep.csv", csv.str());

    // refine every discriminant sign change between consecutive steps at the
    // tracked critical angle
    auto deltaNear = [&](double p, double thetaStar) {
        AnglePotential pot = potAt(p);
        CriticalPointSet cps = criticalPoints(pot);
        if (cps.continuum) return pot.delta(0.0);
        double best = 1e300, d = 0;
        for (const CriticalPoint& cp : cps.points) {
            double dist = std::fabs(angleDist(cp.theta0, thetaStar));
            if (dist < best) {
                best = dist;
                d = cp.delta;
            }
        }
        return d;
    };
    Json thresholds = Json::array();
    for (int i = 0; i + 1 < steps; i++) {
        if (!failures[i].empty() || !failures[i + 1].empty()) continue;
        for (const Row& r : rows[i]) {
            const Row* match = nullptr;
            for (const Row& s : rows[i + 1])
                if (std::fabs(angleDist(s.theta, r.theta)) < 1e-4) match = &s;
            if (!match || !(r.delta * match->delta < 0)) continue;
            double root = parindex::detail::bisectRoot(
                [&](double p) { return deltaNear(p, r.theta); }, params[i], params[i + 1],
                1e-12);
            thresholds.push_back({{"theta", r.theta}, {par, root}});
            std::printf("threshold: delta(%.6f) = 0 at %s = %.12f\n", r.theta, par.c_str(),
                        root);
        }
    }
    Json j;
    j["parameter"] = par;
    j["range"] = {from, to};
    j["steps"] = steps;
    j["thresholds"] = thresholds;
    writeJson(rc, "sweep.json", std::move(j));
    std::printf("sweep: %d steps -> %s\n", steps, rc.outDir.c_str());
    return 0;
}

// ---------------------------------------------------------------------------

int cmdVerify(const RunConfig& rc, const std::vector<int>& only, unsigned threads) {
    AcceptanceOptions ao;
    ao.seed = rc.seed;
    ao.threads = threads;
    auto results = runAcceptance(ao, only);
    bool all = true;
    double total = 0;
    Json arr = Json::array();
    for (const CriterionResult& r : results) {
        all = all && r.pass;
        total += r.seconds;
        std::printf("[%s] %2d %-52s (%6.2fs) %s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.seconds, r.detail.c_str());
        arr.push_back({{"id", r.id},
                       {"name", r.name},
                       {"pass", r.pass},
                       {"seconds", r.seconds},
                       {"detail", r.detail}});
    }
    std::printf("%s: %zu/%zu criteria passed in %.2fs\n", all ? "ACCEPTED" : "REJECTED",
                static_cast<std::size_t>(std::count_if(results.begin(), results.end(),
                                                       [](const auto& r) { return r.pass; })),
                results.size(), total);
    Json j;
    j["accepted"] = all;
    j["criteria"] = arr;
    writeJson(rc, "verify.json", std::move(j));
    return all ? 0 : EXIT_RUNTIME;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{"collision-manifold connections and their indices"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs g;
    app.add_option("--config", g.configPath, "run configuration JSON (schema parindex/1)");
    app.add_option("--out", g.outDir, "output directory override");
    app.add_option("--seed", g.seed, "RNG seed override");
    app.add_option("--tol", g.tol, "integrator tolerance override");

    app.add_subcommand("equilibria", "rest-point atlas with spectra and classification");

    auto* portrait = app.add_subcommand("portrait", "phase-portrait polylines and SVG");
    int gridPsi = 12, gridTheta = 12;
    double pspan = 8.0;
    bool noSvg = false;
    unsigned threads = 0;
    portrait->add_option("--grid-psi", gridPsi, "seed rows")->check(CLI::Range(1, 100));
    portrait->add_option("--grid-theta", gridTheta, "seed columns")->check(CLI::Range(1, 100));
    portrait->add_option("--span", pspan, "integration span per direction")
        ->check(CLI::PositiveNumber);
    portrait->add_flag("--no-svg", noSvg, "skip the SVG rendering");
    portrait->add_option("--threads", threads, "worker threads (0 = hardware)");

    OrbitSpec spec;
    double ospan = 10.0;
    auto addSpec = [&](CLI::App* cmd) {
        cmd->add_option("--source-psi", spec.srcPsi, "source rest point psi (+-pi/2)");
        cmd->add_option("--source-theta", spec.srcTheta, "source rest point theta");
        cmd->add_option("--sign", spec.sign, "unstable-direction sign")
            ->check(CLI::IsMember({-1, 1}));
        cmd->add_option("--homothetic", spec.homothetic,
                        "constant-angle orbit over this critical theta instead");
    };
    auto* orbit = app.add_subcommand("orbit", "shoot one connection and dump samples");
    addSpec(orbit);
    orbit->add_option("--span", ospan, "tau span for homothetic dumps")
        ->check(CLI::PositiveNumber);

    auto* indices = app.add_subcommand("indices", "full index report for one connection");
    addSpec(indices);

    auto* homothetic = app.add_subcommand("homothetic", "negative-mode counts of radial motion");
    double htheta = 0;
    std::vector<double> lengths;
    homothetic->add_option("--theta", htheta, "critical angle")->required();
    homothetic->add_option("--lengths", lengths, "window lengths (default 1 10 100)");

    auto* sweep = app.add_subcommand("sweep", "parameter sweep with refined thresholds");
    std::string par;
    double from = 0, to = 0;
    int steps = 100;
    sweep->add_option("--parameter", par, "one of mu, m, alpha")
        ->required()
        ->check(CLI::IsMember({"mu", "m", "alpha"}));
    sweep->add_option("--from", from, "range start")->required();
    sweep->add_option("--to", to, "range end")->required();
    sweep->add_option("--steps", steps, "grid points")->check(CLI::Range(2, 10000));
    sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    std::vector<int> only;
    verify->add_option("criteria", only, "criterion ids (default all)")
        ->check(CLI::Range(1, 10));
    verify->add_option("--threads", threads, "worker threads (0 = hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig rc = loadConfig(g);
        fs::create_directories(rc.outDir);
        if (app.got_subcommand("equilibria")) return cmdEquilibria(rc);
        if (app.got_subcommand(portrait))
            return cmdPortrait(rc, gridPsi, gridTheta, pspan, !noSvg, threads);
        if (app.got_subcommand(orbit)) return cmdOrbit(rc, spec, ospan);
        if (app.got_subcommand(indices)) return cmdIndices(rc, spec);
        if (app.got_subcommand(homothetic)) return cmdHomothetic(rc, htheta, lengths);
        if (app.got_subcommand(sweep)) return cmdSweep(rc, par, from, to, steps, threads);
        if (app.got_subcommand(verify)) return cmdVerify(rc, only, threads);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return EXIT_CONFIG;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return EXIT_RUNTIME;
    }
    return EXIT_USAGE;
}
