#pragma once
/// \file  io.hpp
/// \brief artifact boundary: JSON descriptors under the "parindex/1" schema,
///        RFC-4180 CSV, SVG portrait rendering, atomic writes, config hashing
///
/// Everything here is pure serialization; no numerics beyond formatting.  All
/// floating-point fields go through g17() so that identical inputs produce
/// byte-identical files.
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "dynamics.hpp"
#include "equilibria.hpp"
#include "indices.hpp"
#include "shooting.hpp"

namespace parindex {

using Json = nlohmann::json;

/// schema tag carried by every JSON document this library emits
inline constexpr const char* SCHEMA_TAG = "parindex/1";

/// a configuration file or descriptor failed validation
class ConfigError : public Error {
public:
    using Error::Error;
};

/// shortest fixed-width float formatting used across CSV and SVG output;
/// %.17g round-trips every double
inline std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// FNV-1a 64-bit over a byte string
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// hash of the canonical (sorted-key) dump of a configuration document
inline std::string configHash(const Json& j) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

/// write content to path via a sibling temp file and rename, so readers never
/// observe a half-written artifact
inline void atomicWrite(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

/// RFC-4180 CSV assembly: CRLF line ends, fields quoted only when they contain
/// a comma, a quote or a line break
class CsvBuilder {
public:
    explicit CsvBuilder(const std::vector<std::string>& header) { row(header); }

    void row(const std::vector<std::string>& fields) {
        for (size_t i = 0; i < fields.size(); i++) {
            if (i) body_ += ',';
            body_ += quoted(fields[i]);
        }
        body_ += "\r\n";
    }

    void numericRow(const std::vector<double>& xs) {
        std::vector<std::string> f;
        f.reserve(xs.size());
        for (double x : xs) f.push_back(g17(x));
        row(f);
    }

    const std::string& str() const { return body_; }

private:
    static std::string quoted(const std::string& f) {
        if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
        std::string q = "\"";
        for (char c : f) {
            q += c;
            if (c == '"') q += '"';
        }
        q += '"';
        return q;
    }

    std::string body_;
};

/// parse a JSON file, rewriting parse failures with line:column positions
inline Json parseJsonFile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        size_t line = 1, col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); i++) {
            if (text[i] == '\n') {
                line++;
                col = 1;
            } else
                col++;
        }
        throw ConfigError(path.string() + ":" + std::to_string(line) + ":" +
                          std::to_string(col) + ": " + e.what());
    }
}

namespace detail {

inline double requireNumber(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(where + ": missing or non-numeric field \"" + key + "\"");
    return j[key].get<double>();
}

}  // namespace detail

/// descriptor round-trip for the potential family
inline Json potentialToJson(const AnglePotential& pot) {
    Json j;
    j["alpha"] = pot.alpha();
    switch (pot.kind()) {
        case AnglePotential::Kind::anisotropic:
            j["kind"] = "anisotropic";
            j["mu"] = pot.mu();
            break;
        case AnglePotential::Kind::isosceles:
            j["kind"] = "isosceles";
            j["m"] = pot.massRatio();
            break;
        case AnglePotential::Kind::keplerConstant:
            j["kind"] = "keplerConstant";
            j["m"] = pot.massRatio();
            break;
        case AnglePotential::Kind::fourier:
            j["kind"] = "fourier";
            j["cosCoeffs"] = pot.cosCoeffs();
            j["sinCoeffs"] = pot.sinCoeffs();
            j["constant"] = pot.fourierConstant();
            break;
    }
    return j;
}

inline AnglePotential potentialFromJson(const Json& j, const std::string& where = "potential") {
    if (!j.is_object()) throw ConfigError(where + ": descriptor must be a JSON object");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ConfigError(where + ": missing \"kind\" (one of anisotropic, isosceles, "
                                  "keplerConstant, fourier)");
    double alpha = detail::requireNumber(j, "alpha", where);
    std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "anisotropic")
            return AnglePotential::anisotropic(alpha, detail::requireNumber(j, "mu", where));
        if (kind == "isosceles")
            return AnglePotential::isosceles(alpha, detail::requireNumber(j, "m", where));
        if (kind == "keplerConstant")
            return AnglePotential::keplerConstant(alpha, detail::requireNumber(j, "m", where));
        if (kind == "fourier") {
            std::vector<double> cs, ss;
            if (j.contains("cosCoeffs")) cs = j["cosCoeffs"].get<std::vector<double>>();
            if (j.contains("sinCoeffs")) ss = j["sinCoeffs"].get<std::vector<double>>();
            return AnglePotential::fourier(alpha, cs, ss,
                                           detail::requireNumber(j, "constant", where));
        }
    } catch (const Json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unknown kind \"" + kind + "\"");
}

inline Json complexToJson(const std::complex<double>& z) {
    return Json::array({z.real(), z.imag()});
}

inline Json equilibriumToJson(const Equilibrium& eq) {
    Json j;
    j["psi0"] = eq.psi0;
    j["theta0"] = eq.theta0;
    j["uValue"] = eq.uValue;
    j["uThetaTheta"] = eq.uDd;
    j["delta"] = eq.delta;
    j["lambdaMinus"] = complexToJson(eq.lambdaMinus);
    j["lambdaPlus"] = complexToJson(eq.lambdaPlus);
    j["classification"] = className(eq.cls);
    j["repeatedRoot"] = eq.repeatedRoot;
    j["degenerateCritical"] = eq.degenerateCritical;
    if (eq.realEigen) {
        j["eMinus"] = Json::array({eq.eMinus[0], eq.eMinus[1]});
        j["ePlus"] = Json::array({eq.ePlus[0], eq.ePlus[1]});
    }
    return j;
}

inline Json indexReportToJson(const IndexReport& rep) {
    Json j;
    j["type"] = typeName(rep.type);
    j["sourceTheta"] = rep.sourceTheta;
    j["sinkTheta"] = rep.sinkTheta;
    j["sourceDir"] = rep.sourceDir;
    j["sinkDir"] = rep.sinkDir;
    j["sourceDelta"] = rep.sourceDelta;
    j["sinkDelta"] = rep.sinkDelta;

    Json osc;
    osc["count"] = rep.oscillation.count;
    osc["saturated"] = rep.oscillation.saturated;
    osc["detected"] = rep.oscillation.detected;
    osc["tailRate"] = rep.oscillation.tailRate;
    j["oscillation"] = osc;

    Json mx;
    mx["defined"] = rep.maslov.defined;
    if (rep.maslov.defined) {
        mx["count"] = rep.maslov.count;
        mx["stable"] = rep.maslov.stable;
        mx["viaReversal"] = rep.maslov.viaReversal;
    } else
        mx["note"] = rep.maslov.note;
    j["maslovOfX"] = mx;

    j["morseDefined"] = rep.morseDefined;
    if (rep.morseDefined) {
        j["morseFull"] = rep.morseFull;
        j["morseStable"] = rep.morseStable;
    }

    Json trace = Json::array();
    for (const WindowCounts& wc : rep.intervalTrace) {
        Json w;
        w["tau1"] = wc.tau1;
        w["tau2"] = wc.tau2;
        w["ok"] = wc.ok;
        if (wc.ok) {
            w["morseByHessian"] = wc.hessian;
            w["maslovMinusTwo"] = wc.maslovMinusTwo;
        }
        trace.push_back(w);
    }
    j["intervalTrace"] = trace;

    Json verdicts;
    auto put = [&](const char* name, const std::optional<bool>& v) {
        if (v.has_value()) verdicts[name] = *v;
    };
    put("zerosMatchCrossings", rep.zerosMatchCrossings);
    put("morseIndexTheoremHolds", rep.morseIndexTheoremHolds);
    put("globalIndexMatch", rep.globalIndexMatch);
    put("gapZeroOrOne", rep.gapZeroOrOne);
    put("indicesAllZero", rep.indicesAllZero);
    j["theoremVerdicts"] = verdicts;
    j["allSetVerdictsHold"] = rep.allSetVerdictsHold();
    j["errors"] = rep.errors;
    return j;
}

/// orbit dump rows (tau, psi, theta, v, u, r, t) on the accepted-step grid;
/// r and t are left empty outside the covered span of the radial lift
inline std::string orbitCsv(const HeteroclinicOrbit& orbit, const LiftedOrbit* lift) {
    CsvBuilder csv({"tau", "psi", "theta", "v", "u", "r", "t"});
    for (double tau : orbit.sampleTaus()) {
        Eigen::Vector2d s = orbit.state(tau);
        std::vector<std::string> row{g17(tau), g17(s[0]), g17(s[1]),
                                     g17(orbit.v(tau)), g17(orbit.u(tau)), "", ""};
        if (lift && tau >= lift->tauLo && tau <= lift->tauHi) {
            row[5] = g17(lift->r(tau));
            row[6] = g17(lift->t(tau));
        }
        csv.row(row);
    }
    return csv.str();
}

/// orbit sidecar: everything needed to reproduce the dump without the samples
inline Json orbitSidecarJson(const HeteroclinicOrbit& orbit, const LiftedOrbit* lift) {
    Json j;
    j["schema"] = SCHEMA_TAG;
    j["potential"] = potentialToJson(orbit.pot);
    j["type"] = typeName(orbit.type);
    j["source"] = equilibriumToJson(orbit.source);
    j["sink"] = equilibriumToJson(orbit.sink);
    j["sourceDirection"] = directionName(orbit.sourceDir);
    j["sinkDirection"] = directionName(orbit.sinkDir);
    j["tauMin"] = orbit.tauMin;
    j["tauMax"] = orbit.tauMax;
    j["lockTau"] = orbit.lockTau;
    j["uZeros"] = orbit.uZeros;
    Json st;
    st["eps"] = orbit.eps;
    st["sign"] = orbit.sign;
    st["tol"] = orbit.shootTol;
    st["rngSeed"] = orbit.rngSeed;
    st["reversedView"] = orbit.reversedView;
    j["settings"] = st;
    if (lift) {
        Json lj;
        lj["r0"] = lift->r0;
        lj["tau0"] = lift->tau0;
        lj["tauLo"] = lift->tauLo;
        lj["tauHi"] = lift->tauHi;
        lj["truncatedLo"] = lift->cutLo;
        lj["truncatedHi"] = lift->cutHi;
        j["lift"] = lj;
    }
    return j;
}

/// polyline in unwrapped (theta, psi) coordinates for portrait export
struct Polyline {
    std::vector<std::array<double, 2>> pts;
};

inline Json portraitToJson(const std::vector<Polyline>& lines,
                           const std::vector<Equilibrium>& eqs) {
    Json j;
    j["schema"] = SCHEMA_TAG;
    Json arr = Json::array();
    for (const Polyline& pl : lines) {
        Json p = Json::array();
        for (const auto& pt : pl.pts) p.push_back(Json::array({pt[0], pt[1]}));
        arr.push_back(p);
    }
    j["polylines"] = arr;
    Json e = Json::array();
    for (const Equilibrium& eq : eqs) e.push_back(equilibriumToJson(eq));
    j["equilibria"] = e;
    return j;
}

namespace detail {

inline const char* glyphColor(EqClass c) {
    switch (c) {
        case EqClass::saddle: return "#202020";
        case EqClass::stableNode: return "#1965b0";
        case EqClass::unstableNode: return "#dc050c";
        case EqClass::stableFocus: return "#7bafde";
        case EqClass::unstableFocus: return "#ee8026";
        case EqClass::degenerate: return "#888888";
    }
    return "#888888";
}

}  // namespace detail

/// pure projection of portrait polylines onto a fixed-size SVG canvas; angles
/// are wrapped to [-pi, pi] with polylines split at the seam jumps
inline std::string portraitToSvg(const std::vector<Polyline>& lines,
                                 const std::vector<Equilibrium>& eqs) {
    const double W = 720, H = 720, M = 40;
    auto X = [&](double theta) { return M + (wrapAngle(theta) + PI) / (2 * PI) * (W - 2 * M); };
    auto Y = [&](double psi) { return H - M - (wrapAngle(psi) + PI) / (2 * PI) * (H - 2 * M); };
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + g17(W) + "\" height=\"" +
           g17(H) + "\" viewBox=\"0 0 " + g17(W) + " " + g17(H) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const Polyline& pl : lines) {
        std::string pts;
        double prevT = 0, prevP = 0;
        bool open = false;
        auto flush = [&]() {
            if (open && pts.find(' ') != std::string::npos)
                svg += "<polyline fill=\"none\" stroke=\"#444444\" stroke-width=\"0.6\" "
                       "points=\"" + pts + "\"/>\n";
            pts.clear();
            open = false;
        };
        for (const auto& pt : pl.pts) {
            // a jump across the seam would draw a spurious full-width segment
            if (open && (std::fabs(wrapAngle(pt[0]) - prevT) > PI ||
                         std::fabs(wrapAngle(pt[1]) - prevP) > PI))
                flush();
            if (!pts.empty()) pts += ' ';
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f", X(pt[0]), Y(pt[1]));
            pts += buf;
            prevT = wrapAngle(pt[0]);
            prevP = wrapAngle(pt[1]);
            open = true;
        }
        flush();
    }
    for (const Equilibrium& eq : eqs) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"%s\"/>\n",
                      X(eq.theta0), Y(eq.psi0), detail::glyphColor(eq.cls));
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

/// run configuration shared by every CLI subcommand.  The canonical document
/// (defaults merged with the config file and flag overrides) is what gets
/// hashed into output sidecars.
struct RunConfig {
    AnglePotential pot = AnglePotential::anisotropic(1.0, 2.0);
    double tol = 1e-11;
    double tauMax = 600;
    double eps = 1e-6;
    int cap = 50;
    int meshN = 2000;
    int traceWindows = 3;
    std::uint64_t seed = 20260815;
    std::string outDir = "out";

    Json canonical() const {
        Json j;
        j["schema"] = SCHEMA_TAG;
        j["potential"] = potentialToJson(pot);
        j["integrator"] = {{"tol", tol}, {"tauMax", tauMax}, {"eps", eps}};
        j["indices"] = {{"cap", cap}, {"meshN", meshN}, {"traceWindows", traceWindows}};
        j["seed"] = seed;
        return j;
    }
    std::string hash() const { return configHash(canonical()); }

    ShootSettings shootSettings() const {
        ShootSettings st;
        st.eps = eps;
        st.tauMax = tauMax;
        st.tol = tol;
        st.seed = seed;
        return st;
    }
    IndexOptions indexOptions() const {
        IndexOptions io;
        io.cap = cap;
        io.meshN = meshN;
        io.traceWindows = traceWindows;
        return io;
    }
};

/// merge a config document over the defaults; unknown keys are rejected so a
/// typo cannot silently fall back to a default
inline RunConfig runConfigFromJson(const Json& j, const std::string& where = "config") {
    RunConfig rc;
    if (!j.is_object()) throw ConfigError(where + ": document must be a JSON object");
    for (const auto& [key, val] : j.items()) {
        if (key == "schema") {
            if (!val.is_string() || val.get<std::string>() != SCHEMA_TAG)
                throw ConfigError(where + ": schema must be \"" + SCHEMA_TAG + "\"");
        } else if (key == "potential") {
            rc.pot = potentialFromJson(val, where + ".potential");
        } else if (key == "integrator") {
            if (val.contains("tol")) rc.tol = detail::requireNumber(val, "tol", where);
            if (val.contains("tauMax")) rc.tauMax = detail::requireNumber(val, "tauMax", where);
            if (val.contains("eps")) rc.eps = detail::requireNumber(val, "eps", where);
        } else if (key == "indices") {
            if (val.contains("cap")) rc.cap = int(detail::requireNumber(val, "cap", where));
            if (val.contains("meshN")) rc.meshN = int(detail::requireNumber(val, "meshN", where));
            if (val.contains("traceWindows"))
                rc.traceWindows = int(detail::requireNumber(val, "traceWindows", where));
        } else if (key == "seed") {
            if (!val.is_number_unsigned())
                throw ConfigError(where + ": seed must be an unsigned integer");
            rc.seed = val.get<std::uint64_t>();
        } else if (key == "out") {
            if (!val.is_string()) throw ConfigError(where + ": out must be a string");
            rc.outDir = val.get<std::string>();
        } else {
            throw ConfigError(where + ": unknown key \"" + key + "\"");
        }
    }
    if (!(rc.tol > 0 && rc.tol <= 1e-4))
        throw ConfigError(where + ": tol must lie in (0, 1e-4]");
    if (!(rc.tauMax > 0 && rc.tauMax <= 1e5))
        throw ConfigError(where + ": tauMax must lie in (0, 1e5]");
    if (!(rc.eps > 0 && rc.eps <= 1e-2))
        throw ConfigError(where + ": eps must lie in (0, 1e-2]");
    if (rc.cap < 1 || rc.meshN < 16 || rc.traceWindows < 0)
        throw ConfigError(where + ": cap/meshN/traceWindows out of range");
    return rc;
}

/// stamp carried by every artifact: schema, config hash and seed
inline void stampMeta(Json& j, const RunConfig& rc) {
    j["schema"] = SCHEMA_TAG;
    j["config_hash"] = rc.hash();
    j["seed"] = rc.seed;
}

}  // namespace parindex
