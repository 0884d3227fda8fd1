#include <catch2/catch_amalgamated.hpp>

#include <parindex/io.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace parindex;
namespace fs = std::filesystem;

namespace {

fs::path scratchDir(const char* tag) {
    fs::path dir = fs::temp_directory_path() / (std::string("parindex-io-") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("csv rows are CRLF terminated and quoted only when needed", "[io]") {
    CsvBuilder csv({"a", "b"});
    csv.row({"plain", "with,comma"});
    csv.row({"quote\"inside", "line\nbreak"});
    csv.numericRow({0.5, -1.0});
    REQUIRE(csv.str() ==
            "a,b\r\n"
            "plain,\"with,comma\"\r\n"
            "\"quote\"\"inside\",\"line\nbreak\"\r\n"
            "0.5,-1\r\n");
}

TEST_CASE("g17 round-trips doubles exactly", "[io]") {
    for (double x : {0.1, 1.0 / 3.0, 1e300, -2.2250738585072014e-308, 12345.6789}) {
        REQUIRE(std::strtod(g17(x).c_str(), nullptr) == x);
    }
}

TEST_CASE("config hash is stable and key-order independent", "[io]") {
    Json a = {{"x", 1}, {"y", 2.5}};
    Json b = {{"y", 2.5}, {"x", 1}};
    REQUIRE(configHash(a) == configHash(b));  // nlohmann objects iterate sorted
    REQUIRE(configHash(a).size() == 16);
    Json c = {{"x", 1}, {"y", 2.50001}};
    REQUIRE(configHash(a) != configHash(c));
}

TEST_CASE("potential descriptors round-trip through json", "[io]") {
    std::vector<AnglePotential> pots = {
        AnglePotential::anisotropic(1.0, 1.4),
        AnglePotential::isosceles(1.0, 0.1),
        AnglePotential::keplerConstant(0.8, 2.0),
        AnglePotential::fourier(1.0, {0, 0, 0, -0.2}, {0.05}, 1.0),
    };
    for (const AnglePotential& p : pots) {
        AnglePotential q = potentialFromJson(potentialToJson(p));
        REQUIRE(q.kind() == p.kind());
        REQUIRE(q.alpha() == p.alpha());
        for (double th : {0.1, 0.9, 2.0})
            REQUIRE(q.value(th) == Catch::Approx(p.value(th)).margin(1e-15));
    }
}

TEST_CASE("potential descriptor validation is strict", "[io]") {
    REQUIRE_THROWS_AS(potentialFromJson(Json{{"kind", "banana"}, {"alpha", 1.0}}), ConfigError);
    REQUIRE_THROWS_AS(potentialFromJson(Json{{"kind", "anisotropic"}, {"mu", 2.0}}), ConfigError);
    REQUIRE_THROWS_AS(potentialFromJson(Json{{"kind", "anisotropic"}, {"alpha", 1.0}}),
                      ConfigError);
    // mu <= 1 is outside the anisotropic family
    REQUIRE_THROWS_AS(
        potentialFromJson(Json{{"kind", "anisotropic"}, {"alpha", 1.0}, {"mu", 0.5}}),
        ConfigError);
    REQUIRE_THROWS_AS(potentialFromJson(Json::array({1, 2})), ConfigError);
}

TEST_CASE("run config merges, validates ranges and rejects unknown keys", "[io]") {
    RunConfig def;
    RunConfig rt = runConfigFromJson(def.canonical());
    REQUIRE(rt.hash() == def.hash());

    Json j = def.canonical();
    j["integrator"]["tol"] = 1e-9;
    j["seed"] = std::uint64_t{7};  // json text parses non-negative ints as unsigned
    RunConfig rc = runConfigFromJson(j);
    REQUIRE(rc.tol == 1e-9);
    REQUIRE(rc.seed == 7);
    REQUIRE(rc.hash() != def.hash());

    Json bad = def.canonical();
    bad["typoKey"] = 1;
    REQUIRE_THROWS_AS(runConfigFromJson(bad), ConfigError);

    Json badSchema = def.canonical();
    badSchema["schema"] = "parindex/0";
    REQUIRE_THROWS_AS(runConfigFromJson(badSchema), ConfigError);

    Json badTol = def.canonical();
    badTol["integrator"]["tol"] = 1.0;
    REQUIRE_THROWS_AS(runConfigFromJson(badTol), ConfigError);
}

TEST_CASE("json parse failures carry line and column", "[io]") {
    fs::path dir = scratchDir("parse");
    fs::path bad = dir / "bad.json";
    {
        std::ofstream out(bad);
        out << "{\n  \"x\": oops\n}\n";
    }
    try {
        parseJsonFile(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(std::string(e.what()).find(":2:") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("atomic write leaves no temp file behind", "[io]") {
    fs::path dir = scratchDir("atomic");
    fs::path p = dir / "nested" / "artifact.txt";
    atomicWrite(p, "payload");
    std::ifstream in(p);
    std::string got((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(got == "payload");
    REQUIRE_FALSE(fs::exists(p.string() + ".tmp"));
    fs::remove_all(dir);
}

TEST_CASE("orbit dump has the documented columns and a faithful sidecar", "[io]") {
    AnglePotential pot = AnglePotential::keplerConstant(1.0, 1.0);
    Equilibrium src = makeEquilibrium(pot, -PI / 2, 0.0);
    ShootSettings st;
    st.halvedEpsCheck = false;
    auto out = shootHeteroclinic(pot, {}, src, +1, st);
    REQUIRE(out.converged);
    const HeteroclinicOrbit& o = *out.orbit;
    auto lift = liftZeroEnergy(
        pot, [&](double tau) { return o.state(tau); }, o.tauMin, o.tauMax, 1.0,
        0.5 * (o.tauMin + o.tauMax));

    std::string csv = orbitCsv(o, &lift);
    REQUIRE(csv.rfind("tau,psi,theta,v,u,r,t\r\n", 0) == 0);
    size_t rows = 0;
    for (size_t at = csv.find("\r\n"); at != std::string::npos; at = csv.find("\r\n", at + 2))
        rows++;
    REQUIRE(rows == o.sampleTaus().size() + 1);

    Json side = orbitSidecarJson(o, &lift);
    REQUIRE(side["schema"] == SCHEMA_TAG);
    REQUIRE(side["type"] == "I");
    REQUIRE(side["settings"]["sign"] == 1);
    REQUIRE(side["lift"]["r0"] == 1.0);
    REQUIRE(side["potential"]["kind"] == "keplerConstant");
}

TEST_CASE("portrait svg splits polylines at the seam", "[io]") {
    Polyline wrap;  // crosses theta = pi, must split into two strokes
    for (double th = 2.8; th < 3.8; th += 0.05) wrap.pts.push_back({th, 0.3});
    AnglePotential pot = AnglePotential::anisotropic(1.0, 2.0);
    std::vector<Equilibrium> eqs = findEquilibria(pot);
    std::string svg = portraitToSvg({wrap}, eqs);
    REQUIRE(svg.rfind("<svg", 0) == 0);
    size_t strokes = 0;
    for (size_t at = svg.find("<polyline"); at != std::string::npos;
         at = svg.find("<polyline", at + 1))
        strokes++;
    REQUIRE(strokes == 2);
    size_t glyphs = 0;
    for (size_t at = svg.find("<circle"); at != std::string::npos;
         at = svg.find("<circle", at + 1))
        glyphs++;
    REQUIRE(glyphs == eqs.size());
}

TEST_CASE("artifact stamp carries schema, hash and seed", "[io]") {
    RunConfig rc;
    rc.seed = 99;
    Json j;
    stampMeta(j, rc);
    REQUIRE(j["schema"] == SCHEMA_TAG);
    REQUIRE(j["seed"] == 99);
    REQUIRE(j["config_hash"].get<std::string>().size() == 16);
}
