#include <catch2/catch_amalgamated.hpp>

#include <parindex/indices.hpp>

using namespace parindex;

namespace {

ShootOutcome shootFrom(const AnglePotential& p, double theta0, int sign) {
    auto all = findEquilibria(p);
    for (const auto& eq : all)
        if (sameAngle(eq.psi0, PI / 2) && sameAngle(eq.theta0, theta0))
            return shootHeteroclinic(p, all, eq, sign);
    throw std::runtime_error("source not found");
}

}  // namespace

TEST_CASE("ejection orbit below the spiral threshold satisfies the identities",
          "[indices]") {
    auto p = AnglePotential::anisotropic(1.0, 1.05);
    ShootOutcome out = shootFrom(p, 0.0, +1);
    REQUIRE(out.converged);
    const HeteroclinicOrbit& orb = *out.orbit;
    REQUIRE(orb.type == HetType::II);

    IndexReport rep = verifyTheorems(orb);
    INFO("errors: " << (rep.errors.empty() ? "none" : rep.errors.front()));
    REQUIRE(rep.errors.empty());

    // ejection counts are taken on the time-reversed orbit
    REQUIRE(rep.maslov.defined);
    REQUIRE(rep.maslov.viaReversal);
    REQUIRE(rep.maslov.stable);

    REQUIRE(rep.zerosMatchCrossings.has_value());
    REQUIRE(*rep.zerosMatchCrossings);
    REQUIRE(rep.morseIndexTheoremHolds.has_value());
    REQUIRE(*rep.morseIndexTheoremHolds);
    REQUIRE(rep.morseDefined);
    REQUIRE(rep.morseStable);
    REQUIRE(rep.globalIndexMatch.has_value());
    REQUIRE(*rep.globalIndexMatch);
    REQUIRE(rep.gapZeroOrOne.has_value());
    REQUIRE(*rep.gapZeroOrOne);
    REQUIRE(!rep.oscillation.saturated);
    REQUIRE(rep.allSetVerdictsHold());
}

TEST_CASE("collision orbit inherits the identities through reversal", "[indices]") {
    auto p = AnglePotential::anisotropic(1.0, 1.05);
    ShootOutcome out = shootFrom(p, 0.0, -1);
    REQUIRE(out.converged);
    HeteroclinicOrbit rev = reverseOrbit(*out.orbit);
    REQUIRE(rev.type == HetType::III);

    IndexReport rep = verifyTheorems(rev);
    INFO("errors: " << (rep.errors.empty() ? "none" : rep.errors.front()));
    REQUIRE(rep.errors.empty());
    REQUIRE(rep.maslov.defined);
    REQUIRE(!rep.maslov.viaReversal);  // collision asymptotics fit the theorem directly
    REQUIRE(rep.morseIndexTheoremHolds.has_value());
    REQUIRE(*rep.morseIndexTheoremHolds);
    REQUIRE(rep.allSetVerdictsHold());
}

TEST_CASE("flat potential connections carry no index at all", "[indices]") {
    for (double m : {0.5, 1.0, 2.0}) {
        auto p = AnglePotential::keplerConstant(1.0, m);
        Equilibrium src = makeEquilibrium(p, -PI / 2, 0.7);
        ShootOutcome out = shootHeteroclinic(p, {}, src, +1);
        REQUIRE(out.converged);
        const HeteroclinicOrbit& orb = *out.orbit;
        REQUIRE(orb.type == HetType::I);

        IndexReport rep = verifyTheorems(orb);
        INFO("errors: " << (rep.errors.empty() ? "none" : rep.errors.front()));
        REQUIRE(rep.errors.empty());
        REQUIRE(rep.oscillation.count == 0);
        REQUIRE(rep.maslov.defined);
        REQUIRE(rep.maslov.stable);
        REQUIRE(rep.maslov.count == 0);
        REQUIRE(rep.morseDefined);
        REQUIRE(rep.morseFull == 0);
        REQUIRE(rep.zerosMatchCrossings.has_value());
        REQUIRE(rep.morseIndexTheoremHolds.has_value());
        REQUIRE(rep.indicesAllZero.has_value());
        REQUIRE(*rep.indicesAllZero);
        REQUIRE(rep.allSetVerdictsHold());
    }
}

TEST_CASE("spiral sink saturates the zero count and blocks the endpoint theory",
          "[indices]") {
    auto p = AnglePotential::anisotropic(1.0, 2.0);
    ShootOutcome out = shootFrom(p, 0.0, +1);
    REQUIRE(out.converged);
    const HeteroclinicOrbit& orb = *out.orbit;
    REQUIRE(orb.sinkDir == ApproachDirection::spiral);
    REQUIRE(orb.sink.delta < 0);

    IndexReport rep = verifyTheorems(orb);
    REQUIRE(rep.oscillation.saturated);
    REQUIRE(rep.oscillation.count == 50);
    REQUIRE(rep.oscillation.tailRate ==
            Catch::Approx(std::sqrt(3.5) / (2 * PI)).epsilon(1e-12));
    // infinitely many negative directions: the full-window index is not a number
    REQUIRE(!rep.morseDefined);
    REQUIRE(!rep.maslov.defined);
    // the windowed identities keep holding along the way
    REQUIRE(rep.zerosMatchCrossings.has_value());
    REQUIRE(*rep.zerosMatchCrossings);
    REQUIRE(rep.morseIndexTheoremHolds.has_value());
    REQUIRE(*rep.morseIndexTheoremHolds);
    REQUIRE(rep.allSetVerdictsHold());
}

TEST_CASE("window trace pairs the Hessian with the crossing count", "[indices]") {
    auto p = AnglePotential::anisotropic(1.0, 1.1);
    ShootOutcome out = shootFrom(p, 0.0, +1);
    REQUIRE(out.converged);
    IndexReport rep = verifyTheorems(*out.orbit);
    REQUIRE(rep.intervalTrace.size() == 3);
    int okCount = 0;
    for (const WindowCounts& wc : rep.intervalTrace)
        if (wc.ok) {
            okCount++;
            REQUIRE(wc.hessian == wc.maslovMinusTwo);
        }
    REQUIRE(okCount >= 2);
}
