#include <catch2/catch_amalgamated.hpp>

#include <parindex/indices.hpp>

#include <random>

using namespace parindex;

namespace {

const HeteroclinicOrbit& sharedOrbit() {
    static ShootOutcome out = [] {
        auto p = AnglePotential::anisotropic(1.0, 2.0);
        auto all = findEquilibria(p);
        for (const auto& eq : all)
            if (sameAngle(eq.psi0, PI / 2) && sameAngle(eq.theta0, 0.0))
                return shootHeteroclinic(p, all, eq, +1);
        throw std::runtime_error("saddle not found");
    }();
    REQUIRE(out.converged);
    return *out.orbit;
}

}  // namespace

TEST_CASE("banded negative inertia matches a dense eigensolver", "[morse]") {
    std::mt19937_64 gen(555);
    std::normal_distribution<double> N(0, 1);
    const int n = 40, bw = 3;
    int checked = 0;
    for (int inst = 0; inst < 30; inst++) {
        BandedSymmetric K(n, bw);
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; i++)
            for (int j = std::max(0, i - bw); j <= i; j++) {
                double v = N(gen);
                K.at(i, j) = v;
                D(i, j) = D(j, i) = v;
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
        double top = es.eigenvalues().cwiseAbs().maxCoeff();
        if (es.eigenvalues().cwiseAbs().minCoeff() < 1e-8 * top) continue;  // too close to singular
        int expect = 0;
        for (int i = 0; i < n; i++) expect += es.eigenvalues()(i) < 0 ? 1 : 0;
        REQUIRE(K.negativeInertia() == expect);
        checked++;
    }
    REQUIRE(checked >= 25);

    // definite cases pin the endpoints of the count
    BandedSymmetric neg(12, 2);
    for (int i = 0; i < 12; i++) neg.at(i, i) = -2.0;
    REQUIRE(neg.negativeInertia() == 12);
}

TEST_CASE("diagonal equilibration preserves inertia", "[morse]") {
    std::mt19937_64 gen(91);
    std::normal_distribution<double> N(0, 1);
    std::uniform_real_distribution<double> S(-20, 20);  // wild row scales
    const int n = 30, bw = 2;
    for (int inst = 0; inst < 10; inst++) {
        Eigen::VectorXd scale(n);
        for (int i = 0; i < n; i++) scale(i) = std::exp(0.1 * S(gen));
        BandedSymmetric K(n, bw), Kv(n, bw);
        for (int i = 0; i < n; i++)
            for (int j = std::max(0, i - bw); j <= i; j++) {
                double v = N(gen) * scale(i) * scale(j);
                K.at(i, j) = v;
                Kv.at(i, j) = v;
            }
        int raw = Kv.negativeInertia();
        K.equilibrate();
        REQUIRE(K.negativeInertia() == raw);
    }
}

TEST_CASE("normal-form negative count agrees with the finite elements", "[morse]") {
    // unstable ray of the flat potential: delta(pi/2) = -3.5 at this coupling
    auto p = AnglePotential::anisotropic(1.0, 2.0);
    REQUIRE(p.delta(PI / 2) == Catch::Approx(-3.5).epsilon(1e-12));
    double d = p.delta(PI / 2);
    for (double L : {1.0, 10.0, 100.0}) {
        int closed = homotheticNegativeCount(L, d);
        REQUIRE(homotheticMorse(p, PI / 2, L) == closed);
    }
    REQUIRE(homotheticNegativeCount(1.0, d) == 0);
    REQUIRE(homotheticNegativeCount(10.0, d) == 2);
    REQUIRE(homotheticNegativeCount(100.0, d) == 29);

    // stable ray: no negative directions on any window
    REQUIRE(p.delta(0.0) > 0);
    REQUIRE(homotheticMorse(p, 0.0, 50.0) == 0);

    // the binary collision family crosses zero at its own threshold
    auto q = AnglePotential::isosceles(1.0, 0.1);
    double dq = q.delta(0.0);
    REQUIRE(dq < 0);
    for (double L : {10.0, 100.0}) {
        REQUIRE(homotheticMorse(q, 0.0, L) == homotheticNegativeCount(L, dq));
    }
}

TEST_CASE("a mode landing exactly on the window boundary is null", "[morse]") {
    // with delta = -4 the k-th Dirichlet mode on [0, k pi] has zero energy
    REQUIRE(homotheticNegativeCount(PI, -4.0) == 0);
    REQUIRE(homotheticNegativeCount(PI + 0.01, -4.0) == 1);
    REQUIRE(homotheticNegativeCount(2 * PI - 0.01, -4.0) == 1);
    REQUIRE(homotheticNegativeCount(2 * PI, -4.0) == 1);
}

TEST_CASE("action Hessian count matches the transported-plane count", "[morse]") {
    const HeteroclinicOrbit& orb = sharedOrbit();
    LiftedOrbit lift = liftZeroEnergy(
        orb.pot, [&](double tau) { return orb.state(tau); }, orb.tauMin, orb.tauMax,
        1.0, 0.5 * (orb.tauMin + orb.tauMax));
    LinearFlowCache cache(orb);
    double b0 = orb.tauSinkAsym();
    double t1 = 0.3 * b0, t2 = 0.7 * b0;
    int byHessian = morseByHessian(orb, lift, t1, t2);
    int byMaslov = morseByMaslov(cache, t1, t2);
    REQUIRE(byHessian == byMaslov);

    // refusing to confirm counts without a stable doubling
    REQUIRE_THROWS_AS(morseByHessian(orb, lift, t1, t2, 400, 0), MeshNotConverged);
}
