#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include <Eigen/Dense>
#include <parindex/equilibria.hpp>

using namespace parindex;

TEST_CASE("closed-form spectrum matches a numerical eigensolve", "[equilibria]") {
    for (double mu : {1.05, 1.5, 2.0})
        for (double alpha : {0.5, 1.0, 1.5})
            for (double psi0 : {-PI / 2, PI / 2})
                for (double th0 : {0.0, PI / 2}) {
                    auto p = AnglePotential::anisotropic(alpha, mu);
                    Equilibrium eq = makeEquilibrium(p, psi0, th0);
                    Eigen::EigenSolver<Eigen::Matrix2d> es(linearizationMatrix(p, psi0, th0));
                    std::complex<double> a = es.eigenvalues()[0], b = es.eigenvalues()[1];
                    // the eigensolver fixes no order; match as an unordered pair
                    double direct = std::abs(eq.lambdaMinus - a) + std::abs(eq.lambdaPlus - b);
                    double swapped = std::abs(eq.lambdaMinus - b) + std::abs(eq.lambdaPlus - a);
                    REQUIRE(std::min(direct, swapped) < 1e-10);
                }
}

TEST_CASE("focus eigenvalues at the light axis", "[equilibria]") {
    auto p = AnglePotential::anisotropic(1.0, 2.0);
    Equilibrium eq = makeEquilibrium(p, PI / 2, PI / 2);
    REQUIRE_FALSE(eq.realEigen);
    REQUIRE(eq.cls == EqClass::stableFocus);
    REQUIRE(eq.lambdaPlus.real() == Catch::Approx(-0.35355339059327373).epsilon(1e-12));
    REQUIRE(std::fabs(eq.lambdaPlus.imag()) ==
            Catch::Approx(0.9354143466934853).epsilon(1e-12));
    // the antipode reverses stability
    Equilibrium up = makeEquilibrium(p, -PI / 2, PI / 2);
    REQUIRE(up.cls == EqClass::unstableFocus);
}

TEST_CASE("real eigenvectors satisfy the eigen equation", "[equilibria]") {
    auto p = AnglePotential::anisotropic(1.0, 1.05);
    for (double psi0 : {-PI / 2, PI / 2})
        for (double th0 : {0.0, PI / 2, PI}) {
            Equilibrium eq = makeEquilibrium(p, psi0, th0);
            REQUIRE(eq.realEigen);
            Eigen::Matrix2d M = linearizationMatrix(p, psi0, th0);
            REQUIRE((M * eq.eMinus - eq.lambdaMinus.real() * eq.eMinus).norm() < 1e-11);
            REQUIRE((M * eq.ePlus - eq.lambdaPlus.real() * eq.ePlus).norm() < 1e-11);
        }
}

TEST_CASE("rest point classification across the bifurcation", "[equilibria]") {
    // below mu = 9/8 the light axis carries nodes, above it spirals
    auto below = makeEquilibrium(AnglePotential::anisotropic(1.0, 1.05), PI / 2, PI / 2);
    REQUIRE(below.cls == EqClass::stableNode);
    auto above = makeEquilibrium(AnglePotential::anisotropic(1.0, 1.2), PI / 2, PI / 2);
    REQUIRE(above.cls == EqClass::stableFocus);
    // the heavy axis is a saddle in both regimes
    auto heavy = makeEquilibrium(AnglePotential::anisotropic(1.0, 2.0), PI / 2, 0.0);
    REQUIRE(heavy.cls == EqClass::saddle);
    REQUIRE(heavy.lambdaMinus.real() < 0);
    REQUIRE(heavy.lambdaPlus.real() > 0);
}

TEST_CASE("repeated root exactly at the isosceles threshold", "[equilibria]") {
    auto p = AnglePotential::isosceles(1.0, 4.0 / 55.0);
    Equilibrium eq = makeEquilibrium(p, PI / 2, 0.0);
    REQUIRE(eq.delta == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(eq.repeatedRoot);
}

TEST_CASE("rest points come in antipodal pairs over each critical angle", "[equilibria]") {
    auto p = AnglePotential::anisotropic(1.0, 1.6);
    std::vector<Equilibrium> all = findEquilibria(p);
    REQUIRE(all.size() == 8);  // four critical angles, two circles
    int up = 0;
    for (const Equilibrium& eq : all) up += sameAngle(eq.psi0, PI / 2);
    REQUIRE(up == 4);
}

TEST_CASE("constant potential refuses a finite rest point list", "[equilibria]") {
    auto p = AnglePotential::keplerConstant(1.0, 1.0);
    REQUIRE_THROWS_AS(findEquilibria(p), ContinuumEquilibria);
    // pointwise construction still works anywhere on the circle
    Equilibrium eq = makeEquilibrium(p, PI / 2, 0.77);
    REQUIRE(eq.uValue == Catch::Approx(1.0));
    REQUIRE(eq.delta == Catch::Approx(0.5));
}

TEST_CASE("rest points exist only on the polar circles", "[equilibria]") {
    auto p = AnglePotential::anisotropic(1.0, 2.0);
    REQUIRE_THROWS_AS(makeEquilibrium(p, 0.3, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(makeEquilibrium(p, PI / 2, 0.4), NotACriticalPoint);
}
