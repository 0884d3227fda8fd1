#pragma once
/// \file  lagrangian.hpp
/// \brief Lagrangian planes of (R^2n, omega) as orthonormal frames, the unitary
///        parametrization U(n)/O(n), geodesic interpolation and random sampling
///
/// Coordinates are ordered momentum-first, z = (p, q), with the symplectic
/// structure  omega(x, y) = (J x) . y,  J = [[0, -I], [I, 0]].
#include <Eigen/Dense>
#include <complex>
#include <random>

#include "common.hpp"

namespace parindex {

/// standard symplectic J on R^(2n)
inline Eigen::MatrixXd symplecticJ(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    J.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    return J;
}

inline double omega(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    int n = int(x.size()) / 2;
    // (Jx).y without forming J
    return x.head(n).dot(y.tail(n)) - x.tail(n).dot(y.head(n));
}

/// orthonormal frame of a Lagrangian n-plane in R^(2n)
class LagrangianFrame {
public:
    /// orthonormalize the column span and verify rank and isotropy
    static LagrangianFrame fromColumns(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd* Jmat = nullptr,
                                       double rankTol = 1e-10, double isoTol = 1e-10) {
        if (A.rows() != 2 * A.cols())
            throw std::invalid_argument("Lagrangian frame must be 2n x n");
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
        if (svd.singularValues()(A.cols() - 1) <= rankTol * std::max(1.0, svd.singularValues()(0)))
            throw Error("frame columns are rank deficient");
        LagrangianFrame f;
        f.F_ = orthonormalized(A);
        Eigen::MatrixXd J = Jmat ? *Jmat : symplecticJ(int(A.cols()));
        double iso = (f.F_.transpose() * J * f.F_).cwiseAbs().maxCoeff();
        if (iso > isoTol)
            throw Error("frame span is not isotropic, |F^T J F| = " + std::to_string(iso));
        return f;
    }

    /// the vertical reference plane R^n + 0 (momentum directions)
    static LagrangianFrame vertical(int n) {
        LagrangianFrame f;
        f.F_ = Eigen::MatrixXd::Zero(2 * n, n);
        f.F_.topRows(n).setIdentity();
        return f;
    }

    const Eigen::MatrixXd& matrix() const { return F_; }
    int n() const { return int(F_.cols()); }

    /// image under the rotation exp(eps J) = cos(eps) I + sin(eps) J
    LagrangianFrame rotated(double eps) const {
        int m = n();
        Eigen::MatrixXd G = std::cos(eps) * F_ + std::sin(eps) * (symplecticJ(m) * F_);
        LagrangianFrame f;
        f.F_ = G;  // rotation of an orthonormal isotropic frame stays one
        return f;
    }

    /// QR orthonormalization with positive diagonal, continuous in the input
    static Eigen::MatrixXd orthonormalized(const Eigen::MatrixXd& A) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), A.cols());
        Eigen::MatrixXd R = qr.matrixQR().topRows(A.cols()).triangularView<Eigen::Upper>();
        for (int j = 0; j < A.cols(); j++)
            if (R(j, j) < 0) Q.col(j) = -Q.col(j);
        return Q;
    }

private:
    Eigen::MatrixXd F_;
};

/// operator-norm distance of the orthogonal projectors onto two planes,
/// equal to the sine of the largest principal angle
inline double frameDistance(const LagrangianFrame& A, const LagrangianFrame& B) {
    Eigen::MatrixXd D = A.matrix() * A.matrix().transpose() - B.matrix() * B.matrix().transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// pairing matrix ref^T J F whose kernel parametrizes span(ref) ^ span(F)
inline Eigen::MatrixXd pairingMatrix(const Eigen::MatrixXd& ref, const Eigen::MatrixXd& F,
                                     const Eigen::MatrixXd& J) {
    return ref.transpose() * J * F;
}

/// dimension of the intersection of two Lagrangian planes (orthonormal frames)
inline int intersectionDim(const Eigen::MatrixXd& ref, const Eigen::MatrixXd& F,
                           const Eigen::MatrixXd& J, double tol = 1e-8) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(pairingMatrix(ref, F, J));
    int d = 0;
    for (int i = 0; i < svd.singularValues().size(); i++)
        if (svd.singularValues()(i) < tol) d++;
    return d;
}

/// restore orthonormality and isotropy of a frame that drifted slightly:
/// QR first, then one pass of symplectic Gram-Schmidt followed by a second QR
inline Eigen::MatrixXd symplecticOrthonormalize(const Eigen::MatrixXd& A,
                                                const Eigen::MatrixXd& J) {
    Eigen::MatrixXd F = LagrangianFrame::orthonormalized(A);
    int m = int(F.cols());
    for (int j = 1; j < m; j++) {
        for (int i = 0; i < j; i++) {
            // omega(f_i, f_j) is killed by shifting f_j along J f_i, which leaves
            // all Euclidean inner products with f_k (k<j) unchanged to first order
            double w = (J * F.col(i)).dot(F.col(j));
            F.col(j) -= w * (J * F.col(i));
        }
    }
    return LagrangianFrame::orthonormalized(F);
}

/// complex encoding of a Lagrangian frame [X; Y] as Z = X + iY; orthonormal
/// isotropic frames correspond exactly to unitary Z
inline Eigen::MatrixXcd frameToUnitary(const LagrangianFrame& f) {
    int n = f.n();
    return f.matrix().topRows(n).cast<std::complex<double>>() +
           std::complex<double>(0, 1) * f.matrix().bottomRows(n).cast<std::complex<double>>();
}

inline LagrangianFrame unitaryToFrame(const Eigen::MatrixXcd& Z) {
    int n = int(Z.cols());
    Eigen::MatrixXd F(2 * n, n);
    F.topRows(n) = Z.real();
    F.bottomRows(n) = Z.imag();
    return LagrangianFrame::fromColumns(F);
}

/// continuous path of Lagrangian planes from A to B along the U(n)/O(n) geodesic
/// Z(t) = Z_A exp(t log(Z_A^* Z_B)), t in [0, 1]
class LagrangianGeodesic {
public:
    LagrangianGeodesic(const LagrangianFrame& A, const LagrangianFrame& B) {
        Z0_ = frameToUnitary(A);
        Eigen::MatrixXcd W = Z0_.adjoint() * frameToUnitary(B);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(W);
        V_ = es.eigenvectors();
        Vinv_ = V_.inverse();
        phase_.resize(es.eigenvalues().size());
        for (int i = 0; i < phase_.size(); i++) phase_(i) = std::arg(es.eigenvalues()(i));
    }
    LagrangianFrame at(double t) const {
        Eigen::VectorXcd d(phase_.size());
        for (int i = 0; i < phase_.size(); i++)
            d(i) = std::exp(std::complex<double>(0, t * phase_(i)));
        return unitaryToFrame(Z0_ * (V_ * d.asDiagonal() * Vinv_));
    }

private:
    Eigen::MatrixXcd Z0_, V_, Vinv_;
    Eigen::VectorXd phase_;
};

/// Haar-like random Lagrangian frame: complex QR of a Gaussian matrix
inline LagrangianFrame randomLagrangianFrame(int n, std::mt19937_64& gen) {
    std::normal_distribution<double> N(0, 1);
    Eigen::MatrixXcd G(n, n);
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) G(i, j) = std::complex<double>(N(gen), N(gen));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
    Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd R = qr.matrixQR();
    for (int j = 0; j < n; j++) {
        std::complex<double> rjj = R(j, j);
        if (std::abs(rjj) > 0) Q.col(j) *= std::conj(rjj) / std::abs(rjj);
    }
    return unitaryToFrame(Q);
}

/// random anti-Hermitian generator for smooth Lagrangian test paths
inline Eigen::MatrixXcd randomAntiHermitian(int n, std::mt19937_64& gen, double scale = 1.0) {
    std::normal_distribution<double> N(0, scale);
    Eigen::MatrixXcd H(n, n);
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) H(i, j) = std::complex<double>(N(gen), N(gen));
    return 0.5 * (H - Eigen::MatrixXcd(H.adjoint()));
}

}  // namespace parindex
