#pragma once
/// \file  common.hpp
/// \brief shared error types, angle helpers and small numeric utilities
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace parindex {

/// base class for all recoverable errors raised by the library
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// evaluation requested inside the excluded wedge around a potential singularity
class SingularAngle : public Error {
public:
    explicit SingularAngle(double theta)
        : Error("potential is singular at theta=" + std::to_string(theta)), theta(theta) {}
    double theta;
};

/// the angle passed as a critical point fails the residual check
class NotACriticalPoint : public Error {
public:
    using Error::Error;
};

/// critical point with vanishing second derivative: no isolated linearization data
class DegenerateCriticalPoint : public Error {
public:
    using Error::Error;
};

/// constant potential: every angle is critical, no isolated equilibria exist
class ContinuumEquilibria : public Error {
public:
    using Error::Error;
};

/// operation undefined for orbits with constant angle
class HomotheticOrbit : public Error {
public:
    using Error::Error;
};

/// adaptive step size fell below the representable floor
class StepSizeUnderflow : public Error {
public:
    using Error::Error;
};

/// trajectory left the admissible domain (e.g. entered a singular wedge)
class DomainExit : public Error {
public:
    using Error::Error;
};

/// asymptotic linearization block has eigenvalues on the imaginary axis
class NonHyperbolicBlock : public Error {
public:
    using Error::Error;
};

/// finite-element negative-inertia count changed under mesh doubling
class MeshNotConverged : public Error {
public:
    using Error::Error;
};

/// crossing with numerically zero signature; the caller must decide how to count it
class TangentialCrossingUnresolved : public Error {
public:
    explicit TangentialCrossingUnresolved(double t)
        : Error("tangential crossing of undecidable sign at t=" + std::to_string(t)), t(t) {}
    double t;
};

/// an index did not become independent of the truncation window
class NotStabilized : public Error {
public:
    using Error::Error;
};

/// last-sample direction fit matched neither eigenvector within tolerance
class AmbiguousDirection : public Error {
public:
    using Error::Error;
};

constexpr double PI = 3.141592653589793238462643383279502884;

/// wrap an angle into (-pi, pi]
inline double wrapAngle(double a) {
    a = std::remainder(a, 2 * PI);
    return a <= -PI ? a + 2 * PI : a;
}

/// absolute distance between two angles on the circle, in [0, pi]
inline double angleDist(double a, double b) {
    return std::fabs(std::remainder(a - b, 2 * PI));
}

/// true when two angles coincide on the circle within tol
inline bool sameAngle(double a, double b, double tol = 1e-8) {
    return angleDist(a, b) < tol;
}

/// FNV-1a hash, used to stamp output files with their generating configuration
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace parindex
