#pragma once

#include <stdexcept>
#include <string>

namespace fracjac {

/// Base class for every error raised by the library. Subclasses name the
/// failed precondition so callers (the CLI, the experiment drivers) can
/// decide whether to skip a sample or abort.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error { public: using Error::Error; };
class InvalidParameter : public Error { public: using Error::Error; };
class LookupError : public Error { public: using Error::Error; };
class Unsupported : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

/// Finite-difference stencil would leave the domain.
class BoundaryProximity : public Error { public: using Error::Error; };

/// u(x) == a exactly while evaluating the sphere projection u^a.
class SingularPoint : public Error { public: using Error::Error; };

/// Target value lies (numerically) on the image of the boundary.
class BoundaryValue : public Error {
public:
    BoundaryValue(const std::string& what, double distance)
        : Error(what), distance_(distance) {}
    double distance() const noexcept { return distance_; }

private:
    double distance_;
};

/// A preimage of the target has a (numerically) vanishing Jacobian.
class SingularValue : public Error { public: using Error::Error; };

/// Level t of a test function is too close to a critical value.
class CriticalLevel : public Error { public: using Error::Error; };

/// Continuation hit a point where the joint gradient loses rank.
class SingularCurve : public Error { public: using Error::Error; };

}  // namespace fracjac
