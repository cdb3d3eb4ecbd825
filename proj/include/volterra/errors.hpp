#pragma once

#include <stdexcept>
#include <string>

namespace volterra {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// linalg
struct SingularMatrix : Error { using Error::Error; };
struct Inconsistent : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// problem
struct OutOfDomain : Error { using Error::Error; };
struct DegenerateData : Error { using Error::Error; };

// logpower
struct DegenerateCurve : Error { using Error::Error; };
struct UnboundParameter : Error { using Error::Error; };

// characteristic
struct UnclassifiablePoint : Error { using Error::Error; };

// asymptotic
struct SolvabilityFailure : Error { using Error::Error; };
struct DegreeMismatch : Error { using Error::Error; };

// grid
struct OutOfRange : Error { using Error::Error; };

// picard
struct NoContraction : Error { using Error::Error; };
struct Diverged : Error { using Error::Error; };
struct PreconditionResidual : Error { using Error::Error; };

// steps
struct NonlinearCurves : Error { using Error::Error; };
struct Infeasible : Error { using Error::Error; };

// verify
struct DegenerateFit : Error { using Error::Error; };
struct UnknownName : Error { using Error::Error; };

// exprparse
struct SyntaxError : Error {
    SyntaxError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset(offset) {}
    std::size_t offset;
};
struct DomainError : Error { using Error::Error; };

}  // namespace volterra
