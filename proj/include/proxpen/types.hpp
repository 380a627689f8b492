#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace proxpen {

// Dense storage is row-major throughout; kernels rely on contiguous rows.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Lower/upper curvature pair (m, M) of a smooth function g:
//   -(m/2)|u-z|^2 <= g(u) - g(z) - <grad g(z), u-z> <= (M/2)|u-z|^2.
struct Curvature {
    double lower = 0.0;
    double upper = 0.0;
};

// Error hierarchy. The CLI maps each family onto a process exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class IterationLimit : public Error {
public:
    using Error::Error;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw InvalidInput(what);
}

inline void require_same_size(Index a, Index b, const char* what)
{
    if (a != b) {
        throw InvalidInput(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                           " vs " + std::to_string(b) + ")");
    }
}

} // namespace proxpen
