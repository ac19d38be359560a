#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace dsid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Usage errors: bad arguments, malformed configs, unreadable files.
struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// Incompatible matrix or series dimensions.
struct DimensionError : InvalidArgument {
    explicit DimensionError(const std::string& msg) : InvalidArgument(msg) {}
};

/// Data that cannot carry the requested operation (e.g. a zero-variance
/// channel asked to receive noise at a finite SNR).
struct DegenerateData : Error {
    explicit DegenerateData(const std::string& msg) : Error(msg) {}
};

/// The finite-time observability Gramian is numerically singular.
struct RankDeficientGramian : Error {
    RankDeficientGramian(const std::string& msg, Index rank)
        : Error(msg), numerical_rank(rank) {}
    Index numerical_rank;
};

/// A least-squares data matrix too ill-conditioned to solve.
struct IllConditionedData : Error {
    IllConditionedData(const std::string& msg, double cond)
        : Error(msg), condition_number(cond) {}
    double condition_number;
};

/// Generic numerical failure (factorization breakdown, invalid constants).
struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

}  // namespace dsid
