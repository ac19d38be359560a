#pragma once

#include "dsid/model.hpp"
#include "dsid/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace dsid {

/// Input/output (and, when available, true-state) time series of a simulated
/// chain. Column k holds time step k; rows are stacked by subsystem, i.e.
/// rows [i*m, (i+1)*m) of U belong to subsystem i.
struct DataSet {
    Matrix U;                 // N*m x T
    Matrix Y;                 // N*r x T
    std::optional<Matrix> X;  // N*n x T, true states (oracle only)
    Index N = 0;
    Index m = 0;
    Index r = 0;
    Index n = 0;  // meaningful only when X is present

    Index T() const { return Y.cols(); }

    Vector u(Index i, Index k) const { return U.col(k).segment(i * m, m); }
    Vector y(Index i, Index k) const { return Y.col(k).segment(i * r, r); }
    Vector x(Index i, Index k) const;

    void validate() const;
};

/// Runs the global recursion x(k+1) = A x(k) + B u(k), y(k) = C x(k) + noise(k)
/// for k = 0..T-1. U must be N*m x T; noise, when given, N*r x T.
DataSet simulate(const GlobalModel& model, const Matrix& U, const Vector& x0, Index T,
                 const std::optional<Matrix>& noise = std::nullopt);

/// Adds zero-mean white Gaussian noise to every output channel (row) with
/// variance var(channel) / 10^(snr_db/10). snr_db = +inf returns Y unchanged.
Matrix add_noise_snr(const Matrix& Y, double snr_db, std::uint64_t seed);

/// Unit-variance Gaussian white-noise input series, N*m x T.
Matrix white_noise_inputs(Index N, Index m, Index T, std::uint64_t seed);

/// CSV round trip. Format: header `k,subsystem,u_1..u_m,y_1..y_r[,x_1..x_n]`,
/// one row per (time, subsystem), time-major.
void write_dataset_csv(std::ostream& os, const DataSet& data);
void write_dataset_csv(const std::string& path, const DataSet& data);
DataSet read_dataset_csv(std::istream& is);
DataSet read_dataset_csv(const std::string& path);

}  // namespace dsid
