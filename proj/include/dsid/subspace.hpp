#pragma once

#include "dsid/types.hpp"

#include <optional>
#include <utility>

namespace dsid {

/// Tuning of the local subspace identification method. `order` empty means
/// AUTO selection from the singular-value spectrum.
struct SimConfig {
    Index past_window = 15;
    Index future_window = 10;
    double reg = 0.05;
    std::optional<Index> order;
    Index max_order_candidates = 10;

    void validate() const;
};

/// Local state-sequence estimate, valid up to an unknown invertible
/// similarity. Column j of Xhat estimates x(first_k + j); the sequence has
/// T - past_window - future_window + 1 columns.
struct StateEstimate {
    Matrix Xhat;             // n x Ns
    Vector singular_values;  // full spectrum used for order selection
    Index order_used = 0;
    Index first_k = 0;       // absolute time of Xhat column 0 (= past_window)
    Matrix P_x;              // n x past_window*q projector: Xhat col = P_x * past stack
    double gram_condition = 0;
};

/// Past-stacked regressor Z and future-stacked outputs Yf over the valid
/// range k in [past_window, T - future_window]:
///   Z  column j = col(omega(k-past), ..., omega(k-1)),   k = past_window + j
///   Yf column j = col(y(k), ..., y(k+future-1)).
std::pair<Matrix, Matrix> build_data_matrices(const Matrix& omega, const Matrix& y,
                                              const SimConfig& cfg);

/// High-order ARX step: the block row [M_past, ..., M_1] minimizing the
/// ridge-regularized residual of y(k) = sum_j M_j omega(k-j). reg = 0 is
/// ordinary least squares with no conditioning safeguards; lag-stacked
/// regressors with duplicated information degrade accordingly.
Matrix estimate_markov(const Matrix& omega, const Matrix& y, const SimConfig& cfg);

/// AUTO: order with the largest ratio gap sigma_i / sigma_{i+1} among the
/// first max_candidates; fixed: passthrough.
Index order_select(const Vector& singular_values, const std::optional<Index>& order,
                   Index max_candidates);

/// Two-stage estimate: Markov parameters, then SVD of the stacked predictor
/// product over the future window.
StateEstimate estimate_state_sequence(const Matrix& omega, const Matrix& y,
                                      const SimConfig& cfg);

}  // namespace dsid
