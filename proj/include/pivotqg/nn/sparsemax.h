#pragma once

#include <Eigen/Dense>

namespace pivotqg::nn {

/// Euclidean projection of `scores` onto the probability simplex, by the
/// sort-and-threshold rule: with z sorted descending, the support size k is
/// the largest k with 1 + k z_(k) > sum_{i<=k} z_(i), the threshold is
/// tau = (sum_{i<=k} z_(i) - 1) / k, and p_i = max(z_i - tau, 0).
///
/// Throws Error(NonFiniteInput) for empty or non-finite input.
Eigen::VectorXd sparsemax(const Eigen::VectorXd& scores);

/// Threshold tau such that sparsemax(z) = max(z - tau, 0).
double sparsemax_threshold(const Eigen::VectorXd& scores);

/// Vector-Jacobian product of sparsemax at output `p`: on the support
/// S = {i : p_i > 0}, g_i - mean_{j in S} g_j; zero elsewhere.
Eigen::VectorXd sparsemax_backward(const Eigen::VectorXd& p,
                                   const Eigen::VectorXd& upstream);

}  // namespace pivotqg::nn
