#pragma once

#include "tiedpools/comparison_data.hpp"

// Likelihood-equation pieces on pre-derived score and game matrices, shared by
// model_math (public wrappers) and the estimators' inner loops.
namespace tiedpools::detail {

// Davidson: G_k = sum_i n_ik (1 + nu/2 sqrt(pi_i/pi_k)) / (pi_i + pi_k + nu sqrt(pi_i pi_k)).
Vector davidson_g(const Matrix& games, const Vector& pi, double nu);
// Davidson: H = sum_{i<j} n_ij sqrt(pi_i pi_j) / (pi_i + pi_j + nu sqrt(pi_i pi_j)).
double davidson_h(const Matrix& games, const Vector& pi, double nu);

Vector alternative_g(const Matrix& scores, const Matrix& games, const Vector& sigma, double nu);
double alternative_h(const Matrix& scores, const Vector& sigma, double nu);

}  // namespace tiedpools::detail
