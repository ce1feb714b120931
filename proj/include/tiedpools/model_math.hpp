#pragma once

#include "tiedpools/comparison_data.hpp"

namespace tiedpools {

enum class DrawModel { Davidson, Alternative };

// The auxiliary functions of the score-ratio ("Alternative") draw model,
// evaluated at strength ratio x and draw propensity nu.
//
//   q(x)     = sqrt(nu^2 (x-1)^2 / 16 + x)
//   phi(x)   = nu^2 (x-1) / 8 + (nu/2) q(x)
//   phi'(x)  = d phi / dx = nu (1 + phi) / (4 q)
//   phi_nu(x) = d phi / d nu
//
// phi(x) relates the win probabilities of the two players through
// sqrt(p_ji / p_ij) = (2/nu) phi(sigma_j / sigma_i).
struct PhiBundle {
  double x = 0;
  double nu = 0;
  double phi = 0;
  double phi_prime = 0;
  double phi_nu = 0;
  double q_aux = 0;
};

PhiBundle phi_bundle(double x, double nu);

// Outcome probabilities of one game between i and j.
struct PairProbabilities {
  double p_ij = 0;  // i wins
  double p_ji = 0;  // j wins
  double d_ij = 0;  // draw
};

// Davidson: p_ij = pi_i / (pi_i + pi_j + nu sqrt(pi_i pi_j)).
PairProbabilities davidson_pair(double pi_i, double pi_j, double nu);

// Alternative: p_ij = sigma_i / (sigma_i + sigma_j) / (1 + phi(sigma_j / sigma_i)).
PairProbabilities alternative_pair(double sigma_i, double sigma_j, double nu);

PairProbabilities pair_probabilities(DrawModel model, double a, double b, double nu);

// Sum over ordered pairs of w_ij log p_ij plus sum over unordered pairs of
// t_ij log d_ij. Returns -infinity when a probability needed by a positive
// count is zero; 0 log 0 counts as 0.
double log_likelihood(const ComparisonData& data, const Vector& strengths, double nu,
                      DrawModel model);

// The terms of the likelihood equations: d logL / d theta_k = s_k / theta_k - G_k
// and d logL / d nu = T / nu - H.
struct LikelihoodTerms {
  Vector g;
  double h = 0;
};

LikelihoodTerms likelihood_terms(const ComparisonData& data, const Vector& strengths, double nu,
                                 DrawModel model);

}  // namespace tiedpools
