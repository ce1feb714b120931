#include "tiedpools/model_math.hpp"

#include <cmath>
#include <limits>

#include "likelihood_equations.hpp"
#include "tiedpools/errors.hpp"

namespace tiedpools {

namespace {

void check_strength(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) {
    throw ValidationError(std::string(what) + " must be positive and finite");
  }
}

void check_nu(double nu) {
  if (!(nu >= 0) || !std::isfinite(nu)) {
    throw ValidationError("draw propensity nu must be non-negative and finite");
  }
}

}  // namespace

PhiBundle phi_bundle(double x, double nu) {
  if (!(x >= 0) || !std::isfinite(x)) throw ValidationError("phi: x must be non-negative");
  check_nu(nu);

  PhiBundle b;
  b.x = x;
  b.nu = nu;
  if (x == 0) {
    b.q_aux = nu / 4;
    b.phi = 0;
    b.phi_prime = nu > 0 ? 1 : 0;
    b.phi_nu = 0;
    return b;
  }

  // With a = nu (x - 1) / 4 we have q^2 = a^2 + x, phi = (nu/2)(q + a) and
  // phi_nu = x (q + a) / (2 q (q - a)). One of q + a, q - a cancels badly when
  // |a| is large, so recover it from (q + a)(q - a) = x.
  const double a = nu * (x - 1) / 4;
  const double q = std::hypot(a, std::sqrt(x));
  double q_plus_a;
  double q_minus_a;
  if (a >= 0) {
    q_plus_a = q + a;
    q_minus_a = x / q_plus_a;
  } else {
    q_minus_a = q - a;
    q_plus_a = x / q_minus_a;
  }

  b.q_aux = q;
  if (nu == 2) {
    b.phi = x;
    b.phi_prime = 1;
  } else {
    b.phi = nu / 2 * q_plus_a;
    b.phi_prime = nu * (1 + b.phi) / (4 * q);
  }
  b.phi_nu = x * q_plus_a / (2 * q * q_minus_a);
  return b;
}

PairProbabilities davidson_pair(double pi_i, double pi_j, double nu) {
  check_strength(pi_i, "davidson_pair: pi_i");
  check_strength(pi_j, "davidson_pair: pi_j");
  check_nu(nu);
  const double g = nu * std::sqrt(pi_i) * std::sqrt(pi_j);
  const double denom = pi_i + pi_j + g;
  return {pi_i / denom, pi_j / denom, g / denom};
}

PairProbabilities alternative_pair(double sigma_i, double sigma_j, double nu) {
  check_strength(sigma_i, "alternative_pair: sigma_i");
  check_strength(sigma_j, "alternative_pair: sigma_j");
  check_nu(nu);
  const double ratio = sigma_j / sigma_i;
  if (std::abs(ratio - 1) < 1e-12) {
    const double p = 1 / (2 + nu);
    return {p, p, nu * p};
  }
  const double p_ij = sigma_i / (sigma_i + sigma_j) / (1 + phi_bundle(ratio, nu).phi);
  const double p_ji = sigma_j / (sigma_i + sigma_j) / (1 + phi_bundle(1 / ratio, nu).phi);
  return {p_ij, p_ji, nu * std::sqrt(p_ij * p_ji)};
}

PairProbabilities pair_probabilities(DrawModel model, double a, double b, double nu) {
  return model == DrawModel::Davidson ? davidson_pair(a, b, nu) : alternative_pair(a, b, nu);
}

double log_likelihood(const ComparisonData& data, const Vector& strengths, double nu,
                      DrawModel model) {
  const auto t = static_cast<Eigen::Index>(data.size());
  if (strengths.size() != t) {
    throw ValidationError("log_likelihood: strength vector has " +
                          std::to_string(strengths.size()) + " entries, data has " +
                          std::to_string(t) + " players");
  }
  constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
  double total = 0;
  auto add = [&](double count, double prob) {
    if (count == 0) return true;
    if (prob <= 0) return false;
    total += count * std::log(prob);
    return true;
  };
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = i + 1; j < t; ++j) {
      const double w_ij = data.wins()(i, j);
      const double w_ji = data.wins()(j, i);
      const double t_ij = data.draws()(i, j);
      if (w_ij == 0 && w_ji == 0 && t_ij == 0) continue;
      const auto pr = pair_probabilities(model, strengths[i], strengths[j], nu);
      if (!add(w_ij, pr.p_ij) || !add(w_ji, pr.p_ji) || !add(t_ij, pr.d_ij)) return kMinusInf;
    }
  }
  return total;
}

LikelihoodTerms likelihood_terms(const ComparisonData& data, const Vector& strengths, double nu,
                                 DrawModel model) {
  if (strengths.size() != static_cast<Eigen::Index>(data.size())) {
    throw ValidationError("likelihood_terms: dimension mismatch");
  }
  const auto totals = derive_totals(data);
  if (model == DrawModel::Davidson) {
    return {detail::davidson_g(totals.games, strengths, nu),
            detail::davidson_h(totals.games, strengths, nu)};
  }
  return {detail::alternative_g(totals.scores, totals.games, strengths, nu),
          detail::alternative_h(totals.scores, strengths, nu)};
}

namespace detail {

Vector davidson_g(const Matrix& games, const Vector& pi, double nu) {
  const auto t = pi.size();
  Vector g = Vector::Zero(t);
  for (Eigen::Index k = 0; k < t; ++k) {
    for (Eigen::Index i = 0; i < t; ++i) {
      if (i == k || games(i, k) == 0) continue;
      const double root = std::sqrt(pi[i] * pi[k]);
      g[k] += games(i, k) * (1 + nu / 2 * std::sqrt(pi[i] / pi[k])) / (pi[i] + pi[k] + nu * root);
    }
  }
  return g;
}

double davidson_h(const Matrix& games, const Vector& pi, double nu) {
  const auto t = pi.size();
  double h = 0;
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = i + 1; j < t; ++j) {
      if (games(i, j) == 0) continue;
      const double root = std::sqrt(pi[i] * pi[j]);
      h += games(i, j) * root / (pi[i] + pi[j] + nu * root);
    }
  }
  return h;
}

Vector alternative_g(const Matrix& scores, const Matrix& games, const Vector& sigma, double nu) {
  const auto t = sigma.size();
  Vector g = Vector::Zero(t);
  for (Eigen::Index k = 0; k < t; ++k) {
    for (Eigen::Index i = 0; i < t; ++i) {
      if (i == k || games(i, k) == 0) continue;
      g[k] += games(i, k) / (sigma[i] + sigma[k]);
      // phi' / (1 + phi) = nu / (4 q)
      const auto ik = phi_bundle(sigma[i] / sigma[k], nu);
      const auto ki = phi_bundle(sigma[k] / sigma[i], nu);
      g[k] -= scores(k, i) * (sigma[i] / (sigma[k] * sigma[k])) * ik.phi_prime / (1 + ik.phi);
      g[k] += scores(i, k) / sigma[i] * ki.phi_prime / (1 + ki.phi);
    }
  }
  return g;
}

double alternative_h(const Matrix& scores, const Vector& sigma, double nu) {
  const auto t = sigma.size();
  double h = 0;
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < t; ++j) {
      if (i == j || scores(i, j) == 0) continue;
      const auto b = phi_bundle(sigma[j] / sigma[i], nu);
      h += scores(i, j) * b.phi_nu / (1 + b.phi);
    }
  }
  return h;
}

}  // namespace detail

}  // namespace tiedpools
