#include "tiedpools/pool_inference.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "tiedpools/errors.hpp"

namespace tiedpools {

namespace {

double f(double x) { return x * x * (1 - x); }
double f_prime(double x) { return x * (2 - 3 * x); }

int third_of(int i, int j) { return 3 - i - j; }

struct NewtonSystem {
  std::array<double, 3> p;
  int ref;  // player with the largest proportion anchors both ratio equations

  Eigen::Vector3d residual(const Eigen::Vector3d& pi) const {
    Eigen::Vector3d r;
    int row = 0;
    for (int i = 0; i < 3; ++i) {
      if (i == ref) continue;
      r[row++] = p[ref] * f(pi[i]) - p[i] * f(pi[ref]);
    }
    r[2] = pi.sum() - 1;
    return r;
  }

  Eigen::Matrix3d jacobian(const Eigen::Vector3d& pi) const {
    Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
    int row = 0;
    for (int i = 0; i < 3; ++i) {
      if (i == ref) continue;
      j(row, i) = p[ref] * f_prime(pi[i]);
      j(row, ref) = -p[i] * f_prime(pi[ref]);
      ++row;
    }
    j.row(2).setOnes();
    return j;
  }
};

enum class NewtonOutcome { Converged, Singular, Stalled };

NewtonOutcome newton(const NewtonSystem& sys, Eigen::Vector3d& pi) {
  constexpr double kResidualTol = 1e-15;
  Eigen::Vector3d r = sys.residual(pi);
  double ss = r.squaredNorm();
  for (int it = 0; it < 200; ++it) {
    if (r.cwiseAbs().maxCoeff() <= kResidualTol) return NewtonOutcome::Converged;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(sys.jacobian(pi));
    if (!lu.isInvertible()) return NewtonOutcome::Singular;
    const Eigen::Vector3d step = lu.solve(-r);
    double lambda = 1;
    bool improved = false;
    for (int halving = 0; halving <= 60; ++halving, lambda /= 2) {
      const Eigen::Vector3d trial = pi + lambda * step;
      const Eigen::Vector3d tr = sys.residual(trial);
      if (tr.squaredNorm() < ss) {
        pi = trial;
        r = tr;
        ss = tr.squaredNorm();
        improved = true;
        break;
      }
    }
    if (!improved) {
      return r.cwiseAbs().maxCoeff() <= 1e-12 ? NewtonOutcome::Converged : NewtonOutcome::Stalled;
    }
  }
  return r.cwiseAbs().maxCoeff() <= 1e-12 ? NewtonOutcome::Converged : NewtonOutcome::Stalled;
}

}  // namespace

Matrix encounter_matrix(const std::array<double, 3>& pi) {
  Matrix e = Matrix::Zero(3, 3);
  for (auto [i, j] : kPoolPairs) {
    const double sum = pi[i] + pi[j];
    if (!(sum > 0)) throw ValidationError("two players with zero strength cannot meet");
    e(i, j) = pi[i] / sum;
    e(j, i) = pi[j] / sum;
  }
  return e;
}

PoolExpectations pool_expectations(const Matrix& encounter, double rounds) {
  if (encounter.rows() != 3 || encounter.cols() != 3) {
    throw ValidationError("encounter matrix must be 3x3");
  }
  for (auto [i, j] : kPoolPairs) {
    const double a = encounter(i, j), b = encounter(j, i);
    if (!(a >= 0 && b >= 0) || std::abs(a + b - 1) > 1e-12) {
      throw ValidationError("encounter probabilities of a pair must be in [0, 1] and sum to 1");
    }
  }
  if (!(rounds >= 0) || !std::isfinite(rounds)) throw ValidationError("rounds must be non-negative");

  PoolExpectations out;
  double decided = 0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    out.q[i] = encounter(i, j) * encounter(i, k);
    decided += out.q[i];
  }
  out.p0 = 1 - decided;
  if (!(decided > 0)) throw ValidationError("pools can never be decided");
  for (int i = 0; i < 3; ++i) out.round_win[i] = out.q[i] / decided;
  out.expected_pools = rounds / decided;
  for (auto [i, j] : kPoolPairs) {
    // Pair (i, j) goes unplayed when the third player plays first and beats both.
    const double n = (1 - 2.0 / 3.0 * out.q[third_of(i, j)]) * out.expected_pools;
    out.n_e(i, j) = out.n_e(j, i) = n;
    out.s_e(i, j) = n * encounter(i, j);
    out.s_e(j, i) = n * encounter(j, i);
  }
  return out;
}

std::array<double, 3> solve_pool_strengths(const std::array<double, 3>& p) {
  int zeros = 0;
  double total = 0;
  for (double v : p) {
    if (!(v >= 0) || !std::isfinite(v)) throw ValidationError("proportions must be non-negative");
    if (v == 0) ++zeros;
    total += v;
  }
  if (std::abs(total - 1) > 1e-9) throw ValidationError("proportions must sum to 1");
  if (zeros > 1) throw ValidationError("at most one round-win proportion may be zero");

  if (zeros == 1) {
    std::array<double, 3> pi{};
    for (int i = 0; i < 3; ++i) pi[i] = p[i] / total;
    return pi;
  }

  NewtonSystem sys{p, static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin())};
  const Eigen::Vector3d start(p[0], p[1], p[2]);
  for (int attempt = 0; attempt <= 5; ++attempt) {
    Eigen::Vector3d pi = start;
    if (attempt > 0) {
      // Deterministic +-1% multiplicative perturbation, a different pattern per restart.
      for (int i = 0; i < 3; ++i) pi[i] *= 1 + 0.01 * (((attempt >> i) & 1) ? 1 : -1);
      pi /= pi.sum();
    }
    if (newton(sys, pi) == NewtonOutcome::Converged && (pi.array() >= 0).all() &&
        (pi.array() <= 1).all()) {
      return {pi[0], pi[1], pi[2]};
    }
  }
  throw SingularSystemError("pool strength system did not converge (singular Jacobian)");
}

PoolInference infer_pools(const PoolCounts& counts) {
  for (double w : counts.wins) {
    if (!(w >= 0) || !std::isfinite(w)) throw ValidationError("round-win counts must be non-negative");
  }
  const double n = counts.rounds();
  if (!(n > 0)) throw ValidationError("no comparisons: round-win counts sum to zero");
  for (std::size_t i = 0; i < 3; ++i) {
    if (counts.labels[i].empty()) throw ValidationError("player labels must be non-empty");
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (counts.labels[i] == counts.labels[j]) {
        throw ValidationError("duplicate player label '" + counts.labels[i] + "'");
      }
    }
  }

  PoolInference out;
  out.labels = counts.labels;
  out.rounds = n;
  out.pi = solve_pool_strengths({counts.wins[0] / n, counts.wins[1] / n, counts.wins[2] / n});
  const Matrix e = encounter_matrix(out.pi);
  for (int k = 0; k < 3; ++k) {
    out.p_pair[k] = e(kPoolPairs[k].first, kPoolPairs[k].second);
    out.near_zero[k] = out.pi[k] < 1e-6;
  }
  const auto ex = pool_expectations(e, n);
  out.q = ex.q;
  out.p0 = ex.p0;
  out.expected_pools = ex.expected_pools;
  out.n_e = ex.n_e;
  out.s_e = ex.s_e;
  return out;
}

ImputedGames impute_draws(const PoolInference& inf, double nu) {
  if (!(nu >= 0) || !std::isfinite(nu)) throw ValidationError("nu must be non-negative and finite");
  ImputedGames out;
  out.nu_used = nu;
  for (int k = 0; k < 3; ++k) {
    const auto [i, j] = kPoolPairs[k];
    const double n = inf.n_e(i, j);
    const double s_ij = inf.s_e(i, j), s_ji = inf.s_e(j, i);
    double e = n > 0 ? s_ij / n : 0;
    if (e < -1e-12 || e > 1 + 1e-12 || s_ij < 0 || s_ji < 0) {
      throw ValidationError("encounter probability outside [0, 1] for pair " + inf.labels[i] +
                            "-" + inf.labels[j]);
    }
    e = std::clamp(e, 0.0, 1.0);
    const double root = nu * std::sqrt(e - e * e);
    out.d_pair[k] = root / (1 + root);
    const double t = nu * std::sqrt(s_ij * s_ji);
    out.t_imputed(i, j) = out.t_imputed(j, i) = t;
    out.w_imputed(i, j) = s_ij;
    out.w_imputed(j, i) = s_ji;
    out.n_games(i, j) = out.n_games(j, i) = n / (1 - out.d_pair[k]);
  }
  return out;
}

PoolsResult pools_pipeline(const PoolCounts& counts, double nu, const FitConfig& cfg) {
  auto inference = infer_pools(counts);
  auto imputed = impute_draws(inference, nu);
  ComparisonData data({inference.labels.begin(), inference.labels.end()}, imputed.w_imputed,
                      imputed.t_imputed);
  auto fit = fit_constrained_alternative(data, cfg);
  return {std::move(inference), std::move(imputed), std::move(data), std::move(fit)};
}

}  // namespace tiedpools
