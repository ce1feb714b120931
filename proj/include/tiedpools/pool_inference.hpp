#pragma once

#include <array>
#include <string>

#include "tiedpools/comparison_data.hpp"
#include "tiedpools/estimators.hpp"

namespace tiedpools {

// Round-win counts of three players who meet in pools, one round at a time.
struct PoolCounts {
  std::array<std::string, 3> labels{"B", "C", "D"};
  std::array<double, 3> wins{};

  double rounds() const { return wins[0] + wins[1] + wins[2]; }
};

// Pair order used by every per-pair array: (0,1), (0,2), (1,2).
inline constexpr std::array<std::pair<int, int>, 3> kPoolPairs{{{0, 1}, {0, 2}, {1, 2}}};

// Expected pool statistics when the three pairwise encounters are won with
// probabilities e(i, j) (e(i, j) + e(j, i) = 1) and each player sits out with
// probability 1/3.
struct PoolExpectations {
  std::array<double, 3> q{};           // player beats both others in a pool
  double p0 = 0;                       // pool is tied
  std::array<double, 3> round_win{};   // q / (1 - p0)
  double expected_pools = 0;           // rounds / (1 - p0)
  Matrix n_e = Matrix::Zero(3, 3);     // expected encounters per pair
  Matrix s_e = Matrix::Zero(3, 3);     // expected encounters won, s_e(i,j) + s_e(j,i) = n_e(i,j)
};

PoolExpectations pool_expectations(const Matrix& encounter, double rounds);

// Bradley-Terry encounter probabilities pi_i / (pi_i + pi_j); zero on the diagonal.
Matrix encounter_matrix(const std::array<double, 3>& pi);

struct PoolInference {
  std::array<std::string, 3> labels;
  double rounds = 0;
  std::array<double, 3> pi{};
  std::array<double, 3> p_pair{};  // encounter win probability of the first player of each pair
  std::array<double, 3> q{};
  double p0 = 0;
  double expected_pools = 0;
  Matrix n_e = Matrix::Zero(3, 3);
  Matrix s_e = Matrix::Zero(3, 3);
  // pi below 1e-6, typically from a player who never won a round.
  std::array<bool, 3> near_zero{};
};

// Solves p_i f(pi_j) = p_j f(pi_i), f(x) = x^2 (1 - x), sum(pi) = 1 by damped
// Newton starting from pi = p. A zero proportion yields pi exactly 0 for that
// player.
std::array<double, 3> solve_pool_strengths(const std::array<double, 3>& p);

PoolInference infer_pools(const PoolCounts& counts);

struct ImputedGames {
  double nu_used = 0;
  std::array<double, 3> d_pair{};  // per-game draw probability
  Matrix t_imputed = Matrix::Zero(3, 3);
  Matrix w_imputed = Matrix::Zero(3, 3);
  Matrix n_games = Matrix::Zero(3, 3);
};

ImputedGames impute_draws(const PoolInference& inf, double nu);

struct PoolsResult {
  PoolInference inference;
  ImputedGames imputed;
  ComparisonData data;
  ModelFit fit;
};

// infer_pools, impute_draws, then a Constrained Alternative fit of the imputed games.
PoolsResult pools_pipeline(const PoolCounts& counts, double nu, const FitConfig& cfg = {});

}  // namespace tiedpools
