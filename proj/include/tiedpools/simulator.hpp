#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tiedpools/comparison_data.hpp"
#include "tiedpools/counter_rng.hpp"
#include "tiedpools/model_math.hpp"

namespace tiedpools {

enum class ByePolicy { RandomUniform, Rotate };

std::string to_string(ByePolicy policy);
ByePolicy parse_bye_policy(const std::string& name);

struct SimConfig {
  std::array<double, 3> strengths{1, 1, 1};
  double nu = 0;
  DrawModel model = DrawModel::Davidson;
  ByePolicy bye_policy = ByePolicy::RandomUniform;
  std::uint64_t rounds = 1;
  std::uint64_t seed = 0;
  // 0 picks the hardware concurrency. The result never depends on this.
  unsigned threads = 1;
};

enum class GameOutcome { WinI, Draw, WinJ };

// Categorical draw over (win_i, draw, win_j) with probabilities (p_ij, d_ij, 1 - p_ij - d_ij).
GameOutcome simulate_game(double p_ij, double d_ij, CounterRng& rng);

using CountMatrix = std::array<std::array<std::uint64_t, 3>, 3>;

struct SimulationReport {
  std::array<std::uint64_t, 3> round_wins{};
  std::uint64_t rounds = 0;
  std::uint64_t pools_played = 0;
  std::uint64_t tied_pools = 0;
  CountMatrix games{};  // symmetric, games played per pair
  CountMatrix wins{};   // wins(i, j): decisive games i won against j
  CountMatrix draws{};  // symmetric
  std::uint64_t unplayed_redundant = 0;

  // Sums over rounds of squared per-round counts, for empirical variances.
  std::uint64_t pools_sq = 0;
  std::uint64_t tied_sq = 0;
  CountMatrix games_sq{};
  CountMatrix wins_sq{};
  CountMatrix draws_sq{};

  SimulationReport& operator+=(const SimulationReport& other);
  friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

// Plays cfg.rounds rounds of three-player pools. Draws inside an encounter are
// replayed; an encounter with 10^6 consecutive draws throws std::runtime_error.
SimulationReport simulate_series(const SimConfig& cfg);

// Expected per-round values of the report's counters under cfg (random byes).
struct SeriesExpectations {
  std::array<double, 3> round_win{};
  double pools = 0;
  double tied_pools = 0;
  Matrix games = Matrix::Zero(3, 3);
  Matrix wins = Matrix::Zero(3, 3);
  Matrix draws = Matrix::Zero(3, 3);
  double unplayed_redundant = 0;
};

SeriesExpectations expected_per_round(const SimConfig& cfg);

struct ZScore {
  std::string name;
  double observed = 0;
  double expected = 0;
  double z = 0;
};

// Totals compared with rounds times the per-round expectation; the standard
// error uses the empirical per-round variance (binomial for round wins).
std::vector<ZScore> z_scores(const SimulationReport& report, const SeriesExpectations& expected,
                             const std::array<std::string, 3>& labels = {"B", "C", "D"});

// Independent games between every pair of t players, games_per_pair each.
ComparisonData simulate_matches(const std::vector<std::string>& players, const Vector& strengths,
                                double nu, DrawModel model, std::uint64_t games_per_pair,
                                std::uint64_t seed);

}  // namespace tiedpools
