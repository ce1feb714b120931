#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace tiedpools {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// One row of a match table. Counts are from `player`'s point of view.
struct MatchRecord {
  std::string player;
  std::string opponent;
  double wins = 0;
  double losses = 0;
  double draws = 0;
  // A non-empty label makes (player, handicap) its own identity.
  std::string handicap;
};

// Player identity as it appears in reports, e.g. "Deschapelles (P & 1)".
std::string display_name(std::string_view player, std::string_view handicap);

// Win and draw counts between players. Counts are reals so imputed
// (fractional) data flows through the same fitters as observed data.
//
// Invariants, checked on construction: square matrices matching the player
// list, zero diagonals, finite non-negative entries, symmetric draws, unique
// non-empty identifiers.
class ComparisonData {
 public:
  ComparisonData() = default;
  ComparisonData(std::vector<std::string> players, Matrix wins, Matrix draws);

  std::size_t size() const { return players_.size(); }
  bool empty() const { return players_.empty(); }

  const std::vector<std::string>& players() const { return players_; }
  // wins()(i, j) is the number of games i won against j.
  const Matrix& wins() const { return wins_; }
  const Matrix& draws() const { return draws_; }

  std::optional<std::size_t> index_of(std::string_view player) const;

  friend bool operator==(const ComparisonData& a, const ComparisonData& b);

 private:
  std::vector<std::string> players_;
  Matrix wins_;
  Matrix draws_;
};

struct DerivedTotals {
  Matrix scores;        // s_ij = w_ij + t_ij / 2
  Vector total_scores;  // s_i
  Matrix games;         // n_ij = w_ij + w_ji + t_ij
  Vector total_games;   // n_i
  double total_draws = 0;  // T, each drawn game counted once
  double total_played = 0; // N
};

DerivedTotals derive_totals(const ComparisonData& data);

// Multiplies every count by `lambda` (> 0).
ComparisonData scale(const ComparisonData& data, double lambda);

// Aggregates match rows. Players are ordered by first appearance.
ComparisonData from_match_records(std::span<const MatchRecord> records);

// One record per pair that met, in index order, handicap folded into the name.
std::vector<MatchRecord> to_match_records(const ComparisonData& data);

// Groups of player indices connected by at least one game.
std::vector<std::vector<std::size_t>> connected_components(const ComparisonData& data);

}  // namespace tiedpools
