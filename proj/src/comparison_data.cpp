#include "tiedpools/comparison_data.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "tiedpools/errors.hpp"

namespace tiedpools {

std::string display_name(std::string_view player, std::string_view handicap) {
  std::string name(player);
  if (!handicap.empty()) {
    name += " (";
    name += handicap;
    name += ")";
  }
  return name;
}

ComparisonData::ComparisonData(std::vector<std::string> players, Matrix wins, Matrix draws)
    : players_(std::move(players)), wins_(std::move(wins)), draws_(std::move(draws)) {
  const auto t = static_cast<Eigen::Index>(players_.size());
  if (wins_.rows() != t || wins_.cols() != t || draws_.rows() != t || draws_.cols() != t) {
    throw ValidationError("win and draw matrices must be " + std::to_string(t) + "x" +
                          std::to_string(t) + " to match the player list");
  }
  std::unordered_map<std::string, int> seen;
  for (const auto& p : players_) {
    if (p.empty()) throw ValidationError("player identifiers must be non-empty");
    if (++seen[p] > 1) throw ValidationError("duplicate player identifier '" + p + "'");
  }
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < t; ++j) {
      const double w = wins_(i, j);
      const double d = draws_(i, j);
      if (!std::isfinite(w) || !std::isfinite(d) || w < 0 || d < 0) {
        throw ValidationError("counts must be finite and non-negative (entry " +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (i == j && (w != 0 || d != 0)) {
        throw ValidationError("diagonal entries must be zero (player '" + players_[i] + "')");
      }
      if (d != draws_(j, i)) {
        throw ValidationError("draw matrix must be symmetric (entry " + std::to_string(i) +
                              "," + std::to_string(j) + ")");
      }
    }
  }
}

std::optional<std::size_t> ComparisonData::index_of(std::string_view player) const {
  for (std::size_t i = 0; i < players_.size(); ++i) {
    if (players_[i] == player) return i;
  }
  return std::nullopt;
}

bool operator==(const ComparisonData& a, const ComparisonData& b) {
  return a.players_ == b.players_ && a.wins_ == b.wins_ && a.draws_ == b.draws_;
}

DerivedTotals derive_totals(const ComparisonData& data) {
  DerivedTotals out;
  out.scores = data.wins() + 0.5 * data.draws();
  out.games = out.scores + out.scores.transpose();
  out.total_scores = out.scores.rowwise().sum();
  out.total_games = out.games.rowwise().sum();
  const auto t = static_cast<Eigen::Index>(data.size());
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = i + 1; j < t; ++j) out.total_draws += data.draws()(i, j);
  }
  out.total_played = out.total_scores.sum();
  return out;
}

ComparisonData scale(const ComparisonData& data, double lambda) {
  if (!(lambda > 0) || !std::isfinite(lambda)) {
    throw ValidationError("scale factor must be positive and finite");
  }
  return ComparisonData(data.players(), lambda * data.wins(), lambda * data.draws());
}

ComparisonData from_match_records(std::span<const MatchRecord> records) {
  std::vector<std::string> players;
  std::map<std::string, std::size_t> index;
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = index.try_emplace(name, players.size());
    if (inserted) players.push_back(name);
    return it->second;
  };

  struct Entry {
    std::size_t i, j;
    const MatchRecord* rec;
  };
  std::vector<Entry> entries;
  entries.reserve(records.size());
  std::size_t row = 0;
  for (const auto& r : records) {
    ++row;
    if (r.player.empty() || r.opponent.empty()) {
      throw ValidationError("record " + std::to_string(row) + ": empty player identifier");
    }
    for (double c : {r.wins, r.losses, r.draws}) {
      if (!std::isfinite(c) || c < 0) {
        throw ValidationError("record " + std::to_string(row) + ": counts must be non-negative");
      }
    }
    // The handicap belongs to the player giving or receiving odds in this row.
    const std::string self = display_name(r.player, r.handicap);
    if (self == r.opponent || r.player == r.opponent) {
      throw ValidationError("record " + std::to_string(row) + ": player '" + r.player +
                            "' cannot play against itself");
    }
    const std::size_t i = intern(self);
    const std::size_t j = intern(r.opponent);
    entries.push_back({i, j, &r});
  }

  const auto t = static_cast<Eigen::Index>(players.size());
  Matrix wins = Matrix::Zero(t, t);
  Matrix draws = Matrix::Zero(t, t);
  for (const auto& e : entries) {
    wins(e.i, e.j) += e.rec->wins;
    wins(e.j, e.i) += e.rec->losses;
    draws(e.i, e.j) += e.rec->draws;
    draws(e.j, e.i) += e.rec->draws;
  }
  return ComparisonData(std::move(players), std::move(wins), std::move(draws));
}

std::vector<MatchRecord> to_match_records(const ComparisonData& data) {
  std::vector<MatchRecord> out;
  const auto t = static_cast<Eigen::Index>(data.size());
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = i + 1; j < t; ++j) {
      const double w = data.wins()(i, j);
      const double l = data.wins()(j, i);
      const double d = data.draws()(i, j);
      if (w == 0 && l == 0 && d == 0) continue;
      out.push_back({data.players()[i], data.players()[j], w, l, d, {}});
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> connected_components(const ComparisonData& data) {
  const std::size_t t = data.size();
  std::vector<std::size_t> parent(t);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = i + 1; j < t; ++j) {
      const double n = data.wins()(i, j) + data.wins()(j, i) + data.draws()(i, j);
      if (n > 0) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t i = 0; i < t; ++i) {
    auto [it, inserted] = slot.try_emplace(find(i), groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

}  // namespace tiedpools
