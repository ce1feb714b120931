#include "tiedpools/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "tiedpools/errors.hpp"
#include "tiedpools/pool_inference.hpp"

namespace tiedpools {

namespace {

constexpr std::uint64_t kMaxConsecutiveDraws = 1'000'000;

void validate(const SimConfig& cfg) {
  for (double s : cfg.strengths) {
    if (!(s > 0) || !std::isfinite(s)) throw ValidationError("strengths must be positive and finite");
  }
  if (!(cfg.nu >= 0) || !std::isfinite(cfg.nu)) {
    throw ValidationError("nu must be non-negative and finite");
  }
  if (cfg.rounds < 1) throw ValidationError("rounds must be at least 1");
}

using PairTable = std::array<std::array<PairProbabilities, 3>, 3>;

PairTable pair_table(const SimConfig& cfg) {
  PairTable t{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a != b) t[a][b] = pair_probabilities(cfg.model, cfg.strengths[a], cfg.strengths[b], cfg.nu);
    }
  }
  return t;
}

// Per-round tallies, folded into the report together with their squares.
struct RoundTally {
  std::uint64_t pools = 0;
  std::uint64_t tied = 0;
  std::uint64_t unplayed = 0;
  int winner = -1;
  CountMatrix games{};
  CountMatrix wins{};
  CountMatrix draws{};
};

class RoundPlayer {
 public:
  RoundPlayer(const SimConfig& cfg, const PairTable& table) : cfg_(cfg), table_(table) {}

  RoundTally play(std::uint64_t round) const {
    CounterRng rng(cfg_.seed, round);
    RoundTally tally;
    for (std::uint64_t pool = 0;; ++pool) {
      const int bye = cfg_.bye_policy == ByePolicy::Rotate
                          ? static_cast<int>((round + pool) % 3)
                          : std::min(static_cast<int>(rng.uniform() * 3), 2);
      ++tally.pools;
      const int i = bye == 0 ? 1 : 0;
      const int j = bye == 2 ? 1 : 2;
      const int first = encounter(i, j, rng, tally);
      const int loser = first == i ? j : i;
      if (encounter(first, bye, rng, tally) == first) {
        ++tally.unplayed;
        tally.winner = first;
        return tally;
      }
      if (encounter(bye, loser, rng, tally) == bye) {
        tally.winner = bye;
        return tally;
      }
      ++tally.tied;
    }
  }

 private:
  // Games between a and b until one is decisive; returns the winner.
  int encounter(int a, int b, CounterRng& rng, RoundTally& tally) const {
    const auto& pr = table_[a][b];
    for (std::uint64_t n = 0; n < kMaxConsecutiveDraws; ++n) {
      ++tally.games[a][b];
      ++tally.games[b][a];
      switch (simulate_game(pr.p_ij, pr.d_ij, rng)) {
        case GameOutcome::WinI:
          ++tally.wins[a][b];
          return a;
        case GameOutcome::WinJ:
          ++tally.wins[b][a];
          return b;
        case GameOutcome::Draw:
          ++tally.draws[a][b];
          ++tally.draws[b][a];
          break;
      }
    }
    throw std::runtime_error("encounter aborted after 1000000 consecutive draws (draw probability " +
                             std::to_string(pr.d_ij) + ")");
  }

  const SimConfig& cfg_;
  const PairTable& table_;
};

void accumulate(SimulationReport& rep, const RoundTally& t) {
  ++rep.rounds;
  ++rep.round_wins[t.winner];
  rep.pools_played += t.pools;
  rep.pools_sq += t.pools * t.pools;
  rep.tied_pools += t.tied;
  rep.tied_sq += t.tied * t.tied;
  rep.unplayed_redundant += t.unplayed;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      rep.games[a][b] += t.games[a][b];
      rep.games_sq[a][b] += t.games[a][b] * t.games[a][b];
      rep.wins[a][b] += t.wins[a][b];
      rep.wins_sq[a][b] += t.wins[a][b] * t.wins[a][b];
      rep.draws[a][b] += t.draws[a][b];
      rep.draws_sq[a][b] += t.draws[a][b] * t.draws[a][b];
    }
  }
}

void add_into(CountMatrix& a, const CountMatrix& b) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a[i][j] += b[i][j];
  }
}

double z_of(double total, double expected_total, double variance_total) {
  const double diff = total - expected_total;
  if (variance_total > 0) return diff / std::sqrt(variance_total);
  if (std::abs(diff) <= 1e-9 * std::max(1.0, std::abs(expected_total))) return 0;
  return diff > 0 ? std::numeric_limits<double>::infinity()
                  : -std::numeric_limits<double>::infinity();
}

// Empirical variance of a per-round count from its sum and sum of squares, times rounds.
double empirical_variance_total(double sum, double sum_sq, double rounds) {
  const double mean = sum / rounds;
  return std::max(sum_sq - rounds * mean * mean, 0.0) * rounds / std::max(rounds - 1, 1.0);
}

}  // namespace

std::string to_string(ByePolicy policy) {
  return policy == ByePolicy::Rotate ? "rotate" : "random";
}

ByePolicy parse_bye_policy(const std::string& name) {
  if (name == "random" || name == "random_uniform") return ByePolicy::RandomUniform;
  if (name == "rotate") return ByePolicy::Rotate;
  throw ValidationError("unknown bye policy '" + name + "' (expected random or rotate)");
}

GameOutcome simulate_game(double p_ij, double d_ij, CounterRng& rng) {
  if (!(p_ij >= 0) || !(d_ij >= 0) || p_ij + d_ij > 1 + 1e-12) {
    throw ValidationError("simulate_game: need p_ij, d_ij >= 0 and p_ij + d_ij <= 1");
  }
  const double u = rng.uniform();
  if (u < p_ij) return GameOutcome::WinI;
  if (u < p_ij + d_ij) return GameOutcome::Draw;
  return GameOutcome::WinJ;
}

SimulationReport& SimulationReport::operator+=(const SimulationReport& o) {
  for (int i = 0; i < 3; ++i) round_wins[i] += o.round_wins[i];
  rounds += o.rounds;
  pools_played += o.pools_played;
  tied_pools += o.tied_pools;
  add_into(games, o.games);
  add_into(wins, o.wins);
  add_into(draws, o.draws);
  unplayed_redundant += o.unplayed_redundant;
  pools_sq += o.pools_sq;
  tied_sq += o.tied_sq;
  add_into(games_sq, o.games_sq);
  add_into(wins_sq, o.wins_sq);
  add_into(draws_sq, o.draws_sq);
  return *this;
}

SimulationReport simulate_series(const SimConfig& cfg) {
  validate(cfg);
  const PairTable table = pair_table(cfg);
  const RoundPlayer player(cfg, table);

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, cfg.rounds));

  std::vector<SimulationReport> parts(threads);
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned k) {
    try {
      const std::uint64_t begin = cfg.rounds * k / threads;
      const std::uint64_t end = cfg.rounds * (k + 1) / threads;
      for (std::uint64_t r = begin; r < end; ++r) accumulate(parts[k], player.play(r));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(work, k);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  SimulationReport total;
  for (const auto& p : parts) total += p;
  return total;
}

SeriesExpectations expected_per_round(const SimConfig& cfg) {
  validate(cfg);
  const PairTable table = pair_table(cfg);
  Matrix e = Matrix::Zero(3, 3);
  for (auto [i, j] : kPoolPairs) {
    const auto& pr = table[i][j];
    e(i, j) = pr.p_ij / (pr.p_ij + pr.p_ji);
    e(j, i) = 1 - e(i, j);
  }
  const auto pool = pool_expectations(e, 1.0);

  SeriesExpectations out;
  out.round_win = pool.round_win;
  out.pools = pool.expected_pools;
  out.tied_pools = pool.p0 * pool.expected_pools;
  // A round ends with one decided pool; it skips a game unless the bye player won it.
  out.unplayed_redundant = 2.0 / 3.0;
  for (auto [i, j] : kPoolPairs) {
    const double d = table[i][j].d_ij;
    const double n = pool.n_e(i, j);
    out.games(i, j) = out.games(j, i) = n / (1 - d);
    out.draws(i, j) = out.draws(j, i) = n * d / (1 - d);
    out.wins(i, j) = pool.s_e(i, j);
    out.wins(j, i) = pool.s_e(j, i);
  }
  return out;
}

std::vector<ZScore> z_scores(const SimulationReport& rep, const SeriesExpectations& ex,
                             const std::array<std::string, 3>& labels) {
  const double r = static_cast<double>(rep.rounds);
  std::vector<ZScore> out;
  auto binomial = [&](std::string name, std::uint64_t count, double p) {
    const double obs = static_cast<double>(count);
    out.push_back({std::move(name), obs, r * p, z_of(obs, r * p, r * p * (1 - p))});
  };
  auto empirical = [&](std::string name, std::uint64_t sum, std::uint64_t sum_sq, double mean) {
    const double obs = static_cast<double>(sum);
    out.push_back({std::move(name), obs, r * mean,
                   z_of(obs, r * mean,
                        empirical_variance_total(obs, static_cast<double>(sum_sq), r))});
  };

  for (int i = 0; i < 3; ++i) binomial("round_wins." + labels[i], rep.round_wins[i], ex.round_win[i]);
  empirical("pools_played", rep.pools_played, rep.pools_sq, ex.pools);
  empirical("tied_pools", rep.tied_pools, rep.tied_sq, ex.tied_pools);
  binomial("unplayed_redundant", rep.unplayed_redundant, ex.unplayed_redundant);
  for (auto [i, j] : kPoolPairs) {
    const std::string pair = labels[i] + "-" + labels[j];
    empirical("games." + pair, rep.games[i][j], rep.games_sq[i][j], ex.games(i, j));
    empirical("draws." + pair, rep.draws[i][j], rep.draws_sq[i][j], ex.draws(i, j));
    empirical("wins." + labels[i] + ">" + labels[j], rep.wins[i][j], rep.wins_sq[i][j], ex.wins(i, j));
    empirical("wins." + labels[j] + ">" + labels[i], rep.wins[j][i], rep.wins_sq[j][i], ex.wins(j, i));
  }
  return out;
}

ComparisonData simulate_matches(const std::vector<std::string>& players, const Vector& strengths,
                                double nu, DrawModel model, std::uint64_t games_per_pair,
                                std::uint64_t seed) {
  const auto t = static_cast<Eigen::Index>(players.size());
  if (strengths.size() != t) throw ValidationError("simulate_matches: dimension mismatch");
  Matrix w = Matrix::Zero(t, t);
  Matrix d = Matrix::Zero(t, t);
  std::uint64_t stream = 0;
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = i + 1; j < t; ++j, ++stream) {
      const auto pr = pair_probabilities(model, strengths[i], strengths[j], nu);
      CounterRng rng(seed, stream);
      for (std::uint64_t g = 0; g < games_per_pair; ++g) {
        switch (simulate_game(pr.p_ij, pr.d_ij, rng)) {
          case GameOutcome::WinI: w(i, j) += 1; break;
          case GameOutcome::WinJ: w(j, i) += 1; break;
          case GameOutcome::Draw: d(i, j) += 1; d(j, i) += 1; break;
        }
      }
    }
  }
  return ComparisonData(players, std::move(w), std::move(d));
}

}  // namespace tiedpools
