#include "tiedpools/reporting.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>

#include "tiedpools/errors.hpp"

namespace tiedpools {

namespace {

std::string pair_key(const std::string& a, const std::string& b) { return a + "-" + b; }

ReportJson labelled(const std::array<std::string, 3>& labels, const std::array<double, 3>& v) {
  ReportJson out = ReportJson::object();
  for (int i = 0; i < 3; ++i) out[labels[i]] = report_real(v[i]);
  return out;
}

ReportJson per_pair(const std::array<std::string, 3>& labels, const Matrix& m) {
  ReportJson out = ReportJson::object();
  for (auto [i, j] : kPoolPairs) out[pair_key(labels[i], labels[j])] = report_real(m(i, j));
  return out;
}

ReportJson per_ordered_pair(const std::array<std::string, 3>& labels, const Matrix& m) {
  ReportJson out = ReportJson::object();
  for (auto [i, j] : kPoolPairs) {
    out[labels[i] + ">" + labels[j]] = report_real(m(i, j));
    out[labels[j] + ">" + labels[i]] = report_real(m(j, i));
  }
  return out;
}

Matrix to_matrix(const CountMatrix& c) {
  Matrix m(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = static_cast<double>(c[i][j]);
  }
  return m;
}

}  // namespace

std::vector<std::pair<std::string, double>> to_ratings(const std::vector<std::string>& players,
                                                       const Vector& strengths,
                                                       const RatingScale& scale) {
  if (!(scale.scale > 0) || !(scale.base > 1)) {
    throw ValidationError("rating scale needs scale > 0 and base > 1");
  }
  if (static_cast<Eigen::Index>(players.size()) != strengths.size()) {
    throw ValidationError("to_ratings: dimension mismatch");
  }
  std::vector<std::pair<std::string, double>> out;
  double shift = 0;
  const double log_base = std::log(scale.base);
  for (std::size_t i = 0; i < players.size(); ++i) {
    const double s = strengths[static_cast<Eigen::Index>(i)];
    if (!(s > 0) || !std::isfinite(s)) {
      throw ValidationError("rating needs a positive strength for '" + players[i] + "'");
    }
    out.emplace_back(players[i], scale.offset + scale.scale * std::log(s) / log_base);
  }
  if (scale.anchor) {
    bool found = false;
    for (const auto& [id, r] : out) {
      if (id == *scale.anchor) {
        shift = r;
        found = true;
      }
    }
    if (!found) throw ValidationError("unknown anchor player '" + *scale.anchor + "'");
    for (auto& entry : out) entry.second -= shift;
  }
  return out;
}

std::vector<std::pair<std::string, double>> to_ratings(const ModelFit& fit, const RatingScale& scale) {
  return to_ratings(fit.players, fit.strengths, scale);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string current_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0') t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ReportJson report_real(double v) {
  if (!std::isfinite(v)) return nullptr;
  if (v == 0) return 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return std::strtod(buf, nullptr);
}

ReportJson fit_to_json(const ModelFit& fit, const ComparisonData& data, const RatingScale& scale) {
  ReportJson j;
  j["model"] = short_name(fit.model);
  j["converged"] = fit.converged;
  j["diverged_nu"] = fit.diverged_nu;
  j["boundary"] = fit.boundary;
  j["iterations"] = fit.iterations;
  j["final_change"] = report_real(fit.final_change);
  j["nu"] = report_real(fit.nu);
  j["log_lik"] = report_real(fit.log_lik);
  if (is_two_stage(fit.model)) j["stage1_log_lik"] = report_real(fit.stage1_log_lik);

  ReportJson strengths = ReportJson::object();
  for (std::size_t i = 0; i < fit.players.size(); ++i) {
    strengths[fit.players[i]] = report_real(fit.strengths[static_cast<Eigen::Index>(i)]);
  }
  j["strengths"] = std::move(strengths);

  ReportJson ratings = ReportJson::object();
  for (const auto& [id, r] : to_ratings(fit, scale)) ratings[id] = report_real(r);
  j["ratings"] = std::move(ratings);

  ReportJson pairs = ReportJson::array();
  const auto t = static_cast<Eigen::Index>(fit.players.size());
  const bool finite_nu = std::isfinite(fit.nu);
  for (Eigen::Index a = 0; a < t; ++a) {
    for (Eigen::Index b = a + 1; b < t; ++b) {
      const double games = data.wins()(a, b) + data.wins()(b, a) + data.draws()(a, b);
      if (games == 0) continue;
      ReportJson p;
      p["player"] = fit.players[a];
      p["opponent"] = fit.players[b];
      p["games"] = report_real(games);
      if (finite_nu) {
        const auto pr =
            pair_probabilities(draw_model_of(fit.model), fit.strengths[a], fit.strengths[b], fit.nu);
        p["p_win"] = report_real(pr.p_ij);
        p["p_loss"] = report_real(pr.p_ji);
        p["p_draw"] = report_real(pr.d_ij);
      } else {
        p["p_win"] = p["p_loss"] = p["p_draw"] = nullptr;
      }
      pairs.push_back(std::move(p));
    }
  }
  j["pairs"] = std::move(pairs);
  return j;
}

ReportJson pool_inference_to_json(const PoolInference& inf) {
  ReportJson j;
  j["rounds"] = report_real(inf.rounds);
  j["pi"] = labelled(inf.labels, inf.pi);
  ReportJson p_pair = ReportJson::object();
  for (int k = 0; k < 3; ++k) {
    const auto [a, b] = kPoolPairs[k];
    p_pair[pair_key(inf.labels[a], inf.labels[b])] = report_real(inf.p_pair[k]);
  }
  j["p_pair"] = std::move(p_pair);
  j["q"] = labelled(inf.labels, inf.q);
  j["p0"] = report_real(inf.p0);
  j["expected_pools"] = report_real(inf.expected_pools);
  j["n_e"] = per_pair(inf.labels, inf.n_e);
  j["s_e"] = per_ordered_pair(inf.labels, inf.s_e);
  ReportJson near_zero = ReportJson::array();
  for (int i = 0; i < 3; ++i) {
    if (inf.near_zero[i]) near_zero.push_back(inf.labels[i]);
  }
  j["near_zero"] = std::move(near_zero);
  return j;
}

ReportJson imputed_to_json(const ImputedGames& imp, const std::array<std::string, 3>& labels) {
  ReportJson j;
  j["nu_used"] = report_real(imp.nu_used);
  ReportJson d = ReportJson::object();
  for (int k = 0; k < 3; ++k) {
    const auto [a, b] = kPoolPairs[k];
    d[pair_key(labels[a], labels[b])] = report_real(imp.d_pair[k]);
  }
  j["d_pair"] = std::move(d);
  j["t_imputed"] = per_pair(labels, imp.t_imputed);
  j["w_imputed"] = per_ordered_pair(labels, imp.w_imputed);
  j["n_games"] = per_pair(labels, imp.n_games);
  return j;
}

ReportJson simulation_to_json(const SimulationReport& rep, const std::array<std::string, 3>& labels) {
  ReportJson j;
  j["rounds"] = rep.rounds;
  ReportJson wins = ReportJson::object();
  for (int i = 0; i < 3; ++i) wins[labels[i]] = rep.round_wins[i];
  j["round_wins"] = std::move(wins);
  j["pools_played"] = rep.pools_played;
  j["tied_pools"] = rep.tied_pools;
  j["games"] = per_pair(labels, to_matrix(rep.games));
  j["wins"] = per_ordered_pair(labels, to_matrix(rep.wins));
  j["draws"] = per_pair(labels, to_matrix(rep.draws));
  j["unplayed_redundant"] = rep.unplayed_redundant;
  return j;
}

ReportJson expectations_to_json(const SeriesExpectations& ex, const std::array<std::string, 3>& labels) {
  ReportJson j;
  j["round_win"] = labelled(labels, ex.round_win);
  j["pools"] = report_real(ex.pools);
  j["tied_pools"] = report_real(ex.tied_pools);
  j["games"] = per_pair(labels, ex.games);
  j["wins"] = per_ordered_pair(labels, ex.wins);
  j["draws"] = per_pair(labels, ex.draws);
  j["unplayed_redundant"] = report_real(ex.unplayed_redundant);
  return j;
}

ReportJson z_scores_to_json(const std::vector<ZScore>& z) {
  ReportJson out = ReportJson::array();
  for (const auto& s : z) {
    ReportJson e;
    e["name"] = s.name;
    e["observed"] = report_real(s.observed);
    e["expected"] = report_real(s.expected);
    e["z"] = report_real(s.z);
    out.push_back(std::move(e));
  }
  return out;
}

ReportJson wrap_report(const RunManifest& manifest, ReportJson body) {
  ReportJson m;
  m["command"] = manifest.command;
  m["input_digest"] = hex64(manifest.input_digest);
  m["body_digest"] = hex64(fnv1a64(body.dump()));
  m["config"] = manifest.config;
  m["tool_version"] = manifest.tool_version;
  m["timestamp"] = manifest.timestamp;
  ReportJson out;
  out["manifest"] = std::move(m);
  out["report"] = std::move(body);
  return out;
}

}  // namespace tiedpools
