#include "tiedpools/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "likelihood_equations.hpp"
#include "tiedpools/errors.hpp"

namespace tiedpools {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryMass = 1e-12;
constexpr double kInitialFloor = 1e-9;

struct Problem {
  const ComparisonData& data;
  DerivedTotals totals;
  bool boundary = false;
};

Problem prepare(const ComparisonData& data) {
  Problem p{data, derive_totals(data)};
  if (data.empty() || !(p.totals.total_played > 0)) {
    throw ValidationError("no comparisons");
  }
  const auto groups = connected_components(data);
  if (groups.size() > 1) {
    std::vector<std::vector<std::string>> named;
    for (const auto& g : groups) {
      auto& out = named.emplace_back();
      for (auto i : g) out.push_back(data.players()[i]);
    }
    throw DisconnectedError(std::move(named));
  }
  for (Eigen::Index k = 0; k < p.totals.total_scores.size(); ++k) {
    const double s = p.totals.total_scores[k];
    if (s == 0 || s == p.totals.total_games[k]) p.boundary = true;
  }
  return p;
}

Vector initial_strengths(const DerivedTotals& totals) {
  Vector theta = totals.total_scores / totals.total_scores.sum();
  theta = theta.cwiseMax(kInitialFloor);
  return theta / theta.sum();
}

double initial_nu(const DerivedTotals& totals) {
  const double t = totals.total_draws;
  const double n = totals.total_played;
  if (t <= 0) return 0;
  if (t >= n) return 1e3;
  return std::max(2 * t / (n - t), 1e-6);
}

void normalize_with_floor(Vector& theta) {
  theta /= theta.sum();
  theta = theta.cwiseMax(kBoundaryMass);
}

double relative_change(double before, double after) {
  if (before == after) return 0;
  if (before == 0) return kInf;
  return std::abs(after - before) / std::abs(before);
}

using HFunction = std::function<double(double)>;

// Root of T - nu H(nu) on [0, nu_max]; +infinity when nu H(nu) stays below T.
double solve_nu(double total_draws, const HFunction& h, double nu_max, double hint) {
  if (total_draws <= 0) return 0;
  auto f = [&](double nu) { return total_draws - nu * h(nu); };
  const double f_max = f(nu_max);
  if (f_max > 0) return kInf;
  if (f_max == 0) return nu_max;

  double hi = (hint > 0 && std::isfinite(hint)) ? std::min(hint * 1.5, nu_max) : 1.0;
  double f_hi = f(hi);
  while (f_hi > 0) {
    hi = std::min(hi * 2, nu_max);
    f_hi = f(hi);
  }
  if (f_hi == 0) return hi;
  double lo = hi / 2;
  double f_lo = f(lo);
  while (f_lo <= 0 && lo > 1e-300) {
    if (f_lo == 0) return lo;
    hi = lo;
    f_hi = f_lo;
    lo /= 2;
    f_lo = f(lo);
  }
  if (f_lo <= 0) return 0;

  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
  return bracket.first + (bracket.second - bracket.first) / 2;
}

HFunction h_function(DrawModel model, const DerivedTotals& totals, const Vector& theta) {
  if (model == DrawModel::Davidson) {
    return [&totals, theta](double nu) { return detail::davidson_h(totals.games, theta, nu); };
  }
  return [&totals, theta](double nu) { return detail::alternative_h(totals.scores, theta, nu); };
}

// One strength sweep at fixed nu. Davidson-family uses theta_k <- s_k / G_k;
// the Alternative family uses the damped form 3 s_k / (G_k + 2 s_k / theta_k).
Vector strength_sweep(DrawModel model, const DerivedTotals& totals, const Vector& theta,
                      double nu) {
  const Vector& s = totals.total_scores;
  Vector next(theta.size());
  if (model == DrawModel::Davidson) {
    const Vector g = detail::davidson_g(totals.games, theta, nu);
    for (Eigen::Index k = 0; k < theta.size(); ++k) next[k] = s[k] / g[k];
  } else {
    const Vector g = detail::alternative_g(totals.scores, totals.games, theta, nu);
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      const double denom = g[k] + 2 * s[k] / theta[k];
      // A non-positive denominator means the gradient in theta_k is strongly positive.
      next[k] = denom > 0 ? 3 * s[k] / denom : 2 * theta[k];
    }
  }
  normalize_with_floor(next);
  return next;
}

struct LoopResult {
  Vector theta;
  double nu = 0;
  int iterations = 0;
  double change = kInf;
  bool converged = false;
  bool diverged_nu = false;
};

// Fixed-point iteration over strengths, and over nu as well when `free_nu`.
LoopResult iterate(DrawModel model, const DerivedTotals& totals, const FitConfig& cfg,
                   bool free_nu, double fixed_nu) {
  LoopResult r;
  r.theta = initial_strengths(totals);
  r.nu = free_nu ? initial_nu(totals) : fixed_nu;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    Vector theta = strength_sweep(model, totals, r.theta, r.nu);
    double nu = r.nu;
    if (free_nu) {
      nu = solve_nu(totals.total_draws, h_function(model, totals, theta), cfg.nu_bracket_max,
                    r.nu);
    }
    double change = 0;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      change = std::max(change, relative_change(r.theta[k], theta[k]));
    }
    r.iterations = it;
    r.theta = std::move(theta);
    if (!std::isfinite(nu)) {
      r.diverged_nu = true;
      r.change = change;
      return r;
    }
    change = std::max(change, relative_change(r.nu, nu));
    r.nu = nu;
    r.change = change;
    if (change <= cfg.tolerance) {
      r.converged = true;
      return r;
    }
  }
  return r;
}

double bradley_terry_log_likelihood(const DerivedTotals& totals, const Vector& pi) {
  double total = 0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    for (Eigen::Index j = 0; j < pi.size(); ++j) {
      const double s = totals.scores(i, j);
      if (i == j || s == 0) continue;
      total += s * std::log(pi[i] / (pi[i] + pi[j]));
    }
  }
  return total;
}

void check_config(const FitConfig& cfg) {
  if (!(cfg.tolerance > 0)) throw ValidationError("tolerance must be positive");
  if (cfg.max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
  if (!(cfg.nu_bracket_max > 0)) throw ValidationError("nu_bracket_max must be positive");
}

ModelFit finish(ModelKind kind, const Problem& p, const FitConfig& cfg, LoopResult r) {
  ModelFit fit;
  fit.model = kind;
  fit.players = p.data.players();
  fit.iterations = r.iterations;
  fit.final_change = r.change;
  fit.converged = r.converged;
  fit.diverged_nu = r.diverged_nu;
  fit.boundary = p.boundary;
  fit.nu = r.diverged_nu ? kInf : r.nu;

  const double nu_eval = r.diverged_nu ? cfg.nu_bracket_max : r.nu;
  if (kind == ModelKind::BradleyTerry) {
    fit.log_lik = bradley_terry_log_likelihood(p.totals, r.theta);
  } else {
    fit.log_lik = log_likelihood(p.data, r.theta, nu_eval, draw_model_of(kind));
  }
  if (is_two_stage(kind)) {
    fit.stage1_log_lik = log_likelihood(p.data, r.theta, 2.0, draw_model_of(kind));
  }

  fit.strengths = r.theta / r.theta.sum();
  if (cfg.normalization == Normalization::AnchorLast) {
    fit.strengths /= fit.strengths[fit.strengths.size() - 1];
  }
  return fit;
}

ModelFit fit_simultaneous(ModelKind kind, const ComparisonData& data, const FitConfig& cfg) {
  check_config(cfg);
  const Problem p = prepare(data);
  const DrawModel model = draw_model_of(kind);
  const bool free_nu = kind != ModelKind::BradleyTerry && p.totals.total_draws > 0;
  return finish(kind, p, cfg, iterate(model, p.totals, cfg, free_nu, 0.0));
}

ModelFit fit_two_stage(ModelKind kind, const ComparisonData& data, const FitConfig& cfg) {
  check_config(cfg);
  const Problem p = prepare(data);
  const DrawModel model = draw_model_of(kind);
  LoopResult r = iterate(model, p.totals, cfg, false, 2.0);
  r.nu = solve_nu(p.totals.total_draws, h_function(model, p.totals, r.theta), cfg.nu_bracket_max,
                  initial_nu(p.totals));
  r.diverged_nu = !std::isfinite(r.nu);
  return finish(kind, p, cfg, std::move(r));
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::BradleyTerry: return "BradleyTerry";
    case ModelKind::Davidson: return "Davidson";
    case ModelKind::ConstrainedDavidson: return "ConstrainedDavidson";
    case ModelKind::Alternative: return "Alternative";
    case ModelKind::ConstrainedAlternative: return "ConstrainedAlternative";
  }
  return "unknown";
}

std::string short_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::BradleyTerry: return "bt";
    case ModelKind::Davidson: return "davidson";
    case ModelKind::ConstrainedDavidson: return "davidson-c";
    case ModelKind::Alternative: return "alt";
    case ModelKind::ConstrainedAlternative: return "alt-c";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  for (auto k : {ModelKind::BradleyTerry, ModelKind::Davidson, ModelKind::ConstrainedDavidson,
                 ModelKind::Alternative, ModelKind::ConstrainedAlternative}) {
    if (name == short_name(k) || name == to_string(k)) return k;
  }
  throw ValidationError("unknown model '" + name + "' (expected bt, davidson, davidson-c, alt, alt-c)");
}

DrawModel draw_model_of(ModelKind kind) {
  switch (kind) {
    case ModelKind::Alternative:
    case ModelKind::ConstrainedAlternative:
      return DrawModel::Alternative;
    default:
      return DrawModel::Davidson;
  }
}

bool is_two_stage(ModelKind kind) {
  return kind == ModelKind::ConstrainedDavidson || kind == ModelKind::ConstrainedAlternative;
}

ModelFit fit_bradley_terry(const ComparisonData& data, const FitConfig& cfg) {
  return fit_simultaneous(ModelKind::BradleyTerry, data, cfg);
}

ModelFit fit_davidson(const ComparisonData& data, const FitConfig& cfg) {
  return fit_simultaneous(ModelKind::Davidson, data, cfg);
}

ModelFit fit_alternative(const ComparisonData& data, const FitConfig& cfg) {
  return fit_simultaneous(ModelKind::Alternative, data, cfg);
}

ModelFit fit_constrained_davidson(const ComparisonData& data, const FitConfig& cfg) {
  return fit_two_stage(ModelKind::ConstrainedDavidson, data, cfg);
}

ModelFit fit_constrained_alternative(const ComparisonData& data, const FitConfig& cfg) {
  return fit_two_stage(ModelKind::ConstrainedAlternative, data, cfg);
}

ModelFit fit_model(ModelKind kind, const ComparisonData& data, const FitConfig& cfg) {
  return is_two_stage(kind) ? fit_two_stage(kind, data, cfg) : fit_simultaneous(kind, data, cfg);
}

double fit_nu_given_strengths(const ComparisonData& data, const Vector& strengths,
                              DrawModel model, double nu_max) {
  if (strengths.size() != static_cast<Eigen::Index>(data.size())) {
    throw ValidationError("fit_nu_given_strengths: dimension mismatch");
  }
  const auto totals = derive_totals(data);
  return solve_nu(totals.total_draws, h_function(model, totals, strengths), nu_max,
                  initial_nu(totals));
}

// --- inverse balanced three-player system ---------------------------------

std::array<double, 4> InverseSolution3::at(double u) const {
  std::array<double, 4> x{};
  for (int c = 0; c < 4; ++c) x[c] = particular[c] + u * null_direction[c];
  return x;
}

InverseSolution3 solve_inverse_balanced_3(const std::array<double, 3>& sigma, double nu) {
  for (double s : sigma) {
    if (!(s > 0) || !std::isfinite(s)) throw ValidationError("sigma must be strictly positive");
  }
  if (!(nu >= 0) || !std::isfinite(nu)) throw ValidationError("nu must be non-negative");

  // f(x) = x phi'(x) / (1 + phi(x)),  g(x) = phi_nu(x) / (1 + phi(x))
  auto f = [nu](double x) {
    const auto b = phi_bundle(x, nu);
    return x * b.phi_prime / (1 + b.phi);
  };
  auto g = [nu](double x) {
    const auto b = phi_bundle(x, nu);
    return b.phi_nu / (1 + b.phi);
  };
  const double s1 = sigma[0], s2 = sigma[1], s3 = sigma[2];

  // Rows: score equations of players 1 and 2 (player 3's is dependent), and the
  // draw equation T = nu H. Columns: s12, s13, s23, T.
  Eigen::Matrix<double, 3, 4> a;
  Eigen::Vector3d b;
  a << 1 + f(s2 / s1) + f(s1 / s2), 1 + f(s3 / s1) + f(s1 / s3), 0, 0,
      -1 - f(s1 / s2) - f(s2 / s1), 0, 1 + f(s3 / s2) + f(s2 / s3), 0,
      nu * (g(s1 / s2) - g(s2 / s1)), nu * (g(s1 / s3) - g(s3 / s1)),
      nu * (g(s2 / s3) - g(s3 / s2)), 1;
  b << s1 / (s1 + s2) + s1 / (s1 + s3) + f(s1 / s2) + f(s1 / s3),
      -1 + s2 / (s2 + s1) + s2 / (s2 + s3) - f(s1 / s2) + f(s2 / s3),
      nu * (g(s1 / s2) + g(s1 / s3) + g(s2 / s3));

  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(a, Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  if (!(sv[2] > 1e-12 * sv[0])) {
    throw SingularSystemError("inverse system is rank deficient for the given sigma and nu");
  }
  Eigen::Vector4d null = svd.matrixV().col(3);

  InverseSolution3 out;
  out.sigma = sigma;
  out.nu = nu;
  const double scale = null.cwiseAbs().maxCoeff();
  out.free_index = std::abs(null[3]) > 1e-9 * scale ? 3 : 2;
  if (!(std::abs(null[out.free_index]) > 1e-9 * scale)) {
    throw SingularSystemError("inverse system: cannot parametrize by T or s23");
  }
  null /= null[out.free_index];

  Eigen::Matrix3d reduced;
  int col = 0;
  for (int c = 0; c < 4; ++c) {
    if (c != out.free_index) reduced.col(col++) = a.col(c);
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(reduced);
  if (!lu.isInvertible()) throw SingularSystemError("inverse system: reduced matrix is singular");
  const Eigen::Vector3d part = lu.solve(b);
  col = 0;
  for (int c = 0; c < 4; ++c) {
    out.particular[c] = c == out.free_index ? 0.0 : part[col++];
    out.null_direction[c] = null[c];
  }
  out.null_direction[out.free_index] = 1;

  // Feasible u: 0 <= s_ij <= 1 for the three scores, T >= 0.
  double lo = -kInf, hi = kInf;
  auto constrain = [&](double p, double d, double min, double max) {
    if (std::abs(d) < 1e-14) {
      if (p < min - 1e-12 || p > max + 1e-12) lo = kInf;
      return;
    }
    double u1 = (min - p) / d;
    double u2 = (max - p) / d;
    if (u1 > u2) std::swap(u1, u2);
    lo = std::max(lo, u1);
    hi = std::min(hi, u2);
  };
  for (int c = 0; c < 3; ++c) constrain(out.particular[c], out.null_direction[c], 0, 1);
  constrain(out.particular[3], out.null_direction[3], 0, kInf);
  if (!(lo <= hi)) {
    throw ValidationError("inverse system: no balanced score table realizes these parameters");
  }
  out.u_range = {lo, hi};
  return out;
}

ComparisonData balanced_data_from_scores(const std::array<double, 4>& x, double games_per_pair,
                                         const std::vector<std::string>& players) {
  if (players.size() != 3) throw ValidationError("balanced_data_from_scores needs 3 players");
  if (!(games_per_pair > 0)) throw ValidationError("games_per_pair must be positive");
  constexpr double kSlack = 1e-9;
  const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  std::array<double, 3> share{};
  std::array<double, 3> capacity{};
  double total_capacity = 0;
  for (int p = 0; p < 3; ++p) {
    if (x[p] < -kSlack || x[p] > 1 + kSlack) {
      throw ValidationError("pair scores must lie in [0, 1]");
    }
    share[p] = std::clamp(x[p], 0.0, 1.0) * games_per_pair;
    capacity[p] = 2 * std::min(share[p], games_per_pair - share[p]);
    total_capacity += capacity[p];
  }
  const double draws = std::max(x[3], 0.0) * games_per_pair;
  if (draws > total_capacity * (1 + kSlack)) {
    throw ValidationError("more draws than the pair scores can accommodate");
  }
  Matrix w = Matrix::Zero(3, 3);
  Matrix t = Matrix::Zero(3, 3);
  for (int p = 0; p < 3; ++p) {
    const auto [i, j] = pairs[p];
    const double tij = total_capacity > 0 ? draws * capacity[p] / total_capacity : 0.0;
    t(i, j) = t(j, i) = tij;
    w(i, j) = std::max(share[p] - tij / 2, 0.0);
    w(j, i) = std::max(games_per_pair - share[p] - tij / 2, 0.0);
  }
  return ComparisonData(players, std::move(w), std::move(t));
}

}  // namespace tiedpools
