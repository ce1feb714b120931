#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "tiedpools/comparison_data.hpp"
#include "tiedpools/model_math.hpp"

namespace tiedpools {

enum class Normalization { SumToOne, AnchorLast };

struct FitConfig {
  // Largest relative change of any parameter over one sweep that counts as converged.
  double tolerance = 1e-12;
  int max_iterations = 200000;
  Normalization normalization = Normalization::SumToOne;
  // Draw propensities past this are reported as divergent.
  double nu_bracket_max = 1e6;
};

enum class ModelKind {
  BradleyTerry,
  Davidson,
  ConstrainedDavidson,
  Alternative,
  ConstrainedAlternative,
};

std::string to_string(ModelKind kind);
// Short CLI names: bt, davidson, davidson-c, alt, alt-c.
std::string short_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);
// Davidson family uses pi, Alternative family uses sigma.
DrawModel draw_model_of(ModelKind kind);
bool is_two_stage(ModelKind kind);

struct ModelFit {
  ModelKind model = ModelKind::BradleyTerry;
  std::vector<std::string> players;
  Vector strengths;
  // +infinity when the draw propensity ran past nu_bracket_max.
  double nu = 0;
  int iterations = 0;
  double final_change = 0;
  // The model's full log-likelihood at (strengths, nu). For diverged nu this is
  // evaluated at nu_bracket_max.
  double log_lik = 0;
  // Two-stage fits only: log-likelihood of the strength stage, at nu = 2.
  double stage1_log_lik = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  bool diverged_nu = false;
  // Some player has zero score or no losses and draws; strengths are pinned
  // at the boundary.
  bool boundary = false;

  // Strength ratio strengths[i] / strengths[j].
  double ratio(std::size_t i, std::size_t j) const { return strengths[i] / strengths[j]; }
  bool ok() const { return converged && !diverged_nu && !boundary; }
};

ModelFit fit_bradley_terry(const ComparisonData& data, const FitConfig& cfg = {});
ModelFit fit_davidson(const ComparisonData& data, const FitConfig& cfg = {});
ModelFit fit_constrained_davidson(const ComparisonData& data, const FitConfig& cfg = {});
ModelFit fit_alternative(const ComparisonData& data, const FitConfig& cfg = {});
ModelFit fit_constrained_alternative(const ComparisonData& data, const FitConfig& cfg = {});
ModelFit fit_model(ModelKind kind, const ComparisonData& data, const FitConfig& cfg = {});

// Maximum-likelihood nu with strengths held fixed: the root of T = nu H(theta, nu)
// on [0, nu_max]. Returns +infinity when no root exists below nu_max.
double fit_nu_given_strengths(const ComparisonData& data, const Vector& strengths,
                              DrawModel model, double nu_max = 1e6);

struct Interval {
  double lo = 0;
  double hi = 0;
};

// Balanced three-player design (n = 1 per pair) whose Alternative-model
// likelihood equations are solved exactly by given (sigma, nu). Unknowns are
// x = (s12, s13, s23, T); solutions form the line particular + u * null_direction.
struct InverseSolution3 {
  std::array<double, 3> sigma{};
  double nu = 0;
  std::array<double, 4> particular{};
  std::array<double, 4> null_direction{};
  // Index of the unknown used as the line parameter (3 = T, 2 = s23); the
  // null direction has 1 in that slot and the particular solution has 0.
  int free_index = 3;
  // u values keeping every s_ij in [0, 1] and T >= 0.
  Interval u_range;

  std::array<double, 4> at(double u) const;
};

InverseSolution3 solve_inverse_balanced_3(const std::array<double, 3>& sigma, double nu);

// Turns an inverse solution point into game counts with n games per pair,
// spreading the draws over pairs in proportion to how many each can hold.
ComparisonData balanced_data_from_scores(const std::array<double, 4>& x, double games_per_pair,
                                         const std::vector<std::string>& players = {"1", "2", "3"});

}  // namespace tiedpools
