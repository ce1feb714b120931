#include "tiedpools/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "tiedpools/errors.hpp"
#include "tiedpools/io.hpp"
#include "tiedpools/reporting.hpp"

namespace tiedpools {

namespace {

struct GlobalOptions {
  double tolerance = FitConfig{}.tolerance;
  int max_iterations = FitConfig{}.max_iterations;
  std::string normalize = "sum";

  FitConfig fit_config() const {
    FitConfig cfg;
    cfg.tolerance = tolerance;
    cfg.max_iterations = max_iterations;
    cfg.normalization = normalize == "anchor" ? Normalization::AnchorLast : Normalization::SumToOne;
    return cfg;
  }

  ReportJson echo() const {
    ReportJson j;
    j["tolerance"] = tolerance;
    j["max_iter"] = max_iterations;
    j["normalize"] = normalize;
    return j;
  }
};

struct FitOptions {
  std::string input;
  std::string model = "alt-c";
  std::string out;
  std::string anchor;
  double offset = 0;
};

struct PoolsOptions {
  std::string input;
  std::optional<double> nu;
  std::string nu_from;
  std::string nu_model = "alt-c";
  std::string out;
  std::string anchor;
  double offset = 0;
};

struct SimulateOptions {
  std::vector<double> strengths;
  std::vector<std::string> labels{"B", "C", "D"};
  double nu = 0;
  std::string model = "davidson";
  std::string bye = "random";
  std::uint64_t rounds = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
};

RatingScale rating_scale(double offset, const std::string& anchor) {
  RatingScale s;
  s.offset = offset;
  if (!anchor.empty()) s.anchor = anchor;
  return s;
}

void emit(const ReportJson& report, const std::string& path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << text;
}

bool fit_ok(const ModelFit& fit) { return fit.converged && !fit.diverged_nu; }

int run_fit(const GlobalOptions& g, const FitOptions& o, std::ostream& out, std::ostream& err) {
  const ModelKind kind = parse_model_kind(o.model);
  const std::string raw = read_file(o.input);
  const ComparisonData data = load_comparisons(o.input);
  const ModelFit fit = fit_model(kind, data, g.fit_config());

  RunManifest m;
  m.command = "fit";
  m.input_digest = fnv1a64(raw);
  m.config = g.echo();
  m.config["input"] = o.input;
  m.config["model"] = short_name(kind);
  if (!o.anchor.empty()) m.config["anchor"] = o.anchor;
  m.config["offset"] = o.offset;
  m.timestamp = current_timestamp();
  emit(wrap_report(m, fit_to_json(fit, data, rating_scale(o.offset, o.anchor))), o.out, out);

  if (!fit_ok(fit)) {
    err << "warning: " << short_name(kind)
        << (fit.diverged_nu ? " fit: draw propensity diverged" : " fit did not converge") << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int run_pools(const GlobalOptions& g, const PoolsOptions& o, std::ostream& out, std::ostream& err) {
  if (o.nu.has_value() == !o.nu_from.empty()) {
    throw ValidationError("pools needs exactly one of --nu or --nu-from");
  }
  const std::string raw = read_file(o.input);
  const PoolCounts counts = load_pool_counts(o.input);
  const FitConfig cfg = g.fit_config();

  RunManifest m;
  m.command = "pools";
  m.config = g.echo();
  m.config["input"] = o.input;

  ReportJson body;
  double nu = 0;
  std::string digest_source = raw;
  if (o.nu) {
    nu = *o.nu;
    m.config["nu"] = nu;
  } else {
    const ModelKind kind = parse_model_kind(o.nu_model);
    const std::string nu_raw = read_file(o.nu_from);
    digest_source += nu_raw;
    const ComparisonData nu_data = load_comparisons(o.nu_from);
    const ModelFit nu_fit = fit_model(kind, nu_data, cfg);
    m.config["nu_from"] = o.nu_from;
    m.config["nu_model"] = short_name(kind);
    body["nu_fit"] = fit_to_json(nu_fit, nu_data, {});
    if (!fit_ok(nu_fit)) {
      err << "warning: the draw-propensity fit on " << o.nu_from << " did not converge\n";
      m.input_digest = fnv1a64(digest_source);
      m.timestamp = current_timestamp();
      emit(wrap_report(m, std::move(body)), o.out, out);
      return kExitNumerical;
    }
    nu = nu_fit.nu;
  }
  if (!o.anchor.empty()) m.config["anchor"] = o.anchor;
  m.config["offset"] = o.offset;
  m.input_digest = fnv1a64(digest_source);
  m.timestamp = current_timestamp();

  const auto result = pools_pipeline(counts, nu, cfg);
  body["nu"] = report_real(nu);
  body["inference"] = pool_inference_to_json(result.inference);
  body["imputed"] = imputed_to_json(result.imputed, result.inference.labels);
  body["fit"] = fit_to_json(result.fit, result.data, rating_scale(o.offset, o.anchor));
  body["ratings"] = body["fit"]["ratings"];
  const bool ok = fit_ok(result.fit);
  emit(wrap_report(m, std::move(body)), o.out, out);
  if (!ok) {
    err << "warning: the strength fit on imputed games did not converge\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int run_simulate(const SimulateOptions& o, std::ostream& out) {
  if (o.strengths.size() != 3) throw ValidationError("--strengths needs exactly 3 values");
  if (o.labels.size() != 3) throw ValidationError("--labels needs exactly 3 values");
  SimConfig cfg;
  for (int i = 0; i < 3; ++i) cfg.strengths[i] = o.strengths[i];
  cfg.nu = o.nu;
  cfg.model = draw_model_of(parse_model_kind(o.model));
  cfg.bye_policy = parse_bye_policy(o.bye);
  cfg.rounds = o.rounds;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const std::array<std::string, 3> labels{o.labels[0], o.labels[1], o.labels[2]};

  const SimulationReport rep = simulate_series(cfg);
  const SeriesExpectations ex = expected_per_round(cfg);

  RunManifest m;
  m.command = "simulate";
  ReportJson strengths = ReportJson::array();
  for (double s : o.strengths) strengths.push_back(s);
  m.config["strengths"] = strengths;
  m.config["labels"] = o.labels;
  m.config["nu"] = o.nu;
  m.config["model"] = cfg.model == DrawModel::Davidson ? "davidson" : "alt";
  m.config["bye"] = to_string(cfg.bye_policy);
  m.config["rounds"] = o.rounds;
  m.config["seed"] = o.seed;
  m.input_digest = fnv1a64(m.config.dump());
  m.timestamp = current_timestamp();

  ReportJson body;
  body["simulation"] = simulation_to_json(rep, labels);
  body["expected_per_round"] = expectations_to_json(ex, labels);
  body["z_scores"] = z_scores_to_json(z_scores(rep, ex, labels));
  emit(wrap_report(m, std::move(body)), o.out, out);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strength and draw-propensity estimation for paired and three-way comparisons"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  GlobalOptions g;
  app.add_option("--tolerance", g.tolerance, "Convergence threshold on the largest relative change")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-iter", g.max_iterations, "Iteration cap")->check(CLI::PositiveNumber);
  app.add_option("--normalize", g.normalize, "Strength normalization")
      ->check(CLI::IsMember({"sum", "anchor"}));

  FitOptions fo;
  auto* fit = app.add_subcommand("fit", "Fit a model to a match table or matrix JSON");
  fit->add_option("--input", fo.input, "Match CSV or matrix JSON")->required();
  fit->add_option("--model", fo.model, "bt, davidson, davidson-c, alt, alt-c")->capture_default_str();
  fit->add_option("--out", fo.out, "Report path (default: stdout)");
  fit->add_option("--anchor", fo.anchor, "Player rated 0");
  fit->add_option("--offset", fo.offset, "Rating offset");

  PoolsOptions po;
  auto* pools = app.add_subcommand("pools", "Infer strengths from three-way pool round wins");
  pools->add_option("--input", po.input, "Pool-counts JSON")->required();
  auto* nu_opt = pools->add_option("--nu", po.nu, "Draw propensity")->check(CLI::NonNegativeNumber);
  auto* nu_from = pools->add_option("--nu-from", po.nu_from, "Match table to estimate nu from");
  nu_opt->excludes(nu_from);
  pools->add_option("--nu-model", po.nu_model, "Model used with --nu-from")->capture_default_str();
  pools->add_option("--out", po.out, "Report path (default: stdout)");
  pools->add_option("--anchor", po.anchor, "Player rated 0");
  pools->add_option("--offset", po.offset, "Rating offset");

  SimulateOptions so;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo pool rounds with closed-form comparison");
  sim->add_option("--strengths", so.strengths, "Three positive strengths")->required()->expected(3);
  sim->add_option("--labels", so.labels, "Three player labels")->expected(3);
  sim->add_option("--nu", so.nu, "Draw propensity")->check(CLI::NonNegativeNumber);
  sim->add_option("--model", so.model, "davidson or alt")->capture_default_str();
  sim->add_option("--bye", so.bye, "random or rotate")->check(CLI::IsMember({"random", "rotate"}));
  sim->add_option("--rounds", so.rounds, "Rounds to play")->check(CLI::PositiveNumber);
  sim->add_option("--seed", so.seed, "RNG seed");
  sim->add_option("--threads", so.threads, "Worker threads (0: all cores)");
  sim->add_option("--out", so.out, "Report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInputError;
  }

  try {
    if (fit->parsed()) return run_fit(g, fo, out, err);
    if (pools->parsed()) return run_pools(g, po, out, err);
    return run_simulate(so, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const SingularSystemError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace tiedpools
