#include "seqcrt/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace seqcrt;
using json = nlohmann::json;

namespace {

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

std::vector<int> parse_positions(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      int lo = std::stoi(item.substr(0, dash)), hi = std::stoi(item.substr(dash + 1));
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(std::stoi(item));
    }
  }
  return out;
}

int run_simulate(const std::string& config_path, const std::string& output) {
  ExperimentConfig config = experiment_config_from_json(read_text_file(config_path));
  if (!output.empty()) config.output = output;
  ExperimentResult result = run_experiment(config);
  std::ostringstream csv;
  write_results_csv(csv, result.rows);
  emit(csv.str(), config.output);
  for (const auto& row : result.rows)
    if (!row.error.empty())
      std::cerr << "amplitude " << row.amplitude << " rep " << row.rep << " " << to_string(row.method)
                << ": " << row.error << '\n';
  return result.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential conditional randomization tests with Selective SeqStep+"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run an FDR/power simulation grid and write CSV");
  std::string sim_config, sim_output;
  simulate->add_option("--config", sim_config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--output,-o", sim_output, "CSV path (overrides the config; '-' for stdout)");

  // timing
  auto* timing = app.add_subcommand("timing", "Wall-clock of original vs one-shot symmetric pipelines");
  std::string timing_config, timing_output;
  timing->add_option("--config", timing_config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  timing->add_option("--output,-o", timing_output, "JSON path");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Evaluate an FDR bound");
  std::string bound_kind = "exchangeable";
  double b_c = 0.1, b_q = 0.1, b_delta = 0.0, b_eps = 0.0;
  std::optional<double> b_rho;
  std::string b_positions;
  Index b_p = 0;
  bounds->add_option("--kind", bound_kind, "almost_independent | exchangeable | arbitrary")
      ->check(CLI::IsMember({"almost_independent", "exchangeable", "arbitrary"}));
  bounds->add_option("--c", b_c, "SeqStep threshold c");
  bounds->add_option("--q", b_q, "Nominal FDR level q");
  bounds->add_option("--delta", b_delta, "delta (almost_independent)");
  bounds->add_option("--epsilon", b_eps, "epsilon (almost_independent)");
  bounds->add_option("--rho", b_rho, "Null indicator correlation (exchangeable)");
  bounds->add_option("--null-positions", b_positions, "1-based null positions, e.g. 1,4,7-9 (arbitrary)");
  bounds->add_option("--p", b_p, "Number of hypotheses (arbitrary)");

  // epsilon-surface
  auto* surface = app.add_subcommand("epsilon-surface", "Tabulate epsilon(c, q, rho) as CSV");
  double s_c = 0.1;
  std::vector<double> s_q{0.05, 0.1, 0.2}, s_rho;
  std::string s_output;
  surface->add_option("--c", s_c, "SeqStep threshold c");
  surface->add_option("--q-grid", s_q, "q values")->delimiter(',');
  surface->add_option("--rho-grid", s_rho, "rho values (default 0, 0.01, ..., 1)")->delimiter(',');
  surface->add_option("--output,-o", s_output, "CSV path");

  // adversarial
  auto* adversarial = app.add_subcommand("adversarial", "Monte Carlo FDR of a sharpness construction");
  std::string a_kind = "global-null";
  AdversarialSpec a_spec;
  int a_reps = 10000;
  std::uint64_t a_seed = 1;
  adversarial->add_option("--kind", a_kind, "global-null | exchangeable-rho");
  adversarial->add_option("--p", a_spec.p, "Number of hypotheses");
  adversarial->add_option("--c", a_spec.c, "SeqStep threshold c");
  adversarial->add_option("--q", a_spec.q, "Nominal FDR level q");
  adversarial->add_option("--rho", a_spec.rho, "Null indicator correlation (exchangeable-rho)");
  adversarial->add_option("--reps", a_reps, "Monte Carlo replicates");
  adversarial->add_option("--seed", a_seed, "Master seed");

  // aj-estimate
  auto* aj = app.add_subcommand("aj-estimate", "Estimate max_j a_j on a block-Gaussian design");
  Index aj_p = 30, aj_n = 100;
  int aj_block = 3, aj_nonnull = 8, aj_b = 19;
  double aj_off = 0.3, aj_signal = 3.0, aj_q = 0.1;
  std::string aj_stat = "correlation";
  AjEstimateConfig aj_cfg;
  std::uint64_t aj_seed = 1;
  bool aj_full = false, aj_unconditional = false;
  aj->add_option("--p", aj_p, "Number of variables");
  aj->add_option("--n", aj_n, "Number of observations");
  aj->add_option("--block-size", aj_block, "Covariance block size");
  aj->add_option("--off-diag", aj_off, "Within-block correlation");
  aj->add_option("--nonnull", aj_nonnull, "Number of nonzero coefficients");
  aj->add_option("--signal", aj_signal, "Nonzero coefficients equal signal / sqrt(n)");
  aj->add_option("--B", aj_b, "CRT randomizations");
  aj->add_option("--statistic", aj_stat, "correlation | lasso")->check(CLI::IsMember({"correlation", "lasso"}));
  aj->add_option("--c", aj_cfg.c, "SeqStep threshold c");
  aj->add_option("--q", aj_q, "FDR level used for the derived bound");
  aj->add_option("--inner", aj_cfg.m_inner, "Draws of X | Y per outer replicate");
  aj->add_option("--outer", aj_cfg.m_outer, "Outer replicates");
  aj->add_option("--tail", aj_cfg.tail, "Tail probability for reading off delta");
  aj->add_option("--seed", aj_seed, "Master seed");
  aj->add_flag("--full-scale", aj_full, "n=200, p=120, 30 nonnulls, 5000 inner draws, 500 outer");
  aj->add_flag("--unconditional", aj_unconditional, "Redraw Y with every inner draw");

  // select
  auto* select = app.add_subcommand("select", "Run the symmetric sequential CRT on a CSV dataset");
  std::string sel_data, sel_model, sel_crt, sel_output;
  bool sel_fit = false, sel_binary = false;
  double sel_shrink = 1e-3;
  SeqStepParams sel_params;
  int sel_b = 9;
  std::uint64_t sel_seed = 1;
  select->add_option("--data", sel_data, "CSV with header y,x1,...,xp")->required()->check(CLI::ExistingFile);
  auto* model_opt = select->add_option("--model", sel_model, "Covariate model JSON")->check(CLI::ExistingFile);
  auto* fit_opt = select->add_flag("--fit-gaussian", sel_fit, "Fit a Gaussian model to the covariates");
  model_opt->excludes(fit_opt);
  select->add_option("--shrink", sel_shrink, "Ridge added to the fitted covariance");
  select->add_option("--crt", sel_crt, "CRT config JSON")->check(CLI::ExistingFile);
  select->add_option("--B", sel_b, "CRT randomizations (ignored with --crt)");
  select->add_option("--c", sel_params.c, "SeqStep threshold c");
  select->add_option("--q", sel_params.q, "Nominal FDR level q");
  select->add_option("--seed", sel_seed, "Seed");
  select->add_flag("--binary", sel_binary, "Treat y as a 0/1 response");
  select->add_option("--output,-o", sel_output, "JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run_simulate(sim_config, sim_output);

    if (*timing) {
      ExperimentConfig config = experiment_config_from_json(read_text_file(timing_config));
      TimingReport report = timing_comparison(config);
      json j;
      for (const auto& row : report.rows)
        j["methods"].push_back({{"method", to_string(row.method)},
                                {"mean_seconds", row.mean_seconds},
                                {"reps", row.reps}});
      j["ratio_oneshot_over_original"] = report.ratio;
      emit(j.dump(2) + "\n", timing_output);
      return 0;
    }

    if (*bounds) {
      BoundReport report;
      if (bound_kind == "almost_independent") report = bound_almost_independent(b_c, b_q, b_delta, b_eps);
      else if (bound_kind == "exchangeable") report = bound_exchangeable(b_c, b_q, b_rho);
      else {
        std::vector<int> positions = parse_positions(b_positions);
        if (b_p == 0) throw DomainError("--p is required for the arbitrary-dependence bound");
        report = bound_arbitrary(b_c, b_q, positions, b_p);
      }
      std::cout << to_json(report) << '\n';
      return 0;
    }

    if (*surface) {
      if (s_rho.empty())
        for (int i = 0; i <= 100; ++i) s_rho.push_back(i / 100.0);
      Matrix eps = epsilon_surface(s_c, s_q, s_rho);
      std::ostringstream csv;
      csv << "c,q,rho,epsilon\n" << std::setprecision(12);
      for (std::size_t i = 0; i < s_q.size(); ++i)
        for (std::size_t k = 0; k < s_rho.size(); ++k)
          csv << s_c << ',' << s_q[i] << ',' << s_rho[k] << ',' << eps(i, k) << '\n';
      emit(csv.str(), s_output);
      return 0;
    }

    if (*adversarial) {
      a_spec.kind = adversarial_kind_from_string(a_kind);
      MonteCarloFdr mc = adversarial_fdr(a_spec, a_reps, RngStream(a_seed, 0));
      json j = json::parse(to_json(mc));
      j["kind"] = to_string(a_spec.kind);
      j["p"] = a_spec.p;
      j["c"] = a_spec.c;
      j["q"] = a_spec.q;
      if (a_spec.kind == AdversarialKind::global_null_sharp) {
        const Index m0 = global_null_m0(a_spec.p, a_spec.c, a_spec.q);
        j["m0"] = m0;
        j["exact_fdr"] = a_spec.c * static_cast<double>(a_spec.p) / static_cast<double>(m0);
        j["limit"] = bound_exchangeable(a_spec.c, a_spec.q).value;
      } else {
        j["rho"] = a_spec.rho;
        j["bound"] = bound_exchangeable(a_spec.c, a_spec.q, a_spec.rho).value;
      }
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*aj) {
      if (aj_full) {
        aj_n = 200;
        aj_p = 120;
        aj_nonnull = 30;
        aj_cfg.m_inner = 5000;
        aj_cfg.m_outer = 500;
      }
      aj_cfg.condition_on_y = !aj_unconditional;
      GaussianModel model = GaussianModel::block(aj_p, aj_block, aj_off);
      RngStream master(aj_seed, 0);
      RngStream support_rng = master.derive(0xB0);
      Vector beta = Vector::Zero(aj_p);
      for (int j : support_rng.sample_without_replacement(static_cast<int>(aj_p), aj_nonnull))
        beta[j] = aj_signal / std::sqrt(static_cast<double>(aj_n));
      CrtConfig cfg;
      cfg.randomizations = aj_b;
      cfg.mode = CrtMode::original;
      if (aj_stat == "correlation") cfg.statistic = AbsCorrelation{};
      AjEstimate est = estimate_aj(model, beta, 1.0, Vector(), aj_n, cfg, aj_cfg, master.derive(0xB1));
      BoundReport bound = bound_almost_independent(aj_cfg.c, aj_q, est.delta, est.epsilon);
      json j;
      j["max_aj"] = est.max_aj;
      j["empty_cells"] = est.empty_cells;
      j["delta"] = est.delta;
      j["epsilon"] = est.epsilon;
      j["bound"] = json::parse(to_json(bound));
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*select) {
      Dataset data = load_dataset_csv(sel_data, sel_binary ? ResponseKind::binary : ResponseKind::continuous);
      if (sel_model.empty() && !sel_fit) throw DomainError("pass --model <json> or --fit-gaussian");
      CovariateModel model = sel_fit ? CovariateModel(fit_gaussian(data.x, sel_shrink))
                                     : covariate_model_from_json(read_text_file(sel_model));
      CrtConfig cfg;
      if (!sel_crt.empty()) cfg = crt_config_from_json(read_text_file(sel_crt));
      else cfg.randomizations = sel_b;
      Selection sel = select_on_data(data, model, cfg, sel_params, sel_seed);
      emit(to_json(sel) + "\n", sel_output);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
