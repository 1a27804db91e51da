// dynpanel: panel Lasso fitting, desparsified inference and Monte Carlo experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dynpanel/covariance.hpp"
#include "dynpanel/csv_io.hpp"
#include "dynpanel/desparsify.hpp"
#include "dynpanel/errors.hpp"
#include "dynpanel/experiment.hpp"
#include "dynpanel/inference.hpp"
#include "dynpanel/json_io.hpp"

using namespace dynpanel;

namespace {

struct DgpFlags {
  DgpConfig cfg;
  std::string errors = "gaussian";
  std::vector<double> alpha{0.9, 0.0, 0.0, -0.3};
  std::vector<CLI::Option*> opts;

  void attach(CLI::App* app) {
    opts.push_back(app->add_option("--N", cfg.N, "Cross-sectional units"));
    opts.push_back(app->add_option("--T", cfg.T, "Observed periods"));
    opts.push_back(app->add_option("--px", cfg.p_x, "Exogenous regressors"));
    opts.push_back(app->add_option("--lags", cfg.L_fit, "Lags in the fitted design"));
    opts.push_back(app->add_option("--alpha", alpha, "True AR coefficients")->delimiter(','));
    opts.push_back(app->add_option("--beta-nonzero", cfg.beta_nonzero, "Equidistant nonzero beta entries"));
    opts.push_back(app->add_option("--beta-value", cfg.beta_value, "Value of nonzero beta entries"));
    opts.push_back(app->add_option("--ax", cfg.a_x, "AR coefficient of the covariates"));
    opts.push_back(app->add_option("--rho", cfg.rho_toeplitz, "Toeplitz correlation of covariate innovations"));
    opts.push_back(app->add_option("--errors", errors, "gaussian | hetero | t3_hetero"));
    opts.push_back(app->add_option("--noise-scale", cfg.noise_scale, "Scale applied to the errors"));
    opts.push_back(app->add_option("--burn-in", cfg.burn_in, "Discarded burn-in periods"));
  }

  // Copies only the flags that were given on the command line or in the config file.
  void apply(DgpConfig& target) const {
    const DgpConfig& s = cfg;
    if (opts[0]->count()) target.N = s.N;
    if (opts[1]->count()) target.T = s.T;
    if (opts[2]->count()) target.p_x = s.p_x;
    if (opts[3]->count()) target.L_fit = s.L_fit;
    if (opts[4]->count()) target.alpha_true = alpha;
    if (opts[5]->count()) target.beta_nonzero = s.beta_nonzero;
    if (opts[6]->count()) target.beta_value = s.beta_value;
    if (opts[7]->count()) target.a_x = s.a_x;
    if (opts[8]->count()) target.rho_toeplitz = s.rho_toeplitz;
    if (opts[9]->count()) target.error_kind = parse_error_kind(errors);
    if (opts[10]->count()) target.noise_scale = s.noise_scale;
    if (opts[11]->count()) target.burn_in = s.burn_in;
  }
};

struct FitFlags {
  std::string data;
  std::string lambda_mode = "bic";
  double M = 1.0;
  double lambda = 0.0;
  BicLambda bic;
  double tol = kDefaultTol;
  int max_iter = kDefaultMaxIter;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "Long-format panel CSV (i,t,y,x1..)")->required();
    app->add_option("--lambda-mode", lambda_mode, "bic | theoretical | fixed")
        ->check(CLI::IsMember({"bic", "theoretical", "fixed"}));
    app->add_option("--M", M, "Constant in the theoretical penalty");
    app->add_option("--lambda", lambda, "Penalty for --lambda-mode fixed");
    app->add_option("--grid-size", bic.grid_size, "BIC grid points");
    app->add_option("--grid-ratio", bic.grid_ratio, "lambda_min / lambda_max on the BIC grid");
    app->add_option("--max-df-fraction", bic.max_df_fraction, "Stop the BIC path once df exceeds this share of NT");
    app->add_option("--tol", tol, "Coordinate descent tolerance");
    app->add_option("--max-iter", max_iter, "Maximum sweeps");
  }

  LassoFit run(const DesignSystem& design, const VectorXd& y, Json& info) const {
    if (lambda_mode == "bic") {
      LambdaSelection sel = select_lambda(design, y, bic, tol, max_iter);
      info["lambda_selection"] = "bic";
      Json path = Json::array();
      for (const auto& pt : sel.path) path.push_back({{"lambda", pt.lambda}, {"df", pt.df}, {"bic", pt.bic}});
      info["bic_path"] = path;
      return sel.path[*sel.selected].fit;
    }
    double lam = lambda;
    if (lambda_mode == "theoretical") lam = select_lambda(design, y, TheoreticalLambda{M}).lambda;
    info["lambda_selection"] = lambda_mode;
    return solve_weighted_lasso(panel_problem(design, y, lam), std::nullopt, tol, max_iter);
  }
};

void emit(const Json& doc, const std::string& path) {
  const std::string text = dump_json(doc);
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

std::vector<Index> zero_based(const std::vector<Index>& one_based, Index limit) {
  std::vector<Index> out;
  for (Index h : one_based) {
    if (h < 1 || h > limit) throw InputError("index " + std::to_string(h) + " outside 1.." + std::to_string(limit));
    out.push_back(h - 1);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Panel Lasso estimation and desparsified inference for dynamic panels"};
  app.set_config("--config", "", "Key-value file supplying any flag (command line wins)");
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Write a synthetic panel CSV");
  DgpFlags sim_dgp;
  sim_dgp.attach(sim);
  std::uint64_t sim_seed = 1;
  std::string sim_out, sim_truth;
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "Output CSV (default stdout)");
  sim->add_option("--truth", sim_truth, "Optional JSON with the true coefficients");

  // fit
  auto* fit = app.add_subcommand("fit", "Panel Lasso on a CSV panel");
  FitFlags fit_flags;
  fit_flags.attach(fit);
  std::string fit_out;
  fit->add_option("--out", fit_out, "Output JSON (default stdout)");

  // infer
  auto* infer = app.add_subcommand("infer", "Desparsified confidence intervals and a joint Wald test");
  FitFlags inf_flags;
  inf_flags.attach(infer);
  std::vector<Index> indices;
  std::vector<double> nulls;
  double level = 0.95;
  std::string node_mode = "bic", inf_out;
  double node_lambda = 0.0, node_M = 1.0;
  infer->add_option("--indices", indices, "1-based gamma indices (alpha first, then eta)")
      ->delimiter(',')->required();
  infer->add_option("--null", nulls, "Null values for the Wald test (default zeros)")->delimiter(',');
  infer->add_option("--level", level, "Confidence level");
  infer->add_option("--nodewise-mode", node_mode, "bic | theoretical | fixed")
      ->check(CLI::IsMember({"bic", "theoretical", "fixed"}));
  infer->add_option("--nodewise-lambda", node_lambda, "Nodewise penalty for --nodewise-mode fixed");
  infer->add_option("--nodewise-M", node_M, "Constant in the theoretical nodewise penalty");
  infer->add_option("--out", inf_out, "Output JSON (default stdout)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte Carlo study");
  std::string exp_name;
  DgpFlags exp_dgp;
  exp_dgp.attach(exp);
  std::vector<Index> hypothesis;
  Index reps = 200;
  int threads = 0;
  std::uint64_t exp_seed = 1;
  std::string exp_out, exp_table;
  bool fixed_b_eta = false;
  exp->add_option("--name", exp_name, "Named experiment 1a..5c (flags override its settings)");
  exp->add_option("--hypothesis", hypothesis, "1-based tested gamma indices")->delimiter(',');
  exp->add_option("--reps", reps, "Replications");
  exp->add_option("--threads", threads, "Worker threads (default: DYNPANEL_THREADS or 1)");
  exp->add_option("--seed", exp_seed, "Base seed");
  exp->add_flag("--fixed-b-eta", fixed_b_eta, "Draw the fixed-effect loading once per experiment");
  exp->add_option("--out", exp_out, "Output JSON (default stdout)");
  exp->add_option("--table", exp_table, "Optional CSV summary table");

  for (CLI::App* sub : {sim, fit, infer, exp}) sub->fallthrough();

  try {
    app.parse(argc, argv);

    if (*sim) {
      DgpConfig cfg;
      sim_dgp.apply(cfg);
      cfg.seed = sim_seed;
      const SimulatedPanel s = simulate_panel(cfg);
      if (sim_out.empty() || sim_out == "-") save_panel_csv(s.panel, std::cout);
      else save_panel_csv(s.panel, sim_out);
      if (!sim_truth.empty()) {
        Json t;
        t["config"] = to_json(cfg);
        t["seed"] = sim_seed;
        t["gamma_true"] = std::vector<double>(s.gamma_true.data(), s.gamma_true.data() + s.gamma_true.size());
        t["b_eta"] = std::vector<double>(s.meta.b_eta.data(), s.meta.b_eta.data() + s.meta.b_eta.size());
        t["b_x"] = s.meta.b_x;
        emit(t, sim_truth);
      }
    } else if (*fit) {
      const PanelData panel = load_panel_csv(fit_flags.data);
      const DesignSystem design = build_design(panel);
      const VectorXd y = stack_outcomes(panel);
      Json doc;
      doc["data"] = fit_flags.data;
      doc["dimensions"] = {{"N", panel.N}, {"T", panel.T}, {"L", panel.L}, {"p_x", panel.p_x}};
      Json info;
      const LassoFit f = fit_flags.run(design, y, info);
      doc["selection"] = info;
      doc["fit"] = to_json(f);
      doc["kkt_max_violation"] = kkt_report(f, panel_problem(design, y, f.lambda)).max_violation;
      emit(doc, fit_out);
    } else if (*infer) {
      const PanelData panel = load_panel_csv(inf_flags.data);
      const DesignSystem design = build_design(panel);
      const VectorXd y = stack_outcomes(panel);
      const std::vector<Index> H = zero_based(indices, design.num_params());
      Json info;
      const LassoFit f = inf_flags.run(design, y, info);
      std::vector<Index> rows;
      for (Index h : H) {
        if (h < design.p()) rows.push_back(h);
      }
      NodewiseInverse inv;
      if (!rows.empty()) {
        NodewiseLambdaMode mode = BicLambda{inf_flags.bic};
        if (node_mode == "theoretical") mode = TheoreticalLambda{node_M};
        if (node_mode == "fixed") mode = FixedLambda{node_lambda};
        inv = fit_nodewise(design, rows, mode);
      }
      const DebiasedEstimate est = desparsify(f, design, y, inv, H);
      const RobustCovariance cov = sigma_blocks(design, residuals(f, design, y));
      Json doc;
      doc["data"] = inf_flags.data;
      doc["selection"] = info;
      doc["lambda"] = f.lambda;
      doc["lambda_node"] = inv.lambda_node;
      Json cis = Json::array();
      for (Index h : H) cis.push_back(to_json(confidence_interval(h, est, inv, cov, design, level)));
      doc["intervals"] = cis;
      VectorXd null_values = VectorXd::Zero(static_cast<Index>(H.size()));
      if (!nulls.empty()) {
        if (nulls.size() != H.size()) throw InputError("--null needs one value per index");
        for (std::size_t k = 0; k < nulls.size(); ++k) null_values(static_cast<Index>(k)) = nulls[k];
      }
      doc["wald"] = to_json(wald_chi2(H, null_values, est, inv, cov, design));
      emit(doc, inf_out);
    } else if (*exp) {
      ExperimentConfig cfg = exp_name.empty() ? ExperimentConfig{} : named_experiment(exp_name);
      exp_dgp.apply(cfg.dgp);
      if (!hypothesis.empty()) cfg.hypothesis = zero_based(hypothesis, cfg.dgp.p() + cfg.dgp.N);
      cfg.fixed_b_eta = fixed_b_eta;
      const int workers = threads > 0 ? threads : default_parallelism();
      const ExperimentReport report = run_experiment(cfg, reps, workers, exp_seed);
      emit(to_json(report), exp_out);
      if (!exp_table.empty()) {
        std::ofstream t(exp_table);
        if (!t) throw InputError("cannot write " + exp_table);
        save_report_csv(report, t);
      }
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const ContractError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
