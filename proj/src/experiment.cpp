#include "dynpanel/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include "dynpanel/baselines.hpp"
#include "dynpanel/covariance.hpp"
#include "dynpanel/desparsify.hpp"
#include "dynpanel/distributions.hpp"
#include "dynpanel/errors.hpp"
#include "dynpanel/inference.hpp"

namespace dynpanel {

const char* to_string(Method m) {
  switch (m) {
    case Method::LS: return "LS";
    case Method::DL: return "DL";
    case Method::Oracle: return "Oracle";
  }
  return "?";
}

std::vector<std::string> named_experiments() {
  std::vector<std::string> out;
  for (char e : {'1', '2', '3', '4', '5'}) {
    for (char v : {'a', 'b', 'c'}) out.push_back(std::string{e, v});
  }
  return out;
}

ExperimentConfig named_experiment(const std::string& name) {
  if (name.size() != 2 || name[0] < '1' || name[0] > '5' || name[1] < 'a' || name[1] > 'c') {
    throw InputError("unknown experiment '" + name + "' (expected 1a..5c)");
  }
  ExperimentConfig cfg;
  cfg.name = name;
  DgpConfig& d = cfg.dgp;
  d.N = 20;
  d.T = 10;
  d.L_fit = 5;
  switch (name[0]) {
    case '1':
      d.p_x = 100;
      cfg.hypothesis = {6, 26, 46};
      break;
    case '2':
    case '3':
    case '4':
      d.p_x = 400;
      cfg.hypothesis = {6, 86, 166};
      if (name[0] == '3') d.T = 40;
      if (name[0] == '4') d.N = 40;
      break;
    case '5':
      d.T = 40;
      d.p_x = 1005;
      d.beta_nonzero = 15;
      cfg.hypothesis = {6, 73, 140};
      break;
  }
  d.error_kind = name[1] == 'a' ? ErrorKind::gaussian : name[1] == 'b' ? ErrorKind::hetero : ErrorKind::t3_hetero;
  return cfg;
}

double binomial_half_width(double p, Index n) {
  if (n <= 0) return 0.0;
  return 1.959963984540054 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

int default_parallelism() {
  if (const char* env = std::getenv("DYNPANEL_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

namespace {

bool covers(double lo, double hi, double truth) {
  // Absolute slack so exact (noiseless) recoveries with round-off still count.
  const double slack = 1e-9 * (1.0 + std::abs(truth));
  return lo - slack <= truth && truth <= hi + slack;
}

struct Truth {
  VectorXd gamma;
  Index p = 0;
  VectorXd null_true;
  VectorXd null_false;
};

void score_errors(MethodDraw& draw, const VectorXd& coefficients, const Truth& truth) {
  draw.sq_error_alpha = (coefficients.head(truth.p) - truth.gamma.head(truth.p)).squaredNorm();
  const Index N = truth.gamma.size() - truth.p;
  draw.sq_error_eta = (coefficients.tail(N) - truth.gamma.tail(N)).squaredNorm();
}

MethodDraw run_desparsified(const ExperimentConfig& cfg, const DesignSystem& design, const VectorXd& y,
                            const Truth& truth) {
  MethodDraw draw;
  const LambdaSelection sel = select_lambda(design, y, cfg.lasso_bic, cfg.solver_tol, cfg.solver_max_iter);
  const LassoFit& fit = sel.path[*sel.selected].fit;
  score_errors(draw, fit.coefficients, truth);

  std::vector<Index> rows;
  for (Index h : cfg.hypothesis) {
    if (h < design.p()) rows.push_back(h);
  }
  NodewiseInverse inv;
  if (!rows.empty()) inv = fit_nodewise(design, rows, cfg.nodewise_bic);
  const DebiasedEstimate est = desparsify(fit, design, y, inv, cfg.hypothesis);
  const RobustCovariance cov = sigma_blocks(design, residuals(fit, design, y));
  for (Index h : cfg.hypothesis) {
    const InferenceResult ci = confidence_interval(h, est, inv, cov, design, cfg.level);
    draw.covered.push_back(covers(ci.ci_lower, ci.ci_upper, truth.gamma(h)));
    draw.length.push_back(ci.ci_upper - ci.ci_lower);
  }
  draw.p_null = wald_chi2(cfg.hypothesis, truth.null_true, est, inv, cov, design).p_value;
  draw.p_false = wald_chi2(cfg.hypothesis, truth.null_false, est, inv, cov, design).p_value;
  draw.ok = true;
  return draw;
}

MethodDraw score_ols(const ExperimentConfig& cfg, const OlsFit& fit, const Truth& truth) {
  MethodDraw draw;
  if (!fit.applicable) {
    draw.applicable = false;
    return draw;
  }
  score_errors(draw, fit.coefficients, truth);
  const double z = two_sided_multiplier(cfg.level);
  const Index h = static_cast<Index>(cfg.hypothesis.size());
  std::vector<Index> pos;
  for (Index idx : cfg.hypothesis) {
    const auto at = fit.position(idx);
    if (!at) throw ContractError("ols baseline does not include tested index " + std::to_string(idx));
    pos.push_back(*at);
  }
  MatrixXd V(h, h);
  VectorXd est(h);
  for (Index a = 0; a < h; ++a) {
    est(a) = fit.coefficients(cfg.hypothesis[static_cast<std::size_t>(a)]);
    for (Index b = 0; b < h; ++b) {
      V(a, b) = fit.alpha_covariance(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]);
    }
    const double se = std::sqrt(std::max(V(a, a), 0.0));
    draw.covered.push_back(covers(est(a) - z * se, est(a) + z * se, truth.gamma(cfg.hypothesis[static_cast<std::size_t>(a)])));
    draw.length.push_back(2.0 * z * se);
  }
  const double dof = static_cast<double>(h);
  draw.p_null = chi2_upper_tail(inverse_quadratic_form(est - truth.null_true, V), dof);
  draw.p_false = chi2_upper_tail(inverse_quadratic_form(est - truth.null_false, V), dof);
  draw.ok = true;
  return draw;
}

template <class F>
void guarded(MethodDraw& slot, F&& body) {
  try {
    slot = body();
  } catch (const std::exception& e) {
    slot = MethodDraw{};
    slot.ok = false;
    slot.failure = e.what();
  }
}

}  // namespace

ReplicationDraw run_replication(const ExperimentConfig& cfg, std::uint64_t seed, Index replication) {
  ReplicationDraw out;
  DgpConfig dgp = cfg.dgp;
  dgp.seed = derive_seed(seed, static_cast<std::uint64_t>(replication));
  if (cfg.fixed_b_eta) dgp.b_eta_seed = derive_seed(seed, 0xB7E7A5EEDULL) ^ 0x5A5A5A5AULL;

  SimulatedPanel sim;
  try {
    sim = simulate_panel(dgp);
  } catch (const std::exception& e) {
    for (auto& m : out.methods) m.failure = std::string("simulation: ") + e.what();
    return out;
  }
  const DesignSystem design = build_design(sim.panel);
  const VectorXd y = stack_outcomes(sim.panel);

  Truth truth;
  truth.gamma = sim.gamma_true;
  truth.p = design.p();
  const Index h = static_cast<Index>(cfg.hypothesis.size());
  truth.null_true.resize(h);
  for (Index k = 0; k < h; ++k) truth.null_true(k) = truth.gamma(cfg.hypothesis[static_cast<std::size_t>(k)]);
  truth.null_false = truth.null_true;
  if (h > 0) truth.null_false(0) = cfg.power_null_first;

  guarded(out.methods[static_cast<std::size_t>(Method::DL)],
          [&] { return run_desparsified(cfg, design, y, truth); });

  std::vector<Index> support;
  for (Index k = 0; k < design.p(); ++k) {
    if (truth.gamma(k) != 0.0) support.push_back(k);
  }
  for (Index idx : cfg.hypothesis) support.push_back(idx);

  guarded(out.methods[static_cast<std::size_t>(Method::LS)], [&] {
    std::vector<Index> all(static_cast<std::size_t>(design.p()));
    for (Index k = 0; k < design.p(); ++k) all[static_cast<std::size_t>(k)] = k;
    return score_ols(cfg, ols_fit(design, y, all), truth);
  });
  guarded(out.methods[static_cast<std::size_t>(Method::Oracle)],
          [&] { return score_ols(cfg, ols_fit(design, y, support), truth); });
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config, Index replications, int parallelism,
                                std::uint64_t seed) {
  if (replications < 1) throw InputError("experiment: replications must be at least 1");
  config.dgp.validate();
  std::vector<ReplicationDraw> draws(static_cast<std::size_t>(replications));
  std::atomic<Index> next{0};
  auto worker = [&] {
    for (Index r = next++; r < replications; r = next++) {
      draws[static_cast<std::size_t>(r)] = run_replication(config, seed, r);
    }
  };
  const int workers = static_cast<int>(std::min<Index>(std::max(parallelism, 1), replications));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentReport report;
  report.config = config;
  report.replications = replications;
  report.seed = seed;
  const std::size_t h = config.hypothesis.size();
  for (Method m : kMethods) {
    MethodSummary& s = report.methods[static_cast<std::size_t>(m)];
    s.coverage.assign(h, 0.0);
    s.length.assign(h, 0.0);
    double se_alpha = 0.0, se_eta = 0.0, size = 0.0, power = 0.0;
    bool any_applicable = false;
    for (Index r = 0; r < replications; ++r) {
      const MethodDraw& d = draws[static_cast<std::size_t>(r)].methods[static_cast<std::size_t>(m)];
      if (!d.applicable) continue;
      any_applicable = true;
      if (!d.ok) {
        ++s.excluded;
        s.failures.push_back("replication " + std::to_string(r) + ": " + d.failure);
        continue;
      }
      ++s.used;
      se_alpha += d.sq_error_alpha;
      se_eta += d.sq_error_eta;
      for (std::size_t k = 0; k < h; ++k) {
        s.coverage[k] += d.covered[k] ? 1.0 : 0.0;
        s.length[k] += d.length[k];
      }
      size += d.p_null < config.test_size ? 1.0 : 0.0;
      power += d.p_false < config.test_size ? 1.0 : 0.0;
      s.null_p_values.push_back(d.p_null);
    }
    s.applicable = any_applicable;
    if (s.used > 0) {
      const double n = static_cast<double>(s.used);
      s.rmse_alpha = std::sqrt(se_alpha / n);
      s.rmse_eta = std::sqrt(se_eta / n);
      s.size = size / n;
      s.power = power / n;
      for (std::size_t k = 0; k < h; ++k) {
        s.coverage[k] /= n;
        s.length[k] /= n;
      }
    }
    for (double c : s.coverage) s.coverage_mc.push_back(binomial_half_width(c, s.used));
    s.size_mc = binomial_half_width(s.size, s.used);
    s.power_mc = binomial_half_width(s.power, s.used);
  }
  return report;
}

}  // namespace dynpanel
