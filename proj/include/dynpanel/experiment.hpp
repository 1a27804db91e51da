#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dynpanel/dgp.hpp"
#include "dynpanel/nodewise.hpp"
#include "dynpanel/solver.hpp"

namespace dynpanel {

enum class Method { LS, DL, Oracle };
inline constexpr std::array<Method, 3> kMethods{Method::LS, Method::DL, Method::Oracle};
const char* to_string(Method m);

struct ExperimentConfig {
  std::string name = "custom";
  DgpConfig dgp;
  /// 0-based gamma indices of the tested coefficients.
  std::vector<Index> hypothesis{6, 26, 46};
  /// The false null moves the first tested coefficient to this value.
  double power_null_first = 0.4;
  double level = 0.95;
  double test_size = 0.05;
  BicLambda lasso_bic;
  BicLambda nodewise_bic;
  /// Draw b_eta once per experiment instead of once per replication.
  bool fixed_b_eta = false;
  double solver_tol = kDefaultTol;
  int solver_max_iter = kDefaultMaxIter;
};

/// "1a".."1c", "2a".."2c", "3a".."3c", "4a".."4c", "5a".."5c".
ExperimentConfig named_experiment(const std::string& name);
std::vector<std::string> named_experiments();

struct MethodSummary {
  bool applicable = true;
  Index used = 0;
  double rmse_alpha = 0.0;
  double rmse_eta = 0.0;
  std::vector<double> coverage;
  std::vector<double> length;
  double size = 0.0;
  double power = 0.0;
  /// 95% binomial half-widths of the coverage, size and power estimates.
  std::vector<double> coverage_mc;
  double size_mc = 0.0;
  double power_mc = 0.0;
  /// p-values of the true-null chi-square test, in replication order.
  std::vector<double> null_p_values;
  Index excluded = 0;
  std::vector<std::string> failures;
};

struct ExperimentReport {
  ExperimentConfig config;
  Index replications = 0;
  std::uint64_t seed = 0;
  std::array<MethodSummary, 3> methods;

  const MethodSummary& operator[](Method m) const { return methods[static_cast<std::size_t>(m)]; }
};

/// Outcome of one method on one replication.
struct MethodDraw {
  bool applicable = true;
  bool ok = false;
  std::string failure;
  double sq_error_alpha = 0.0;
  double sq_error_eta = 0.0;
  std::vector<bool> covered;
  std::vector<double> length;
  double p_null = 1.0;
  double p_false = 1.0;
};

struct ReplicationDraw {
  std::array<MethodDraw, 3> methods;
};

/// Runs the full pipeline on one simulated panel.
ReplicationDraw run_replication(const ExperimentConfig& config, std::uint64_t seed, Index replication);

/// Replication r uses derive_seed(seed, r); results are reduced in replication order,
/// so the report does not depend on `parallelism`.
ExperimentReport run_experiment(const ExperimentConfig& config, Index replications, int parallelism,
                                std::uint64_t seed);

/// 1.96 sqrt(p (1 - p) / n)
double binomial_half_width(double p, Index n);

/// DYNPANEL_THREADS when set and positive, otherwise 1.
int default_parallelism();

}  // namespace dynpanel
