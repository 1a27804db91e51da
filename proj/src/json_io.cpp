#include "dynpanel/json_io.hpp"

#include <cmath>
#include <cstdio>

namespace dynpanel {

namespace {

void write(const Json& v, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write(it.value(), out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ",\n";
        out += pad;
        write(v[k], out, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      out += buf;
      return;
    }
    default:
      out += v.dump();
  }
}

Json one_based(const std::vector<Index>& idx) {
  Json a = Json::array();
  for (Index h : idx) a.push_back(h + 1);
  return a;
}

}  // namespace

std::string dump_json(const Json& value) {
  std::string out;
  write(value, out, 0);
  out += '\n';
  return out;
}

Json to_json(const DgpConfig& c) {
  Json j;
  j["N"] = c.N;
  j["T"] = c.T;
  j["p_x"] = c.p_x;
  j["L_fit"] = c.L_fit;
  j["alpha_true"] = c.alpha_true;
  j["beta_nonzero"] = c.beta_nonzero;
  j["beta_value"] = c.beta_value;
  j["a_x"] = c.a_x;
  j["rho_toeplitz"] = c.rho_toeplitz;
  j["error_kind"] = to_string(c.error_kind);
  j["noise_scale"] = c.noise_scale;
  j["burn_in"] = c.burn_in;
  return j;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["name"] = c.name;
  j["dgp"] = to_json(c.dgp);
  j["hypothesis"] = one_based(c.hypothesis);
  j["power_null_first"] = c.power_null_first;
  j["level"] = c.level;
  j["test_size"] = c.test_size;
  auto bic = [](const BicLambda& b) {
    return Json{{"grid_size", b.grid_size}, {"grid_ratio", b.grid_ratio}, {"max_df_fraction", b.max_df_fraction}};
  };
  j["lasso_bic"] = bic(c.lasso_bic);
  j["nodewise_bic"] = bic(c.nodewise_bic);
  j["fixed_b_eta"] = c.fixed_b_eta;
  j["solver_tol"] = c.solver_tol;
  j["solver_max_iter"] = c.solver_max_iter;
  return j;
}

Json to_json(const ExperimentReport& r) {
  Json j;
  j["config"] = to_json(r.config);
  j["config"]["replications"] = r.replications;
  j["seed"] = r.seed;
  Json results, mc, excluded;
  for (Method m : kMethods) {
    const MethodSummary& s = r[m];
    const char* name = to_string(m);
    excluded[name] = {{"count", s.excluded}, {"failures", s.failures}};
    if (!s.applicable) {
      results[name] = {{"applicable", false}};
      mc[name] = nullptr;
      continue;
    }
    results[name] = {{"applicable", true},       {"used", s.used},     {"rmse_alpha", s.rmse_alpha},
                     {"rmse_eta", s.rmse_eta},   {"coverage", s.coverage}, {"length", s.length},
                     {"size", s.size},           {"power", s.power},   {"null_p_values", s.null_p_values}};
    mc[name] = {{"coverage", s.coverage_mc}, {"size", s.size_mc}, {"power", s.power_mc}};
  }
  j["results"] = results;
  j["mc_error"] = mc;
  j["excluded"] = excluded;
  return j;
}

Json to_json(const LassoFit& fit) {
  Json j;
  j["lambda"] = fit.lambda;
  j["coefficients"] = std::vector<double>(fit.coefficients.data(), fit.coefficients.data() + fit.coefficients.size());
  j["active_set"] = one_based(fit.active_set);
  j["objective_value"] = fit.objective_value;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  return j;
}

Json to_json(const InferenceResult& ci) {
  return Json{{"index", ci.index + 1},       {"estimate", ci.estimate}, {"std_error", ci.std_error},
              {"ci_lower", ci.ci_lower},     {"ci_upper", ci.ci_upper}, {"level", ci.level},
              {"degenerate", ci.degenerate}};
}

Json to_json(const WaldTest& t) {
  return Json{{"H", one_based(t.H)},
              {"h", t.h},
              {"null_values", std::vector<double>(t.null_values.data(), t.null_values.data() + t.null_values.size())},
              {"statistic", t.statistic},
              {"p_value", t.p_value}};
}

}  // namespace dynpanel
