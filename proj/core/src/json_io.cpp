#include "hfa/json_io.hpp"

#include <charconv>
#include <cmath>
#include <optional>

namespace hfa::json {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

Json interval(double lo, double hi) { return Json::array({number(lo), number(hi)}); }

void write_string(std::string& out, const std::string& s) {
  out += Json(s).dump();
}

void write(std::string& out, const Json& v, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
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
        out += pad;
        write_string(out, it.key());
        out += ": ";
        write(out, it.value(), depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        write(out, item, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string format_double(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  std::string s(buf, res.ptr);
  // Keep a marker of floating type so readers do not see an integer.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string dump(const Json& value) {
  std::string out;
  write(out, value, 0);
  out += '\n';
  return out;
}

Json to_json(const EstimabilityReport& report) {
  return {{"lambda_estimable", report.lambda_estimable}, {"rank_W", report.rank_W}};
}

Json to_json(const FixedFit& fit) {
  return {{"lambda_hat", number(fit.lambda_hat)},
          {"se_lambda", number(fit.se_lambda)},
          {"sigma2_hat", number(fit.sigma2_hat)},
          {"dof_resid", fit.dof_resid},
          {"rank_W", fit.rank_W},
          {"ci95", interval(fit.ci_lower, fit.ci_upper)}};
}

Json to_json(const MixedFit& fit) {
  return {{"lambda_hat", number(fit.lambda_hat)},
          {"se_lambda", number(fit.se_lambda)},
          {"sigma2_g", number(fit.sigma2_g)},
          {"sigma2", number(fit.sigma2)},
          {"reml_loglik", number(fit.reml_loglik)},
          {"iterations", fit.iterations},
          {"converged", fit.converged},
          {"boundary", fit.boundary},
          {"ci95", interval(fit.ci_lower, fit.ci_upper)}};
}

Json to_json(const DiagnosticResult& result) {
  return {{"statistic", optional_number(result.statistic)},
          {"dof", result.dof},
          {"p_value", optional_number(result.p_value)},
          {"applicable", result.applicable},
          {"reason", result.reason}};
}

Json to_json(const SimulationReport& report) {
  auto block = [](double mean, double mc_se, double coverage, const std::optional<double>& p) {
    return Json{{"mean", number(mean)},
                {"mc_se", number(mc_se)},
                {"coverage", number(coverage)},
                {"p_value", optional_number(p)}};
  };
  return {{"fixed", block(report.mean_fixed, report.mc_se_fixed, report.coverage_fixed, report.t_p_fixed)},
          {"mixed", block(report.mean_mixed, report.mc_se_mixed, report.coverage_mixed, report.t_p_mixed)},
          {"replicates", report.lambda_draws_fixed.size()},
          {"failures", report.failures},
          {"not_converged", report.not_converged}};
}

Json to_json(const ModelSummary& summary) {
  return {{"mean", number(summary.mean)},
          {"coverage", number(summary.coverage)},
          {"p_value", optional_number(summary.p_value)}};
}

Json to_json(const Coefficient& c) {
  return {{"name", c.name},
          {"estimate", number(c.estimate)},
          {"se", number(c.se)},
          {"ci95", interval(c.ci_lower, c.ci_upper)},
          {"p_value", number(c.p_value)}};
}

Json to_json(const RandomCoefFit& fit) {
  Json blups = Json::array();
  for (const auto& b : fit.blups) {
    blups.push_back({{"conference", b.conference}, {"b0", number(b.intercept)}, {"b1", number(b.slope)}});
  }
  return {{"alpha0", to_json(fit.alpha0)},
          {"alpha1", to_json(fit.alpha1)},
          {"G", {{"sigma1_sq", number(fit.G(0, 0))},
                 {"sigma12", number(fit.G(1, 0))},
                 {"sigma2_sq", number(fit.G(1, 1))}}},
          {"sigma2_lambda", number(fit.sigma2_lambda)},
          {"reml_loglik", number(fit.reml_loglik)},
          {"reml_loglik_G0", number(fit.reml_loglik_g0)},
          {"time_origin", fit.time_origin},
          {"n_obs", fit.n_obs},
          {"converged", fit.converged},
          {"exact_fit", fit.exact_fit},
          {"blups", std::move(blups)}};
}

Json to_json(const FixedTrendFit& fit) {
  Json coefs = Json::array();
  for (const auto& c : fit.coefficients) coefs.push_back(to_json(c));
  Json out = {{"model", to_string(fit.model)},
              {"conference_A", fit.conference_a}};
  if (!fit.conference_b.empty()) out["conference_B"] = fit.conference_b;
  out["coefficients"] = std::move(coefs);
  out["sigma2_lambda"] = number(fit.sigma2_lambda);
  out["loglik_ml"] = number(fit.loglik_ml);
  out["reml_loglik"] = number(fit.reml_loglik);
  out["n_obs"] = fit.n_obs;
  return out;
}

Json to_json(const LrtResult& result) {
  return {{"stat", number(result.stat)}, {"dof", result.dof}, {"p_value", number(result.p)}};
}

Json to_json(const BoundaryTestResult& result) {
  return {{"observed_stat", number(result.observed_stat)},
          {"p_value", number(result.p)},
          {"n_sim", result.n_sim},
          {"failures", result.failures}};
}

}  // namespace hfa::json
