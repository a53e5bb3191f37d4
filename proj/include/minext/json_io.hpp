#pragma once

// JSON encodings.
//
//   Signal / Spectrum   {"n": int, "re": [...], "im": [...]}
//   SupportSet/FreqSet  sorted integer array (the order comes from context)
//   RecoveryProblem     {"n": int, "omega": [...], "samples": {"re": [...], "im": [...]}}

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "minext/cyclic_signal.hpp"
#include "minext/error.hpp"
#include "minext/experiment.hpp"
#include "minext/kernel_certificate.hpp"
#include "minext/l1_recovery.hpp"
#include "minext/omega_sampling.hpp"
#include "minext/tail_bounds.hpp"

namespace minext {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Vectors and sets

inline json complex_parts_to_json(const std::vector<complex>& v) {
  json re = json::array(), im = json::array();
  for (const auto& e : v) {
    re.push_back(e.real());
    im.push_back(e.imag());
  }
  return json{{"re", re}, {"im", im}};
}

inline std::vector<complex> complex_parts_from_json(const json& j) {
  detail::require(j.is_object() && j.contains("re") && j.contains("im"), "expected an object with re and im");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  detail::require(re.is_array() && im.is_array() && re.size() == im.size(), "re and im must be equal-length arrays");
  std::vector<complex> v(re.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {re[i].get<double>(), im[i].get<double>()};
  return v;
}

template <class Domain>
json to_json(const CyclicVector<Domain>& v) {
  json j = complex_parts_to_json(v.vector());
  j["n"] = v.n();
  return j;
}

template <class Domain>
CyclicVector<Domain> cyclic_vector_from_json(const json& j) {
  detail::require(j.is_object() && j.contains("n"), "expected an object with n, re and im");
  auto v = complex_parts_from_json(j);
  detail::require(j.at("n").get<std::size_t>() == v.size(), "n does not match the length of re/im");
  return CyclicVector<Domain>(std::move(v));
}

inline Signal signal_from_json(const json& j) { return cyclic_vector_from_json<TimeDomain>(j); }
inline Spectrum spectrum_from_json(const json& j) { return cyclic_vector_from_json<FrequencyDomain>(j); }

template <class Domain>
json to_json(const ResidueSet<Domain>& s) {
  return json(s.members());
}

template <class Domain>
ResidueSet<Domain> residue_set_from_json(const json& j, std::size_t n) {
  detail::require(j.is_array(), "a set must be an integer array");
  std::vector<std::size_t> m;
  for (const auto& e : j) {
    detail::require(e.is_number_integer() && e.get<long long>() >= 0, "set members must be nonnegative integers");
    m.push_back(e.get<std::size_t>());
  }
  return ResidueSet<Domain>(n, std::move(m));
}

inline FreqSet freq_set_from_json(const json& j, std::size_t n) { return residue_set_from_json<FrequencyDomain>(j, n); }
inline SupportSet support_set_from_json(const json& j, std::size_t n) {
  return residue_set_from_json<TimeDomain>(j, n);
}

// ---------------------------------------------------------------------------
// Certificates and checks

inline json to_json(const IvCheck& c) {
  return json{{"holds", c.holds},
              {"margin", c.margin},
              {"max_off_zero", c.max_off_zero},
              {"threshold", c.threshold}};
}

inline json to_json(const RowSums& r) {
  return json{{"row_on_support", r.on_support},
              {"row_off_support", r.off_support},
              {"sufficient_alpha_half", r.sufficient_for(0.5)}};
}

inline json to_json(const GridCheck& g) {
  return json{{"holds", g.holds},
              {"alpha_prime", g.alpha_prime},
              {"worst_on_support", g.worst_on_support},
              {"worst_off_support", g.worst_off_support},
              {"assignments", g.assignments}};
}

inline json to_json(const Certificate& c) {
  json j{{"p", to_json(c.p)},
         {"support", to_json(c.support)},
         {"lambda", complex_parts_to_json(c.lambda)},
         {"margins", {{"on_support", c.margins.on_support}, {"off_support", c.margins.off_support}}}};
  j["alpha"] = c.alpha ? json(*c.alpha) : json(nullptr);
  return j;
}

inline json to_json(const DualCertificateCheck& d) {
  return json{{"holds", d.holds},
              {"support", to_json(d.support)},
              {"kernel_margins", {{"on_support", d.kernel_margins.on_support},
                                  {"off_support", d.kernel_margins.off_support}}},
              {"kernel_admits_alpha", d.kernel_admits_alpha},
              {"gram_min_eigenvalue", d.gram_min_eigenvalue},
              {"full_column_rank", d.full_column_rank},
              {"interpolation_residual", d.interpolation_residual},
              {"interpolant_off_support",
               std::isfinite(d.interpolant_off_support) ? json(d.interpolant_off_support) : json(nullptr)}};
}

// ---------------------------------------------------------------------------
// Recovery

inline RecoveryProblem recovery_problem_from_json(const json& j) {
  detail::require(j.is_object() && j.contains("n") && j.contains("omega"), "problem needs n and omega");
  const auto n = j.at("n").get<std::size_t>();
  RecoveryProblem p{n, freq_set_from_json(j.at("omega"), n), {}};
  // samples may be nested under "samples" or given as top-level re/im
  p.samples = complex_parts_from_json(j.contains("samples") ? j.at("samples") : j);
  p.validate();
  return p;
}

inline json to_json(const RecoveryProblem& p) {
  return json{{"n", p.n}, {"omega", to_json(p.omega)}, {"samples", complex_parts_to_json(p.samples)}};
}

inline json to_json(const RecoveryResult& r) {
  return json{{"status", to_string(r.status)},
              {"iterations", r.iterations},
              {"objective", r.objective},
              {"constraint_residual", r.constraint_residual},
              {"minimizer", to_json(r.minimizer)}};
}

inline SolverConfig solver_config_from_json(const json& j) {
  SolverConfig c;
  if (j.contains("max_iterations")) c.max_iterations = j.at("max_iterations").get<std::size_t>();
  if (j.contains("constraint_tol")) c.constraint_tol = j.at("constraint_tol").get<double>();
  if (j.contains("change_tol")) c.change_tol = j.at("change_tol").get<double>();
  if (j.contains("relaxation")) c.relaxation = j.at("relaxation").get<double>();
  if (j.contains("step")) c.step = j.at("step").get<double>();
  c.validate();
  return c;
}

inline json to_json(const SolverConfig& c) {
  return json{{"max_iterations", c.max_iterations},
              {"constraint_tol", c.constraint_tol},
              {"change_tol", c.change_tol},
              {"relaxation", c.relaxation},
              {"step", c.step}};
}

// ---------------------------------------------------------------------------
// Sampling and experiments

inline json to_json(const SamplerSpec& s) {
  if (s.is_fixed()) return json{{"model", "fixed"}, {"f", std::get<FixedCardinality>(s.model).f}};
  return json{{"model", "bernoulli"}, {"tau", std::get<BernoulliSelection>(s.model).tau}};
}

/// {"model": "fixed", "f": int} | {"model": "bernoulli", "tau": real | "tauN": real}
inline SamplerSpec sampler_spec_from_json(const json& j, std::size_t n) {
  detail::require(j.is_object() && j.contains("model"), "sampler needs a model");
  const auto model = j.at("model").get<std::string>();
  if (model == "fixed") {
    detail::require(j.contains("f"), "fixed sampler needs f");
    return SamplerSpec::fixed(n, j.at("f").get<std::size_t>());
  }
  if (model == "bernoulli") {
    if (j.contains("tau")) return SamplerSpec::bernoulli(n, j.at("tau").get<double>());
    detail::require(j.contains("tauN"), "bernoulli sampler needs tau or tauN");
    return SamplerSpec::bernoulli(n, j.at("tauN").get<double>() / static_cast<double>(n));
  }
  throw ValidationError("unknown sampler model: " + model);
}

inline json to_json(const BoundParams& b) {
  return json{{"C", b.C}, {"nu", b.nu}, {"mu", b.mu}, {"alpha", b.alpha}, {"eps", b.eps}, {"xi", b.xi}};
}

inline BoundParams bound_params_from_json(const json& j) {
  BoundParams b;
  if (j.contains("C")) b.C = j.at("C").get<double>();
  if (j.contains("nu")) b.nu = j.at("nu").get<int>();
  if (j.contains("mu")) b.mu = j.at("mu").get<int>();
  if (j.contains("alpha")) b.alpha = j.at("alpha").get<double>();
  if (j.contains("eps")) b.eps = j.at("eps").get<double>();
  if (j.contains("xi")) b.xi = j.at("xi").get<double>();
  return b;
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
  detail::require(j.is_object(), "config must be an object");
  for (const char* key : {"kind", "n", "sampler", "trials", "seed"})
    detail::require(j.contains(key), std::string("config is missing ") + key);
  ExperimentConfig c;
  c.kind = parse_experiment_kind(j.at("kind").get<std::string>());
  c.n = j.at("n").get<std::size_t>();
  if (j.contains("s")) c.s = j.at("s").get<std::size_t>();
  c.sampler = sampler_spec_from_json(j.at("sampler"), c.n);
  c.trials = j.at("trials").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("solver")) c.solver = solver_config_from_json(j.at("solver"));
  if (j.contains("bound_params")) c.bound_params = bound_params_from_json(j.at("bound_params"));
  if (j.contains("coefficients")) {
    const auto m = j.at("coefficients").get<std::string>();
    detail::require(m == "unit_phase" || m == "complex_gaussian", "coefficients must be unit_phase or complex_gaussian");
    c.coefficients = m == "unit_phase" ? CoefficientModel::unit_phase : CoefficientModel::complex_gaussian;
  }
  if (j.contains("threads")) c.threads = j.at("threads").get<std::size_t>();
  c.validate();
  return c;
}

inline json to_json(const ExperimentConfig& c) {
  json j{{"kind", to_string(c.kind)},
         {"n", c.n},
         {"s", c.s},
         {"sampler", to_json(c.sampler)},
         {"trials", c.trials},
         {"seed", c.seed},
         {"solver", to_json(c.solver)},
         {"coefficients", c.coefficients == CoefficientModel::unit_phase ? "unit_phase" : "complex_gaussian"},
         {"threads", c.threads}};
  if (c.bound_params) j["bound_params"] = to_json(*c.bound_params);
  return j;
}

namespace detail {
template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}
}  // namespace detail

/// Summary without trial records or timings, so it is a pure function of
/// the configuration.
inline json to_json(const McIvSummary& s) {
  return json{{"kind", "mc_iv"},
              {"n", s.n},
              {"s", s.s},
              {"trials", s.trials},
              {"failures", s.failures},
              {"failure_rate", s.failure_rate},
              {"wilson95", {s.wilson.low, s.wilson.high}},
              {"mean_cardinality", s.mean_cardinality},
              {"bounds",
               {{"v2_canonical", detail::optional_json(s.bound_canonical)},
                {"v2_simplified", detail::optional_json(s.bound_simplified)},
                {"C_equivalent", detail::optional_json(s.c_equivalent)}}},
              {"within_bound", detail::optional_json(s.within_bound)}};
}

inline json to_json(const McRecoverySummary& s) {
  const json conditional = s.iv_pass_trials
                               ? json(static_cast<double>(s.iv_pass_successes) / static_cast<double>(s.iv_pass_trials))
                               : json(nullptr);
  return json{{"kind", to_string(s.kind)},
              {"n", s.n},
              {"s", s.s},
              {"trials", s.trials},
              {"successes", s.successes},
              {"success_rate", s.success_rate},
              {"wilson95", {s.wilson.low, s.wilson.high}},
              {"supports_tested", s.supports_tested},
              {"iv_pass_trials", s.iv_pass_trials},
              {"recovery_rate_given_iv", conditional},
              {"certificate_passes", s.certificate_passes},
              {"audit",
               {{"iv_true_recovery_failures", s.iv_true_recovery_failures},
                {"certificate_true_recovery_failures", s.certificate_true_recovery_failures}}}};
}

inline json to_json(const std::vector<BoundSweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back(json{{"s", r.s},
                       {"tauN", r.tauN},
                       {"v2_canonical", detail::optional_json(r.v2_canonical)},
                       {"v3_alpha", r.v3_alpha},
                       {"v3_exact", r.v3_exact}});
  return json{{"kind", "bound_sweep"}, {"rows", arr}};
}

}  // namespace minext
