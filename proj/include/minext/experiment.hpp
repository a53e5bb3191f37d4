#pragma once

// Seeded Monte Carlo experiments and trial reports.
//
// Trial i draws everything from the stream derive_seed(seed, i), so any
// subset of trials can be re-run on its own and the summary does not depend
// on the number of worker threads.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "minext/cyclic_signal.hpp"
#include "minext/error.hpp"
#include "minext/kernel_certificate.hpp"
#include "minext/l1_recovery.hpp"
#include "minext/omega_sampling.hpp"
#include "minext/random.hpp"
#include "minext/tail_bounds.hpp"

namespace minext {

enum class ExperimentKind { mc_iv, mc_recovery_fixed_x, mc_recovery_all_supports, bound_sweep };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::mc_iv:
      return "mc_iv";
    case ExperimentKind::mc_recovery_fixed_x:
      return "mc_recovery_fixed_x";
    case ExperimentKind::mc_recovery_all_supports:
      return "mc_recovery_all_supports";
    case ExperimentKind::bound_sweep:
      return "bound_sweep";
  }
  return "unknown";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "mc_iv") return ExperimentKind::mc_iv;
  if (s == "mc_recovery_fixed_x") return ExperimentKind::mc_recovery_fixed_x;
  if (s == "mc_recovery_all_supports") return ExperimentKind::mc_recovery_all_supports;
  if (s == "bound_sweep") return ExperimentKind::bound_sweep;
  throw ValidationError("unknown experiment kind: " + s);
}

inline constexpr double kAllSupportsLimit = 1e4;

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::mc_iv;
  std::size_t n = 0;
  std::size_t s = 1;
  SamplerSpec sampler;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  SolverConfig solver;
  std::optional<BoundParams> bound_params;
  CoefficientModel coefficients = CoefficientModel::unit_phase;
  std::size_t threads = 1;

  void validate() const {
    detail::check_order(n);
    detail::require(trials >= 1, "trials must be at least 1");
    detail::require(s >= 1 && s <= n, "s must lie in [1, n]");
    detail::require(threads >= 1, "threads must be at least 1");
    detail::require(sampler.n == n, "sampler order differs from n");
    sampler.validate();
    solver.validate();
    if (bound_params) {
      detail::require(bound_params->nu >= 3, "nu must be at least 3");
      detail::require(bound_params->mu >= 4, "mu must be at least 4");
    }
  }
};

struct TrialRecord {
  std::size_t trial_index = 0;
  std::size_t omega_cardinality = 0;
  bool success = false;
  std::optional<double> margin;
  std::optional<bool> iv_pass;
  std::optional<bool> certificate_pass;
  double wall_time = 0.0;  // seconds

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Wilson score interval at 95% confidence.
inline Interval wilson_interval(std::size_t hits, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double nd = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / nd;
  const double denom = 1.0 + z * z / nd;
  const double centre = (p + z * z / (2.0 * nd)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nd + z * z / (4.0 * nd * nd)) / denom;
  return {hits == 0 ? 0.0 : std::max(0.0, centre - half), hits == trials ? 1.0 : std::min(1.0, centre + half)};
}

/// bound + 3 binomial standard errors of a rate estimated from `trials`.
inline double bound_with_slack(double bound, std::size_t trials) {
  const double b = std::clamp(bound, 0.0, 1.0);
  return bound + 3.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(trials));
}

namespace detail {

template <class Fn>
void for_each_trial(std::size_t trials, std::size_t threads, Fn&& fn) {
  threads = std::min(threads, trials);
  if (threads <= 1) {
    for (std::size_t i = 0; i < trials; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < trials; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Condition (iv) under random Omega

struct McIvSummary {
  std::size_t n = 0;
  std::size_t s = 0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double failure_rate = 0.0;
  Interval wilson;
  double mean_cardinality = 0.0;
  /// Present for Bernoulli sampling with gcd(n, 6) = 1.
  std::optional<double> bound_canonical;   // nu n exp(-tauN a^2 / (4 (s^2 + a^2)))
  std::optional<double> bound_simplified;  // nu n^(1 - C a^2), C from tauN = 4 C (s^2+1) log n, if C > 1
  std::optional<double> c_equivalent;
  std::optional<bool> within_bound;        // failure_rate <= bound_canonical + 3 std errors
  std::vector<TrialRecord> records;
};

inline McIvSummary run_mc_iv(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::require(cfg.kind == ExperimentKind::mc_iv, "run_mc_iv needs kind mc_iv");
  std::vector<TrialRecord> records(cfg.trials);
  detail::for_each_trial(cfg.trials, cfg.threads, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng = Rng::stream(cfg.seed, i);
    const FreqSet omega = sample(cfg.sampler, rng);
    TrialRecord r;
    r.trial_index = i;
    r.omega_cardinality = omega.size();
    if (!omega.empty()) {
      const auto iv = check_iv(build_kernel(omega), cfg.s);
      r.success = iv.holds;
      r.margin = iv.margin;
      r.iv_pass = iv.holds;
    } else {
      r.iv_pass = false;
    }
    r.wall_time = detail::seconds_since(start);
    records[i] = r;
  });

  McIvSummary out;
  out.n = cfg.n;
  out.s = cfg.s;
  out.trials = cfg.trials;
  double card = 0.0;
  for (const auto& r : records) {
    if (!r.success) ++out.failures;
    card += static_cast<double>(r.omega_cardinality);
  }
  out.mean_cardinality = card / static_cast<double>(cfg.trials);
  out.failure_rate = static_cast<double>(out.failures) / static_cast<double>(cfg.trials);
  out.wilson = wilson_interval(out.failures, cfg.trials);
  if (cfg.sampler.is_bernoulli() && std::gcd(cfg.n, std::size_t{6}) == 1) {
    const int nu = cfg.bound_params ? cfg.bound_params->nu : 10;
    const double tauN = cfg.sampler.expected_cardinality();
    out.bound_canonical = v2_failure_bound(cfg.n, cfg.s, tauN, nu);
    if (cfg.n >= 2) {
      const double ss = static_cast<double>(cfg.s) * static_cast<double>(cfg.s);
      const double C = tauN / (4.0 * (ss + 1.0) * std::log(static_cast<double>(cfg.n)));
      out.c_equivalent = C;
      if (C > 1.0) out.bound_simplified = v2_simplified_bound(cfg.n, cfg.s, C, nu).failure;
    }
    out.within_bound = out.failure_rate <= bound_with_slack(*out.bound_canonical, cfg.trials);
  }
  out.records = std::move(records);
  return out;
}

// ---------------------------------------------------------------------------
// Recovery under random Omega

struct McRecoverySummary {
  ExperimentKind kind = ExperimentKind::mc_recovery_fixed_x;
  std::size_t n = 0;
  std::size_t s = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  Interval wilson;
  std::size_t supports_tested = 0;
  std::size_t iv_pass_trials = 0;
  std::size_t iv_pass_successes = 0;
  std::size_t certificate_passes = 0;  // per tested support
  /// Audit counters; any nonzero value contradicts a proven implication.
  std::size_t iv_true_recovery_failures = 0;
  std::size_t certificate_true_recovery_failures = 0;
  std::vector<TrialRecord> records;
};

namespace detail {

/// All k-subsets of Z_n in lexicographic order.
template <class Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    fn(idx);
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) return;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline double binomial_coefficient(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t j = 1; j <= k; ++j) c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
  return c;
}

struct SupportOutcome {
  bool recovered = false;
  bool certificate = false;
};

inline SupportOutcome test_support(const SupportSet& S, const FreqSet& omega, const ExperimentConfig& cfg,
                                   Rng& rng) {
  const Signal x = random_coefficients_on(S, cfg.coefficients, rng);
  SupportOutcome o;
  o.certificate = dual_certificate_check(x, omega).holds;
  o.recovered = verify_exact_recovery(x, omega, cfg.solver).recovered;
  return o;
}

}  // namespace detail

inline McRecoverySummary run_mc_recovery(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool all = cfg.kind == ExperimentKind::mc_recovery_all_supports;
  detail::require(all || cfg.kind == ExperimentKind::mc_recovery_fixed_x,
                  "run_mc_recovery needs kind mc_recovery_fixed_x or mc_recovery_all_supports");
  if (all && detail::binomial_coefficient(cfg.n, cfg.s) > kAllSupportsLimit)
    throw GuardError("C(n, s) exceeds the all-supports limit of 1e4");

  struct Counters {
    std::size_t supports = 0, cert = 0, iv_fail = 0, cert_fail = 0;
  };
  std::vector<TrialRecord> records(cfg.trials);
  std::vector<Counters> counters(cfg.trials);

  detail::for_each_trial(cfg.trials, cfg.threads, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng = Rng::stream(cfg.seed, i);
    const FreqSet omega = sample(cfg.sampler, rng);
    TrialRecord r;
    r.trial_index = i;
    r.omega_cardinality = omega.size();
    Counters c;
    if (omega.empty()) {
      r.success = false;
      r.iv_pass = false;
      r.certificate_pass = false;
    } else {
      const auto iv = check_iv(build_kernel(omega), cfg.s);
      r.iv_pass = iv.holds;
      r.margin = iv.margin;
      bool ok = true;
      bool cert_all = true;
      auto run = [&](const SupportSet& S) {
        const auto o = detail::test_support(S, omega, cfg, rng);
        ++c.supports;
        if (o.certificate) ++c.cert;
        if (o.certificate && !o.recovered) ++c.cert_fail;
        if (iv.holds && !o.recovered) ++c.iv_fail;
        ok = ok && o.recovered;
        cert_all = cert_all && o.certificate;
      };
      if (all) {
        detail::for_each_subset(cfg.n, cfg.s, [&](const std::vector<std::size_t>& idx) {
          run(SupportSet(cfg.n, idx));
        });
      } else {
        run(SupportSet(cfg.n, random_subset(cfg.n, cfg.s, rng)));
      }
      r.success = ok;
      r.certificate_pass = cert_all;
    }
    r.wall_time = detail::seconds_since(start);
    records[i] = r;
    counters[i] = c;
  });

  McRecoverySummary out;
  out.kind = cfg.kind;
  out.n = cfg.n;
  out.s = cfg.s;
  out.trials = cfg.trials;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    const auto& r = records[i];
    if (r.success) ++out.successes;
    if (r.iv_pass.value_or(false)) {
      ++out.iv_pass_trials;
      if (r.success) ++out.iv_pass_successes;
    }
    out.supports_tested += counters[i].supports;
    out.certificate_passes += counters[i].cert;
    out.iv_true_recovery_failures += counters[i].iv_fail;
    out.certificate_true_recovery_failures += counters[i].cert_fail;
  }
  out.success_rate = static_cast<double>(out.successes) / static_cast<double>(cfg.trials);
  out.wilson = wilson_interval(out.successes, cfg.trials);
  out.records = std::move(records);
  return out;
}

// ---------------------------------------------------------------------------
// Analytic bounds over a range of sparsities

struct BoundSweepRow {
  std::size_t s = 0;
  double tauN = 0.0;
  std::optional<double> v2_canonical;  // needs gcd(n, 6) = 1
  double v3_alpha = 0.0;
  double v3_exact = 0.0;
};

/// For s = 1..cfg.s at tauN = expected |Omega| of the sampler: the V2
/// bound and the V3 bound minimized over alpha.
inline std::vector<BoundSweepRow> run_bound_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::require(cfg.kind == ExperimentKind::bound_sweep, "run_bound_sweep needs kind bound_sweep");
  const BoundParams bp = cfg.bound_params.value_or(BoundParams{});
  const double tauN = cfg.sampler.expected_cardinality();
  std::vector<BoundSweepRow> rows;
  for (std::size_t s = 1; s <= cfg.s; ++s) {
    BoundSweepRow row;
    row.s = s;
    row.tauN = tauN;
    if (std::gcd(cfg.n, std::size_t{6}) == 1) row.v2_canonical = v2_failure_bound(cfg.n, s, tauN, bp.nu);
    const auto best = minimize_v3_over_alpha(cfg.n, s, tauN, bp.nu, bp.mu);
    row.v3_alpha = best.alpha;
    row.v3_exact = best.bound;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reports

enum class ReportFormat { json_lines, csv };

inline constexpr std::array<const char*, 7> kReportColumns = {
    "trial_index", "omega_cardinality", "outcome", "margin", "iv_pass", "certificate_pass", "wall_time"};

namespace detail {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> record_fields(const TrialRecord& r, bool json) {
  const std::string null_token = json ? "null" : "";
  auto opt_bool = [&](const std::optional<bool>& b) { return b ? std::string(*b ? "true" : "false") : null_token; };
  std::string outcome = r.success ? "success" : "failure";
  if (json) outcome = "\"" + outcome + "\"";
  return {std::to_string(r.trial_index),
          std::to_string(r.omega_cardinality),
          outcome,
          r.margin ? format_g17(*r.margin) : null_token,
          opt_bool(r.iv_pass),
          opt_bool(r.certificate_pass),
          format_g17(r.wall_time)};
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::optional<bool> parse_opt_bool(const std::string& s) {
  if (s.empty() || s == "null") return std::nullopt;
  if (s == "true") return true;
  if (s == "false") return false;
  throw ValidationError("bad boolean field: " + s);
}

inline std::optional<double> parse_opt_double(const std::string& s) {
  if (s.empty() || s == "null") return std::nullopt;
  return std::stod(s);
}

inline std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

inline TrialRecord record_from_fields(const std::vector<std::string>& f) {
  require(f.size() == kReportColumns.size(), "report row has the wrong number of fields");
  TrialRecord r;
  r.trial_index = std::stoull(f[0]);
  r.omega_cardinality = std::stoull(f[1]);
  const std::string outcome = strip_quotes(f[2]);
  require(outcome == "success" || outcome == "failure", "outcome must be success or failure");
  r.success = outcome == "success";
  r.margin = parse_opt_double(f[3]);
  r.iv_pass = parse_opt_bool(f[4]);
  r.certificate_pass = parse_opt_bool(f[5]);
  r.wall_time = std::stod(f[6]);
  return r;
}

}  // namespace detail

/// Stable key/column order, doubles with 17 significant digits. CSV always
/// starts with a header line; JSON lines emit one object per record.
inline std::string emit_report(const std::vector<TrialRecord>& records, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::csv) {
    for (std::size_t c = 0; c < kReportColumns.size(); ++c) os << (c ? "," : "") << kReportColumns[c];
    os << '\n';
    for (const auto& r : records) {
      const auto f = detail::record_fields(r, false);
      for (std::size_t c = 0; c < f.size(); ++c) os << (c ? "," : "") << f[c];
      os << '\n';
    }
  } else {
    for (const auto& r : records) {
      const auto f = detail::record_fields(r, true);
      os << '{';
      for (std::size_t c = 0; c < f.size(); ++c) os << (c ? "," : "") << '"' << kReportColumns[c] << "\":" << f[c];
      os << "}\n";
    }
  }
  return os.str();
}

/// Inverse of emit_report for both formats.
inline std::vector<TrialRecord> parse_report(const std::string& text, ReportFormat format) {
  std::vector<TrialRecord> out;
  std::istringstream is(text);
  std::string line;
  bool header = format == ReportFormat::csv;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    if (header) {
      header = false;
      detail::require(detail::split(line, ',').size() == kReportColumns.size(), "unexpected CSV header");
      continue;
    }
    if (format == ReportFormat::csv) {
      out.push_back(detail::record_from_fields(detail::split(line, ',')));
    } else {
      const auto j = nlohmann::json::parse(line);
      detail::require(j.is_object() && j.size() == kReportColumns.size(), "malformed JSON line");
      std::vector<std::string> values;
      for (const char* key : kReportColumns) {
        detail::require(j.contains(key), std::string("missing key ") + key);
        const auto& v = j.at(key);
        if (v.is_null())
          values.emplace_back();
        else if (v.is_string())
          values.push_back(v.get<std::string>());
        else if (v.is_number_float())
          values.push_back(detail::format_g17(v.get<double>()));
        else
          values.push_back(v.dump());
      }
      out.push_back(detail::record_from_fields(values));
    }
  }
  return out;
}

}  // namespace minext
