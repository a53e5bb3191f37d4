// minext: command-line front end.
//
// Exit status: 0 success, 2 invalid input, 3 guard limit exceeded, 1 other.

#include <cstdio>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "minext/minext.hpp"

namespace {

using namespace minext;

constexpr int kExitValidation = 2;
constexpr int kExitGuard = 3;

struct Globals {
  std::optional<std::size_t> n;
  std::optional<std::size_t> s;
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  std::string format = "json";
  std::string out;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

void write_output(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + g.out);
  f << text;
}

// Nested objects flatten to dotted column names; arrays stay as JSON text.
void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& cells) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), cells);
    return;
  }
  std::string v;
  if (j.is_null())
    v = "";
  else if (j.is_string())
    v = j.get<std::string>();
  else if (j.is_array())
    v = "\"" + j.dump() + "\"";
  else
    v = j.dump();
  cells.emplace_back(prefix, v);
}

std::string render(const Globals& g, const json& j) {
  if (g.format == "json") return j.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> cells;
  flatten(j, "", cells);
  std::string header, row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    header += (i ? "," : "") + cells[i].first;
    row += (i ? "," : "") + cells[i].second;
  }
  return header + "\n" + row + "\n";
}

ReportFormat report_format(const std::string& f) { return f == "csv" ? ReportFormat::csv : ReportFormat::json_lines; }

std::size_t need(const std::optional<std::size_t>& v, const char* name) {
  if (!v) throw ValidationError(std::string("--") + name + " is required");
  return *v;
}

// "0,1,2", "[0,1,2]", "full" or "@file.json".
template <class Domain>
ResidueSet<Domain> parse_set(const std::string& text, std::size_t n) {
  if (text == "full") return ResidueSet<Domain>::full(n);
  if (text.empty()) return ResidueSet<Domain>::empty_set(n);
  if (text.front() == '@') return residue_set_from_json<Domain>(parse_json_text(read_file(text.substr(1)), text), n);
  if (text.front() == '[') return residue_set_from_json<Domain>(parse_json_text(text, "set"), n);
  std::vector<std::size_t> m;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("bad set member: " + item);
    }
    if (used != item.size() || v < 0) throw ValidationError("bad set member: " + item);
    m.push_back(static_cast<std::size_t>(v));
  }
  return ResidueSet<Domain>(n, std::move(m));
}

struct SamplerArgs {
  std::string model = "bernoulli";
  std::optional<std::size_t> f;
  std::optional<double> tau;
  std::optional<double> tauN;

  void add_to(CLI::App* app) {
    app->add_option("--model", model, "fixed or bernoulli")->check(CLI::IsMember({"fixed", "bernoulli"}));
    app->add_option("--f", f, "cardinality for the fixed model");
    app->add_option("--tau", tau, "inclusion probability for the Bernoulli model");
    app->add_option("--tauN", tauN, "expected cardinality for the Bernoulli model");
  }

  SamplerSpec spec(std::size_t n) const {
    if (model == "fixed") return SamplerSpec::fixed(n, f ? *f : throw ValidationError("--f is required"));
    if (tau && tauN) throw ValidationError("give only one of --tau and --tauN");
    if (tau) return SamplerSpec::bernoulli(n, *tau);
    if (tauN) return SamplerSpec::bernoulli(n, *tauN / static_cast<double>(n));
    throw ValidationError("--tau or --tauN is required");
  }
};

struct BoundArgs {
  std::optional<std::size_t> n;
  std::optional<std::size_t> s;
  std::optional<double> tauN;
  double C = 2.0;
  int nu = 10;
  int mu = 10;
  std::optional<double> alpha;
  double eps = 0.05;
  double xi = 1.0;
  std::string form = "exact";
};

json bound_json(const std::string& which, const BoundArgs& b, const Globals& g) {
  const auto n_of = [&] { return b.n ? *b.n : need(g.n, "n"); };
  const auto s_of = [&] { return b.s ? *b.s : need(g.s, "s"); };
  json inputs, derived;
  derived["a"] = cos_pi_over(b.nu);
  double bound = 0.0;
  if (which == "v2") {
    const auto n = n_of(), s = s_of();
    if (!b.tauN) throw ValidationError("--tauN is required");
    inputs = {{"n", n}, {"s", s}, {"tauN", *b.tauN}, {"nu", b.nu}};
    bound = v2_failure_bound(n, s, *b.tauN, b.nu);
    derived["tauN"] = *b.tauN;
    if (n >= 2) {
      const double ss = static_cast<double>(s * s);
      derived["C"] = *b.tauN / (4.0 * (ss + 1.0) * std::log(static_cast<double>(n)));
    }
    const double C = derived.contains("C") ? derived["C"].get<double>() : 0.0;
    derived["simplified"] = C > 1.0 ? json(v2_simplified_bound(n, s, C, b.nu).failure) : json(nullptr);
  } else if (which == "v2s") {
    const auto n = n_of(), s = s_of();
    inputs = {{"n", n}, {"s", s}, {"C", b.C}, {"nu", b.nu}};
    const auto r = v2_simplified_bound(n, s, b.C, b.nu);
    derived["tauN"] = r.tauN;
    derived["C"] = b.C;
    derived["delta"] = b.C * cos_pi_over(b.nu) * cos_pi_over(b.nu) - 1.0;
    bound = r.failure;
  } else if (which == "v2p") {
    const auto n = n_of(), s = s_of();
    inputs = {{"n", n}, {"s", s}, {"C", b.C}, {"eps", b.eps}, {"nu", b.nu}};
    const auto r = v2prime_bound(n, s, b.C, b.eps, b.nu);
    derived["f"] = r.f;
    derived["C"] = b.C;
    derived["term_iv"] = r.term_iv;
    derived["term_transfer"] = r.term_transfer;
    bound = r.failure;
  } else if (which == "v3") {
    const auto n = n_of(), s = s_of();
    if (!b.tauN) throw ValidationError("--tauN is required");
    V3Options opt;
    opt.form = b.form == "simplified" ? V3Form::simplified : V3Form::exact;
    opt.series_coefficient = series_coefficient(b.xi).coefficient;
    inputs = {{"n", n}, {"s", s}, {"tauN", *b.tauN}, {"nu", b.nu}, {"mu", b.mu}, {"form", b.form}, {"xi", b.xi}};
    double alpha;
    if (b.alpha) {
      alpha = *b.alpha;
      inputs["alpha"] = alpha;
      bound = v3_failure_bound(n, s, *b.tauN, b.nu, b.mu, alpha, opt);
    } else {
      const auto best = minimize_v3_over_alpha(n, s, *b.tauN, b.nu, b.mu, opt);
      alpha = best.alpha;
      bound = best.bound;
      inputs["alpha"] = "minimized";
    }
    derived["alpha"] = alpha;
    derived["alpha_prime"] = grid_alpha_prime(alpha, b.mu);
    derived["tauN"] = *b.tauN;
    derived["series_coefficient"] = opt.series_coefficient;
    if (n >= 2) derived["C"] = v3_c_from_tauN(n, s, *b.tauN);
  } else if (which == "v3stmt") {
    const auto n = n_of(), s = s_of();
    double C = b.C;
    inputs = {{"n", n}, {"s", s}, {"nu", b.nu}, {"mu", b.mu}};
    if (b.tauN) {
      C = v3_c_from_tauN(n, s, *b.tauN);
      inputs["tauN"] = *b.tauN;
    } else {
      inputs["C"] = C;
    }
    const auto r = v3_statement_bound(n, s, C, b.nu, b.mu);
    derived["C"] = C;
    derived["tauN"] = (3.0 * static_cast<double>(s) + 2.0) * C * std::log(static_cast<double>(n));
    derived["alpha_prime"] = r.alpha_prime;
    derived["alpha"] = r.alpha;
    bound = r.bound;
  } else if (which == "delta") {
    inputs = {{"C", b.C}};
    derived["C"] = b.C;
    derived["v2pp_sup"] = b.C > 1.0 ? json(v2pp_delta_sup(b.C)) : json(nullptr);
    bound = asymptotic_delta(b.C);
  } else if (which == "coeff") {
    inputs = {{"xi", b.xi}};
    const auto r = series_coefficient(b.xi);
    derived["self_consistent"] = r.self_consistent;
    derived["minimal_consistent_xi"] = minimal_consistent_xi();
    bound = r.coefficient;
  }
  // delta and coeff are constants rather than probabilities
  const bool probability = which != "delta" && which != "coeff";
  return json{{"bound_kind", which},
              {"inputs", inputs},
              {"derived", derived},
              {"bound", bound},
              {"vacuous", probability ? json(is_vacuous(bound)) : json(nullptr)}};
}

ExperimentConfig experiment_from_flags(ExperimentKind kind, const Globals& g, const SamplerArgs& sa,
                                       const std::string& config_path, std::size_t threads, int nu) {
  if (!config_path.empty()) {
    auto cfg = experiment_config_from_json(parse_json_text(read_file(config_path), config_path));
    if (cfg.kind != kind && !(kind == ExperimentKind::mc_recovery_fixed_x &&
                              cfg.kind == ExperimentKind::mc_recovery_all_supports))
      throw ValidationError(std::string("config kind does not match the subcommand: ") + to_string(cfg.kind));
    return cfg;
  }
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.n = need(g.n, "n");
  cfg.s = need(g.s, "s");
  cfg.sampler = sa.spec(cfg.n);
  cfg.trials = g.trials;
  cfg.seed = g.seed;
  cfg.threads = threads;
  BoundParams bp;
  bp.nu = nu;
  cfg.bound_params = bp;
  cfg.validate();
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"Sparse recovery on Z_n from partial Fourier data"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--n", g.n, "group order");
  app.add_option("--s", g.s, "sparsity");
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--trials", g.trials, "number of trials");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out, "write output to PATH instead of stdout");

  std::string omega_text, support_text;
  double alpha = 0.5;
  int mu = 8;

  auto* check_iv_cmd = app.add_subcommand("check-iv", "test |K(t)| < K(0)/(2s) for all t != 0");
  check_iv_cmd->add_option("--omega", omega_text, "frequency set: 0,1,2 | [0,1,2] | full | @file")->required();

  auto* row_cmd = app.add_subcommand("row-sums", "row-sum majorations of the certificate error");
  row_cmd->add_option("--omega", omega_text, "frequency set")->required();
  row_cmd->add_option("--support", support_text, "support set")->required();

  auto* iii_cmd = app.add_subcommand("check-iii", "exhaustive root-of-unity certificate check");
  iii_cmd->add_option("--omega", omega_text, "frequency set")->required();
  iii_cmd->add_option("--support", support_text, "support set")->required();
  iii_cmd->add_option("--alpha", alpha, "alpha in (0,1)");
  iii_cmd->add_option("--mu", mu, "root-of-unity order, at least 4");

  SamplerArgs sampler;
  auto* sample_cmd = app.add_subcommand("sample-omega", "draw a random frequency set");
  sampler.add_to(sample_cmd);

  std::string problem_path;
  bool with_oracle = false;
  std::size_t oracle_restarts = 1000;
  SolverConfig solver;
  auto* recover_cmd = app.add_subcommand("recover", "l1-minimal extension of partial Fourier data");
  recover_cmd->add_option("--problem", problem_path, "problem JSON {n, omega, samples{re, im}}")->required();
  recover_cmd->add_flag("--oracle", with_oracle, "also run the brute-force oracle (n - |omega| <= 6)");
  recover_cmd->add_option("--oracle-restarts", oracle_restarts, "oracle restarts");
  recover_cmd->add_option("--max-iterations", solver.max_iterations);
  recover_cmd->add_option("--constraint-tol", solver.constraint_tol);
  recover_cmd->add_option("--change-tol", solver.change_tol);
  recover_cmd->add_option("--relaxation", solver.relaxation);

  BoundArgs bargs;
  std::string which;
  auto* bound_cmd = app.add_subcommand("bound", "analytic bounds");
  bound_cmd->add_option("kind", which, "v2 | v2s | v2p | v3 | v3stmt | delta | coeff")
      ->required()
      ->check(CLI::IsMember({"v2", "v2s", "v2p", "v3", "v3stmt", "delta", "coeff"}));
  bound_cmd->add_option("--tauN", bargs.tauN);
  bound_cmd->add_option("--C", bargs.C);
  bound_cmd->add_option("--nu", bargs.nu);
  bound_cmd->add_option("--mu", bargs.mu);
  bound_cmd->add_option("--alpha", bargs.alpha, "fixed alpha for v3 (default: minimized)");
  bound_cmd->add_option("--eps", bargs.eps);
  bound_cmd->add_option("--xi", bargs.xi);
  bound_cmd->add_option("--form", bargs.form)->check(CLI::IsMember({"exact", "simplified"}));

  std::string config_path, report_path;
  std::size_t threads = 1;
  int mc_nu = 10;
  bool all_supports = false;
  SamplerArgs mc_sampler;
  auto* mc_iv_cmd = app.add_subcommand("mc-iv", "Monte Carlo frequency of condition (iv)");
  auto* mc_rec_cmd = app.add_subcommand("mc-recovery", "Monte Carlo exact-recovery frequency");
  for (auto* c : {mc_iv_cmd, mc_rec_cmd}) {
    mc_sampler.add_to(c);
    c->add_option("--config", config_path, "experiment config JSON");
    c->add_option("--report", report_path, "write per-trial records (in --format) to PATH");
    c->add_option("--threads", threads);
    c->add_option("--nu", mc_nu);
  }
  mc_rec_cmd->add_flag("--all-supports", all_supports, "test every s-subset per trial");

  std::string report_input, report_from = "json";
  auto* report_cmd = app.add_subcommand("report", "convert a trial report between json lines and csv");
  report_cmd->add_option("--input", report_input, "report file")->required();
  report_cmd->add_option("--from", report_from, "input format")->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (*check_iv_cmd) {
    const auto n = need(g.n, "n");
    const auto k = build_kernel(parse_set<FrequencyDomain>(omega_text, n));
    auto j = to_json(check_iv(k, need(g.s, "s")));
    j["omega_cardinality"] = k.omega.size();
    j["min_cardinality_bound"] = min_cardinality_bound(n, *g.s);
    write_output(g, render(g, j));
  } else if (*row_cmd) {
    const auto n = need(g.n, "n");
    const auto k = build_kernel(parse_set<FrequencyDomain>(omega_text, n));
    write_output(g, render(g, to_json(row_sum_bounds(k, parse_set<TimeDomain>(support_text, n)))));
  } else if (*iii_cmd) {
    const auto n = need(g.n, "n");
    const auto k = build_kernel(parse_set<FrequencyDomain>(omega_text, n));
    auto j = to_json(check_iii_grid(parse_set<TimeDomain>(support_text, n), k, alpha, mu));
    j["alpha"] = alpha;
    j["mu"] = mu;
    write_output(g, render(g, j));
  } else if (*sample_cmd) {
    const auto n = need(g.n, "n");
    Rng rng(g.seed);
    const auto omega = sample(sampler.spec(n), rng);
    write_output(g, to_json(omega).dump() + "\n");
  } else if (*recover_cmd) {
    const auto prob = recovery_problem_from_json(parse_json_text(read_file(problem_path), problem_path));
    solver.validate();
    const auto r = basis_pursuit(prob, solver);
    auto j = to_json(r);
    if (with_oracle) {
      // any feasible point works as the base: use the zero-filled extension
      std::vector<complex> spec(prob.n);
      for (std::size_t i = 0; i < prob.omega.size(); ++i) spec[prob.omega.members()[i]] = prob.samples[i];
      OracleConfig oc;
      oc.restarts = oracle_restarts;
      const auto o = oracle_min_l1(idft(Spectrum(std::move(spec))), prob.omega, oc);
      j["oracle_objective"] = o.objective;
      j["oracle_gap"] = r.objective - o.objective;
    }
    write_output(g, render(g, j));
  } else if (*bound_cmd) {
    write_output(g, render(g, bound_json(which, bargs, g)));
  } else if (*mc_iv_cmd) {
    const auto cfg = experiment_from_flags(ExperimentKind::mc_iv, g, mc_sampler, config_path, threads, mc_nu);
    const auto summary = run_mc_iv(cfg);
    if (!report_path.empty()) {
      Globals rg = g;
      rg.out = report_path;
      write_output(rg, emit_report(summary.records, report_format(g.format)));
    }
    Globals jg = g;
    jg.format = "json";
    write_output(jg, render(jg, json{{"config", to_json(cfg)}, {"summary", to_json(summary)}}));
  } else if (*mc_rec_cmd) {
    const auto kind = all_supports ? ExperimentKind::mc_recovery_all_supports : ExperimentKind::mc_recovery_fixed_x;
    const auto cfg = experiment_from_flags(kind, g, mc_sampler, config_path, threads, mc_nu);
    const auto summary = run_mc_recovery(cfg);
    if (!report_path.empty()) {
      Globals rg = g;
      rg.out = report_path;
      write_output(rg, emit_report(summary.records, report_format(g.format)));
    }
    Globals jg = g;
    jg.format = "json";
    write_output(jg, render(jg, json{{"config", to_json(cfg)}, {"summary", to_json(summary)}}));
  } else if (*report_cmd) {
    const auto records = parse_report(read_file(report_input), report_format(report_from));
    write_output(g, emit_report(records, report_format(g.format)));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const minext::GuardError& e) {
    std::fprintf(stderr, "guard: %s\n", e.what());
    return kExitGuard;
  } catch (const minext::ValidationError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
