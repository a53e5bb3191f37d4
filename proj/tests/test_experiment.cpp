#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "minext/experiment.hpp"
#include "minext/json_io.hpp"

using namespace minext;

namespace {

ExperimentConfig iv_config(std::size_t n, std::size_t s, SamplerSpec sampler, std::size_t trials, std::uint64_t seed) {
  ExperimentConfig c;
  c.kind = ExperimentKind::mc_iv;
  c.n = n;
  c.s = s;
  c.sampler = sampler;
  c.trials = trials;
  c.seed = seed;
  return c;
}

std::vector<TrialRecord> without_time(std::vector<TrialRecord> r) {
  for (auto& e : r) e.wall_time = 0.0;
  return r;
}

}  // namespace

TEST(Wilson, KnownValues) {
  const auto w = wilson_interval(0, 100);
  EXPECT_EQ(w.low, 0.0);
  EXPECT_NEAR(w.high, 0.03699, 1e-4);
  const auto h = wilson_interval(50, 100);
  EXPECT_NEAR(h.low, 0.4038, 1e-3);
  EXPECT_NEAR(h.high, 0.5962, 1e-3);
}

TEST(McIv, FixedFullNeverFails) {
  const auto r = run_mc_iv(iv_config(25, 3, SamplerSpec::fixed(25, 25), 50, 1));
  EXPECT_EQ(r.failures, 0u);
  EXPECT_EQ(r.failure_rate, 0.0);
  EXPECT_FALSE(r.bound_canonical.has_value());
}

TEST(McIv, WithinBoundAtModestSize) {
  const auto cfg = iv_config(101, 1, SamplerSpec::bernoulli(101, 0.5), 300, 5);
  const auto r = run_mc_iv(cfg);
  ASSERT_TRUE(r.bound_canonical.has_value());
  EXPECT_NEAR(*r.bound_canonical, v2_failure_bound(101, 1, 50.5, 10), 1e-15);
  EXPECT_TRUE(r.within_bound.value_or(true) || is_vacuous(*r.bound_canonical));
  EXPECT_LE(r.wilson.low, r.failure_rate);
  EXPECT_GE(r.wilson.high, r.failure_rate);
}

TEST(McIv, DeterministicAndThreadIndependent) {
  auto cfg = iv_config(77, 2, SamplerSpec::bernoulli(77, 0.4), 64, 99);
  const auto a = run_mc_iv(cfg);
  const auto b = run_mc_iv(cfg);
  cfg.threads = 4;
  const auto c = run_mc_iv(cfg);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(to_json(a).dump(), to_json(c).dump());
  EXPECT_EQ(without_time(a.records), without_time(c.records));
}

TEST(McIv, TrialSubsetsReproduce) {
  const auto cfg = iv_config(50, 1, SamplerSpec::bernoulli(50, 0.3), 20, 7);
  const auto full = run_mc_iv(cfg);
  for (std::size_t i : {0u, 7u, 19u}) {
    Rng rng = Rng::stream(cfg.seed, i);
    const auto omega = sample(cfg.sampler, rng);
    EXPECT_EQ(omega.size(), full.records[i].omega_cardinality);
  }
}

TEST(McIv, RejectsWrongKindAndBadConfig) {
  auto cfg = iv_config(10, 1, SamplerSpec::fixed(10, 5), 5, 1);
  cfg.kind = ExperimentKind::bound_sweep;
  EXPECT_THROW(run_mc_iv(cfg), ValidationError);
  cfg = iv_config(10, 1, SamplerSpec::fixed(12, 5), 5, 1);
  EXPECT_THROW(run_mc_iv(cfg), ValidationError);
  cfg = iv_config(10, 1, SamplerSpec::fixed(10, 5), 0, 1);
  EXPECT_THROW(run_mc_iv(cfg), ValidationError);
}

TEST(McRecovery, OneSparseHalfSampling) {
  auto cfg = iv_config(31, 1, SamplerSpec::fixed(31, 15), 200, 11);
  cfg.kind = ExperimentKind::mc_recovery_fixed_x;
  cfg.threads = 4;
  const auto r = run_mc_recovery(cfg);
  EXPECT_GE(r.success_rate, 0.99);
  EXPECT_EQ(r.supports_tested, 200u);
  EXPECT_EQ(r.iv_true_recovery_failures, 0u);
  EXPECT_EQ(r.certificate_true_recovery_failures, 0u);
}

TEST(McRecovery, FullOmegaAlwaysSucceeds) {
  auto cfg = iv_config(12, 3, SamplerSpec::fixed(12, 12), 10, 2);
  cfg.kind = ExperimentKind::mc_recovery_all_supports;
  const auto r = run_mc_recovery(cfg);
  EXPECT_EQ(r.success_rate, 1.0);
  EXPECT_EQ(r.supports_tested, 10u * 220u);
}

TEST(McRecovery, ConditionalOnIvIsPerfect) {
  auto cfg = iv_config(31, 2, SamplerSpec::bernoulli(31, 0.75), 100, 3);
  cfg.kind = ExperimentKind::mc_recovery_fixed_x;
  cfg.threads = 4;
  const auto r = run_mc_recovery(cfg);
  EXPECT_GT(r.iv_pass_trials, 0u);
  EXPECT_EQ(r.iv_pass_successes, r.iv_pass_trials);
  EXPECT_EQ(r.iv_true_recovery_failures, 0u);
  EXPECT_EQ(r.certificate_true_recovery_failures, 0u);
}

TEST(McRecovery, AllSupportsGuard) {
  auto cfg = iv_config(60, 4, SamplerSpec::fixed(60, 30), 1, 1);
  cfg.kind = ExperimentKind::mc_recovery_all_supports;
  EXPECT_THROW(run_mc_recovery(cfg), GuardError);
}

TEST(BoundSweep, Rows) {
  auto cfg = iv_config(1001, 3, SamplerSpec::bernoulli(1001, 300.0 / 1001), 1, 0);
  cfg.kind = ExperimentKind::bound_sweep;
  const auto rows = run_bound_sweep(cfg);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(*rows[1].v2_canonical, v2_failure_bound(1001, 2, 300, 10), 1e-12);
  EXPECT_LT(rows[0].v3_exact, rows[2].v3_exact);
}

TEST(Report, EmptyCsvIsHeaderOnly) {
  EXPECT_EQ(emit_report({}, ReportFormat::csv),
            "trial_index,omega_cardinality,outcome,margin,iv_pass,certificate_pass,wall_time\n");
  EXPECT_EQ(emit_report({}, ReportFormat::json_lines), "");
}

TEST(Report, OneRecord) {
  TrialRecord r{3, 17, true, 0.125, true, std::nullopt, 0.25};
  const auto csv = emit_report({r}, ReportFormat::csv);
  EXPECT_NE(csv.find("\n3,17,success,0.125,true,,0.25\n"), std::string::npos) << csv;
  const auto js = emit_report({r}, ReportFormat::json_lines);
  EXPECT_EQ(js.find("{\"trial_index\":3,\"omega_cardinality\":17,\"outcome\":\"success\",\"margin\":0.125,"), 0u);
  EXPECT_NE(js.find("\"certificate_pass\":null"), std::string::npos);
}

TEST(Report, RoundTrip) {
  const auto cfg = iv_config(61, 2, SamplerSpec::bernoulli(61, 0.5), 30, 4);
  auto records = run_mc_iv(cfg).records;
  records.push_back(TrialRecord{30, 0, false, std::nullopt, false, false, 0.1 + 0.2});
  records.push_back(TrialRecord{31, 5, true, -1.0 / 3.0, std::nullopt, true, 1e-300});
  for (auto f : {ReportFormat::csv, ReportFormat::json_lines}) EXPECT_EQ(parse_report(emit_report(records, f), f), records);
}

TEST(Report, RejectsMalformed) {
  EXPECT_THROW(parse_report("a,b\n1,2\n", ReportFormat::csv), ValidationError);
  EXPECT_THROW(parse_report("{\"trial_index\":1}\n", ReportFormat::json_lines), ValidationError);
}
