#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "signalsim/signalsim.hpp"

using namespace signalsim;

namespace {

ScenarioConfig scenario(std::string name, PerApproach<double> w, double p, std::uint64_t seed) {
  ScenarioConfig s;
  s.name = std::move(name);
  s.arrival_weights = w;
  s.p_arrival = p;
  s.seed = seed;
  return s;
}

// (tick, approach, class, lane, turn) for every arrival attempt in a trace.
std::vector<std::string> arrival_attempts(const std::string& trace) {
  std::vector<std::string> out;
  std::istringstream in(trace);
  for (std::string line; std::getline(in, line);) {
    const auto j = nlohmann::json::parse(line);
    const auto ev = j.at("event").get<std::string>();
    if (ev != "spawn" && ev != "suppressed") continue;
    out.push_back(std::to_string(j.at("tick").get<std::int64_t>()) + "/" +
                  j.at("approach").get<std::string>() + "/" + j.at("class").get<std::string>() +
                  "/" + std::to_string(j.at("lane").get<int>()) + "/" +
                  (j.at("turn").get<bool>() ? "t" : "s"));
  }
  return out;
}

}  // namespace

TEST(Improvement, Examples) {
  EXPECT_DOUBLE_EQ(improvement_percent(100, 134), 34.0);
  EXPECT_DOUBLE_EQ(improvement_percent(100, 100), 0.0);
  EXPECT_DOUBLE_EQ(improvement_percent(200, 212), 6.0);
  EXPECT_DOUBLE_EQ(improvement_percent(200, 150), -25.0);
  EXPECT_THROW(improvement_percent(0, 10), UndefinedBaseline);
}

TEST(Regimes, Classification) {
  EXPECT_EQ(classify_regime({0.25, 0.25, 0.25, 0.25}), Regime::Uniform);
  EXPECT_EQ(classify_regime({0.26, 0.24, 0.25, 0.25}), Regime::NearEqual);
  EXPECT_EQ(classify_regime({0.7, 0.1, 0.1, 0.1}), Regime::Skewed);
  EXPECT_EQ(classify_regime({0.4, 0.3, 0.2, 0.1}), Regime::Other);
}

TEST(RunSimulation, NoArrivalsNoCrossings) {
  auto s = scenario("empty", {0.25, 0.25, 0.25, 0.25}, 0.0, 1);
  for (auto kind : {ControllerKind::Static, ControllerKind::Adaptive}) {
    const auto r = run_simulation(s, kind);
    EXPECT_EQ(r.total_crossed, 0u);
    EXPECT_EQ(r.spawned, 0u);
    EXPECT_EQ(r.queue_residue, 0u);
    EXPECT_EQ(r.mean_wait, 0.0);
  }
}

TEST(RunSimulation, SameSeedSameResult) {
  auto s = scenario("repeat", {0.4, 0.3, 0.2, 0.1}, 0.2, 99);
  for (auto kind : {ControllerKind::Static, ControllerKind::Adaptive}) {
    std::ostringstream ta, tb;
    RunOptions a, b;
    a.trace = &ta;
    b.trace = &tb;
    EXPECT_EQ(run_simulation(s, kind, a), run_simulation(s, kind, b));
    EXPECT_EQ(ta.str(), tb.str());
  }
}

TEST(RunSimulation, TotalsAreConsistent) {
  auto s = scenario("totals", {0.4, 0.3, 0.2, 0.1}, 0.2, 5);
  const auto r = run_simulation(s, ControllerKind::Adaptive);
  std::uint64_t sum = 0;
  for (auto c : r.crossed) sum += c;
  EXPECT_EQ(sum, r.total_crossed);
  EXPECT_LE(r.total_crossed + r.queue_residue, r.spawned);
  EXPECT_GT(r.mean_wait, 0.0);
}

TEST(RunSimulation, InvalidScenarioRejected) {
  auto s = scenario("bad", {0.5, 0.5, 0.5, 0.5}, 0.1, 1);
  EXPECT_THROW(run_simulation(s, ControllerKind::Static), ConfigError);
}

TEST(RunSimulation, SkewedAdaptiveBeatsStatic) {
  auto s = scenario("skew", {0.7, 0.1, 0.1, 0.1}, 0.1, 1);
  EXPECT_GT(run_simulation(s, ControllerKind::Adaptive).total_crossed,
            run_simulation(s, ControllerKind::Static).total_crossed);
}

TEST(RunSimulation, PairedSeedsShareArrivalStream) {
  std::mt19937 gen(4);
  for (int i = 0; i < 5; ++i) {
    auto s = scenario("pair", {0.4, 0.3, 0.2, 0.1}, 0.05 + 0.1 * i, gen());
    std::ostringstream ts, ta;
    RunOptions os, oa;
    os.trace = &ts;
    oa.trace = &ta;
    run_simulation(s, ControllerKind::Static, os);
    run_simulation(s, ControllerKind::Adaptive, oa);
    EXPECT_EQ(arrival_attempts(ts.str()), arrival_attempts(ta.str()));
  }
}

TEST(RunSimulation, SingleLoadedApproachAdaptiveNeverWorse) {
  // One busy approach, others empty: the adaptive plan gives idle approaches
  // min_green instead of static_green.
  for (double p : {0.1, 0.2, 0.5, 1.0}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto s = scenario("solo", {1.0, 0.0, 0.0, 0.0}, p, seed);
      EXPECT_GE(run_simulation(s, ControllerKind::Adaptive).total_crossed,
                run_simulation(s, ControllerKind::Static).total_crossed)
          << "p=" << p << " seed=" << seed;
    }
  }
}

TEST(Comparison, SingleScenarioSingleReplication) {
  auto s = scenario("one", {0.6, 0.2, 0.1, 0.1}, 0.1, 42);
  const auto report = run_comparison({&s, 1}, 1);
  ASSERT_EQ(report.rows.size(), 1u);
  ASSERT_EQ(report.runs.size(), 2u);
  const auto st = run_simulation(s, ControllerKind::Static);
  const auto ad = run_simulation(s, ControllerKind::Adaptive);
  EXPECT_EQ(report.runs[0], st);
  EXPECT_EQ(report.runs[1], ad);
  const auto& row = report.rows[0];
  EXPECT_EQ(row.static_mean, static_cast<double>(st.total_crossed));
  EXPECT_EQ(row.adaptive_mean, static_cast<double>(ad.total_crossed));
  EXPECT_DOUBLE_EQ(row.improvement_percent,
                   100.0 * (static_cast<double>(ad.total_crossed) - st.total_crossed) /
                       st.total_crossed);
  EXPECT_EQ(report.summary.mean, row.improvement_percent);
}

TEST(Comparison, ReplicationsUseSuccessiveSeeds) {
  auto s = scenario("reps", {0.25, 0.25, 0.25, 0.25}, 0.13, 500);
  const auto report = run_comparison({&s, 1}, 3);
  ASSERT_EQ(report.runs.size(), 6u);
  double st = 0, ad = 0;
  for (int r = 0; r < 3; ++r) {
    auto sr = s;
    sr.seed = 500 + r;
    EXPECT_EQ(report.runs[2 * r].seed, sr.seed);
    EXPECT_EQ(report.runs[2 * r].replication, r);
    st += run_simulation(sr, ControllerKind::Static).total_crossed;
    ad += run_simulation(sr, ControllerKind::Adaptive).total_crossed;
  }
  EXPECT_DOUBLE_EQ(report.rows[0].static_mean, st / 3);
  EXPECT_DOUBLE_EQ(report.rows[0].adaptive_mean, ad / 3);
}

TEST(Comparison, InputOrderDoesNotMatter) {
  std::vector<ScenarioConfig> v{
      scenario("c", {0.7, 0.1, 0.1, 0.1}, 0.1, 3),
      scenario("a", {0.25, 0.25, 0.25, 0.25}, 0.13, 1),
      scenario("b", {0.26, 0.24, 0.25, 0.25}, 0.5, 2),
  };
  const auto r1 = run_comparison(v, 2);
  std::reverse(v.begin(), v.end());
  const auto r2 = run_comparison(v, 2);
  EXPECT_EQ(r1.runs, r2.runs);
  ASSERT_EQ(r1.rows.size(), 3u);
  EXPECT_EQ(r1.rows[0].scenario, "a");
  EXPECT_EQ(r1.rows[2].scenario, "c");
  std::ostringstream c1, c2;
  write_summary_csv(c1, r1);
  write_summary_csv(c2, r2);
  EXPECT_EQ(c1.str(), c2.str());
}

TEST(Comparison, SummaryMatchesRows) {
  std::vector<ScenarioConfig> v{
      scenario("a", {0.7, 0.1, 0.1, 0.1}, 0.1, 3),
      scenario("b", {0.1, 0.7, 0.1, 0.1}, 0.1, 4),
      scenario("c", {0.25, 0.25, 0.25, 0.25}, 0.13, 1),
  };
  const auto r = run_comparison(v, 2);
  double sum = 0, lo = 1e300, hi = -1e300;
  for (const auto& row : r.rows) {
    sum += row.improvement_percent;
    lo = std::min(lo, row.improvement_percent);
    hi = std::max(hi, row.improvement_percent);
  }
  EXPECT_DOUBLE_EQ(r.summary.mean, sum / 3);
  EXPECT_EQ(r.summary.min, lo);
  EXPECT_EQ(r.summary.max, hi);
  ASSERT_EQ(r.regime_means.size(), 2u);
  EXPECT_DOUBLE_EQ(r.regime_means.at(Regime::Skewed),
                   (r.rows[0].improvement_percent + r.rows[1].improvement_percent) / 2);
  EXPECT_EQ(r.regime_means.at(Regime::Uniform), r.rows[2].improvement_percent);
}

TEST(Comparison, DuplicateNamesRejected) {
  std::vector<ScenarioConfig> v{scenario("x", {0.25, 0.25, 0.25, 0.25}, 0.1, 1),
                                scenario("x", {0.25, 0.25, 0.25, 0.25}, 0.1, 2)};
  EXPECT_THROW(run_comparison(v, 1), ConfigError);
}

TEST(Comparison, ZeroStaticBaselineIsUndefined) {
  auto s = scenario("idle", {0.25, 0.25, 0.25, 0.25}, 0.0, 1);
  EXPECT_THROW(run_comparison({&s, 1}, 1), UndefinedBaseline);
}

TEST(Comparison, RunFailureNamesScenario) {
  std::vector<ScenarioConfig> v{scenario("alpha", {0.25, 0.25, 0.25, 0.25}, 0.1, 1),
                                scenario("beta", {0.25, 0.25, 0.25, 0.25}, 0.1, 2)};
  RunOptions opt;
  opt.on_tick = [](const World& w, const PhasePlan&) {
    if (w.tick() == 50) throw DetectorError(w.tick(), "camera offline");
  };
  try {
    run_comparison(v, 1, opt);
    FAIL();
  } catch (const DetectorError& e) {
    EXPECT_EQ(e.tick(), 50);
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("camera offline"), std::string::npos);
  }
}

TEST(Csv, RunsHeaderAndRow) {
  RunResult r;
  r.scenario = "s";
  r.replication = 2;
  r.controller = ControllerKind::Adaptive;
  r.crossed = {1, 2, 3, 4};
  r.total_crossed = 10;
  r.mean_wait = 12.3456;
  r.spawned = 15;
  r.suppressed = 1;
  r.queue_residue = 3;
  std::ostringstream out;
  write_runs_csv(out, {&r, 1});
  EXPECT_EQ(out.str(),
            "scenario,replication,controller,right,down,left,up,total,mean_wait,spawned,"
            "suppressed,queue_residue\n"
            "s,2,adaptive,1,2,3,4,10,12.346,15,1,3\n");
}

TEST(Suite, Shape) {
  const auto suite = builtin_suite();
  ASSERT_EQ(suite.size(), 15u);
  std::map<Regime, int> counts;
  std::set<std::string> names;
  for (const auto& s : suite) {
    EXPECT_EQ(s.duration, 300.0);
    EXPECT_TRUE(validate(s).empty()) << s.name;
    double sum = 0;
    for (double w : s.arrival_weights) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-9) << s.name;
    ++counts[classify_regime(s.arrival_weights)];
    names.insert(s.name);
  }
  EXPECT_EQ(names.size(), 15u);
  EXPECT_EQ(counts[Regime::NearEqual], 4);
  EXPECT_EQ(counts[Regime::Uniform], 6);
  EXPECT_EQ(counts[Regime::Skewed], 5);
}

TEST(Suite, InvariantsHoldEverywhere) {
  RunOptions opt;
  opt.check_invariants = true;
  for (const auto& s : builtin_suite()) {
    for (auto kind : {ControllerKind::Static, ControllerKind::Adaptive}) {
      EXPECT_NO_THROW(run_simulation(s, kind, opt)) << s.name;
    }
  }
}
