#include <gtest/gtest.h>

#include <random>

#include "signalsim/signalsim.hpp"

using namespace signalsim;

namespace {

constexpr PerApproach<Color> kAllGreen{Color::Green, Color::Green, Color::Green, Color::Green};
constexpr PerApproach<Color> kAllRed{Color::Red, Color::Red, Color::Red, Color::Red};

Vehicle queued(VehicleKind k, Direction d, int lane, double pos) {
  Vehicle v;
  v.kind = k;
  v.approach = d;
  v.lane = lane;
  v.position = pos;
  return v;
}

// Straightforward re-implementation of the arrival draw used as an oracle:
// mt19937_64 seeded via seed_seq{lo, hi, stream}, 53-bit uniforms, five per tick.
struct ArrivalOracle {
  std::mt19937_64 gen;
  explicit ArrivalOracle(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), 0u};
    gen.seed(seq);
  }
  double u() { return static_cast<double>(gen() >> 11) / 9007199254740992.0; }
  // Returns approach index or -1 for no arrival.
  int next(double p, const std::array<double, 4>& w) {
    const double a = u(), b = u();
    u(), u(), u();
    if (a >= p) return -1;
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      acc += w[static_cast<std::size_t>(i)];
      if (b < acc) return i;
    }
    return 3;
  }
};

// Fills an approach's lanes with random mixtures of queued and crossed vehicles.
World random_world(std::mt19937& gen) {
  World w(Geometry{}, default_class_table(), gen());
  ArrivalModel m;
  m.p_arrival = 0.3;
  std::bernoulli_distribution green(0.5);
  const int steps = std::uniform_int_distribution<int>(50, 800)(gen);
  for (int i = 0; i < steps; ++i) {
    spawn_step(w, m);
    PerApproach<Color> c{};
    for (auto& x : c) x = green(gen) ? Color::Green : Color::Red;
    motion_step(w, c);
  }
  return w;
}

}  // namespace

TEST(SpawnStep, ZeroTurnProbabilityNeverTurns) {
  World w(Geometry{}, default_class_table(), 5);
  ArrivalModel m;
  m.p_arrival = 0.5;
  m.turn_probability = 0.0;
  int spawned = 0;
  for (int t = 0; t < 2000; ++t) {
    for (const auto& v : spawn_step(w, m)) {
      EXPECT_FALSE(v.will_turn);
      ++spawned;
    }
    motion_step(w, kAllGreen);
  }
  EXPECT_GT(spawned, 500);
}

TEST(SpawnStep, TurnersOnlyInRightmostLane) {
  World w(Geometry{}, default_class_table(), 6);
  ArrivalModel m;
  m.p_arrival = 0.5;
  m.turn_probability = 1.0;
  int turners = 0;
  for (int t = 0; t < 2000; ++t) {
    for (const auto& v : spawn_step(w, m)) {
      EXPECT_EQ(v.will_turn, v.lane == w.geometry().turn_lane());
      turners += v.will_turn;
    }
    motion_step(w, kAllGreen);
  }
  EXPECT_GT(turners, 100);
}

TEST(SpawnStep, DegenerateWeightsUseOneApproach) {
  World w(Geometry{}, default_class_table(), 42);
  ArrivalModel m;
  m.arrival_weights = {1.0, 0.0, 0.0, 0.0};
  m.p_arrival = 0.3;
  for (int t = 0; t < 1000; ++t) {
    for (const auto& v : spawn_step(w, m)) EXPECT_EQ(v.approach, Direction::Right);
    motion_step(w, kAllGreen);
  }
  EXPECT_GT(w.counters(Direction::Right).spawned, 0u);
  for (auto d : {Direction::Down, Direction::Left, Direction::Up})
    EXPECT_EQ(w.counters(d).spawned + w.counters(d).suppressed, 0u);
}

TEST(SpawnStep, ApproachFractionsMatchOracle) {
  const std::uint64_t seed = 2024;
  World w(Geometry{}, default_class_table(), seed);
  ArrivalModel m;
  m.p_arrival = 0.5;
  ArrivalOracle oracle(seed);
  std::array<int, 4> expected{};
  for (int t = 0; t < 10000; ++t) {
    spawn_step(w, m);
    const int a = oracle.next(m.p_arrival, m.arrival_weights);
    if (a >= 0) ++expected[static_cast<std::size_t>(a)];
    motion_step(w, kAllGreen);
  }
  int total = 0;
  for (auto d : kAllDirections) {
    const auto& c = w.counters(d);
    EXPECT_EQ(static_cast<int>(c.spawned + c.suppressed), expected[index(d)]);
    total += expected[index(d)];
  }
  for (auto d : kAllDirections)
    EXPECT_NEAR(static_cast<double>(expected[index(d)]) / total, 0.25, 0.03);
}

TEST(SpawnStep, OccupiedEntryIsSuppressed) {
  Geometry g;
  g.through_lanes = 1;
  World w(g, default_class_table(), 1);
  w.insert(queued(VehicleKind::Bus, Direction::Right, 0, 3.0));
  w.insert(queued(VehicleKind::Bus, Direction::Right, 1, 3.0));
  ArrivalModel m;
  m.arrival_weights = {1, 0, 0, 0};
  m.p_arrival = 1.0;
  EXPECT_TRUE(spawn_step(w, m).empty());
  EXPECT_EQ(w.counters(Direction::Right).suppressed, 1u);
  EXPECT_EQ(w.counters(Direction::Right).spawned, 2u);
}

TEST(MotionStep, UnobstructedGreenAdvancesSpeedTimesDt) {
  auto classes = default_class_table();
  classes[index(VehicleKind::Car)].cruise_speed = 10.0;
  World w(Geometry{}, classes, 1);
  w.insert(queued(VehicleKind::Car, Direction::Down, 0, 5.0));
  motion_step(w, kAllGreen);
  EXPECT_NEAR(w.lane(Direction::Down, 0).front().position, 6.0, 1e-12);
  EXPECT_EQ(w.tick(), 1);
}

TEST(MotionStep, RedHoldsVehicleAtStopLine) {
  World w(Geometry{}, default_class_table(), 1);
  const double stop = w.geometry().stop_line();
  w.insert(queued(VehicleKind::Car, Direction::Up, 1, stop));
  for (int i = 0; i < 50; ++i) motion_step(w, kAllRed);
  EXPECT_EQ(w.lane(Direction::Up, 1).front().position, stop);
  EXPECT_EQ(w.counters(Direction::Up).crossed, 0u);
}

TEST(MotionStep, YellowStopsVehiclesBeforeLineButNotPastIt) {
  World w(Geometry{}, default_class_table(), 1);
  const double stop = w.geometry().stop_line();
  w.insert(queued(VehicleKind::Car, Direction::Left, 0, stop - 0.5));
  Vehicle past = queued(VehicleKind::Car, Direction::Left, 1, stop + 2.0);
  past.state = VehicleState::Crossed;
  w.insert(past);
  PerApproach<Color> c = kAllRed;
  c[index(Direction::Left)] = Color::Yellow;
  motion_step(w, c);
  EXPECT_EQ(w.lane(Direction::Left, 0).front().position, stop);
  EXPECT_NEAR(w.lane(Direction::Left, 1).front().position, stop + 3.2, 1e-12);
}

TEST(MotionStep, CrossingCountsOnceAndExitRemoves) {
  World w(Geometry{}, default_class_table(), 1);
  const double stop = w.geometry().stop_line();
  w.insert(queued(VehicleKind::Car, Direction::Right, 0, stop - 0.5));
  int crossings = 0;
  for (int i = 0; i < 40; ++i) crossings += static_cast<int>(motion_step(w, kAllGreen).crossings.size());
  EXPECT_EQ(crossings, 1);
  EXPECT_EQ(w.counters(Direction::Right).crossed, 1u);
  EXPECT_EQ(w.counters(Direction::Right).exited, 1u);
  EXPECT_EQ(w.live_count(Direction::Right), 0u);
}

TEST(MotionStep, FasterFollowerMatchesClosedForm) {
  // Leader (bus, 9 m/s) unobstructed; follower (car, 12 m/s) starts 40 m back.
  // Follower position after n steps is min(free flow, leader - length - gap).
  Geometry g;
  g.approach_length = 1000.0;
  World w(g, default_class_table(), 1);
  const double l0 = 100.0, f0 = 60.0;
  w.insert(queued(VehicleKind::Bus, Direction::Up, 0, l0));
  w.insert(queued(VehicleKind::Car, Direction::Up, 0, f0));
  for (int n = 1; n <= 300; ++n) {
    motion_step(w, kAllGreen);
    const auto& lane = w.lane(Direction::Up, 0);
    const double leader = l0 + 9.0 * 0.1 * n;
    const double follower = std::min(f0 + 12.0 * 0.1 * n, leader - 10.0 - 1.0);
    ASSERT_NEAR(lane[0].position, leader, 1e-9);
    ASSERT_NEAR(lane[1].position, follower, 1e-9) << "step " << n;
  }
}

TEST(MotionStep, RandomRolloutsKeepInvariants) {
  std::mt19937 gen(99);
  for (int trial = 0; trial < 20; ++trial) {
    World w(Geometry{}, default_class_table(), gen());
    ArrivalModel m;
    m.p_arrival = std::uniform_real_distribution<double>(0.05, 1.0)(gen);
    std::bernoulli_distribution flip(0.02);
    PerApproach<Color> colors = kAllRed;
    WorldInvariantMonitor monitor;
    for (int t = 0; t < 1500; ++t) {
      spawn_step(w, m);
      for (auto& c : colors) {
        if (flip(gen)) c = c == Color::Red ? Color::Green : Color::Red;
      }
      const auto report = motion_step(w, colors);
      for (const auto& x : report.crossings) ASSERT_EQ(x.signal, Color::Green);
      ASSERT_NO_THROW(monitor.check(w)) << "trial " << trial << " tick " << t;
    }
  }
}

TEST(WorldInvariantMonitor, DetectsOverlap) {
  World w(Geometry{}, default_class_table(), 1);
  w.insert(queued(VehicleKind::Car, Direction::Right, 0, 30.0));
  w.insert(queued(VehicleKind::Car, Direction::Right, 0, 20.0));
  w.lane(Direction::Right, 0).back().position = 27.0;
  WorldInvariantMonitor m;
  EXPECT_THROW(m.check(w), InvariantViolation);
}

TEST(World, InsertRejectsOverlapAndMisplacedTurner) {
  World w(Geometry{}, default_class_table(), 1);
  w.insert(queued(VehicleKind::Car, Direction::Right, 0, 30.0));
  EXPECT_THROW(w.insert(queued(VehicleKind::Car, Direction::Right, 0, 27.0)), ContractViolation);
  auto turner = queued(VehicleKind::Car, Direction::Right, 0, 10.0);
  turner.will_turn = true;
  EXPECT_THROW(w.insert(turner), ContractViolation);
}

TEST(WaitingCounts, EmptyWorldIsZero) {
  World w(Geometry{}, default_class_table(), 1);
  for (auto d : kAllDirections) EXPECT_EQ(waiting_counts(w, d), (PerClass<std::uint32_t>{}));
}

TEST(WaitingCounts, ExcludesCrossedVehicles) {
  World w(Geometry{}, default_class_table(), 1);
  const double stop = w.geometry().stop_line();
  w.insert(queued(VehicleKind::Car, Direction::Up, 0, stop));
  w.insert(queued(VehicleKind::Car, Direction::Up, 0, stop - 5.0));
  w.insert(queued(VehicleKind::Car, Direction::Up, 1, stop));
  w.insert(queued(VehicleKind::Bus, Direction::Up, 2, stop));
  for (int lane : {0, 1}) {
    auto v = queued(VehicleKind::Car, Direction::Up, lane, stop + 10.0);
    v.state = VehicleState::Crossed;
    w.insert(v);
  }
  EXPECT_EQ(waiting_counts(w, Direction::Up), (PerClass<std::uint32_t>{3, 0, 1, 0, 0}));
}

TEST(WaitingCounts, MatchesBruteForceScan) {
  std::mt19937 gen(1234);
  for (int trial = 0; trial < 30; ++trial) {
    const World w = random_world(gen);
    for (auto d : kAllDirections) {
      PerClass<std::uint32_t> brute{};
      w.for_each_vehicle([&](const Vehicle& v) {
        if (v.approach == d && v.state != VehicleState::Crossed &&
            v.position <= w.geometry().stop_line())
          ++brute[index(v.kind)];
      });
      EXPECT_EQ(waiting_counts(w, d), brute);
    }
  }
}
