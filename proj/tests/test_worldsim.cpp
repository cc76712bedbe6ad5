#include <cmath>
#include <cstring>

#include "doctest.h"
#include "uavsim/errors.hpp"
#include "uavsim/worldsim.hpp"

using namespace uavsim;
using sim::UavState;
using sim::VelocityCommand;
using sim::WorldConfig;

TEST_CASE("zero command and zero wind is a fixed point (except time)") {
  WorldConfig cfg;
  RandomStream rs(1);
  UavState s;
  s.position = {3.0, 4.0, 10.0};
  const auto next = sim::step(s, {}, cfg, rs);
  CHECK(next.position.east_m == 3.0);
  CHECK(next.position.north_m == 4.0);
  CHECK(next.position.up_m == 10.0);
  CHECK(next.vel_east_ms == 0.0);
  CHECK(next.time_s == doctest::Approx(cfg.timestep_s));
}

TEST_CASE("first-order response: error decays as expected over 5 tau") {
  WorldConfig cfg;
  RandomStream rs(1);
  UavState s;
  s.position.up_m = 10.0;
  VelocityCommand cmd{4.0, 0.0, 0.0};
  const int steps =
      static_cast<int>(5.0 * cfg.velocity_time_constant_s / cfg.timestep_s);
  for (int i = 0; i < steps; ++i) s = sim::step(s, cmd, cfg, rs);
  CHECK(std::abs(s.vel_east_ms - 4.0) < 0.007 * 4.0);
}

TEST_CASE("commanded horizontal speed is clamped, direction preserved") {
  WorldConfig cfg;
  cfg.max_horizontal_speed_ms = 5.0;
  RandomStream rs(1);
  UavState s;
  s.position.up_m = 10.0;
  VelocityCommand cmd{30.0, 40.0, 0.0};  // 50 m/s requested
  for (int i = 0; i < 2000; ++i) s = sim::step(s, cmd, cfg, rs);
  const double speed = std::hypot(s.vel_east_ms, s.vel_north_ms);
  CHECK(speed == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(s.vel_east_ms / s.vel_north_ms == doctest::Approx(30.0 / 40.0));
}

TEST_CASE("ground plane: altitude clamps at zero and vertical velocity zeroes") {
  WorldConfig cfg;
  RandomStream rs(1);
  UavState s;
  s.position.up_m = 0.3;
  VelocityCommand down{0.0, 0.0, -3.0};
  for (int i = 0; i < 500; ++i) {
    s = sim::step(s, down, cfg, rs);
    CHECK(s.position.up_m >= 0.0);
  }
  CHECK(s.position.up_m == 0.0);
  CHECK(s.vel_up_ms >= 0.0);
}

TEST_CASE("determinism: same seed, same command sequence, identical bits") {
  WorldConfig cfg;
  cfg.wind.gust_std_ms = 0.7;
  auto run = [&] {
    RandomStream rs(99);
    UavState s;
    s.position.up_m = 15.0;
    for (int i = 0; i < 3000; ++i) {
      VelocityCommand cmd{std::sin(i * 0.01), std::cos(i * 0.017), 0.1};
      s = sim::step(s, cmd, cfg, rs);
    }
    return s;
  };
  const auto a = run();
  const auto b = run();
  CHECK(std::memcmp(&a, &b, sizeof(UavState)) == 0);
}

TEST_CASE("gusts average out: mean velocity tracks the no-wind run") {
  WorldConfig calm;
  WorldConfig gusty;
  gusty.wind.gust_std_ms = 0.5;
  RandomStream rs_calm(5), rs_gusty(5);
  UavState a, b;
  a.position.up_m = b.position.up_m = 20.0;
  VelocityCommand cmd{2.0, -1.0, 0.0};
  double sum_de = 0.0, sum_dn = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    a = sim::step(a, cmd, calm, rs_calm);
    b = sim::step(b, cmd, gusty, rs_gusty);
    sum_de += b.vel_east_ms - a.vel_east_ms;
    sum_dn += b.vel_north_ms - a.vel_north_ms;
  }
  CHECK(std::abs(sum_de / n) < 0.05);
  CHECK(std::abs(sum_dn / n) < 0.05);
}

TEST_CASE("speed stays bounded by command, mean wind and gust margin") {
  WorldConfig cfg;
  cfg.wind.mean_east_ms = 2.0;
  cfg.wind.gust_std_ms = 0.8;
  RandomStream rs(31);
  UavState s;
  s.position.up_m = 20.0;
  const double bound =
      cfg.max_horizontal_speed_ms + 2.0 + 5.0 * cfg.wind.gust_std_ms;
  VelocityCommand cmd{11.0, 3.0, 0.0};
  for (int i = 0; i < 20000; ++i) {
    s = sim::step(s, cmd, cfg, rs);
    CHECK(std::hypot(s.vel_east_ms, s.vel_north_ms) <= bound);
  }
}

TEST_CASE("with zero command and wind, speed is non-increasing") {
  WorldConfig cfg;
  RandomStream rs(8);
  UavState s;
  s.position.up_m = 30.0;
  s.vel_east_ms = 6.0;
  s.vel_north_ms = -2.0;
  double prev = std::hypot(s.vel_east_ms, s.vel_north_ms);
  for (int i = 0; i < 3000; ++i) {
    s = sim::step(s, {}, cfg, rs);
    const double speed = std::hypot(s.vel_east_ms, s.vel_north_ms);
    CHECK(speed <= prev + 1e-15);
    prev = speed;
  }
}

TEST_CASE("non-finite inputs are rejected") {
  WorldConfig cfg;
  RandomStream rs(1);
  UavState s;
  s.position.up_m = 5.0;
  VelocityCommand bad{std::nan(""), 0.0, 0.0};
  CHECK_THROWS_AS(sim::step(s, bad, cfg, rs), ValidationError);
  s.vel_north_ms = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(sim::step(s, {}, cfg, rs), ValidationError);
}

TEST_CASE("config validation") {
  WorldConfig cfg;
  cfg.timestep_s = 0.2;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = WorldConfig{};
  cfg.velocity_time_constant_s = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("hover_at: proportional command toward the target") {
  nav::PidGains gains{0.5, 0.0, 0.0, 10.0, 100.0};
  sim::HoverPids pids;
  UavState s;
  s.position = {10.0, 0.0, 20.0};  // 10 m east of target
  const auto cmd = sim::hover_at(s, {0.0, 0.0, 20.0}, gains, pids);
  CHECK(cmd.east_ms == doctest::Approx(-5.0));
  CHECK(cmd.north_ms == doctest::Approx(0.0));
  CHECK(cmd.up_ms == doctest::Approx(0.0));
}

TEST_CASE("hover_at closed loop converges from 20 m inside 60 s") {
  WorldConfig cfg;
  nav::PidGains gains{0.5, 0.0, 0.0, 10.0, 11.28};
  sim::HoverPids pids;
  RandomStream rs(3);
  UavState s;
  s.position = {20.0, 0.0, 20.0};
  const geo::EnuPoint target{0.0, 0.0, 20.0};
  for (int i = 0; i < 3000; ++i) {
    const auto cmd = sim::hover_at(s, target, gains, pids);
    s = sim::step(s, cmd, cfg, rs);
  }
  CHECK(std::hypot(s.position.east_m, s.position.north_m) < 0.1);
}
