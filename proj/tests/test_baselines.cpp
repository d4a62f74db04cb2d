#include <doctest.h>

#include <random>

#include "dat/baselines.hpp"
#include "dat/simulator.hpp"
#include "dat/scheduler.hpp"

using namespace dat;

namespace {

Event ev(std::string id, double s, std::uint64_t cj, std::uint64_t cr, std::uint64_t cb,
         double arrival = 0.0) {
  Event e;
  e.id = std::move(id);
  e.arrival_s = arrival;
  e.priority = s;
  e.c_json = cj;
  e.c_roi = cr;
  e.c_box = cb;
  return e;
}

std::vector<Event> three_events() {
  return {ev("e1", 0.9, 10000, 50000, 80000, 0.0), ev("e2", 0.5, 20000, 40000, 60000, 1.0),
          ev("e3", 0.2, 5000, 100000, 90000, 2.0)};
}

std::vector<std::string> json_order(const Schedule& s) {
  std::vector<std::string> ids;
  for (const TransmissionUnit& u : s.order) {
    if (u.kind == UnitKind::Json) ids.push_back(u.event_id);
  }
  return ids;
}

IntervalContext random_context(std::mt19937_64& rng) {
  std::vector<Event> events;
  const std::size_t n = rng() % 12;
  for (std::size_t i = 0; i < n; ++i) {
    events.push_back(ev("r" + std::to_string(i), static_cast<double>(rng() % 10001) / 10000.0,
                        1 + rng() % 30000, 1 + rng() % 120000, 1 + rng() % 200000,
                        static_cast<double>(rng() % 50) / 10.0));
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.arrival_s != b.arrival_s) return a.arrival_s < b.arrival_s;
    return a.id < b.id;
  });
  std::vector<VisualPendingEntry> carried;
  const std::size_t m = rng() % 3;
  for (std::size_t i = 0; i < m; ++i) {
    carried.push_back({"vp" + std::to_string(i), 1 + rng() % 120000, 1 + rng() % 200000,
                       static_cast<double>(rng() % 20) / 10.0,
                       static_cast<double>(rng() % 10001) / 10000.0});
  }
  return make_interval_context(1000 + rng() % 1500000, 0.2 + static_cast<double>(rng() % 15) / 10.0,
                               0.2 + static_cast<double>(rng() % 20) / 10.0, std::move(events),
                               std::move(carried));
}

}  // namespace

TEST_CASE("json-only follows the cost-normalized order by default") {
  IntervalContext ctx = make_interval_context(100000, 1.0, 1.5, three_events());
  const Schedule s = policy_schedule(PolicyId::JsonOnly, ctx);
  CHECK(json_order(s) == std::vector<std::string>{"e1", "e3", "e2"});
  CHECK(s.t_end == doctest::Approx(0.35).epsilon(1e-12));
  for (const TransmissionUnit& u : s.order) CHECK(u.kind == UnitKind::Json);

  BaselineOptions raw_priority;
  raw_priority.json_only_priority_order = true;
  const Schedule by_s = policy_schedule(PolicyId::JsonOnly, ctx, raw_priority);
  CHECK(json_order(by_s) == std::vector<std::string>{"e1", "e2", "e3"});
  CHECK(by_s.t_end == doctest::Approx(0.35).epsilon(1e-12));
}

TEST_CASE("fixed-box sends only box units in arrival order") {
  IntervalContext ctx =
      make_interval_context(100000, 1.0, 1.5, {ev("solo", 0.9, 10000, 50000, 80000)});
  const Schedule s = policy_schedule(PolicyId::FixedBox, ctx);
  REQUIRE(s.order.size() == 1);
  CHECK(s.order[0].kind == UnitKind::Box);
  CHECK(completion_times(s, 100000)[0] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("priority-only skips what no longer fits and keeps going") {
  IntervalContext ctx = make_interval_context(100000, 0.2, 1.5, three_events());
  REQUIRE(ctx.budget == 20000);
  const Schedule s = policy_schedule(PolicyId::PriorityOnly, ctx);
  CHECK(json_order(s) == std::vector<std::string>{"e1", "e3"});
}

TEST_CASE("fixed json+box pairs atomically") {
  // e1 pair = 90000 fits; e2 pair = 80000 does not fit the remainder; e3 pair = 95000 no
  IntervalContext ctx = make_interval_context(100000, 1.0, 1.5, three_events());
  const Schedule s = policy_schedule(PolicyId::FixedJsonBox, ctx);
  REQUIRE(s.order.size() == 2);
  CHECK(s.order[0].event_id == "e1");
  CHECK(s.order[0].kind == UnitKind::Json);
  CHECK(s.order[1].event_id == "e1");
  CHECK(s.order[1].kind == UnitKind::Box);
  CHECK(s.used_bytes == 90000);
}

TEST_CASE("bandwidth-only serves alerts then visuals in arrival order") {
  IntervalContext ctx = make_interval_context(200000, 1.0, 10.0, three_events());
  const Schedule s = policy_schedule(PolicyId::BandwidthOnly, ctx);
  CHECK(json_order(s) == std::vector<std::string>{"e1", "e2", "e3"});
  // residual 165000: e1 roi (50000), e2 roi (40000), e3 box (90000) = 180000 > budget;
  // arrival order selects e1 then e2, skips e3
  REQUIRE(s.order.size() == 5);
  CHECK(s.order[3].event_id == "e1");
  CHECK(s.order[3].kind == UnitKind::Roi);
  CHECK(s.order[4].event_id == "e2");
  CHECK(s.order[4].kind == UnitKind::Roi);
}

TEST_CASE("every policy stays within budget on random instances") {
  std::mt19937_64 rng(909);
  for (int trial = 0; trial < 400; ++trial) {
    const IntervalContext ctx = random_context(rng);
    for (PolicyId policy : all_policies()) {
      const Schedule s = policy_schedule(policy, ctx);
      std::uint64_t total = 0;
      for (const TransmissionUnit& u : s.order) total += u.size;
      CHECK(total <= ctx.budget);
      CHECK(total == s.used_bytes);
    }
  }
}

TEST_CASE("no policy idles while one of its units still fits") {
  std::mt19937_64 rng(910);
  for (int trial = 0; trial < 400; ++trial) {
    const IntervalContext ctx = random_context(rng);
    for (PolicyId policy : all_policies()) {
      const Schedule s = policy_schedule(policy, ctx);
      if (!s.order.empty()) continue;
      for (const Event& e : ctx.pending) {
        CHECK(policy_required_bytes(policy, e) > ctx.budget);
      }
    }
  }
}

TEST_CASE("box-carried alerts are never faster than json alerts") {
  // With every box at least as large as its alert, the weighted alert latency
  // of fixed-box can only be worse than json-only's.
  for (std::uint64_t seed : {21ull, 22ull, 23ull}) {
    std::vector<Event> events = gen_events(ArrivalPattern::Burst, 40.0, seed);
    for (Event& e : events) e.c_box = std::max(e.c_box, e.c_json);
    BandwidthTrace trace;
    for (int i = 0; i < 10; ++i) trace.samples.push_back({static_cast<double>(i), 2000000});
    SimulationConfig config;
    config.bandwidth_scale = 0.25;
    config.policy = PolicyId::FixedBox;
    const MetricsReport boxed = run(trace, events, config).report;
    config.policy = PolicyId::JsonOnly;
    const MetricsReport alerts = run(trace, events, config).report;
    REQUIRE(boxed.w_alarm_s.has_value());
    REQUIRE(alerts.w_alarm_s.has_value());
    CHECK(*boxed.w_alarm_s >= *alerts.w_alarm_s - 1e-12);
  }
}

TEST_CASE("json-only equals the adaptive policy's semantic stage bit-exactly") {
  std::mt19937_64 rng(911);
  for (int trial = 0; trial < 300; ++trial) {
    const IntervalContext ctx = random_context(rng);
    const Schedule adaptive = policy_schedule(PolicyId::Dat, ctx);
    const Schedule alerts_only = policy_schedule(PolicyId::JsonOnly, ctx);

    std::vector<std::pair<std::string, std::uint64_t>> a, b;
    std::uint64_t prefix = 0;
    for (const TransmissionUnit& u : adaptive.order) {
      if (u.kind != UnitKind::Json) break;  // stage one is a prefix of the sequence
      prefix += u.size;
      a.emplace_back(u.event_id, prefix);
    }
    prefix = 0;
    for (const TransmissionUnit& u : alerts_only.order) {
      prefix += u.size;
      b.emplace_back(u.event_id, prefix);
    }
    CHECK(a == b);
  }
}
