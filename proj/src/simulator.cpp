#include "dat/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "dat/priority.hpp"
#include "dat/scheduler.hpp"

namespace dat {

const char* to_string(ArrivalPattern pattern) {
  switch (pattern) {
    case ArrivalPattern::Low: return "low";
    case ArrivalPattern::Medium: return "medium";
    case ArrivalPattern::Burst: return "burst";
  }
  return "?";
}

std::optional<ArrivalPattern> parse_pattern(std::string_view name) {
  if (name == "low") return ArrivalPattern::Low;
  if (name == "medium") return ArrivalPattern::Medium;
  if (name == "burst") return ArrivalPattern::Burst;
  return std::nullopt;
}

namespace {

// Samplers are hand-rolled on top of the engine so generated workloads do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double exponential(double lambda) { return -std::log(1.0 - uniform01()) / lambda; }
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {  // inclusive
    return lo + eng_() % (hi - lo + 1);
  }
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

std::uint64_t lognormal_bytes(Rng& rng, double median, double sigma) {
  const double value = median * std::exp(sigma * rng.normal());
  if (value < 1.0) return 1;
  return static_cast<std::uint64_t>(std::llround(value));
}

}  // namespace

Event to_event(const EventRecord& record, double beta) {
  Event event;
  event.id = record.event_id;
  event.arrival_s = record.arrival_s;
  event.priority =
      semantic_priority(normalize_level(record.level, record.num_levels), record.score, beta);
  event.c_json = record.c_json;
  event.c_roi = record.c_roi;
  event.c_box = record.c_box;
  return event;
}

std::vector<EventRecord> gen_event_records(ArrivalPattern pattern, double duration_s,
                                           std::uint64_t seed, const GenParams& params) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("gen_event_records: duration must be positive");
  if (params.num_levels < 2) throw std::invalid_argument("gen_event_records: need at least two levels");

  Rng rng(seed);
  std::vector<double> arrivals;

  const auto poisson_arrivals = [&](double lambda) {
    double t = rng.exponential(lambda);
    while (t < duration_s) {
      arrivals.push_back(t);
      t += rng.exponential(lambda);
    }
  };

  switch (pattern) {
    case ArrivalPattern::Low: poisson_arrivals(params.lambda_low); break;
    case ArrivalPattern::Medium: poisson_arrivals(params.lambda_medium); break;
    case ArrivalPattern::Burst: {
      poisson_arrivals(params.burst_background_lambda);
      double epoch = rng.exponential(params.burst_epoch_lambda);
      while (epoch < duration_s) {
        const std::uint64_t count = rng.uniform_int(
            static_cast<std::uint64_t>(params.burst_count_min),
            static_cast<std::uint64_t>(params.burst_count_max));
        for (std::uint64_t i = 0; i < count; ++i) {
          const double t = epoch + rng.uniform01() * params.burst_window_s;
          if (t < duration_s) arrivals.push_back(t);
        }
        epoch += rng.exponential(params.burst_epoch_lambda);
      }
      break;
    }
  }

  std::stable_sort(arrivals.begin(), arrivals.end());

  std::vector<EventRecord> records;
  records.reserve(arrivals.size());
  const int levels = params.num_levels;
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    EventRecord rec;
    char id[24];
    std::snprintf(id, sizeof(id), "ev%06zu", i);
    rec.event_id = id;
    rec.arrival_s = arrivals[i];
    rec.num_levels = levels;
    if (rng.bernoulli(params.severe_prob)) {
      rec.level = levels - 1;
    } else {
      rec.level = levels == 2 ? 0 : static_cast<int>(rng.uniform_int(0, levels - 2));
    }
    const auto [lo, hi] = score_band(rec.level, levels, params.gamma);
    rec.score = lo + rng.uniform01() * (hi - lo);
    rec.c_json = lognormal_bytes(rng, params.json_median_bytes, params.json_sigma);
    rec.c_roi = lognormal_bytes(rng, params.roi_median_bytes, params.roi_sigma);
    rec.c_box = lognormal_bytes(rng, params.box_median_bytes, params.box_sigma);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<Event> gen_events(ArrivalPattern pattern, double duration_s, std::uint64_t seed,
                              const GenParams& params) {
  std::vector<Event> events;
  for (const EventRecord& rec : gen_event_records(pattern, duration_s, seed, params)) {
    events.push_back(to_event(rec, params.beta));
  }
  return events;
}

BandwidthTrace scale_trace(const BandwidthTrace& trace, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("scale_trace: factor must be positive");
  BandwidthTrace scaled;
  scaled.sample_period_s = trace.sample_period_s;
  scaled.samples.reserve(trace.samples.size());
  for (const BandwidthSample& s : trace.samples) {
    const double value = std::floor(static_cast<double>(s.bytes_per_s) * factor);
    scaled.samples.push_back({s.t_start_s, value < 1.0 ? 1 : static_cast<std::uint64_t>(value)});
  }
  return scaled;
}

SimulationResult run(const BandwidthTrace& trace, std::vector<Event> events,
                     const SimulationConfig& config) {
  if (trace.empty()) throw std::invalid_argument("run: bandwidth trace is empty");
  if (!(config.interval_s > 0.0)) throw std::invalid_argument("run: interval must be positive");
  if (!(config.d_vis > 0.0)) throw std::invalid_argument("run: d_vis must be positive");
  if (!(config.bandwidth_scale > 0.0)) throw std::invalid_argument("run: scale must be positive");

  SimulationResult result;
  const BandwidthTrace scaled =
      config.bandwidth_scale == 1.0 ? trace : scale_trace(trace, config.bandwidth_scale);

  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.arrival_s != b.arrival_s) return a.arrival_s < b.arrival_s;
    return a.id < b.id;
  });

  result.ledger.entries.reserve(events.size());
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(events.size());
  for (const Event& e : events) {
    if (e.c_json == 0 || e.c_roi == 0 || e.c_box == 0) {
      throw std::invalid_argument("run: event " + e.id + " has non-positive unit cost");
    }
    if (!index.emplace(e.id, result.ledger.entries.size()).second) {
      throw std::invalid_argument("run: duplicate event id " + e.id);
    }
    result.ledger.entries.push_back({e.id, e.arrival_s, e.priority, {}, {}, {}, false, false});
  }

  // Events needing more bytes than any interval can ever offer would wait
  // forever; flag them instead of livelocking.
  std::uint64_t max_budget = 0;
  for (const BandwidthSample& s : scaled.samples) {
    max_budget = std::max(max_budget, interval_budget(s.bytes_per_s, config.interval_s));
  }
  std::vector<Event> active;
  active.reserve(events.size());
  for (Event& e : events) {
    if (policy_required_bytes(config.policy, e) > max_budget) {
      LedgerEntry& entry = result.ledger.entries[index.at(e.id)];
      entry.starved = true;
      result.diagnostics.push_back("event " + e.id + " needs " +
                                   std::to_string(policy_required_bytes(config.policy, e)) +
                                   " bytes but the best interval budget is " +
                                   std::to_string(max_budget) + "; excluded as starved");
    } else {
      active.push_back(std::move(e));
    }
  }

  const bool retries_visual = policy_retries_visual(config.policy);
  const bool alert_is_visual = policy_alert_is_visual(config.policy);
  const double last_arrival = active.empty() ? 0.0 : active.back().arrival_s;
  const std::uint64_t arrival_intervals =
      static_cast<std::uint64_t>(std::ceil(last_arrival / config.interval_s)) + 1;
  const std::uint64_t guard_intervals =
      arrival_intervals + 2 * (active.size() + 1) * scaled.samples.size() + 64;

  std::vector<Event> pending;
  std::vector<VisualPendingEntry> visual_pending;
  std::size_t next_arrival = 0;
  std::uint64_t tau = 0;

  for (;; ++tau) {
    if (next_arrival >= active.size() && pending.empty() && visual_pending.empty()) break;
    if (tau > guard_intervals) {
      throw std::runtime_error("run: schedule failed to drain within " +
                               std::to_string(guard_intervals) + " intervals");
    }
    const double start = static_cast<double>(tau) * config.interval_s;

    while (next_arrival < active.size() && active[next_arrival].arrival_s <= start) {
      pending.push_back(active[next_arrival]);
      ++next_arrival;
    }

    // Carried visuals age out at interval starts once older than d_vis.
    std::erase_if(visual_pending, [&](const VisualPendingEntry& entry) {
      if (start - entry.arrival_s > config.d_vis) {
        result.ledger.entries[index.at(entry.event_id)].expired_visual = true;
        return true;
      }
      return false;
    });

    std::size_t sample_idx;
    if (config.strict_trace_length) {
      if (tau >= scaled.samples.size()) {
        throw std::runtime_error("run: trace exhausted at interval " + std::to_string(tau) +
                                 " with work remaining (strict trace mode)");
      }
      sample_idx = tau;
    } else {
      sample_idx = static_cast<std::size_t>(tau % scaled.samples.size());
    }
    const std::uint64_t bandwidth = scaled.samples[sample_idx].bytes_per_s;

    IntervalContext ctx =
        make_interval_context(bandwidth, config.interval_s, config.d_vis, pending, visual_pending);
    ctx.visual_stage = config.visual_stage;
    const Schedule schedule = policy_schedule(config.policy, ctx, config.baseline);

    std::uint64_t prefix = 0;
    for (const TransmissionUnit& unit : schedule.order) {
      prefix += unit.size;
      const double wall = start + static_cast<double>(prefix) / static_cast<double>(bandwidth);
      LedgerEntry& entry = result.ledger.entries[index.at(unit.event_id)];
      if (unit.kind == UnitKind::Json) {
        entry.alarm_wallclock_s = alarm_delay(wall, config.t_parse_s);
      } else {
        entry.visual_wallclock_s = wall;
        entry.visual_kind = unit.kind;
        if (alert_is_visual) entry.alarm_wallclock_s = alarm_delay(wall, config.t_parse_s);
      }
    }

    std::vector<Event> still_pending;
    still_pending.reserve(pending.size());
    for (Event& e : pending) {
      const LedgerEntry& entry = result.ledger.entries[index.at(e.id)];
      if (!entry.alarm_wallclock_s) {
        still_pending.push_back(std::move(e));
        continue;
      }
      if (retries_visual && !entry.visual_wallclock_s) {
        visual_pending.push_back({e.id, e.c_roi, e.c_box, e.arrival_s, e.priority});
      }
    }
    pending.swap(still_pending);

    if (retries_visual) {
      std::erase_if(visual_pending, [&](const VisualPendingEntry& entry) {
        return result.ledger.entries[index.at(entry.event_id)].visual_wallclock_s.has_value();
      });
    }
  }

  result.intervals_run = tau;
  result.report = compute_metrics(result.ledger, config);
  return result;
}

MetricsReport compute_metrics(const DeliveryLedger& ledger, const SimulationConfig& config) {
  MetricsReport report;
  report.events = ledger.entries.size();

  double weighted_sum = 0.0;
  double weight = 0.0;
  double visual_sum = 0.0;
  std::map<double, std::uint64_t> on_time;
  for (double d : config.vtr_deadlines) on_time[d] = 0;

  for (const LedgerEntry& entry : ledger.entries) {
    if (entry.starved) ++report.starved;
    if (entry.expired_visual) ++report.visuals_expired;
    if (entry.alarm_wallclock_s) {
      ++report.alarms_delivered;
      weighted_sum += entry.priority * (*entry.alarm_wallclock_s - entry.arrival_s);
      weight += entry.priority;
    }
    if (entry.visual_wallclock_s) {
      ++report.visuals_delivered;
      const double delay = *entry.visual_wallclock_s - entry.arrival_s;
      visual_sum += delay;
      for (auto& [deadline, count] : on_time) {
        if (delay <= deadline) ++count;
      }
    }
  }

  if (report.alarms_delivered > 0) {
    report.w_alarm_weighted_sum = weighted_sum;
    report.w_alarm_s = weight > 0.0 ? weighted_sum / weight : 0.0;
  }
  if (report.events > 0) {
    for (const auto& [deadline, count] : on_time) {
      report.vtr[deadline] =
          static_cast<double>(count) / static_cast<double>(report.events);
    }
  }
  if (report.visuals_delivered > 0) {
    report.avg_visual_delay_s = visual_sum / static_cast<double>(report.visuals_delivered);
  }
  return report;
}

}  // namespace dat
