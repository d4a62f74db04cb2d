// Command-line front end: gating over detection traces, synthetic workload
// generation, trace-driven simulation, policy comparison matrices, and
// greedy-vs-exact oracle checks.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dat/gating.hpp"
#include "dat/oracle.hpp"
#include "dat/priority.hpp"
#include "dat/scheduler.hpp"
#include "dat/simulator.hpp"
#include "dat/traceio.hpp"

namespace {

using nlohmann::json;

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string format_metric(const std::optional<double>& value) {
  if (!value) return "-";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", *value);
  return buffer;
}

void print_headline(const dat::MetricsReport& report) {
  std::cout << "W-Alarm(s)=" << format_metric(report.w_alarm_s);
  for (const auto& [deadline, fraction] : report.vtr) {
    std::printf("  VTR@%gs=%.4f", deadline, fraction);
  }
  std::cout << "  AvgVisualDelay(s)=" << format_metric(report.avg_visual_delay_s)
            << "  events=" << report.events << " alarms=" << report.alarms_delivered
            << " visuals=" << report.visuals_delivered << " expired=" << report.visuals_expired
            << " starved=" << report.starved << "\n";
}

struct SimulateArgs {
  std::string bw_trace;
  std::string events;
  std::string policy = "dat";
  double dvis = 1.5;
  double interval = 1.0;
  double scale = 1.0;
  double beta = 0.5;
  double gamma = 0.5;
  double t_parse = 0.0;
  std::string out;
  std::string per_event;
  std::string bw_units = "bytes";
  std::vector<double> vtr_deadlines = {0.5, 1.0};
  bool strict_bands = false;
  bool strict_trace = false;
  bool no_visual_stage = false;
  bool json_only_s_order = false;
};

dat::BandwidthUnits parse_units(const std::string& name) {
  if (name == "bytes") return dat::BandwidthUnits::BytesPerSecond;
  if (name == "kbps") return dat::BandwidthUnits::KilobitsPerSecond;
  throw CLI::ValidationError("--bw-units must be 'bytes' or 'kbps'");
}

int cmd_simulate(const SimulateArgs& args) {
  const auto policy = dat::parse_policy(args.policy);
  if (!policy) throw CLI::ValidationError("unknown policy '" + args.policy + "'");

  std::vector<std::string> warnings;
  const dat::BandwidthTrace trace =
      dat::load_bandwidth_csv(args.bw_trace, args.interval, parse_units(args.bw_units), &warnings);
  dat::EventLoadOptions load_options;
  load_options.beta = args.beta;
  load_options.gamma = args.gamma;
  load_options.strict_bands = args.strict_bands;
  load_options.warnings = &warnings;
  std::vector<dat::Event> events = dat::load_events(args.events, load_options);
  print_warnings(warnings);

  dat::SimulationConfig config;
  config.interval_s = args.interval;
  config.d_vis = args.dvis;
  config.beta = args.beta;
  config.gamma = args.gamma;
  config.bandwidth_scale = args.scale;
  config.t_parse_s = args.t_parse;
  config.policy = *policy;
  config.vtr_deadlines = args.vtr_deadlines;
  config.visual_stage = !args.no_visual_stage;
  config.strict_trace_length = args.strict_trace;
  config.baseline.json_only_priority_order = args.json_only_s_order;

  const dat::SimulationResult result = dat::run(trace, std::move(events), config);
  print_warnings(result.diagnostics);
  print_headline(result.report);
  if (!args.out.empty()) {
    dat::emit_results(result.ledger, result.report, config, args.out, dat::ResultsFormat::Summary);
  }
  if (!args.per_event.empty()) {
    dat::emit_results(result.ledger, result.report, config, args.per_event,
                      dat::ResultsFormat::PerEvent);
  }
  return 0;
}

struct GateArgs {
  std::string trace;
  std::string out;
  double tau_low = dat::kDefaultTauLow;
  double tau_high = dat::kDefaultTauHigh;
  std::vector<std::string> severity_order = {"severe", "moderate"};
};

int cmd_gate(const GateArgs& args) {
  const std::vector<dat::FrameDetections> frames = dat::load_detection_trace(args.trace);
  dat::SeverityOrder order;
  order.labels_desc = args.severity_order;

  std::ofstream out;
  if (!args.out.empty()) {
    out.open(args.out);
    if (!out) throw std::runtime_error("cannot open " + args.out + " for writing");
  }

  std::size_t gated = 0;
  std::size_t to_mllm = 0;
  for (const dat::FrameDetections& frame : frames) {
    const dat::GateDecision decision = dat::gate(frame, args.tau_low, args.tau_high);
    if (decision.gate) ++gated;
    if (decision.route == dat::Route::ToMllm) ++to_mllm;
    if (out.is_open()) {
      json record{
          {"frame_id", frame.frame_id},
          {"timestamp_s", frame.timestamp_s},
          {"trigger_score", decision.trigger_score},
          {"gate", decision.gate},
          {"route", dat::to_string(decision.route)},
          {"valid_count", decision.valid_set.size()},
      };
      if (!decision.valid_set.empty()) {
        const dat::Detection& roi = dat::select_representative_roi(decision.valid_set, order);
        record["representative_roi"] = {{"bbox", roi.bbox},
                                        {"class", roi.class_label},
                                        {"conf", roi.confidence},
                                        {"size_bytes", roi.size_bytes}};
      }
      out << record.dump() << '\n';
    }
  }
  std::printf("frames=%zu gated=%zu mllm_load=%.4f\n", frames.size(), gated,
              frames.empty() ? 0.0 : static_cast<double>(to_mllm) / static_cast<double>(frames.size()));
  return 0;
}

struct GenEventsArgs {
  std::string pattern = "burst";
  double duration = 100.0;
  std::uint64_t seed = 0;
  std::string out;
  dat::GenParams params;
};

int cmd_gen_events(const GenEventsArgs& args) {
  const auto pattern = dat::parse_pattern(args.pattern);
  if (!pattern) throw CLI::ValidationError("unknown pattern '" + args.pattern + "'");
  const std::vector<dat::EventRecord> records =
      dat::gen_event_records(*pattern, args.duration, args.seed, args.params);
  dat::save_event_records(records, args.out);
  std::printf("wrote %zu events to %s\n", records.size(), args.out.c_str());
  return 0;
}

struct CompareArgs {
  std::string bw_trace;
  std::vector<std::string> policies = {"dat", "priority-only", "bandwidth-only"};
  std::vector<std::string> patterns = {"burst"};
  std::vector<double> scales = {1.0};
  std::vector<std::uint64_t> seeds = {1};
  std::vector<double> dvis_sweep = {1.5};
  double duration = 100.0;
  double interval = 1.0;
  double beta = 0.5;
  double gamma = 0.5;
  std::string bw_units = "bytes";
  std::string out;
  unsigned jobs = 0;
};

int cmd_compare(const CompareArgs& args) {
  const dat::BandwidthTrace trace =
      dat::load_bandwidth_csv(args.bw_trace, args.interval, parse_units(args.bw_units), nullptr);

  struct Scenario {
    dat::PolicyId policy;
    dat::ArrivalPattern pattern;
    double scale;
    std::uint64_t seed;
    double dvis;
  };
  std::vector<Scenario> scenarios;
  for (const std::string& pattern_name : args.patterns) {
    const auto pattern = dat::parse_pattern(pattern_name);
    if (!pattern) throw CLI::ValidationError("unknown pattern '" + pattern_name + "'");
    for (double scale : args.scales) {
      for (double dvis : args.dvis_sweep) {
        for (std::uint64_t seed : args.seeds) {
          for (const std::string& policy_name : args.policies) {
            const auto policy = dat::parse_policy(policy_name);
            if (!policy) throw CLI::ValidationError("unknown policy '" + policy_name + "'");
            scenarios.push_back({*policy, *pattern, scale, seed, dvis});
          }
        }
      }
    }
  }

  const auto run_one = [&](const Scenario& sc) {
    dat::GenParams params;
    params.beta = args.beta;
    params.gamma = args.gamma;
    std::vector<dat::Event> events = dat::gen_events(sc.pattern, args.duration, sc.seed, params);
    dat::SimulationConfig config;
    config.interval_s = args.interval;
    config.d_vis = sc.dvis;
    config.beta = args.beta;
    config.gamma = args.gamma;
    config.bandwidth_scale = sc.scale;
    config.policy = sc.policy;
    config.seed = sc.seed;
    return dat::run(trace, std::move(events), config).report;
  };

  // Fan runs out across workers; rows land at fixed indices so the output is
  // independent of completion order.
  std::vector<dat::MetricsReport> reports(scenarios.size());
  const unsigned workers = args.jobs == 0
                               ? std::max(1u, std::thread::hardware_concurrency())
                               : args.jobs;
  std::atomic<std::size_t> cursor{0};
  std::vector<std::future<void>> futures;
  for (unsigned w = 0; w < std::min<std::size_t>(workers, scenarios.size()); ++w) {
    futures.push_back(std::async(std::launch::async, [&] {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= scenarios.size()) return;
        reports[i] = run_one(scenarios[i]);
      }
    }));
  }
  for (auto& f : futures) f.get();

  json rows = json::array();
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& sc = scenarios[i];
    const dat::MetricsReport& report = reports[i];
    json row{
        {"policy", dat::to_string(sc.policy)},
        {"pattern", dat::to_string(sc.pattern)},
        {"scale", sc.scale},
        {"seed", sc.seed},
        {"d_vis", sc.dvis},
    };
    if (report.w_alarm_s) row["w_alarm_s"] = *report.w_alarm_s;
    for (const auto& [deadline, fraction] : report.vtr) {
      char key[32];
      std::snprintf(key, sizeof(key), "vtr@%g", deadline);
      row[key] = fraction;
    }
    if (report.avg_visual_delay_s) row["avg_visual_delay_s"] = *report.avg_visual_delay_s;
    row["events"] = report.events;
    row["visuals_delivered"] = report.visuals_delivered;
    row["visuals_expired"] = report.visuals_expired;
    rows.push_back(std::move(row));
  }

  // Per-scenario winners across policies.
  json winners = json::array();
  std::size_t group_size = args.policies.size();
  for (std::size_t base = 0; base + group_size <= scenarios.size(); base += group_size) {
    json winner{
        {"pattern", dat::to_string(scenarios[base].pattern)},
        {"scale", scenarios[base].scale},
        {"seed", scenarios[base].seed},
        {"d_vis", scenarios[base].dvis},
    };
    const auto pick = [&](auto metric, bool smaller_wins) -> std::string {
      std::optional<double> best;
      std::string who = "-";
      for (std::size_t i = base; i < base + group_size; ++i) {
        const std::optional<double> value = metric(reports[i]);
        if (!value) continue;
        if (!best || (smaller_wins ? *value < *best : *value > *best)) {
          best = *value;
          who = dat::to_string(scenarios[i].policy);
        }
      }
      return who;
    };
    winner["w_alarm"] =
        pick([](const dat::MetricsReport& r) { return r.w_alarm_s; }, true);
    winner["avg_visual_delay"] =
        pick([](const dat::MetricsReport& r) { return r.avg_visual_delay_s; }, true);
    for (double deadline : {0.5, 1.0}) {
      char key[32];
      std::snprintf(key, sizeof(key), "vtr@%g", deadline);
      winner[key] = pick(
          [deadline](const dat::MetricsReport& r) -> std::optional<double> {
            const auto it = r.vtr.find(deadline);
            if (it == r.vtr.end()) return std::nullopt;
            return it->second;
          },
          false);
    }
    winners.push_back(std::move(winner));
  }

  json output{{"rows", std::move(rows)}, {"winners", std::move(winners)}};
  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw std::runtime_error("cannot open " + args.out + " for writing");
    out << output.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + args.out);
  } else {
    std::cout << output.dump(2) << '\n';
  }
  std::printf("compare: %zu runs\n", scenarios.size());
  return 0;
}

struct OracleCheckArgs {
  std::size_t n = 3;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  bool cover_json = false;  // force the budget to cover every alert
  bool no_visual = false;
  std::uint64_t bandwidth = 100000;
};

int cmd_oracle_check(const OracleCheckArgs& args) {
  if (args.n > 4) throw CLI::ValidationError("--n must be at most 4");

  std::mt19937_64 rng(args.seed);
  const auto uniform = [&](double lo, double hi) {
    return lo + (static_cast<double>(rng() >> 11) * 0x1.0p-53) * (hi - lo);
  };

  double gap_sum = 0.0;
  double gap_max = 0.0;
  std::size_t exact_matches = 0;
  for (std::size_t trial = 0; trial < args.trials; ++trial) {
    const std::size_t n = 1 + rng() % args.n;
    std::vector<dat::Event> events;
    for (std::size_t i = 0; i < n; ++i) {
      dat::Event e;
      e.id = "t" + std::to_string(trial) + "e" + std::to_string(i);
      e.priority = uniform(0.0, 1.0);
      e.c_json = 1 + rng() % 30000;
      e.c_roi = 1 + rng() % 120000;
      e.c_box = 1 + rng() % 200000;
      events.push_back(std::move(e));
    }
    double interval_s = uniform(0.2, 1.5);
    if (args.cover_json) {
      const std::uint64_t need = dat::json_load(events);
      while (dat::interval_budget(args.bandwidth, interval_s) < need) interval_s += 0.1;
    }
    const double d_vis = uniform(0.3, 2.0);

    dat::IntervalContext ctx =
        dat::make_interval_context(args.bandwidth, interval_s, d_vis, events);
    ctx.visual_stage = !args.no_visual;
    const dat::Schedule greedy = dat::schedule_interval(ctx);

    dat::OracleOptions options;
    options.n_max = args.n;
    options.visual_stage = !args.no_visual;
    const dat::OracleSolution exact =
        dat::exact_lexicographic(events, args.bandwidth, interval_s, d_vis, options);
    const dat::GapReport report =
        dat::compare_with_oracle(greedy, exact, events, args.bandwidth, interval_s, d_vis);

    if (!report.greedy_feasible || report.primary_sign < 0) {
      std::fprintf(stderr, "oracle-check: dominance violated on trial %zu\n", trial);
      return 1;
    }
    if (report.primary_sign == 0) ++exact_matches;
    const double gap = std::max(0.0, report.primary_gap);
    gap_sum += gap;
    gap_max = std::max(gap_max, gap);
  }

  std::printf("trials=%zu exact_match=%.4f mean_gap=%.9f max_gap=%.9f\n", args.trials,
              static_cast<double>(exact_matches) / static_cast<double>(args.trials),
              gap_sum / static_cast<double>(args.trials), gap_max);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semantic-priority and bandwidth-aware transmission scheduling toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "run one policy over a bandwidth trace");
  simulate->add_option("--bw-trace", sim.bw_trace, "bandwidth trace CSV")->required();
  simulate->add_option("--events", sim.events, "event trace (line-delimited JSON)")->required();
  simulate->add_option("--policy", sim.policy,
                       "dat|json-only|priority-only|bandwidth-only|fixed-box|fixed-roi|fixed-json-box")
      ->required();
  simulate->add_option("--dvis", sim.dvis, "visual validity deadline, seconds")
      ->capture_default_str();
  simulate->add_option("--interval", sim.interval, "scheduling interval, seconds")
      ->capture_default_str();
  simulate->add_option("--scale", sim.scale, "bandwidth scaling factor")->capture_default_str();
  simulate->add_option("--beta", sim.beta, "level/score mixing weight")->capture_default_str();
  simulate->add_option("--gamma", sim.gamma, "score band threshold")->capture_default_str();
  simulate->add_option("--t-parse", sim.t_parse, "cloud-side parse overhead, seconds")
      ->capture_default_str();
  simulate->add_option("--out", sim.out, "write summary JSON here");
  simulate->add_option("--per-event", sim.per_event, "write per-event CSV here");
  simulate->add_option("--bw-units", sim.bw_units, "bytes|kbps")->capture_default_str();
  simulate->add_option("--vtr-deadlines", sim.vtr_deadlines, "on-time visual deadlines, seconds")
      ->capture_default_str()
      ->delimiter(',');
  simulate->add_flag("--strict-bands", sim.strict_bands, "reject out-of-band scores");
  simulate->add_flag("--strict-trace", sim.strict_trace, "error when the trace runs out");
  simulate->add_flag("--no-visual-stage", sim.no_visual_stage, "disable visual scheduling (dat)");
  simulate->add_flag("--json-only-s-order", sim.json_only_s_order,
                     "order json-only by raw priority");

  GateArgs gate;
  CLI::App* gate_cmd = app.add_subcommand("gate", "run gating over a detection trace");
  gate_cmd->add_option("--trace", gate.trace, "detection trace (line-delimited JSON)")->required();
  gate_cmd->add_option("--out", gate.out, "write per-frame decisions here");
  gate_cmd->add_option("--tau-low", gate.tau_low, "gate threshold")->capture_default_str();
  gate_cmd->add_option("--tau-high", gate.tau_high, "direct-accept threshold")
      ->capture_default_str();
  gate_cmd->add_option("--severity-order", gate.severity_order,
                       "class labels from most to least severe")
      ->capture_default_str()
      ->delimiter(',');

  GenEventsArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-events", "generate a synthetic event trace");
  gen_cmd->add_option("--pattern", gen.pattern, "low|medium|burst")->capture_default_str();
  gen_cmd->add_option("--duration", gen.duration, "workload length, seconds")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "output event trace path")->required();
  gen_cmd->add_option("--beta", gen.params.beta, "level/score mixing weight")
      ->capture_default_str();
  gen_cmd->add_option("--gamma", gen.params.gamma, "score band threshold")->capture_default_str();
  gen_cmd->add_option("--severe-prob", gen.params.severe_prob, "top-level probability")
      ->capture_default_str();
  gen_cmd->add_option("--json-median", gen.params.json_median_bytes, "alert size median, bytes")
      ->capture_default_str();
  gen_cmd->add_option("--roi-median", gen.params.roi_median_bytes, "roi size median, bytes")
      ->capture_default_str();
  gen_cmd->add_option("--box-median", gen.params.box_median_bytes, "box size median, bytes")
      ->capture_default_str();

  CompareArgs cmp;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "run a policy/pattern/scale/seed matrix");
  cmp_cmd->add_option("--bw-trace", cmp.bw_trace, "bandwidth trace CSV")->required();
  cmp_cmd->add_option("--policies", cmp.policies, "policies to compare")->capture_default_str()
      ->delimiter(',');
  cmp_cmd->add_option("--patterns", cmp.patterns, "arrival patterns")->capture_default_str()
      ->delimiter(',');
  cmp_cmd->add_option("--scales", cmp.scales, "bandwidth scaling factors")->capture_default_str()
      ->delimiter(',');
  cmp_cmd->add_option("--seeds", cmp.seeds, "workload seeds")->capture_default_str()
      ->delimiter(',');
  cmp_cmd->add_option("--dvis-sweep", cmp.dvis_sweep, "visual deadlines to sweep")
      ->capture_default_str()
      ->delimiter(',');
  cmp_cmd->add_option("--duration", cmp.duration, "workload length, seconds")
      ->capture_default_str();
  cmp_cmd->add_option("--interval", cmp.interval, "scheduling interval, seconds")
      ->capture_default_str();
  cmp_cmd->add_option("--beta", cmp.beta, "level/score mixing weight")->capture_default_str();
  cmp_cmd->add_option("--gamma", cmp.gamma, "score band threshold")->capture_default_str();
  cmp_cmd->add_option("--bw-units", cmp.bw_units, "bytes|kbps")->capture_default_str();
  cmp_cmd->add_option("--out", cmp.out, "write the matrix JSON here");
  cmp_cmd->add_option("--jobs", cmp.jobs, "worker threads (0 = hardware)")->capture_default_str();

  OracleCheckArgs oc;
  CLI::App* oc_cmd = app.add_subcommand("oracle-check", "greedy vs exact on random instances");
  oc_cmd->add_option("--n", oc.n, "max events per instance (at most 4)")->capture_default_str();
  oc_cmd->add_option("--trials", oc.trials, "number of random instances")->capture_default_str();
  oc_cmd->add_option("--seed", oc.seed, "instance generator seed")->capture_default_str();
  oc_cmd->add_option("--bandwidth", oc.bandwidth, "link bandwidth, bytes/s")
      ->capture_default_str();
  oc_cmd->add_flag("--cover-json", oc.cover_json, "force budgets that cover every alert");
  oc_cmd->add_flag("--no-visual", oc.no_visual, "disable the visual stage");

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) return cmd_simulate(sim);
    if (gate_cmd->parsed()) return cmd_gate(gate);
    if (gen_cmd->parsed()) return cmd_gen_events(gen);
    if (cmp_cmd->parsed()) return cmd_compare(cmp);
    if (oc_cmd->parsed()) return cmd_oracle_check(oc);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
