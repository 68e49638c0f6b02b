// pec_sim: run AdWOrch / R-AdWOrch experiments over a scenario and a set of seeds.
//
// Writes runs.csv, summary.json and config.resolved.json into --out.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pec/experiment.hpp"
#include "pec/scenario.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

// "1,2,7" or "1-5" or a mix ("1-3,9").
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  auto number = [](std::string_view s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw pec::ConfigError("seeds", "bad seed '" + std::string(s) + "'");
    return v;
  };
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(number(part));
      continue;
    }
    const auto lo = number(std::string_view(part).substr(0, dash));
    const auto hi = number(std::string_view(part).substr(dash + 1));
    if (hi < lo) throw pec::ConfigError("seeds", "empty range '" + part + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw pec::ConfigError("seeds", "need at least one seed");
  return out;
}

std::string fmt(const std::optional<pec::Stat>& s, double scale, int precision) {
  if (!s) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f +- %.*f", precision, s->mean * scale, precision, s->stddev * scale);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pure-edge offloading simulator (AdWOrch / R-AdWOrch)"};
  std::string scenario_path;
  std::vector<std::string> policy_names;
  int devices = 0;
  std::string seeds_text;
  double duration = 0.0;
  bool emergency = false;
  bool ablate = false;
  std::string trace_dir;
  std::string out_dir = "out";
  std::string load_qtable;
  std::string save_qtables;
  unsigned jobs = 0;
  bool quiet = false;

  app.add_option("--scenario", scenario_path, "Scenario JSON file (defaults apply to missing keys)")
      ->check(CLI::ExistingFile);
  app.add_option("--policy", policy_names,
                 "Policies to run: adworch, r-adworch, or ablated names such as r-adworch-no-priority "
                 "(default: adworch and r-adworch)");
  app.add_option("--devices", devices, "Override the device count")->check(CLI::PositiveNumber);
  app.add_option("--seeds", seeds_text, "Seeds, e.g. 1-5 or 1,4,9");
  app.add_option("--duration", duration, "Override the duration in simulated minutes")->check(CLI::PositiveNumber);
  app.add_flag("--emergency", emergency, "Partition a share of devices from the main network");
  app.add_flag("--ablate", ablate, "Also run the robust policy with each mechanism removed");
  app.add_option("--trace", trace_dir, "Directory for per-run event traces");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--load-qtable", load_qtable, "Warm-start every run from this Q-table")->check(CLI::ExistingFile);
  app.add_option("--save-qtables", save_qtables, "Directory for the learned Q-table of every run");
  app.add_option("--jobs", jobs, "Worker threads (0: one per core)");
  app.add_flag("--quiet", quiet, "No summary on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    pec::ScenarioConfig cfg = pec::parse_and_validate(scenario_path.empty() ? "" : read_file(scenario_path));
    if (devices > 0) cfg.device_count = devices;
    if (!seeds_text.empty()) cfg.seeds = parse_seeds(seeds_text);
    if (duration > 0.0) cfg.duration_minutes = duration;
    if (emergency) cfg.emergency = true;
    pec::validate(cfg);

    if (policy_names.empty()) policy_names = {"adworch", "r-adworch"};
    std::vector<pec::PolicyConfig> policies;
    auto add = [&](pec::PolicyConfig p) {
      // Cap and weights come from the scenario.
      p.reallocation_cap = cfg.policy.reallocation_cap;
      p.shaped_weights = cfg.policy.shaped_weights;
      for (const auto& q : policies) {
        if (q.name() == p.name()) return;
      }
      policies.push_back(p);
    };
    for (const auto& name : policy_names) {
      auto p = pec::parse_policy(name);
      if (!p) throw pec::ConfigError("policy", "unknown policy '" + name + "'");
      add(*p);
    }
    if (ablate) {
      for (const auto& p : pec::ablation_policies()) add(p);
    }

    std::optional<pec::QTable> warm;
    if (!load_qtable.empty()) {
      std::ifstream in(load_qtable);
      warm = pec::QTable::load(in);
    }

    pec::BatchOptions options;
    options.jobs = jobs;
    options.warm_start = warm ? &*warm : nullptr;
    if (!trace_dir.empty()) options.trace_dir = fs::path(trace_dir);
    const auto runs = pec::run_batch(cfg, policies, options);

    fs::create_directories(out_dir);
    {
      std::ofstream csv(fs::path(out_dir) / "runs.csv");
      if (!csv) throw std::runtime_error("cannot write runs.csv");
      pec::write_runs_csv(csv, cfg.name, runs);
    }
    write_file(fs::path(out_dir) / "summary.json", pec::summary_json(cfg.name, runs));
    write_file(fs::path(out_dir) / "config.resolved.json", pec::to_json_text(cfg));
    if (!save_qtables.empty()) {
      fs::create_directories(save_qtables);
      for (const auto& r : runs) {
        std::ofstream q(fs::path(save_qtables) / (r.policy + "_seed" + std::to_string(r.seed) + ".qtable"));
        r.output.qtable.save(q);
      }
    }

    if (!quiet) {
      std::vector<std::pair<std::string, std::vector<pec::RunMetrics>>> groups;
      for (const auto& r : runs) {
        if (groups.empty() || groups.back().first != r.policy) groups.push_back({r.policy, {}});
        groups.back().second.push_back(r.output.metrics);
      }
      std::cout << "scenario " << cfg.name << ", " << cfg.device_count << " devices, " << cfg.seeds.size()
                << " seed(s), " << cfg.duration_minutes << " min" << (cfg.emergency ? ", emergency" : "") << "\n";
      for (const auto& [name, metrics] : groups) {
        const auto s = pec::aggregate(metrics);
        std::cout << name << "\n";
        for (auto t : pec::kTaskTypes) {
          const auto& ts = s.by_type[pec::index_of(t)];
          std::cout << "  " << pec::to_string(t) << "  success % " << fmt(ts.success_rate, 100.0, 2)
                    << "  avg delay ms " << fmt(ts.average_delay_ms, 1.0, 1) << "\n";
        }
      }
      std::cout << "results in " << out_dir << "\n";
    }
    return 0;
  } catch (const pec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
