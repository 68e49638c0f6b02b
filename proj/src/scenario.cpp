#include "pec/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "json.hpp"

namespace pec {

using nlohmann::json;

namespace {

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

// Walks one JSON object, remembering which keys were read so the rest can be
// reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(std::string_view key) const { return j_.contains(std::string(key)); }

  void number(std::string_view key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(join(path_, key), "expected a number");
      out = v->get<double>();
    }
  }

  void integer(std::string_view key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) throw ConfigError(join(path_, key), "expected an integer");
      out = v->get<int>();
    }
  }

  void boolean(std::string_view key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(std::string_view key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(join(path_, key), "expected a string");
      out = v->get<std::string>();
    }
  }

  const json* raw(std::string_view key) { return take(key); }

  std::optional<ObjectReader> object(std::string_view key) {
    if (const json* v = take(key)) return ObjectReader(*v, join(path_, key));
    return std::nullopt;
  }

  std::string path_of(std::string_view key) const { return join(path_, key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown key");
    }
  }

 private:
  const json* take(std::string_view key) {
    const std::string k(key);
    seen_.insert(k);
    auto it = j_.find(k);
    if (it == j_.end()) return nullptr;
    return &*it;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_per_type(ObjectReader& parent, std::string_view key, std::array<double, 3>& out) {
  if (auto r = parent.object(key)) {
    for (auto t : kTaskTypes) r->number(to_string(t), out[index_of(t)]);
    r->finish();
  }
}

void read_membership(ObjectReader& parent, std::string_view key, Membership& m) {
  const json* v = parent.raw(key);
  if (!v) return;
  if (!v->is_array() || v->size() != 3 || !std::all_of(v->begin(), v->end(), [](const json& e) {
        return e.is_number();
      })) {
    throw ConfigError(parent.path_of(key), "expected three numbers [low, mid, high]");
  }
  m = {(*v)[0].get<double>(), (*v)[1].get<double>(), (*v)[2].get<double>()};
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

}  // namespace

void validate(const ScenarioConfig& c) {
  require(c.device_count >= 2, "device_count", "must be at least 2");
  double mix = 0.0;
  for (std::size_t i = 0; i < c.device_mix.size(); ++i) {
    require(c.device_mix[i] >= 0.0, "device_mix." + std::string(to_string(kEdgeDeviceKinds[i])),
            "fractions must be non-negative");
    mix += c.device_mix[i];
  }
  require(std::abs(mix - 1.0) <= 1e-9, "device_mix", "fractions must sum to 1 (got " + std::to_string(mix) + ")");
  for (auto t : kTaskTypes) {
    const std::string tn(to_string(t));
    require(c.arrivals.rates_per_minute[index_of(t)] >= 0.0, "arrivals.rates_per_minute." + tn,
            "rates must be non-negative");
    const auto& a = c.app(t);
    require(a.latency_ms > 0.0, "applications." + tn + ".latency_ms", "must be > 0");
    require(a.size_mi > 0.0, "applications." + tn + ".size_mi", "must be > 0");
    require(a.request_mb >= 0.0, "applications." + tn + ".request_mb", "must be >= 0");
    require(a.result_mb >= 0.0, "applications." + tn + ".result_mb", "must be >= 0");
  }
  require(c.network.internal_bandwidth_mbps > 0.0, "network.internal_bandwidth_mbps", "must be > 0");
  require(c.network.main_bandwidth_mbps > 0.0, "network.main_bandwidth_mbps", "must be > 0");
  require(c.network.internal_latency_ms >= 0.0, "network.internal_latency_ms", "must be >= 0");
  require(c.network.main_latency_ms >= 0.0, "network.main_latency_ms", "must be >= 0");
  require(c.network.fluctuation_min > 0.0 && c.network.fluctuation_min <= c.network.fluctuation_max,
          "network.fluctuation_min", "need 0 < fluctuation_min <= fluctuation_max");
  require(c.emergency_fraction >= 0.0 && c.emergency_fraction <= 1.0, "emergency_fraction", "must be in [0, 1]");
  require(c.duration_minutes > 0.0, "duration_minutes", "must be > 0");
  require(!c.seeds.empty(), "seeds", "need at least one seed");
  require(c.policy.reallocation_cap >= 0, "reallocation_cap", "must be >= 0");
  require(c.policy.shaped_weights.hrt > 0 && c.policy.shaped_weights.srt > 0 && c.policy.shaped_weights.nrt > 0,
          "reward_weights", "weights must be > 0");
  require(c.energy.threshold_fraction > 0.0 && c.energy.threshold_fraction < 1.0, "energy.threshold_fraction",
          "must be in (0, 1)");
  require(c.energy.tick_ms > 0.0, "energy.tick_ms", "must be > 0");
  require(c.energy.initial_charge_min > 0.0 && c.energy.initial_charge_min <= c.energy.initial_charge_max &&
              c.energy.initial_charge_max <= 1.0,
          "energy.initial_charge_min", "need 0 < initial_charge_min <= initial_charge_max <= 1");
  require(c.energy.mobile_sensor_capacity_wh > 0.0, "energy.mobile_sensor_capacity_wh", "must be > 0");
  require(c.energy.sensor_power_w >= 0.0, "energy.sensor_power_w", "must be >= 0");
  require(c.mobility.area.width_m > 0.0 && c.mobility.area.height_m > 0.0, "mobility.area_width_m",
          "area must be positive");
  require(c.mobility.tick_ms > 0.0, "mobility.tick_ms", "must be > 0");
  require(c.mobility.depart_probability >= 0.0 && c.mobility.depart_probability <= 1.0,
          "mobility.depart_probability", "must be in [0, 1]");
  require(c.mobility.arrive_probability >= 0.0 && c.mobility.arrive_probability <= 1.0,
          "mobility.arrive_probability", "must be in [0, 1]");
  require(!c.reachability_radius_m || *c.reachability_radius_m > 0.0, "mobility.reachability_radius_m",
          "must be > 0 or null");
  const auto& o = c.orchestrator;
  require(o.alpha > 0.0 && o.alpha <= 1.0, "orchestrator.alpha", "must be in (0, 1]");
  require(o.epsilon_start >= 0.0 && o.epsilon_start <= 1.0, "orchestrator.epsilon_start", "must be in [0, 1]");
  require(o.epsilon_end >= 0.0 && o.epsilon_end <= 1.0, "orchestrator.epsilon_end", "must be in [0, 1]");
  for (auto [name, m] : {std::pair{"load", o.fuzzy.load}, std::pair{"exec_ratio", o.fuzzy.exec_ratio},
                         std::pair{"battery", o.fuzzy.battery}}) {
    require(m.low < m.mid && m.mid < m.high, std::string("orchestrator.membership.") + name,
            "breakpoints must be strictly increasing");
  }
  require(c.edge_server.gips > 0.0, "edge_server.gips", "must be > 0");
  require(c.edge_server.cores >= 1, "edge_server.cores", "must be >= 1");
  require(c.capabilities.tags >= 1 && c.capabilities.tags <= 8, "capabilities.tags", "must be in [1, 8]");
  require(c.capabilities.tag_probability >= 0.0 && c.capabilities.tag_probability <= 1.0,
          "capabilities.tag_probability", "must be in [0, 1]");
}

ScenarioConfig parse_and_validate(std::string_view text) {
  ScenarioConfig c;
  const bool blank = std::all_of(text.begin(), text.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); });
  if (blank) {
    validate(c);
    return c;
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }

  ObjectReader root(doc, "");
  root.string("name", c.name);
  root.integer("device_count", c.device_count);
  if (auto mix = root.object("device_mix")) {
    for (std::size_t i = 0; i < kEdgeDeviceKinds.size(); ++i) mix->number(to_string(kEdgeDeviceKinds[i]), c.device_mix[i]);
    mix->finish();
  }
  if (auto a = root.object("arrivals")) {
    std::string process = c.arrivals.process == ArrivalProcess::Poisson ? "poisson" : "periodic";
    a->string("process", process);
    if (process == "poisson") {
      c.arrivals.process = ArrivalProcess::Poisson;
    } else if (process == "periodic") {
      c.arrivals.process = ArrivalProcess::Periodic;
    } else {
      throw ConfigError(a->path_of("process"), "expected poisson or periodic, got '" + process + "'");
    }
    std::string interp = c.arrivals.interpretation == RateInterpretation::SystemWide ? "system_wide" : "per_device";
    a->string("interpretation", interp);
    if (interp == "system_wide") {
      c.arrivals.interpretation = RateInterpretation::SystemWide;
    } else if (interp == "per_device") {
      c.arrivals.interpretation = RateInterpretation::PerDevice;
    } else {
      throw ConfigError(a->path_of("interpretation"), "expected system_wide or per_device, got '" + interp + "'");
    }
    read_per_type(*a, "rates_per_minute", c.arrivals.rates_per_minute);
    a->finish();
  }
  if (auto apps = root.object("applications")) {
    for (auto t : kTaskTypes) {
      if (auto app = apps->object(to_string(t))) {
        auto& p = c.apps[index_of(t)];
        app->number("latency_ms", p.latency_ms);
        app->number("size_mi", p.size_mi);
        app->number("request_mb", p.request_mb);
        app->number("result_mb", p.result_mb);
        app->finish();
      }
    }
    apps->finish();
  }
  if (auto n = root.object("network")) {
    n->number("internal_bandwidth_mbps", c.network.internal_bandwidth_mbps);
    n->number("main_bandwidth_mbps", c.network.main_bandwidth_mbps);
    n->number("internal_latency_ms", c.network.internal_latency_ms);
    n->number("main_latency_ms", c.network.main_latency_ms);
    n->boolean("fluctuation", c.network.fluctuation);
    n->number("fluctuation_min", c.network.fluctuation_min);
    n->number("fluctuation_max", c.network.fluctuation_max);
    n->finish();
  }
  root.boolean("emergency", c.emergency);
  root.number("emergency_fraction", c.emergency_fraction);
  root.number("duration_minutes", c.duration_minutes);
  if (const json* seeds = root.raw("seeds")) {
    if (!seeds->is_array()) throw ConfigError("seeds", "expected a list of non-negative integers");
    c.seeds.clear();
    for (const auto& s : *seeds) {
      if (!s.is_number_unsigned()) throw ConfigError("seeds", "expected a list of non-negative integers");
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (const json* p = root.raw("policy")) {
    if (!p->is_string()) throw ConfigError("policy", "expected a string");
    auto parsed = parse_policy(p->get<std::string>());
    if (!parsed) {
      throw ConfigError("policy", "unknown policy '" + p->get<std::string>() + "' (expected adworch or r-adworch)");
    }
    c.policy = *parsed;
  }
  root.integer("reallocation_cap", c.policy.reallocation_cap);
  if (auto w = root.object("reward_weights")) {
    w->number("HRT", c.policy.shaped_weights.hrt);
    w->number("SRT", c.policy.shaped_weights.srt);
    w->number("NRT", c.policy.shaped_weights.nrt);
    w->finish();
  }
  if (auto e = root.object("energy")) {
    e->number("threshold_fraction", c.energy.threshold_fraction);
    e->number("tick_ms", c.energy.tick_ms);
    e->number("initial_charge_min", c.energy.initial_charge_min);
    e->number("initial_charge_max", c.energy.initial_charge_max);
    e->number("mobile_sensor_capacity_wh", c.energy.mobile_sensor_capacity_wh);
    e->number("sensor_power_w", c.energy.sensor_power_w);
    e->finish();
  }
  if (auto m = root.object("mobility")) {
    m->number("area_width_m", c.mobility.area.width_m);
    m->number("area_height_m", c.mobility.area.height_m);
    m->number("tick_ms", c.mobility.tick_ms);
    m->number("depart_probability", c.mobility.depart_probability);
    m->number("arrive_probability", c.mobility.arrive_probability);
    if (const json* r = m->raw("reachability_radius_m")) {
      if (r->is_null()) {
        c.reachability_radius_m.reset();
      } else if (r->is_number()) {
        c.reachability_radius_m = r->get<double>();
      } else {
        throw ConfigError(m->path_of("reachability_radius_m"), "expected a number or null");
      }
    }
    m->finish();
  }
  if (auto o = root.object("orchestrator")) {
    o->number("alpha", c.orchestrator.alpha);
    o->number("epsilon_start", c.orchestrator.epsilon_start);
    o->number("epsilon_end", c.orchestrator.epsilon_end);
    o->number("reliability_threshold", c.orchestrator.reliability_threshold);
    int warmup = static_cast<int>(c.orchestrator.warmup_visits);
    o->integer("warmup_visits", warmup);
    if (warmup < 0) throw ConfigError(o->path_of("warmup_visits"), "must be >= 0");
    c.orchestrator.warmup_visits = static_cast<std::uint32_t>(warmup);
    if (auto mem = o->object("membership")) {
      read_membership(*mem, "load", c.orchestrator.fuzzy.load);
      read_membership(*mem, "exec_ratio", c.orchestrator.fuzzy.exec_ratio);
      read_membership(*mem, "battery", c.orchestrator.fuzzy.battery);
      mem->finish();
    }
    o->finish();
  }
  if (auto s = root.object("edge_server")) {
    s->number("gips", c.edge_server.gips);
    s->integer("cores", c.edge_server.cores);
    s->finish();
  }
  if (auto cap = root.object("capabilities")) {
    cap->integer("tags", c.capabilities.tags);
    cap->number("tag_probability", c.capabilities.tag_probability);
    cap->finish();
  }
  root.boolean("exclude_in_flight", c.exclude_in_flight);
  root.finish();

  validate(c);
  return c;
}

std::string to_json_text(const ScenarioConfig& c) {
  json j = json::object();
  j["name"] = c.name;
  j["device_count"] = c.device_count;
  for (std::size_t i = 0; i < kEdgeDeviceKinds.size(); ++i) {
    j["device_mix"][std::string(to_string(kEdgeDeviceKinds[i]))] = c.device_mix[i];
  }
  j["arrivals"]["process"] = c.arrivals.process == ArrivalProcess::Poisson ? "poisson" : "periodic";
  j["arrivals"]["interpretation"] =
      c.arrivals.interpretation == RateInterpretation::SystemWide ? "system_wide" : "per_device";
  for (auto t : kTaskTypes) {
    const std::string tn(to_string(t));
    j["arrivals"]["rates_per_minute"][tn] = c.arrivals.rates_per_minute[index_of(t)];
    const auto& a = c.app(t);
    j["applications"][tn] = {{"latency_ms", a.latency_ms},
                             {"size_mi", a.size_mi},
                             {"request_mb", a.request_mb},
                             {"result_mb", a.result_mb}};
  }
  j["network"] = {{"internal_bandwidth_mbps", c.network.internal_bandwidth_mbps},
                  {"main_bandwidth_mbps", c.network.main_bandwidth_mbps},
                  {"internal_latency_ms", c.network.internal_latency_ms},
                  {"main_latency_ms", c.network.main_latency_ms},
                  {"fluctuation", c.network.fluctuation},
                  {"fluctuation_min", c.network.fluctuation_min},
                  {"fluctuation_max", c.network.fluctuation_max}};
  j["emergency"] = c.emergency;
  j["emergency_fraction"] = c.emergency_fraction;
  j["duration_minutes"] = c.duration_minutes;
  j["seeds"] = c.seeds;
  j["policy"] = c.policy.name();
  j["reallocation_cap"] = c.policy.reallocation_cap;
  j["reward_weights"] = {{"HRT", c.policy.shaped_weights.hrt},
                         {"SRT", c.policy.shaped_weights.srt},
                         {"NRT", c.policy.shaped_weights.nrt}};
  j["energy"] = {{"threshold_fraction", c.energy.threshold_fraction},
                 {"tick_ms", c.energy.tick_ms},
                 {"initial_charge_min", c.energy.initial_charge_min},
                 {"initial_charge_max", c.energy.initial_charge_max},
                 {"mobile_sensor_capacity_wh", c.energy.mobile_sensor_capacity_wh},
                 {"sensor_power_w", c.energy.sensor_power_w}};
  j["mobility"] = {{"area_width_m", c.mobility.area.width_m},
                   {"area_height_m", c.mobility.area.height_m},
                   {"tick_ms", c.mobility.tick_ms},
                   {"depart_probability", c.mobility.depart_probability},
                   {"arrive_probability", c.mobility.arrive_probability},
                   {"reachability_radius_m", c.reachability_radius_m ? json(*c.reachability_radius_m) : json(nullptr)}};
  const auto& o = c.orchestrator;
  auto mem = [](const Membership& m) { return json::array({m.low, m.mid, m.high}); };
  j["orchestrator"] = {{"alpha", o.alpha},
                       {"epsilon_start", o.epsilon_start},
                       {"epsilon_end", o.epsilon_end},
                       {"reliability_threshold", o.reliability_threshold},
                       {"warmup_visits", o.warmup_visits},
                       {"membership",
                        {{"load", mem(o.fuzzy.load)},
                         {"exec_ratio", mem(o.fuzzy.exec_ratio)},
                         {"battery", mem(o.fuzzy.battery)}}}};
  j["edge_server"] = {{"gips", c.edge_server.gips}, {"cores", c.edge_server.cores}};
  j["capabilities"] = {{"tags", c.capabilities.tags}, {"tag_probability", c.capabilities.tag_probability}};
  j["exclude_in_flight"] = c.exclude_in_flight;
  return j.dump(2) + "\n";
}

std::vector<int> apportion(std::span<const double> fractions, int total) {
  constexpr double kEps = 1e-9;
  std::vector<int> counts(fractions.size(), 0);
  std::vector<double> remainder(fractions.size(), 0.0);
  int assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double quota = fractions[i] * total;
    const double whole = std::floor(quota + kEps);
    counts[i] = static_cast<int>(whole);
    remainder[i] = std::max(0.0, quota - whole);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(fractions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b] + kEps;
  });
  for (std::size_t k = 0; assigned < total && k < order.size(); ++k) {
    if (remainder[order[k]] <= kEps) break;
    ++counts[order[k]];
    ++assigned;
  }
  return counts;
}

std::vector<DeviceState> build_population(const ScenarioConfig& cfg, Rng& rng) {
  const auto counts = apportion(cfg.device_mix, cfg.device_count);
  std::vector<DeviceState> devices;
  devices.reserve(static_cast<std::size_t>(cfg.device_count));
  for (std::size_t k = 0; k < kEdgeDeviceKinds.size(); ++k) {
    for (int n = 0; n < counts[k]; ++n) {
      DeviceState d;
      d.id = static_cast<DeviceId>(devices.size());
      d.spec = default_spec(kEdgeDeviceKinds[k], cfg.energy.mobile_sensor_capacity_wh, cfg.energy.sensor_power_w);
      d.position = {rng.uniform(0.0, cfg.mobility.area.width_m), rng.uniform(0.0, cfg.mobility.area.height_m)};
      const double charge = rng.uniform(cfg.energy.initial_charge_min, cfg.energy.initial_charge_max);
      if (d.spec.battery_powered) d.battery_wh = d.spec.battery_capacity_wh * charge;
      for (int t = 0; t < cfg.capabilities.tags; ++t) {
        if (rng.bernoulli(cfg.capabilities.tag_probability)) d.tags |= static_cast<TagSet>(1U << t);
      }
      if (d.spec.is_computing()) d.processor = Processor(d.spec.cpu_cores, cfg.policy.priority);
      devices.push_back(std::move(d));
    }
  }
  if (cfg.emergency) {
    // Partial Fisher-Yates to pick the partitioned subset.
    std::vector<std::size_t> idx(devices.size());
    std::iota(idx.begin(), idx.end(), 0);
    const auto cut = static_cast<std::size_t>(std::floor(cfg.emergency_fraction * static_cast<double>(devices.size())));
    for (std::size_t i = 0; i < cut; ++i) {
      const std::size_t j = i + rng.index(idx.size() - i);
      std::swap(idx[i], idx[j]);
      devices[idx[i]].main_partitioned = true;
    }
  }
  return devices;
}

}  // namespace pec
