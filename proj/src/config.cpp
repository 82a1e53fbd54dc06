#include "wlsim/config.hpp"

#include <fstream>

namespace wlsim::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

const json& need(const json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end()) fail(field, "missing");
  return *it;
}

double need_num(const json& j, const char* field) {
  const json& v = need(j, field);
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

int to_node_id(const json& v, const char* field, int n) {
  if (!v.is_number_integer()) fail(field, "expected an integer node id");
  const int id = v.get<int>();
  if (id < 1 || id > n)
    fail(field, "node id " + std::to_string(id) + " outside [1, " +
                    std::to_string(n) + "]");
  return id - 1;
}

fault::RandomSpec parse_random(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object {lo, hi}");
  fault::RandomSpec r{need_num(j, "lo"), need_num(j, "hi")};
  if (!(r.lo <= r.hi)) fail(field, "needs lo <= hi");
  return r;
}

topo::TopologyProvider parse_topology(const json& j) {
  if (!j.is_object()) fail("topology", "expected an object");
  const std::string type = need(j, "type").get<std::string>();
  const json& nj = need(j, "n");
  if (!nj.is_number_integer() || nj.get<int>() <= 0)
    fail("topology.n", "expected a positive integer");
  const int n = nj.get<int>();
  if (type == "fixed") {
    const bool symmetric = j.value("symmetric", true);
    const json& ej = need(j, "edges");
    if (!ej.is_array()) fail("topology.edges", "expected an array of pairs");
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : ej) {
      if (!e.is_array() || e.size() != 2)
        fail("topology.edges", "each edge must be a [from, to] pair");
      const int a = to_node_id(e[0], "topology.edges", n);
      const int b = to_node_id(e[1], "topology.edges", n);
      if (a == b) fail("topology.edges", "self-loops are not allowed");
      edges.emplace_back(a, b);
    }
    return topo::TopologyProvider::fixed(
        topo::Digraph::from_edges(n, edges, symmetric));
  }
  if (type == "stochastic") {
    const double p = need_num(j, "edge_prob");
    if (!(p >= 0.0 && p <= 1.0))
      fail("topology.edge_prob", "must lie in [0, 1]");
    return topo::TopologyProvider::stochastic(n, p, j.value("symmetric", true));
  }
  fail("topology.type", "expected \"fixed\" or \"stochastic\"");
}

std::vector<fault::NodeSpec> parse_nodes(const json& j, int n) {
  std::vector<fault::NodeSpec> nodes(static_cast<size_t>(n));
  if (!j.contains("nodes")) return nodes;
  const json& nj = j.at("nodes");
  if (!nj.is_array()) fail("nodes", "expected an array");
  for (const auto& e : nj) {
    const int id = to_node_id(need(e, "id"), "nodes.id", n);
    const std::string kind = need(e, "kind").get<std::string>();
    fault::NodeSpec spec;
    if (kind == "normal") {
      spec = fault::NodeSpec::normal();
    } else if (kind == "pfn") {
      spec.kind = fault::NodeKind::pfn;
    } else if (kind == "ifn") {
      spec.kind = fault::NodeKind::ifn;
      const double p = need_num(e, "p_normal");
      if (!(p >= 0.0 && p <= 1.0)) fail("nodes.p_normal", "must lie in [0, 1]");
      spec.p_normal = p;
    } else {
      fail("nodes.kind", "expected \"normal\", \"pfn\" or \"ifn\"");
    }
    if (e.contains("random"))
      spec.random = parse_random(e.at("random"), "nodes.random");
    nodes[static_cast<size_t>(id)] = spec;
  }
  return nodes;
}

void parse_faulty_rows(const json& j, int n, double& total,
                       std::map<int, std::map<int, double>>& explicit_rows) {
  if (!j.contains("faulty_rows")) return;
  const json& f = j.at("faulty_rows");
  if (f.contains("total")) {
    total = need_num(f, "total");
    if (!(total >= 0.0 && total < 1.0))
      fail("faulty_rows.total",
           "faulty initial rows must satisfy sum a_ij(0) < 1");
  }
  if (f.contains("explicit")) {
    for (const auto& [node_str, row] : f.at("explicit").items()) {
      const int node = to_node_id(json(std::stoi(node_str)),
                                  "faulty_rows.explicit", n);
      std::map<int, double> r;
      double sum = 0.0;
      for (const auto& [j_str, v] : row.items()) {
        const int tgt = to_node_id(json(std::stoi(j_str)),
                                   "faulty_rows.explicit", n);
        r[tgt] = v.get<double>();
        sum += v.get<double>();
      }
      if (sum >= 1.0)
        fail("faulty_rows.explicit",
             "faulty initial rows must satisfy sum a_ij(0) < 1");
      explicit_rows[node] = std::move(r);
    }
  }
}

std::vector<int64_t> parse_steps(const json& j, const char* field) {
  std::vector<int64_t> steps;
  if (!j.contains(field)) return steps;
  for (const auto& v : j.at(field)) steps.push_back(v.get<int64_t>());
  return steps;
}

sim::SimConfig parse_consensus(const json& j, uint64_t seed) {
  sim::SimConfig cfg;
  cfg.seed = seed;
  cfg.topology = parse_topology(need(j, "topology"));
  const int n = cfg.topology.n();
  cfg.nodes = parse_nodes(j, n);
  cfg.noise.bound = j.value("noise_bound", 10.0);
  if (!(cfg.noise.bound >= 0.0)) fail("noise_bound", "must be >= 0");
  if (j.contains("reward")) {
    cfg.reward.theta0 = need_num(j.at("reward"), "theta0");
    cfg.reward.theta_slope = need_num(j.at("reward"), "theta_slope");
  }
  if (j.contains("gamma")) {
    cfg.gamma = need_num(j, "gamma");
    if (!cfg.topology.is_fixed() && !(cfg.gamma > 0.0 && cfg.gamma < 1.0))
      fail("gamma", "must lie in (0, 1)");
  }
  if (j.contains("init_state")) {
    const json& is = j.at("init_state");
    if (is.contains("values")) {
      cfg.init.explicit_values = true;
      cfg.init.values = is.at("values").get<std::vector<double>>();
    } else if (is.contains("uniform")) {
      cfg.init.lo = need_num(is.at("uniform"), "lo");
      cfg.init.hi = need_num(is.at("uniform"), "hi");
    } else {
      fail("init_state", "expected {uniform: {lo, hi}} or {values: [...]}");
    }
  }
  cfg.max_iter = static_cast<int64_t>(j.value("max_iter", 1000));
  cfg.snapshot_steps = parse_steps(j, "snapshot_steps");
  parse_faulty_rows(j, n, cfg.faulty_row_total, cfg.faulty_rows_explicit);
  cfg.log_topology = j.value("log_topology", false);
  cfg.track_rootedness = j.value("track_rootedness", false);
  return cfg;
}

clocks::ClockConfig parse_clock(const json& j, uint64_t seed) {
  clocks::ClockConfig cfg;
  cfg.seed = seed;
  cfg.topology = parse_topology(need(j, "topology"));
  cfg.nodes = parse_nodes(j, cfg.topology.n());
  cfg.skew_noise_bound = j.value("skew_noise_bound", cfg.skew_noise_bound);
  cfg.offset_noise_bound =
      j.value("offset_noise_bound", cfg.offset_noise_bound);
  if (j.contains("skew_reward")) {
    cfg.skew_reward.theta0 = need_num(j.at("skew_reward"), "theta0");
    cfg.skew_reward.theta_slope = need_num(j.at("skew_reward"), "theta_slope");
  }
  if (j.contains("offset_reward")) {
    cfg.offset_reward.theta0 = need_num(j.at("offset_reward"), "theta0");
    cfg.offset_reward.theta_slope =
        need_num(j.at("offset_reward"), "theta_slope");
  }
  if (j.contains("alpha_star_init"))
    cfg.alpha_star_init = parse_random(j.at("alpha_star_init"),
                                       "alpha_star_init");
  if (j.contains("beta_star_init"))
    cfg.beta_star_init = parse_random(j.at("beta_star_init"), "beta_star_init");
  cfg.alpha0 = j.value("alpha0", 1.0);
  cfg.beta0 = j.value("beta0", 0.1);
  if (j.contains("random_alpha"))
    cfg.random_alpha = parse_random(j.at("random_alpha"), "random_alpha");
  if (j.contains("random_beta"))
    cfg.random_beta = parse_random(j.at("random_beta"), "random_beta");
  cfg.period = j.value("period", 1.0);
  cfg.max_iter = static_cast<int64_t>(j.value("max_iter", 1000));
  cfg.wla_disabled = j.value("wla_disabled", false);
  cfg.snapshot_steps = parse_steps(j, "snapshot_steps");
  std::map<int, std::map<int, double>> unused;
  parse_faulty_rows(j, cfg.topology.n(), cfg.faulty_row_total, unused);
  cfg.record_rows = j.value("record_rows", false);
  return cfg;
}

json topology_json(const topo::TopologyProvider& t) {
  json j;
  if (t.is_fixed()) {
    j["type"] = "fixed";
    j["n"] = t.n();
    j["symmetric"] = false;  // edges listed directed after a round trip
    json edges = json::array();
    const auto& g = t.fixed_graph();
    for (int i = 0; i < g.n; ++i)
      for (int v : g.in_neighbors(i)) edges.push_back({v + 1, i + 1});
    j["edges"] = std::move(edges);
  } else {
    j["type"] = "stochastic";
    j["n"] = t.n();
    j["edge_prob"] = t.edge_prob();
    j["symmetric"] = t.symmetric();
  }
  return j;
}

json nodes_json(const std::vector<fault::NodeSpec>& nodes) {
  json arr = json::array();
  for (size_t i = 0; i < nodes.size(); ++i) {
    const auto& s = nodes[i];
    if (!s.faulty()) continue;
    json e;
    e["id"] = static_cast<int>(i) + 1;
    e["kind"] = s.kind == fault::NodeKind::pfn ? "pfn" : "ifn";
    if (s.kind == fault::NodeKind::ifn) e["p_normal"] = s.p_normal;
    e["random"] = {{"lo", s.random.lo}, {"hi", s.random.hi}};
    arr.push_back(std::move(e));
  }
  return arr;
}

json consensus_json(const sim::SimConfig& cfg) {
  json j;
  j["topology"] = topology_json(cfg.topology);
  j["nodes"] = nodes_json(cfg.nodes);
  j["noise_bound"] = cfg.noise.bound;
  j["reward"] = {{"theta0", cfg.reward.theta0},
                 {"theta_slope", cfg.reward.theta_slope}};
  j["gamma"] = cfg.gamma;
  if (cfg.init.explicit_values) {
    j["init_state"] = {{"values", cfg.init.values}};
  } else {
    j["init_state"] = {
        {"uniform", {{"lo", cfg.init.lo}, {"hi", cfg.init.hi}}}};
  }
  j["max_iter"] = cfg.max_iter;
  if (!cfg.snapshot_steps.empty()) j["snapshot_steps"] = cfg.snapshot_steps;
  json fr;
  fr["total"] = cfg.faulty_row_total;
  if (!cfg.faulty_rows_explicit.empty()) {
    json ex;
    for (const auto& [node, row] : cfg.faulty_rows_explicit) {
      json r;
      for (const auto& [tgt, v] : row) r[std::to_string(tgt + 1)] = v;
      ex[std::to_string(node + 1)] = std::move(r);
    }
    fr["explicit"] = std::move(ex);
  }
  j["faulty_rows"] = std::move(fr);
  if (cfg.log_topology) j["log_topology"] = true;
  if (cfg.track_rootedness) j["track_rootedness"] = true;
  return j;
}

json clock_json(const clocks::ClockConfig& cfg) {
  json j;
  j["topology"] = topology_json(cfg.topology);
  j["nodes"] = nodes_json(cfg.nodes);
  j["skew_noise_bound"] = cfg.skew_noise_bound;
  j["offset_noise_bound"] = cfg.offset_noise_bound;
  j["skew_reward"] = {{"theta0", cfg.skew_reward.theta0},
                      {"theta_slope", cfg.skew_reward.theta_slope}};
  j["offset_reward"] = {{"theta0", cfg.offset_reward.theta0},
                        {"theta_slope", cfg.offset_reward.theta_slope}};
  j["alpha_star_init"] = {{"lo", cfg.alpha_star_init.lo},
                          {"hi", cfg.alpha_star_init.hi}};
  j["beta_star_init"] = {{"lo", cfg.beta_star_init.lo},
                         {"hi", cfg.beta_star_init.hi}};
  j["alpha0"] = cfg.alpha0;
  j["beta0"] = cfg.beta0;
  j["random_alpha"] = {{"lo", cfg.random_alpha.lo}, {"hi", cfg.random_alpha.hi}};
  j["random_beta"] = {{"lo", cfg.random_beta.lo}, {"hi", cfg.random_beta.hi}};
  j["period"] = cfg.period;
  j["max_iter"] = cfg.max_iter;
  if (cfg.wla_disabled) j["wla_disabled"] = true;
  if (!cfg.snapshot_steps.empty()) j["snapshot_steps"] = cfg.snapshot_steps;
  j["faulty_rows"] = {{"total", cfg.faulty_row_total}};
  if (cfg.record_rows) j["record_rows"] = true;
  return j;
}

}  // namespace

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::consensus: return "consensus";
    case Kind::clock: return "clock";
    case Kind::sweep: return "sweep";
  }
  return "?";
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  const std::string kind = need(j, "kind").get<std::string>();
  cfg.description = j.value("description", "");
  cfg.seed = j.value("seed", uint64_t{1});
  if (j.contains("output")) {
    cfg.output.dir = j.at("output").value("dir", "");
    cfg.output.format = j.at("output").value("format", "csv");
    if (cfg.output.format != "csv" && cfg.output.format != "json")
      fail("output.format", "expected \"csv\" or \"json\"");
  }
  if (kind == "consensus") {
    cfg.kind = Kind::consensus;
    cfg.consensus = parse_consensus(j, cfg.seed);
    cfg.warnings = sim::validate_sim(cfg.consensus);
  } else if (kind == "clock") {
    cfg.kind = Kind::clock;
    cfg.clock = parse_clock(j, cfg.seed);
    cfg.warnings = clocks::validate_clock(cfg.clock);
  } else if (kind == "sweep") {
    cfg.kind = Kind::sweep;
    cfg.sweep.base = parse_consensus(need(j, "base"), cfg.seed);
    const json& ifn = need(j, "ifn_nodes");
    for (const auto& v : ifn)
      cfg.sweep.ifn_nodes.push_back(
          to_node_id(v, "ifn_nodes", cfg.sweep.base.topology.n()));
    cfg.sweep.fault_probs = need(j, "fault_probs").get<std::vector<double>>();
    for (double q : cfg.sweep.fault_probs)
      if (!(q >= 0.0 && q <= 1.0)) fail("fault_probs", "must lie in [0, 1]");
    cfg.sweep.replicas = need(j, "replicas").get<int>();
    if (cfg.sweep.replicas < 1) fail("replicas", "must be >= 1");
    cfg.sweep.threshold = j.value("threshold", 5.0);
    if (!(cfg.sweep.threshold > 0.0)) fail("threshold", "must be > 0");
    for (int node : cfg.sweep.ifn_nodes)
      if (cfg.sweep.base.nodes[static_cast<size_t>(node)].kind !=
          fault::NodeKind::ifn)
        fail("ifn_nodes", "node " + std::to_string(node + 1) +
                              " is not an IFN in the base config");
    cfg.warnings = sim::validate_sim(cfg.sweep.base);
  } else {
    fail("kind", "expected \"consensus\", \"clock\" or \"sweep\"");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("invalid config " + path + ": " + e.what());
  }
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  json j;
  j["kind"] = kind_name(cfg.kind);
  if (!cfg.description.empty()) j["description"] = cfg.description;
  j["seed"] = cfg.seed;
  if (!cfg.output.dir.empty() || cfg.output.format != "csv")
    j["output"] = {{"dir", cfg.output.dir}, {"format", cfg.output.format}};
  switch (cfg.kind) {
    case Kind::consensus:
      j.update(consensus_json(cfg.consensus));
      break;
    case Kind::clock:
      j.update(clock_json(cfg.clock));
      break;
    case Kind::sweep:
      j["base"] = consensus_json(cfg.sweep.base);
      {
        std::vector<int> ids;
        for (int v : cfg.sweep.ifn_nodes) ids.push_back(v + 1);
        j["ifn_nodes"] = ids;
      }
      j["fault_probs"] = cfg.sweep.fault_probs;
      j["replicas"] = cfg.sweep.replicas;
      j["threshold"] = cfg.sweep.threshold;
      break;
  }
  return j;
}

std::string canonical_dump(const ExperimentConfig& cfg) {
  return to_json(cfg).dump();
}

}  // namespace wlsim::harness
