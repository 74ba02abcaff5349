#include "byrdtd/config.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "byrdtd/error.hpp"

namespace byrdtd {

namespace {

class Section {
 public:
  Section(const YAML::Node& node, std::string name, const std::string& source)
      : node_(node), name_(std::move(name)), source_(source) {
    if (node_ && !node_.IsMap()) fail(node_, "section must be a mapping");
  }

  bool present() const { return static_cast<bool>(node_); }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!node_) return;
    const YAML::Node v = node_[key];
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      fail(v, std::string("field '") + key + "' has the wrong type");
    }
  }

  void read_seed(const char* key, std::uint64_t& out) { read<std::uint64_t>(key, out); }

  // Rejects keys nobody asked for; typos would otherwise be silently ignored.
  void finish() const {
    if (!node_) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(kv.first, "unknown field '" + key + "'");
    }
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    const YAML::Mark m = at.Mark();
    std::ostringstream os;
    os << source_ << ":" << (m.line + 1) << ": " << name_ << ": " << msg;
    throw Error(ErrorCode::ParseError, os.str());
  }

  const YAML::Node& node() const { return node_; }

 private:
  YAML::Node node_;
  std::string name_;
  const std::string& source_;
  std::set<std::string> seen_;
};

template <typename E>
E choose(Section& sec, const char* key, const std::string& value,
         std::initializer_list<std::pair<const char*, E>> options) {
  for (const auto& [name, e] : options)
    if (value == name) return e;
  std::string allowed;
  for (const auto& opt : options) allowed += std::string(allowed.empty() ? "" : ", ") + opt.first;
  sec.fail(sec.node()[key], std::string("field '") + key + "' must be one of: " + allowed);
}

}  // namespace

const char* aggregation_name(Aggregation agg) { return agg == Aggregation::Mean ? "mean" : "trim"; }

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void ExperimentConfig::validate() const {
  if (steps < 1) throw Error(ErrorCode::InvalidSpec, "run.steps must be at least 1");
  if (trials < 1) throw Error(ErrorCode::InvalidSpec, "run.trials must be at least 1");
  schedule.validate();
  attack.validate();
  TdParams{lambda, 0.5}.validate();
}

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::ParseError, source_name + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw Error(ErrorCode::ParseError, source_name + ":1: config must be a mapping of sections");

  ExperimentConfig cfg;
  cfg.source_text = text;

  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    static const std::set<std::string> known{"environment", "topology", "algorithm", "attack", "schedule", "run"};
    if (!known.count(key))
      throw Error(ErrorCode::ParseError,
                  source_name + ":" + std::to_string(kv.first.Mark().line + 1) + ": unknown section '" + key + "'");
  }

  {
    Section sec(root["environment"], "environment", source_name);
    std::string kind = "random_mrp";
    sec.read("kind", kind);
    EnvironmentConfig& env = cfg.environment;
    env.kind = choose<EnvironmentKind>(sec, "kind", kind,
                                       {{"random_mrp", EnvironmentKind::RandomMrp},
                                        {"grid", EnvironmentKind::GridNavigation},
                                        {"file", EnvironmentKind::ModelFile}});
    double discount = 0.95;
    std::uint64_t seed = 1;
    sec.read("discount", discount);
    sec.read_seed("seed", seed);
    env.random.discount = env.grid.discount = discount;
    env.random.seed = env.grid.seed = seed;
    sec.read("num_states", env.random.num_states);
    int feature_dim = -1;
    sec.read("feature_dim", feature_dim);
    if (feature_dim > 0) env.random.feature_dim = env.grid.feature_dim = feature_dim;
    sec.read("reward_scale", env.random.reward_scale);
    sec.read("reward_heterogeneity", env.random.reward_heterogeneity);
    sec.read("realizable", env.random.realizable);
    sec.read("grid_side", env.grid.grid_side);
    sec.read("num_movers", env.grid.num_movers);
    sec.read("collision_penalty", env.grid.collision_penalty);
    sec.read("path", env.path);
    sec.finish();
    if (env.kind == EnvironmentKind::ModelFile && env.path.empty())
      sec.fail(sec.node(), "file environments need 'path'");
  }
  {
    Section sec(root["topology"], "topology", source_name);
    std::string kind = "complete";
    sec.read("kind", kind);
    TopologyConfig& t = cfg.topology;
    t.kind = choose<TopologyKind>(sec, "kind", kind,
                                  {{"complete", TopologyKind::Complete},
                                   {"erdos_renyi", TopologyKind::ErdosRenyi},
                                   {"preset", TopologyKind::Preset},
                                   {"circulant", TopologyKind::Circulant},
                                   {"file", TopologyKind::TopologyFile}});
    sec.read("honest", t.honest);
    sec.read("byzantine", t.byzantine);
    sec.read("trim", t.trim);
    sec.read("theorem_mode", t.theorem_mode);
    sec.read("agents", t.agents);
    sec.read("edge_prob", t.edge_prob);
    sec.read("byzantine_prob", t.byzantine_prob);
    std::string rule = "global";
    sec.read("trim_rule", rule);
    t.trim_rule = choose<TrimRule>(sec, "trim_rule", rule,
                                   {{"global", TrimRule::GlobalByzantineCount}, {"local", TrimRule::LocalByzantineCount}});
    sec.read("name", t.preset);
    sec.read("in_degree", t.in_degree);
    sec.read("path", t.path);
    sec.finish();
    if (t.kind == TopologyKind::TopologyFile && t.path.empty()) sec.fail(sec.node(), "file topologies need 'path'");
  }
  {
    Section sec(root["algorithm"], "algorithm", source_name);
    std::string agg = "trim";
    sec.read("aggregation", agg);
    cfg.aggregation = choose<Aggregation>(sec, "aggregation", agg, {{"mean", Aggregation::Mean}, {"trim", Aggregation::Trim}});
    sec.read("lambda", cfg.lambda);
    sec.finish();
  }
  {
    Section sec(root["attack"], "attack", source_name);
    std::string kind = "none";
    sec.read("kind", kind);
    cfg.attack.kind = choose<AttackKind>(sec, "kind", kind,
                                         {{"none", AttackKind::None},
                                          {"sign_flip", AttackKind::SignFlip},
                                          {"same_value", AttackKind::SameValue},
                                          {"gaussian_noise", AttackKind::GaussianNoise}});
    sec.read("noise_std", cfg.attack.noise_std);
    std::string victim = "per_step";
    sec.read("victim", victim);
    cfg.attack.victim_per_step = choose<bool>(sec, "victim", victim, {{"per_step", true}, {"fixed", false}});
    sec.finish();
  }
  {
    Section sec(root["schedule"], "schedule", source_name);
    std::string kind = "experimental";
    sec.read("kind", kind);
    cfg.schedule.kind = choose<ScheduleKind>(sec, "kind", kind,
                                             {{"theoretical", ScheduleKind::Theoretical},
                                              {"experimental", ScheduleKind::Experimental}});
    sec.read("eta", cfg.schedule.eta);
    sec.read("k0", cfg.schedule.k0);
    sec.read("c", cfg.schedule.c);
    sec.finish();
  }
  {
    Section sec(root["run"], "run", source_name);
    sec.read("steps", cfg.steps);
    sec.read("trials", cfg.trials);
    sec.read_seed("master_seed", cfg.master_seed);
    sec.read("output", cfg.output);
    sec.finish();
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, source_name + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

}  // namespace byrdtd
