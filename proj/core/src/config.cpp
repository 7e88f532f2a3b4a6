#include "hexcell/config.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/sha.h>

#include "json.hpp"

namespace hexcell {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and complains about anything left over.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError(name_ + ": expected an object");
  }

  template <class T>
  void Get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(name_ + "." + key + ": " + e.what());
    }
  }

  void GetRange(const char* key, Range& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_number()) {
      out = Range::Fixed(it->get<double>());
    } else if (it->is_array() && it->size() == 2 && (*it)[0].is_number() &&
               (*it)[1].is_number()) {
      out = {(*it)[0].get<double>(), (*it)[1].get<double>()};
    } else {
      throw ConfigError(name_ + "." + key + ": expected a number or [lo, hi]");
    }
  }

  const json* Child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(name_ + ": unknown key '" + it.key() + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

const char* LosName(LosModelKind k) {
  switch (k) {
    case LosModelKind::kAlwaysLos:
      return "always_los";
    case LosModelKind::kAlwaysNlos:
      return "always_nlos";
    case LosModelKind::kTr38901Uma:
      return "tr38901_uma";
    case LosModelKind::kFixedProbability:
      return "fixed";
  }
  return "?";
}

LosModelKind LosFromName(const std::string& s) {
  if (s == "always_los") return LosModelKind::kAlwaysLos;
  if (s == "always_nlos") return LosModelKind::kAlwaysNlos;
  if (s == "tr38901_uma") return LosModelKind::kTr38901Uma;
  if (s == "fixed") return LosModelKind::kFixedProbability;
  throw ConfigError("radio.los_model: unknown model '" + s + "'");
}

const char* FadingName(FadingMode f) {
  switch (f) {
    case FadingMode::kOff:
      return "off";
    case FadingMode::kLinear:
      return "linear";
    case FadingMode::kStrict:
      return "strict";
  }
  return "?";
}

FadingMode FadingFromName(const std::string& s) {
  if (s == "off") return FadingMode::kOff;
  if (s == "linear") return FadingMode::kLinear;
  if (s == "strict") return FadingMode::kStrict;
  throw ConfigError("radio.fading: unknown mode '" + s + "'");
}

json RangeJson(const Range& r) { return json::array({r.lo, r.hi}); }

void ParseScenario(const json& j, ScenarioConfig& s) {
  Section sec(j, "scenario");
  sec.Get("map_size_m", s.map_size_m);
  sec.Get("grid_side", s.grid_side);
  sec.Get("num_ues", s.num_ues);
  sec.Get("slot_length", s.slot_length);
  sec.Get("num_slots", s.num_slots);
  sec.Get("frequency_plan", s.frequency_plan);
  sec.Get("seed", s.seed);
  sec.Get("request_bytes", s.request_bytes);
  sec.Get("request_overrides", s.request_overrides);
  if (const json* ou = sec.Child("ou_params")) {
    Section o(*ou, "scenario.ou_params");
    o.Get("iota", s.ou_params.iota);
    o.Get("volatility", s.ou_params.volatility);
    o.GetRange("mu_x", s.ou_params.mu_x);
    o.GetRange("mu_y", s.ou_params.mu_y);
    o.GetRange("sigma_x", s.ou_params.sigma_x);
    o.GetRange("sigma_y", s.ou_params.sigma_y);
    o.Finish();
  }
  sec.Finish();
}

void ParseRadio(const json& j, RadioConfig& r) {
  Section sec(j, "radio");
  sec.Get("tx_power_dbm", r.tx_power_dbm);
  sec.Get("g_tx_db", r.g_tx_db);
  sec.Get("g_rx_db", r.g_rx_db);
  sec.Get("noise_dbm", r.noise_dbm);
  sec.Get("rayleigh_scale", r.rayleigh_scale);
  sec.Get("min_distance_m", r.min_distance_m);
  std::string los = LosName(r.los_model.kind);
  sec.Get("los_model", los);
  r.los_model.kind = LosFromName(los);
  sec.Get("los_probability", r.los_model.p);
  std::string fading = FadingName(r.fading);
  sec.Get("fading", fading);
  r.fading = FadingFromName(fading);
  sec.Finish();
}

void ParseHandover(const json& j, HandoverTiming& t) {
  Section sec(j, "handover");
  sec.Get("h1", t.h1);
  sec.Get("h2", t.h2);
  sec.Get("retune_slots", t.retune_slots);
  sec.Finish();
}

void ParsePpo(const json& j, PpoConfig& p) {
  Section sec(j, "ppo");
  sec.Get("gamma", p.gamma);
  sec.Get("xi", p.xi);
  sec.Get("clip", p.clip);
  sec.Get("lr_policy", p.lr_policy);
  sec.Get("lr_value", p.lr_value);
  sec.Get("epochs", p.epochs);
  sec.Get("minibatch", p.minibatch);
  sec.Get("entropy_coef", p.entropy_coef);
  std::string opt = p.optimizer == OptimizerKind::kAdam ? "adam" : "sgd";
  sec.Get("optimizer", opt);
  if (opt == "sgd") {
    p.optimizer = OptimizerKind::kSgd;
  } else if (opt == "adam") {
    p.optimizer = OptimizerKind::kAdam;
  } else {
    throw ConfigError("ppo.optimizer: expected sgd or adam");
  }
  sec.Get("adam_beta1", p.adam_beta1);
  sec.Get("adam_beta2", p.adam_beta2);
  sec.Get("adam_eps", p.adam_eps);
  sec.Get("normalize_advantages", p.normalize_advantages);
  sec.Get("d_model", p.d_model);
  sec.Get("d_key", p.d_key);
  sec.Get("hidden", p.hidden);
  sec.Get("head_init_scale", p.head_init_scale);
  sec.Finish();
}

}  // namespace

void ValidateRunConfig(const RunConfig& c) {
  ValidateEnvConfig(c.env);
  ValidatePpo(c.ppo);
  ValidateMetrics(c.metrics);
  if (c.training.checkpoint_every < 0) {
    throw ConfigError("training.checkpoint_every must be >= 0");
  }
}

RunConfig ParseConfig(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section root(j, "config");
  if (const json* s = root.Child("scenario")) ParseScenario(*s, c.env.scenario);
  if (const json* s = root.Child("radio")) ParseRadio(*s, c.env.radio);
  if (const json* s = root.Child("handover")) ParseHandover(*s, c.env.timing);
  if (const json* s = root.Child("observation")) {
    Section o(*s, "observation");
    o.Get("grid_length_m", c.env.observation.grid_length_m);
    o.Get("kappa", c.env.observation.kappa);
    o.Get("eta", c.env.observation.eta);
    o.Finish();
  }
  if (const json* s = root.Child("consensus")) {
    Section o(*s, "consensus");
    o.Get("chi_m", c.env.chi_m);
    o.Get("lazy", c.env.lazy_consensus);
    o.Finish();
  }
  if (const json* s = root.Child("env")) {
    Section o(*s, "env");
    o.Get("action_period", c.env.action_period);
    o.Get("exact_average_reward", c.env.exact_average_reward);
    o.Get("rerandomize_frequencies", c.env.rerandomize_frequencies);
    std::string empty = "zero";
    o.Get("empty_cell_load", empty);
    if (empty != "zero") throw ConfigError("env.empty_cell_load: only 'zero' is supported");
    o.Finish();
  }
  if (const json* s = root.Child("ppo")) ParsePpo(*s, c.ppo);
  if (const json* s = root.Child("metrics")) {
    Section o(*s, "metrics");
    o.Get("ping_pong_slots", c.metrics.ping_pong_slots);
    o.Get("low_rate_bytes_per_s", c.metrics.low_rate_bytes_per_s);
    o.Finish();
  }
  if (const json* s = root.Child("training")) {
    Section o(*s, "training");
    o.Get("checkpoint_every", c.training.checkpoint_every);
    o.Finish();
  }
  root.Finish();
  ValidateRunConfig(c);
  return c;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string DumpConfig(const RunConfig& c) {
  const auto& s = c.env.scenario;
  const auto& r = c.env.radio;
  const auto& p = c.ppo;
  json j;
  j["scenario"] = {
      {"map_size_m", s.map_size_m},
      {"grid_side", s.grid_side},
      {"num_ues", s.num_ues},
      {"slot_length", s.slot_length},
      {"num_slots", s.num_slots},
      {"frequency_plan", s.frequency_plan},
      {"seed", s.seed},
      {"request_bytes", s.request_bytes},
      {"request_overrides", s.request_overrides},
      {"ou_params",
       {{"iota", s.ou_params.iota},
        {"volatility", s.ou_params.volatility},
        {"mu_x", RangeJson(s.ou_params.mu_x)},
        {"mu_y", RangeJson(s.ou_params.mu_y)},
        {"sigma_x", RangeJson(s.ou_params.sigma_x)},
        {"sigma_y", RangeJson(s.ou_params.sigma_y)}}}};
  j["radio"] = {{"tx_power_dbm", r.tx_power_dbm},
                {"g_tx_db", r.g_tx_db},
                {"g_rx_db", r.g_rx_db},
                {"noise_dbm", r.noise_dbm},
                {"rayleigh_scale", r.rayleigh_scale},
                {"min_distance_m", r.min_distance_m},
                {"los_model", LosName(r.los_model.kind)},
                {"los_probability", r.los_model.p},
                {"fading", FadingName(r.fading)}};
  j["handover"] = {{"h1", c.env.timing.h1},
                   {"h2", c.env.timing.h2},
                   {"retune_slots", c.env.timing.retune_slots}};
  j["observation"] = {{"grid_length_m", c.env.observation.grid_length_m},
                      {"kappa", c.env.observation.kappa},
                      {"eta", c.env.observation.eta}};
  j["consensus"] = {{"chi_m", c.env.chi_m}, {"lazy", c.env.lazy_consensus}};
  j["env"] = {{"action_period", c.env.action_period},
              {"exact_average_reward", c.env.exact_average_reward},
              {"rerandomize_frequencies", c.env.rerandomize_frequencies},
              {"empty_cell_load", "zero"}};
  j["ppo"] = {{"gamma", p.gamma},
              {"xi", p.xi},
              {"clip", p.clip},
              {"lr_policy", p.lr_policy},
              {"lr_value", p.lr_value},
              {"epochs", p.epochs},
              {"minibatch", p.minibatch},
              {"entropy_coef", p.entropy_coef},
              {"optimizer", p.optimizer == OptimizerKind::kAdam ? "adam" : "sgd"},
              {"adam_beta1", p.adam_beta1},
              {"adam_beta2", p.adam_beta2},
              {"adam_eps", p.adam_eps},
              {"normalize_advantages", p.normalize_advantages},
              {"d_model", p.d_model},
              {"d_key", p.d_key},
              {"hidden", p.hidden},
              {"head_init_scale", p.head_init_scale}};
  j["metrics"] = {{"ping_pong_slots", c.metrics.ping_pong_slots},
                  {"low_rate_bytes_per_s", c.metrics.low_rate_bytes_per_s}};
  j["training"] = {{"checkpoint_every", c.training.checkpoint_every}};
  return j.dump(2) + "\n";
}

std::string GitBlobHash(const std::string& text) {
  const std::string blob = "blob " + std::to_string(text.size()) + '\0' + text;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  std::ostringstream os;
  for (unsigned char b : digest) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
  }
  return os.str();
}

std::string ConfigHash(const RunConfig& c) { return GitBlobHash(DumpConfig(c)); }

}  // namespace hexcell
