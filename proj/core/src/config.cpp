#include "franson/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace franson {

namespace {

using ordered_json = nlohmann::ordered_json;

void reject_unknown_keys(const ordered_json& object,
                         const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : object.items()) {
    if (known.count(item.key()) == 0) {
      throw std::invalid_argument("config: unknown key \"" + item.key() +
                                  "\" in " + where);
    }
  }
}

template <typename T>
void read_field(const ordered_json& object, const char* key, T& out) {
  if (!object.contains(key)) return;
  try {
    out = object.at(key).get<T>();
  } catch (const ordered_json::exception& e) {
    throw std::invalid_argument("config: bad value for \"" +
                                std::string(key) + "\": " + e.what());
  }
}

}  // namespace

timing::TimingScales Config::scales() const {
  return timing::TimingScales(pulse_width_ns, arm_delay_ns, coherence_time_ns,
                              lambda_p_um);
}

mc::RunSpec Config::run_spec() const { return {seed, n_trials, batch_size}; }

Config Config::from_json_text(const std::string& text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw std::invalid_argument(std::string("config: parse error: ") +
                                e.what());
  }
  if (!root.is_object()) {
    throw std::invalid_argument("config: top level must be an object");
  }
  reject_unknown_keys(root,
                      {"lambda_p_um", "scales", "window_ns", "seed",
                       "n_trials", "batch_size", "output_path"},
                      "top level");

  Config cfg;
  read_field(root, "lambda_p_um", cfg.lambda_p_um);
  if (root.contains("scales")) {
    const ordered_json& scales = root.at("scales");
    if (!scales.is_object()) {
      throw std::invalid_argument("config: \"scales\" must be an object");
    }
    reject_unknown_keys(
        scales, {"pulse_width_ns", "arm_delay_ns", "coherence_time_ns"},
        "\"scales\"");
    read_field(scales, "pulse_width_ns", cfg.pulse_width_ns);
    read_field(scales, "arm_delay_ns", cfg.arm_delay_ns);
    read_field(scales, "coherence_time_ns", cfg.coherence_time_ns);
  }
  read_field(root, "window_ns", cfg.window_ns);
  read_field(root, "seed", cfg.seed);
  read_field(root, "n_trials", cfg.n_trials);
  read_field(root, "batch_size", cfg.batch_size);
  read_field(root, "output_path", cfg.output_path);

  if (cfg.n_trials < 1) {
    throw std::invalid_argument("config: n_trials must be >= 1");
  }
  if (cfg.batch_size < 1) {
    throw std::invalid_argument("config: batch_size must be >= 1");
  }
  cfg.scales();  // validates positivity and the tau < arm delay < pulse order
  if (!(cfg.window_ns > 0.0 && cfg.window_ns < cfg.arm_delay_ns)) {
    throw std::invalid_argument(
        "config: window_ns must satisfy 0 < window < arm_delay_ns");
  }
  return cfg;
}

Config Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open \"" + path + "\"");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string Config::to_json_text() const {
  ordered_json root;
  root["lambda_p_um"] = lambda_p_um;
  root["scales"] = {{"pulse_width_ns", pulse_width_ns},
                    {"arm_delay_ns", arm_delay_ns},
                    {"coherence_time_ns", coherence_time_ns}};
  root["window_ns"] = window_ns;
  root["seed"] = seed;
  root["n_trials"] = n_trials;
  root["batch_size"] = batch_size;
  root["output_path"] = output_path;
  return root.dump(2) + "\n";
}

}  // namespace franson
