#include "slowobs/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace slowobs {

using nlohmann::json;

RunConfig RunConfig::example2_defaults() {
  RunConfig c;
  c.model = ModelKind::lotka_volterra_example2;
  c.epsilon = 0.1;
  c.discount = 0.1;
  c.y0 = {0.8916, 3.1370};
  c.z_lo = -3.0;
  c.z_hi = -2.05;
  c.stop_level = -2.05;
  return c;
}

RunConfig RunConfig::example1_defaults() {
  RunConfig c;
  c.model = ModelKind::rotation_example1;
  c.epsilon = 0.05;
  c.discount = 0.1;
  c.y0 = {2.0, 0.0};
  c.z_lo = 1.0;
  c.z_hi = 4.0;
  c.stop_level.reset();
  c.horizon = 20.0;
  return c;
}

void RunConfig::validate() const {
  if (schema_version != 1) throw ConfigError("schema_version: must be 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("epsilon: must be in (0, 1)");
  if (!(discount > 0.0)) throw ConfigError("discount: must be > 0");
  if (y0.size() != 2) throw ConfigError("y0: expected 2 components");
  if (!(z_lo < z_hi)) throw ConfigError("z_box: need z_lo < z_hi");
  if (basis_n < 1 || basis_n > 32) throw ConfigError("basis_n: must be in [1, 32]");
  if (basis_degree < 0 || basis_degree > 12)
    throw ConfigError("basis_degree: must be in [0, 12]");
  if (z_grid_size < 2 || z_grid_size > 512)
    throw ConfigError("z_grid_size: must be in [2, 512]");
  if (control_grid_size < 2 || control_grid_size > 1025)
    throw ConfigError("control_grid_size: must be in [2, 1025]");
  if (orbit_nodes < 64 || orbit_nodes > 65536)
    throw ConfigError("orbit_nodes: must be in [64, 65536]");
  if (!(dt > 0.0 && dt <= 0.1)) throw ConfigError("dt: must be in (0, 0.1]");
  if (!(event_tol > 0.0)) throw ConfigError("event_tol: must be > 0");
  if (!(exchange_tol > 0.0)) throw ConfigError("exchange_tol: must be > 0");
  if (exchange_max_iterations < 1)
    throw ConfigError("exchange_max_iterations: must be >= 1");
  if (!(horizon > 0.0)) throw ConfigError("horizon: must be > 0");
  if (sweep_eps.empty()) throw ConfigError("sweep_eps: must be non-empty");
  for (std::size_t i = 0; i < sweep_eps.size(); ++i) {
    if (!(sweep_eps[i] > 0.0 && sweep_eps[i] < 1.0))
      throw ConfigError("sweep_eps: entries must be in (0, 1)");
    if (i > 0 && !(sweep_eps[i] < sweep_eps[i - 1]))
      throw ConfigError("sweep_eps: must be strictly decreasing");
  }
  if (!(sweep_horizon > 0.0)) throw ConfigError("sweep_horizon: must be > 0");
  problem();  // ProblemSpec-level checks (z0 = F(y0), box membership)
}

ProblemSpec RunConfig::problem() const {
  ProblemSpec p;
  p.model = ModelSpec::builtin(model);
  p.epsilon = epsilon;
  p.discount = discount;
  p.y0 = y0;
  const Vec derived = observable(p.model, y0);
  if (z0) {
    if (std::abs(*z0 - derived[0]) > 1e-9)
      throw ConfigError("z0: does not equal F(y0)");
    p.z0 = {*z0};
  } else {
    p.z0 = derived;
  }
  p.z_lo = {z_lo};
  p.z_hi = {z_hi};
  if (stop_level) p.stop_level = Vec{*stop_level};
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  return p;
}

namespace {

const std::set<std::string> kKnownKeys = {
    "schema_version", "model",        "epsilon",
    "discount",       "y0",           "z_box",
    "z0",             "stop_level",   "basis_n",
    "basis_degree",   "z_grid_size",  "control_grid_size",
    "orbit_nodes",    "dt",           "event_tol",
    "exchange_tol",   "exchange_max_iterations",
    "horizon",        "sweep_eps",    "sweep_horizon",
    "seed",           "out_dir"};

template <typename T>
void read_if(const json& j, const char* key, T& into) {
  if (j.contains(key)) {
    try {
      into = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string(key) + ": " + e.what());
    }
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": parse error: " + e.what());
  }
  if (!j.is_object()) throw ConfigError(origin + ": expected a JSON object");
  for (const auto& item : j.items())
    if (!kKnownKeys.count(item.key()))
      throw ConfigError(origin + ": unknown key '" + item.key() + "'");
  if (!j.contains("schema_version"))
    throw ConfigError(origin + ": missing schema_version");
  if (!j.contains("model")) throw ConfigError(origin + ": missing model");

  RunConfig c;
  read_if(j, "schema_version", c.schema_version);
  std::string model_str;
  read_if(j, "model", model_str);
  try {
    c.model = model_from_name(model_str);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  // model-dependent defaults for the physical fields
  const RunConfig base = c.model == ModelKind::rotation_example1
                             ? RunConfig::example1_defaults()
                             : RunConfig::example2_defaults();
  c.epsilon = base.epsilon;
  c.discount = base.discount;
  c.y0 = base.y0;
  c.z_lo = base.z_lo;
  c.z_hi = base.z_hi;
  c.stop_level = base.stop_level;
  c.horizon = base.horizon;

  read_if(j, "epsilon", c.epsilon);
  read_if(j, "discount", c.discount);
  read_if(j, "y0", c.y0);
  if (j.contains("z_box")) {
    Vec box;
    read_if(j, "z_box", box);
    if (box.size() != 2) throw ConfigError("z_box: expected [z_lo, z_hi]");
    c.z_lo = box[0];
    c.z_hi = box[1];
  }
  if (j.contains("z0")) {
    double v = 0.0;
    read_if(j, "z0", v);
    c.z0 = v;
  }
  if (j.contains("stop_level")) {
    double v = 0.0;
    read_if(j, "stop_level", v);
    c.stop_level = v;
  }
  read_if(j, "basis_n", c.basis_n);
  read_if(j, "basis_degree", c.basis_degree);
  read_if(j, "z_grid_size", c.z_grid_size);
  read_if(j, "control_grid_size", c.control_grid_size);
  read_if(j, "orbit_nodes", c.orbit_nodes);
  read_if(j, "dt", c.dt);
  read_if(j, "event_tol", c.event_tol);
  read_if(j, "exchange_tol", c.exchange_tol);
  read_if(j, "exchange_max_iterations", c.exchange_max_iterations);
  read_if(j, "horizon", c.horizon);
  read_if(j, "sweep_eps", c.sweep_eps);
  read_if(j, "sweep_horizon", c.sweep_horizon);
  read_if(j, "seed", c.seed);
  read_if(j, "out_dir", c.out_dir);
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (buf.str().empty()) throw ConfigError(path + ": parse error: empty file");
  return parse_config(buf.str(), path);
}

}  // namespace slowobs
