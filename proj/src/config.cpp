#include "brwlab/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "brwlab/errors.hpp"

namespace brwlab {

using nlohmann::json;

namespace {

double number_or_string(const json& j, const char* what) {
  if (j.is_string()) {
    try {
      return std::stod(j.get<std::string>());
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": not a number");
    }
  }
  if (!j.is_number()) throw ConfigError(std::string(what) + ": not a number");
  return j.get<double>();
}

std::string decimal_string(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

ModelConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ModelConfig c;
  try {
    c.schema = j.value("schema", 1);
    if (c.schema != 1) throw ConfigError("unknown schema version");
    c.dimension = j.at("dimension").get<int>();

    const json& k = j.at("kernel");
    c.kernel_type = k.at("type").get<std::string>();
    if (c.kernel_type == "finite_support") {
      for (const json& entry : k.at("jumps")) {
        Jump jump{};
        const json& z = entry.at("z");
        if (int(z.size()) != c.dimension)
          throw ConfigError("jump arity does not match the dimension");
        for (int i = 0; i < c.dimension; ++i)
          jump.z.c[i] = z.at(i).get<int64_t>();
        jump.rate = number_or_string(entry.at("rate"), "jump rate");
        c.jumps.push_back(jump);
      }
    } else if (c.kernel_type == "heavy_tail") {
      c.alpha = number_or_string(k.at("alpha"), "alpha");
      c.total_rate = number_or_string(k.value("total_rate", json(1.0)),
                                      "total_rate");
      c.cutoff = k.value("cutoff", int64_t(0));
    } else if (c.kernel_type != "simple") {
      throw ConfigError("unknown kernel type: " + c.kernel_type);
    }

    const json& off = j.at("offspring");
    for (auto it = off.begin(); it != off.end(); ++it) {
      int n;
      try {
        n = std::stoi(it.key());
      } catch (const std::exception&) {
        throw ConfigError("offspring keys must be integers");
      }
      if (n == 0 && it.value().is_string() &&
          it.value().get<std::string>() == "critical") {
        c.critical_death = true;
        continue;
      }
      c.offspring[n] = number_or_string(it.value(), "offspring intensity");
    }

    if (j.contains("run")) {
      const json& r = j.at("run");
      c.orders = r.value("orders", c.orders);
      c.radius = r.value("radius", c.radius);
      c.horizon = number_or_string(r.value("horizon", json(c.horizon)),
                                   "horizon");
      if (r.contains("checkpoints"))
        for (const json& t : r.at("checkpoints"))
          c.checkpoints.push_back(number_or_string(t, "checkpoint"));
      if (r.contains("variant"))
        c.variant =
            moment_variant_from_string(r.at("variant").get<std::string>());
      c.track_radius = r.value("track_radius", c.track_radius);
      if (r.contains("rtol")) c.rtol = number_or_string(r.at("rtol"), "rtol");
      if (r.contains("atol")) c.atol = number_or_string(r.at("atol"), "atol");
      if (r.contains("leak_tol"))
        c.leak_tol = number_or_string(r.at("leak_tol"), "leak_tol");
    }

    if (j.contains("montecarlo")) {
      const json& m = j.at("montecarlo");
      c.replicas = m.value("replicas", c.replicas);
      c.seed = m.value("seed", c.seed);
      c.max_population = m.value("max_population", c.max_population);
      c.max_events = m.value("max_events", c.max_events);
    }

    c.out_dir = j.value("out_dir", c.out_dir);
    c.threads = j.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  if (c.dimension < 1 || c.dimension > kMaxDim)
    throw ConfigError("dimension must be in [1,4]");
  if (c.horizon <= 0) throw ConfigError("horizon must be positive");
  if (c.orders < 1) throw ConfigError("orders must be >= 1");
  return c;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ModelConfig& c) {
  json j;
  j["schema"] = c.schema;
  j["dimension"] = c.dimension;

  json k;
  k["type"] = c.kernel_type;
  if (c.kernel_type == "finite_support") {
    json jumps = json::array();
    for (const auto& jump : c.jumps) {
      json e;
      json z = json::array();
      for (int i = 0; i < c.dimension; ++i) z.push_back(jump.z.c[i]);
      e["z"] = z;
      e["rate"] = decimal_string(jump.rate);
      jumps.push_back(e);
    }
    k["jumps"] = jumps;
  } else if (c.kernel_type == "heavy_tail") {
    k["alpha"] = decimal_string(c.alpha);
    k["total_rate"] = decimal_string(c.total_rate);
    k["cutoff"] = c.cutoff;
  }
  j["kernel"] = k;

  json off = json::object();
  for (const auto& [n, b] : c.offspring)
    off[std::to_string(n)] = decimal_string(b);
  if (c.critical_death) off["0"] = "critical";
  j["offspring"] = off;

  json r;
  r["orders"] = c.orders;
  r["radius"] = c.radius;
  r["horizon"] = decimal_string(c.horizon);
  if (!c.checkpoints.empty()) {
    json cps = json::array();
    for (double t : c.checkpoints) cps.push_back(decimal_string(t));
    r["checkpoints"] = cps;
  }
  r["variant"] = to_string(c.variant);
  r["track_radius"] = c.track_radius;
  r["rtol"] = decimal_string(c.rtol);
  r["atol"] = decimal_string(c.atol);
  r["leak_tol"] = decimal_string(c.leak_tol);
  j["run"] = r;

  json m;
  m["replicas"] = c.replicas;
  m["seed"] = c.seed;
  m["max_population"] = c.max_population;
  m["max_events"] = c.max_events;
  j["montecarlo"] = m;

  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  return j.dump(2);  // nlohmann objects iterate in sorted key order
}

std::string config_hash(const ModelConfig& c) {
  // hash excludes the output directory so moving results keeps identity
  ModelConfig canon = c;
  canon.out_dir = "";
  std::string s = serialize_config(canon);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xF];
    h >>= 4;
  }
  return out;
}

WalkKernel make_kernel(const ModelConfig& c) {
  if (c.kernel_type == "simple") return WalkKernel::simple(c.dimension);
  if (c.kernel_type == "finite_support")
    return WalkKernel::finite_support(c.dimension, c.jumps);
  return WalkKernel::heavy_tail(c.dimension, c.alpha, c.total_rate, c.cutoff);
}

OffspringLaw make_law(const ModelConfig& c, const WalkKernel& kernel) {
  std::map<int, double> b = c.offspring;
  if (c.critical_death) {
    double beta_star = 0;
    for (const auto& [n, bn] : b)
      if (n > 1) beta_star += (n - 1) * bn;
    b[0] = critical_death_rate(kernel, beta_star);
  }
  return OffspringLaw(b, std::max(c.orders, 2) + 2);
}

SolveOptions solve_options(const ModelConfig& c) {
  SolveOptions o;
  o.orders = c.orders;
  o.radius = c.radius;
  o.horizon = c.horizon;
  o.variant = c.variant;
  o.rtol = c.rtol;
  o.atol = c.atol;
  o.leak_tol = c.leak_tol;
  o.track_radius = c.track_radius;
  o.checkpoints = c.checkpoints;
  o.threads = c.threads;
  return o;
}

SimOptions sim_options(const ModelConfig& c) {
  SimOptions o;
  o.horizon = c.horizon;
  o.checkpoints = c.checkpoints;
  o.orders = c.orders;
  o.track_radius = c.track_radius;
  o.max_population = c.max_population;
  o.max_events = c.max_events;
  o.seed = c.seed;
  o.replicas = c.replicas;
  o.threads = c.threads;
  return o;
}

}  // namespace brwlab
