// SPDX-License-Identifier: Apache-2.0
#include "vlcsee/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vlcsee {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw ConfigError(where + ": expected a number, got '" + s + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& s, const std::string& where) {
  const double v = parse_double(s, where);
  if (v != std::floor(v)) throw ConfigError(where + ": expected an integer, got '" + s + "'");
  return static_cast<std::int64_t>(v);
}

bool parse_bool(const std::string& s, const std::string& where) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(where + ": expected true/false, got '" + s + "'");
}

Vec3 parse_vec3(const std::string& token, const std::string& where) {
  Vec3 v;
  int consumed = 0;
  if (std::sscanf(token.c_str(), "%lf,%lf,%lf%n", &v.x(), &v.y(), &v.z(), &consumed) != 3 ||
      consumed != static_cast<int>(token.size())) {
    throw ConfigError(where + ": expected x,y,z, got '" + token + "'");
  }
  return v;
}

std::vector<Vec3> parse_vec3_list(const std::string& value, const std::string& where) {
  std::vector<Vec3> out;
  for (const auto& token : split_ws(value)) out.push_back(parse_vec3(token, where));
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt(const Vec3& v) { return fmt(v.x()) + "," + fmt(v.y()) + "," + fmt(v.z()); }

const std::vector<Vec3>& default_leds() {
  static const std::vector<Vec3> leds = {Vec3(1.5, 2, 3), Vec3(3, 2, 3),   Vec3(4.5, 2, 3),
                                         Vec3(1.5, 4, 3), Vec3(3, 4, 3),   Vec3(4.5, 4, 3)};
  return leds;
}

std::vector<Vec3> wall_grid(int count, const Vec3& room) {
  // Near-square grid on the x = 0 wall, 0.25 m pitch, centered at mid-wall
  // height 1.5 m.
  std::vector<Vec3> out;
  if (count <= 0) return out;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const int rows = (count + cols - 1) / cols;
  const double pitch = 0.25;
  const double y0 = room.y() / 2.0 - (cols - 1) * pitch / 2.0;
  const double z0 = 1.5 - (rows - 1) * pitch / 2.0;
  for (int i = 0; i < count; ++i) {
    const int r = i / cols;
    const int c = i % cols;
    out.emplace_back(0.0, y0 + c * pitch, z0 + r * pitch);
  }
  return out;
}

constexpr std::uint64_t kSceneSalt = 100;

}  // namespace

std::string BaselineSpec::label() const {
  std::string out;
  switch (kind) {
    case BaselineKind::kDsPpo: out = "ds_ppo"; break;
    case BaselineKind::kPpo: out = "ppo"; break;
    case BaselineKind::kEpsGreedy: out = "eps_greedy"; break;
    case BaselineKind::kMrtOnly: out = "mrt_only"; break;
  }
  if (sdma) out += "+sdma";
  if (irs_off) out += "+noirs";
  return out;
}

BaselineSpec BaselineSpec::parse(const std::string& token) {
  BaselineSpec spec;
  std::string rest = token;
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos != std::string::npos) {
    const std::size_t next = rest.find('+', pos);
    parts.push_back(rest.substr(pos, next == std::string::npos ? next : next - pos));
    pos = next == std::string::npos ? next : next + 1;
  }
  if (parts.empty()) throw ConfigError("baseline: empty token");
  const std::string& name = parts[0];
  if (name == "ds_ppo") spec.kind = BaselineKind::kDsPpo;
  else if (name == "ppo") spec.kind = BaselineKind::kPpo;
  else if (name == "eps_greedy") spec.kind = BaselineKind::kEpsGreedy;
  else if (name == "mrt_only") spec.kind = BaselineKind::kMrtOnly;
  else throw ConfigError("baseline: unknown kind '" + name + "'");
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i] == "sdma") spec.sdma = true;
    else if (parts[i] == "noirs") spec.irs_off = true;
    else throw ConfigError("baseline: unknown flag '" + parts[i] + "'");
  }
  return spec;
}

ExperimentConfig default_config() {
  ExperimentConfig config;
  config.scenario.leds = default_leds();
  config.baselines = {BaselineSpec{}};
  return config;
}

void ExperimentConfig::validate() const {
  std::ostringstream problems;
  const auto& s = scenario;
  if (s.k_lus < 1) problems << "scene.k_lus must be at least 1; ";
  if (s.leds.empty()) problems << "scene.leds must not be empty; ";
  if (s.n_irs < 0) problems << "scene.n_irs must be nonnegative; ";
  if (!s.lus.empty() && static_cast<int>(s.lus.size()) != s.k_lus) {
    problems << "scene.lus must list exactly k_lus positions; ";
  }
  if (!s.irs_elements.empty() && static_cast<int>(s.irs_elements.size()) != s.n_irs) {
    problems << "scene.irs_elements must list exactly n_irs positions; ";
  }
  if (!(s.area_pd > 0)) problems << "optics.area_pd must be positive; ";
  if (!(s.psi_fov_deg > 0) || s.psi_fov_deg > 90) problems << "optics.psi_fov_deg must lie in (0, 90]; ";
  if (!(s.omega_half_deg > 0) || !(s.omega_half_deg < 90)) {
    problems << "optics.omega_half_deg must lie in (0, 90); ";
  }
  if (s.rho < 0 || s.rho > 1) problems << "optics.rho must lie in [0, 1]; ";
  if (!(s.p_max > 0)) problems << "power.p_max must be positive; ";
  if (s.i_min > s.i_max) problems << "power.i_min must not exceed power.i_max; ";
  if (s.qos < 0) problems << "power.qos must be nonnegative; ";
  if (!(s.noise_lu > 0) || !(s.noise_eve > 0)) problems << "power noise terms must be positive; ";
  if (!(trainer.clip_epsilon > 0) || !(trainer.clip_epsilon < 1)) {
    problems << "trainer.clip_epsilon must lie in (0, 1); ";
  }
  if (trainer.gamma < 0 || trainer.gamma > 1) problems << "trainer.gamma must lie in [0, 1]; ";
  if (trainer.batch_on < 1 || static_cast<std::size_t>(trainer.batch_on) > trainer.pool_capacity) {
    problems << "trainer.batch_on must lie in [1, pool_capacity]; ";
  }
  if (trainer.batch_off < 1 || static_cast<std::size_t>(trainer.batch_off) > trainer.pool_capacity) {
    problems << "trainer.batch_off must lie in [1, pool_capacity]; ";
  }
  if (trainer.total_steps < 1) problems << "trainer.steps must be positive; ";
  if (seeds.empty()) problems << "run.seeds must not be empty; ";
  if (workers < 1) problems << "run.workers must be at least 1; ";
  if (!sweep.name.empty()) {
    static const char* axes[] = {"n_irs", "k_lus", "p_max", "qos", "lr"};
    if (std::find(std::begin(axes), std::end(axes), sweep.name) == std::end(axes)) {
      problems << "sweep.axis '" << sweep.name << "' is not one of n_irs/k_lus/p_max/qos/lr; ";
    }
    if (sweep.values.empty()) problems << "sweep.values must not be empty; ";
    for (double v : sweep.values) {
      if ((sweep.name == "n_irs" || sweep.name == "k_lus") && (v != std::floor(v) || v < 1)) {
        problems << "sweep value " << v << " must be a positive integer for " << sweep.name << "; ";
      } else if (!(v > 0) && sweep.name != "qos") {
        problems << "sweep value " << v << " must be positive; ";
      } else if (sweep.name == "qos" && v < 0) {
        problems << "sweep value " << v << " must be nonnegative; ";
      }
    }
  }
  if (baselines.empty()) problems << "sweep.baselines must not be empty; ";
  const std::string text = problems.str();
  if (!text.empty()) throw ConfigError("config validation failed: " + text);
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  ExperimentConfig config = default_config();
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  bool baselines_set = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "scene" && section != "optics" && section != "power" &&
          section != "trainer" && section != "run" && section != "sweep") {
        throw ConfigError(where + ": unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string ctx = where + " (" + section + "." + key + ")";

    auto& s = config.scenario;
    auto& t = config.trainer;
    if (section == "scene") {
      if (key == "room") {
        const auto parts = split_ws(value);
        if (parts.size() != 3) throw ConfigError(ctx + ": expected three dimensions");
        s.room = Vec3(parse_double(parts[0], ctx), parse_double(parts[1], ctx), parse_double(parts[2], ctx));
      } else if (key == "leds") s.leds = parse_vec3_list(value, ctx);
      else if (key == "n_irs") s.n_irs = static_cast<int>(parse_int(value, ctx));
      else if (key == "irs_elements") s.irs_elements = parse_vec3_list(value, ctx);
      else if (key == "k_lus") s.k_lus = static_cast<int>(parse_int(value, ctx));
      else if (key == "lus") s.lus = parse_vec3_list(value, ctx);
      else if (key == "eve") s.eve = parse_vec3(value, ctx);
      else throw ConfigError(ctx + ": unknown key");
    } else if (section == "optics") {
      if (key == "g_of") s.g_of = parse_double(value, ctx);
      else if (key == "kappa") s.kappa = parse_double(value, ctx);
      else if (key == "psi_fov_deg") s.psi_fov_deg = parse_double(value, ctx);
      else if (key == "omega_half_deg") s.omega_half_deg = parse_double(value, ctx);
      else if (key == "area_pd") s.area_pd = parse_double(value, ctx);
      else if (key == "rho") s.rho = parse_double(value, ctx);
      else throw ConfigError(ctx + ": unknown key");
    } else if (section == "power") {
      if (key == "p_max") s.p_max = parse_double(value, ctx);
      else if (key == "p_circuit") s.p_circuit = parse_double(value, ctx);
      else if (key == "u_led") s.u_led = parse_double(value, ctx);
      else if (key == "i_min") s.i_min = parse_double(value, ctx);
      else if (key == "i_max") s.i_max = parse_double(value, ctx);
      else if (key == "qos") s.qos = parse_double(value, ctx);
      else if (key == "noise_lu") s.noise_lu = parse_double(value, ctx);
      else if (key == "noise_eve") s.noise_eve = parse_double(value, ctx);
      else throw ConfigError(ctx + ": unknown key");
    } else if (section == "trainer") {
      if (key == "lr_actor") t.lr_actor = parse_double(value, ctx);
      else if (key == "lr_critic") t.lr_critic = parse_double(value, ctx);
      else if (key == "epochs_on") t.epochs_on = static_cast<int>(parse_int(value, ctx));
      else if (key == "epochs_off") t.epochs_off = static_cast<int>(parse_int(value, ctx));
      else if (key == "batch_on") t.batch_on = static_cast<int>(parse_int(value, ctx));
      else if (key == "batch_off") t.batch_off = static_cast<int>(parse_int(value, ctx));
      else if (key == "pool_capacity") t.pool_capacity = static_cast<std::size_t>(parse_int(value, ctx));
      else if (key == "gamma") t.gamma = parse_double(value, ctx);
      else if (key == "clip_epsilon") t.clip_epsilon = parse_double(value, ctx);
      else if (key == "steps") t.total_steps = parse_int(value, ctx);
      else if (key == "t_decay") t.t_decay = parse_double(value, ctx);
      else if (key == "advantage_norm") t.advantage_norm = parse_bool(value, ctx);
      else if (key == "hidden") t.hidden = static_cast<int>(parse_int(value, ctx));
      else throw ConfigError(ctx + ": unknown key");
    } else if (section == "run") {
      if (key == "seeds") {
        config.seeds.clear();
        for (const auto& tok : split_ws(value)) {
          config.seeds.push_back(static_cast<std::uint64_t>(parse_int(tok, ctx)));
        }
      } else if (key == "out") config.out_dir = value;
      else if (key == "workers") config.workers = static_cast<int>(parse_int(value, ctx));
      else if (key == "audit") config.audit = parse_bool(value, ctx);
      else throw ConfigError(ctx + ": unknown key");
    } else if (section == "sweep") {
      if (key == "axis") config.sweep.name = value;
      else if (key == "values") {
        config.sweep.values.clear();
        for (const auto& tok : split_ws(value)) config.sweep.values.push_back(parse_double(tok, ctx));
      } else if (key == "baselines") {
        config.baselines.clear();
        for (const auto& tok : split_ws(value)) config.baselines.push_back(BaselineSpec::parse(tok));
        baselines_set = true;
      } else throw ConfigError(ctx + ": unknown key");
    } else {
      throw ConfigError(where + ": key outside any section");
    }
  }
  (void)baselines_set;
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

std::string serialize_config(const ExperimentConfig& config) {
  const auto& s = config.scenario;
  const auto& t = config.trainer;
  std::ostringstream out;
  out << "[scene]\n";
  out << "room = " << fmt(s.room.x()) << " " << fmt(s.room.y()) << " " << fmt(s.room.z()) << "\n";
  out << "leds =";
  for (const auto& led : s.leds) out << " " << fmt(led);
  out << "\n";
  out << "n_irs = " << s.n_irs << "\n";
  if (!s.irs_elements.empty()) {
    out << "irs_elements =";
    for (const auto& e : s.irs_elements) out << " " << fmt(e);
    out << "\n";
  }
  out << "k_lus = " << s.k_lus << "\n";
  if (!s.lus.empty()) {
    out << "lus =";
    for (const auto& lu : s.lus) out << " " << fmt(lu);
    out << "\n";
  }
  if (s.eve) out << "eve = " << fmt(*s.eve) << "\n";
  out << "[optics]\n";
  out << "g_of = " << fmt(s.g_of) << "\nkappa = " << fmt(s.kappa) << "\npsi_fov_deg = "
      << fmt(s.psi_fov_deg) << "\nomega_half_deg = " << fmt(s.omega_half_deg) << "\narea_pd = "
      << fmt(s.area_pd) << "\nrho = " << fmt(s.rho) << "\n";
  out << "[power]\n";
  out << "p_max = " << fmt(s.p_max) << "\np_circuit = " << fmt(s.p_circuit) << "\nu_led = "
      << fmt(s.u_led) << "\ni_min = " << fmt(s.i_min) << "\ni_max = " << fmt(s.i_max)
      << "\nqos = " << fmt(s.qos) << "\nnoise_lu = " << fmt(s.noise_lu) << "\nnoise_eve = "
      << fmt(s.noise_eve) << "\n";
  out << "[trainer]\n";
  out << "lr_actor = " << fmt(t.lr_actor) << "\nlr_critic = " << fmt(t.lr_critic)
      << "\nepochs_on = " << t.epochs_on << "\nepochs_off = " << t.epochs_off << "\nbatch_on = "
      << t.batch_on << "\nbatch_off = " << t.batch_off << "\npool_capacity = " << t.pool_capacity
      << "\ngamma = " << fmt(t.gamma) << "\nclip_epsilon = " << fmt(t.clip_epsilon)
      << "\nsteps = " << t.total_steps << "\nt_decay = " << fmt(t.t_decay)
      << "\nadvantage_norm = " << (t.advantage_norm ? "true" : "false") << "\nhidden = "
      << t.hidden << "\n";
  out << "[run]\n";
  out << "seeds =";
  for (auto seed : config.seeds) out << " " << seed;
  out << "\n";
  out << "out = " << config.out_dir << "\nworkers = " << config.workers << "\naudit = "
      << (config.audit ? "true" : "false") << "\n";
  out << "[sweep]\n";
  if (!config.sweep.name.empty()) {
    out << "axis = " << config.sweep.name << "\nvalues =";
    for (double v : config.sweep.values) out << " " << fmt(v);
    out << "\n";
  }
  out << "baselines =";
  for (const auto& spec : config.baselines) out << " " << spec.label();
  out << "\n";
  return out.str();
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = serialize_config(config);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scene build_scene(const ExperimentConfig& config, std::uint64_t seed) {
  const auto& s = config.scenario;
  Scene scene;
  scene.room = s.room;
  scene.leds = s.leds;
  scene.irs_elements = s.irs_elements.empty() ? wall_grid(s.n_irs, s.room) : s.irs_elements;

  const bool need_lus = s.lus.empty();
  const bool need_eve = !s.eve.has_value();
  scene.lus = s.lus;
  if (s.eve) scene.eve = *s.eve;

  if (need_lus || need_eve) {
    Rng rng(mix_seed(seed, kSceneSalt));
    std::vector<Vec3> placed = scene.lus;
    if (!need_eve) placed.push_back(scene.eve);
    const int want = (need_lus ? s.k_lus : 0) + (need_eve ? 1 : 0);
    std::vector<Vec3> drawn;
    const double margin = 0.5;
    int attempts = 0;
    while (static_cast<int>(drawn.size()) < want) {
      if (++attempts > 10000) {
        throw ConfigError("build_scene: could not place receivers with 0.5 m separation");
      }
      Vec3 p(rng.uniform(margin, s.room.x() - margin), rng.uniform(margin, s.room.y() - margin), 0.0);
      bool ok = true;
      for (const auto& other : placed) {
        if ((p - other).norm() < margin) ok = false;
      }
      for (const auto& other : drawn) {
        if ((p - other).norm() < margin) ok = false;
      }
      if (ok) drawn.push_back(p);
    }
    std::size_t next = 0;
    if (need_lus) {
      for (int k = 0; k < s.k_lus; ++k) scene.lus.push_back(drawn[next++]);
    }
    if (need_eve) scene.eve = drawn[next++];
  }
  scene.validate();
  return scene;
}

OpticalParams build_optics(const ExperimentConfig& config) {
  const auto& s = config.scenario;
  return OpticalParams::from_degrees(s.g_of, s.kappa, s.psi_fov_deg, s.omega_half_deg, s.area_pd,
                                     s.rho);
}

PowerLimits build_limits(const ExperimentConfig& config) {
  const auto& s = config.scenario;
  PowerLimits lim;
  lim.p_max = s.p_max;
  lim.p_circuit = s.p_circuit;
  lim.u_led = s.u_led;
  lim.i_min = s.i_min;
  lim.i_max = s.i_max;
  lim.qos = Vector::Constant(s.k_lus, s.qos);
  lim.noise_lu = Vector::Constant(s.k_lus, s.noise_lu);
  lim.noise_eve = s.noise_eve;
  lim.validate();
  return lim;
}

ExperimentConfig with_axis_value(const ExperimentConfig& config, const std::string& axis,
                                 double value) {
  ExperimentConfig out = config;
  if (axis == "n_irs") {
    out.scenario.n_irs = static_cast<int>(value);
    out.scenario.irs_elements.clear();
  } else if (axis == "k_lus") {
    out.scenario.k_lus = static_cast<int>(value);
    out.scenario.lus.clear();
  } else if (axis == "p_max") {
    out.scenario.p_max = value;
  } else if (axis == "qos") {
    out.scenario.qos = value;
  } else if (axis == "lr") {
    out.trainer.lr_actor = value;
    out.trainer.lr_critic = value;
  } else {
    throw ConfigError("with_axis_value: unknown axis '" + axis + "'");
  }
  return out;
}

}  // namespace vlcsee
