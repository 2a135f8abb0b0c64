#include "esdcbf/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace esdcbf {
namespace {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const Entry& e, const std::string& why) {
  throw Error(ErrorKind::Config, "line " + std::to_string(e.line) + " (" + e.key + "): " + why);
}

std::vector<Entry> tokenize(const std::string& text) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": expected key = value");
    entries.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
  }
  return entries;
}

double to_double(const Entry& e, const std::string& s) {
  const std::string t = trim(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0') fail(e, "expected a number, got '" + t + "'");
  return v;
}

std::vector<double> to_list(const Entry& e, const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(to_double(e, cell));
  return out;
}

double scalar(const Entry& e) { return to_double(e, e.value); }

Vec3 vec3(const Entry& e, const std::string& s) {
  const auto v = to_list(e, s);
  if (v.size() != 3) fail(e, "expected three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

Vec3 vec3(const Entry& e) { return vec3(e, e.value); }

bool boolean(const Entry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  fail(e, "expected true or false");
}

std::size_t count(const Entry& e) {
  const double v = scalar(e);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) fail(e, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

// Splits "tumor.3.center" into ("tumor", 3, "center").
bool indexed(const std::string& key, const std::string& prefix, std::size_t& index, std::string& field) {
  if (key.rfind(prefix + ".", 0) != 0) return false;
  const auto rest = key.substr(prefix.size() + 1);
  const auto dot = rest.find('.');
  if (dot == std::string::npos || dot == 0) return false;
  for (std::size_t i = 0; i < dot; ++i)
    if (rest[i] < '0' || rest[i] > '9') return false;
  index = std::stoul(rest.substr(0, dot));
  field = rest.substr(dot + 1);
  return true;
}

template <typename T>
T& grow(std::vector<T>& v, std::size_t index) {
  if (index >= v.size()) v.resize(index + 1);
  return v[index];
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const Vec3& v) { return fmt(v[0]) + ", " + fmt(v[1]) + ", " + fmt(v[2]); }

const char* mode_name(FilterMode m) { return m == FilterMode::KeepOutOnly ? "keep_out_only" : "keep_out_and_depth"; }

const char* waveform_name(Waveform w) {
  switch (w) {
    case Waveform::None: return "none";
    case Waveform::Constant: return "constant";
    case Waveform::Sinusoid: return "sinusoid";
  }
  return "none";
}

void apply_entry(ScenarioSpec& s, const Entry& e) {
  const std::string& k = e.key;
  std::size_t i = 0;
  std::string f;

  if (k == "scenario") return;
  if (k == "kinematics.l1") s.kinematics.l1 = scalar(e);
  else if (k == "kinematics.l2") s.kinematics.l2 = scalar(e);
  else if (k == "kinematics.l_end") s.kinematics.l_end = scalar(e);
  else if (k == "kinematics.od") s.kinematics.od = scalar(e);
  else if (k == "kinematics.d1_max") s.kinematics.d1_max = scalar(e);
  else if (k == "kinematics.angle_limit") s.kinematics.angle_limit = scalar(e);
  else if (k == "dynamics.masses") s.dynamics.link_masses = vec3(e);
  else if (k == "dynamics.inertias") s.dynamics.link_inertias = vec3(e);
  else if (k == "dynamics.gravity") s.dynamics.gravity = vec3(e);
  else if (k == "dynamics.input_map") {
    const auto v = to_list(e, e.value);
    if (v.size() != 9) fail(e, "expected nine numbers (row-major)");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) s.dynamics.input_map(r, c) = v[3 * r + c];
  } else if (k == "filter.alpha") s.filter.alpha = scalar(e);
  else if (k == "filter.mode") {
    if (e.value == "keep_out_only") s.filter.mode = FilterMode::KeepOutOnly;
    else if (e.value == "keep_out_and_depth") s.filter.mode = FilterMode::KeepOutAndDepth;
    else fail(e, "expected keep_out_only or keep_out_and_depth");
  } else if (k == "filter.activation_gate") s.filter.activation_gate = boolean(e);
  else if (k == "filter.enabled") s.filter.enabled = boolean(e);
  else if (k == "controller.k_d") s.controller.k_d = scalar(e);
  else if (k == "controller.damping") s.controller.damping = scalar(e);
  else if (k == "disturbance.waveform") {
    if (e.value == "none") s.disturbance.waveform = Waveform::None;
    else if (e.value == "constant") s.disturbance.waveform = Waveform::Constant;
    else if (e.value == "sinusoid") s.disturbance.waveform = Waveform::Sinusoid;
    else fail(e, "expected none, constant or sinusoid");
  } else if (k == "disturbance.amplitude") s.disturbance.amplitude = vec3(e);
  else if (k == "disturbance.frequency") s.disturbance.frequency = scalar(e);
  else if (k == "disturbance.seed") s.disturbance.seed = count(e);
  else if (k == "initial.q") s.initial_state.q = JointConfig::from_vector(vec3(e));
  else if (k == "initial.qdot") s.initial_state.qdot = vec3(e);
  else if (k == "reference.speed") s.speed = scalar(e);
  else if (k == "reference.kp_gain") s.kp_gain = scalar(e);
  else if (k == "sim.dt") s.dt = scalar(e);
  else if (k == "sim.duration") s.duration = scalar(e);
  else if (k == "sim.settle") s.settle = scalar(e);
  else if (k == "tumors.count") s.safe_set.tumors.resize(count(e));
  else if (k == "shells.count") s.safe_set.shells.resize(count(e));
  else if (k == "markings.count") s.markings.resize(count(e));
  else if (indexed(k, "tumor", i, f)) {
    auto& t = grow(s.safe_set.tumors, i);
    if (f == "center") t.center = vec3(e);
    else if (f == "margin") t.margin = scalar(e);
    else if (f == "removable") t.removable = boolean(e);
    else fail(e, "unknown tumor field");
  } else if (indexed(k, "shell", i, f)) {
    auto& sh = grow(s.safe_set.shells, i);
    if (f == "center") sh.center = vec3(e);
    else if (f == "outer_radius") sh.outer_radius = scalar(e);
    else fail(e, "unknown shell field");
  } else if (indexed(k, "marking", i, f)) {
    auto& ms = grow(s.markings, i);
    if (f == "tumor") ms.tumor_index = count(e);
    else if (f == "points") {
      ms.points.clear();
      std::istringstream in(e.value);
      std::string pt;
      while (std::getline(in, pt, ';'))
        if (!trim(pt).empty()) ms.points.push_back(vec3(e, pt));
      ms.unsafe_flags.resize(ms.points.size(), false);
    } else if (f == "unsafe") {
      ms.unsafe_flags.clear();
      for (double v : to_list(e, e.value)) ms.unsafe_flags.push_back(v != 0.0);
    } else fail(e, "unknown marking field");
  } else {
    fail(e, "unknown key");
  }
}

void apply_entries(ScenarioSpec& spec, const std::vector<Entry>& entries) {
  // Counts first so indexed keys can refer to a resized list.
  for (const auto& e : entries)
    if (e.key.ends_with(".count")) apply_entry(spec, e);
  for (const auto& e : entries)
    if (!e.key.ends_with(".count")) apply_entry(spec, e);
}

}  // namespace

std::string to_config_text(const ScenarioSpec& s) {
  std::ostringstream o;
  o << "# esdcbf scenario configuration\n";
  o << "scenario = " << s.id << "\n\n";
  o << "kinematics.l1 = " << fmt(s.kinematics.l1) << '\n';
  o << "kinematics.l2 = " << fmt(s.kinematics.l2) << '\n';
  o << "kinematics.l_end = " << fmt(s.kinematics.l_end) << '\n';
  o << "kinematics.od = " << fmt(s.kinematics.od) << '\n';
  o << "kinematics.d1_max = " << fmt(s.kinematics.d1_max) << '\n';
  o << "kinematics.angle_limit = " << fmt(s.kinematics.angle_limit) << "\n\n";
  o << "dynamics.masses = " << fmt(s.dynamics.link_masses) << '\n';
  o << "dynamics.inertias = " << fmt(s.dynamics.link_inertias) << '\n';
  o << "dynamics.gravity = " << fmt(s.dynamics.gravity) << '\n';
  o << "dynamics.input_map = ";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) o << fmt(s.dynamics.input_map(r, c)) << (r == 2 && c == 2 ? "\n\n" : ", ");
  o << "filter.alpha = " << fmt(s.filter.alpha) << '\n';
  o << "filter.mode = " << mode_name(s.filter.mode) << '\n';
  o << "filter.activation_gate = " << (s.filter.activation_gate ? "true" : "false") << '\n';
  o << "filter.enabled = " << (s.filter.enabled ? "true" : "false") << "\n\n";
  o << "controller.k_d = " << fmt(s.controller.k_d) << '\n';
  o << "controller.damping = " << fmt(s.controller.damping) << "\n\n";
  o << "disturbance.waveform = " << waveform_name(s.disturbance.waveform) << '\n';
  o << "disturbance.amplitude = " << fmt(s.disturbance.amplitude) << '\n';
  o << "disturbance.frequency = " << fmt(s.disturbance.frequency) << '\n';
  o << "disturbance.seed = " << s.disturbance.seed << "\n\n";
  o << "initial.q = " << fmt(s.initial_state.q.vector()) << '\n';
  o << "initial.qdot = " << fmt(s.initial_state.qdot) << "\n\n";
  o << "reference.speed = " << fmt(s.speed) << '\n';
  o << "reference.kp_gain = " << fmt(s.kp_gain) << '\n';
  o << "sim.dt = " << fmt(s.dt) << '\n';
  o << "sim.duration = " << fmt(s.duration) << '\n';
  o << "sim.settle = " << fmt(s.settle) << "\n\n";
  o << "tumors.count = " << s.safe_set.tumors.size() << '\n';
  for (std::size_t i = 0; i < s.safe_set.tumors.size(); ++i) {
    const auto& t = s.safe_set.tumors[i];
    o << "tumor." << i << ".center = " << fmt(t.center) << '\n';
    o << "tumor." << i << ".margin = " << fmt(t.margin) << '\n';
    o << "tumor." << i << ".removable = " << (t.removable ? "true" : "false") << '\n';
  }
  o << "shells.count = " << s.safe_set.shells.size() << '\n';
  for (std::size_t i = 0; i < s.safe_set.shells.size(); ++i) {
    o << "shell." << i << ".center = " << fmt(s.safe_set.shells[i].center) << '\n';
    o << "shell." << i << ".outer_radius = " << fmt(s.safe_set.shells[i].outer_radius) << '\n';
  }
  o << "markings.count = " << s.markings.size() << '\n';
  for (std::size_t i = 0; i < s.markings.size(); ++i) {
    const auto& ms = s.markings[i];
    o << "marking." << i << ".tumor = " << ms.tumor_index << '\n';
    o << "marking." << i << ".points = ";
    for (std::size_t p = 0; p < ms.points.size(); ++p) o << (p ? "; " : "") << fmt(ms.points[p]);
    o << '\n';
    o << "marking." << i << ".unsafe = ";
    for (std::size_t p = 0; p < ms.unsafe_flags.size(); ++p) o << (p ? ", " : "") << (ms.unsafe_flags[p] ? 1 : 0);
    o << '\n';
  }
  return o.str();
}

namespace {

void validate_as_config(const ScenarioSpec& spec) {
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, std::string("invalid scenario: ") + e.what());
  }
}

}  // namespace

void apply_config_text(ScenarioSpec& spec, const std::string& text) {
  apply_entries(spec, tokenize(text));
  validate_as_config(spec);
}

ScenarioSpec parse_config_text(const std::string& text) {
  const auto entries = tokenize(text);
  int base = 1;
  for (const auto& e : entries) {
    if (e.key != "scenario") continue;
    const double v = scalar(e);
    if (v != static_cast<double>(static_cast<int>(v))) fail(e, "expected an integer scenario id");
    base = static_cast<int>(v);
  }
  ScenarioSpec spec = scenario_catalog(base);
  apply_entries(spec, entries);
  validate_as_config(spec);
  return spec;
}

ScenarioSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void save_config(const ScenarioSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << to_config_text(spec);
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace esdcbf
