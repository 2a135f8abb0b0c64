#include "esdcbf/sim.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace esdcbf {
namespace {

constexpr const char* kCsvVersionLine = "# esdcbf-log v1";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append_vec(std::string& line, const Vec3& v) {
  for (int i = 0; i < 3; ++i) {
    line += ',';
    line += fmt(v[i]);
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  return out;
}

void check_written(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error(ErrorKind::Io, "malformed number '" + s + "' in " + path.string());
  return v;
}

// Three orthogonal great circles of a sphere, as plottable points.
std::vector<Vec3> sphere_outline(const Vec3& c, double r, int samples) {
  std::vector<Vec3> pts;
  for (int plane = 0; plane < 3; ++plane) {
    const Vec3 a = Vec3::Unit(plane), b = Vec3::Unit((plane + 1) % 3);
    for (int k = 0; k <= samples; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / samples;
      pts.push_back(c + r * (std::cos(phi) * a + std::sin(phi) * b));
    }
  }
  return pts;
}

}  // namespace

std::vector<std::string> csv_header(const TrajectoryLog& log) {
  std::vector<std::string> h{"t[s]"};
  auto joint = [&](const std::string& p, const char* lin, const char* rot) {
    h.push_back(p + "_d1[" + lin + "]");
    h.push_back(p + "_theta2[" + rot + "]");
    h.push_back(p + "_theta3[" + rot + "]");
  };
  auto task = [&](const std::string& p, const char* unit) {
    for (const char* axis : {"x", "y", "z"}) h.push_back(p + "_" + axis + "[" + unit + "]");
  };
  joint("q", "mm", "rad");
  joint("qdot", "mm/s", "rad/s");
  task("pos", "mm");
  task("xdot", "mm/s");
  task("xdot_d", "mm/s");
  task("xdot_s", "mm/s");
  joint("edot", "mm/s", "rad/s");
  joint("u", "g*mm/s^2", "g*mm^2/s^2");
  joint("d", "g*mm/s^2", "g*mm^2/s^2");
  h.push_back("active_rows[count]");
  h.push_back("gate_engaged[bool]");
  for (const auto& n : log.barrier_names) h.push_back("h_" + n + "[mm]");
  return h;
}

void export_csv(const TrajectoryLog& log, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kCsvVersionLine << '\n';
  const auto header = csv_header(log);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  std::string line;
  for (const auto& r : log.records) {
    line = fmt(r.t);
    for (const Vec3* v : {&r.q, &r.qdot, &r.x, &r.xdot, &r.xdot_d, &r.xdot_s, &r.edot, &r.u, &r.d})
      append_vec(line, *v);
    line += ',' + std::to_string(r.active_rows);
    line += r.gate_engaged ? ",1" : ",0";
    for (double h : r.h) line += ',' + fmt(h);
    out << line << '\n';
  }
  check_written(out, path);
}

TrajectoryLog read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split(line, ',');
    break;
  }
  if (header.size() < kCsvFixedColumns) throw Error(ErrorKind::Io, "missing or short CSV header in " + path.string());

  TrajectoryLog log;
  for (std::size_t i = kCsvFixedColumns; i < header.size(); ++i) {
    std::string name = header[i];
    if (name.rfind("h_", 0) == 0) name = name.substr(2);
    if (const auto br = name.find('['); br != std::string::npos) name = name.substr(0, br);
    log.barrier_names.push_back(name);
  }

  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw Error(ErrorKind::Io, "row width does not match header in " + path.string());
    std::vector<double> v;
    v.reserve(cells.size());
    for (const auto& c : cells) v.push_back(parse_double(c, path));
    LogRecord r;
    r.t = v[0];
    std::size_t col = 1;
    for (Vec3* dst : {&r.q, &r.qdot, &r.x, &r.xdot, &r.xdot_d, &r.xdot_s, &r.edot, &r.u, &r.d}) {
      *dst = Vec3(v[col], v[col + 1], v[col + 2]);
      col += 3;
    }
    r.active_rows = static_cast<int>(v[col++]);
    r.gate_engaged = v[col++] != 0.0;
    r.h.assign(v.begin() + static_cast<std::ptrdiff_t>(col), v.end());
    log.records.push_back(std::move(r));
  }
  return log;
}

void export_plot_data(const TrajectoryLog& log, const ScenarioSpec& spec, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  const std::string stem = "scenario" + std::to_string(spec.id);
  const ReferenceTrajectory ref = spec.reference();

  {
    const auto path = dir / (stem + "_path.dat");
    auto out = open_out(path);
    out << "# scenario " << spec.id << " end-effector path, alpha = " << fmt(spec.filter.alpha) << '\n';
    out << "# block 0 trajectory: t x y z x_ref y_ref z_ref [s, mm]\n";
    for (const auto& r : log.records) {
      const Vec3& p = ref.at(r.t).position;
      out << fmt(r.t) << ' ' << fmt(r.x[0]) << ' ' << fmt(r.x[1]) << ' ' << fmt(r.x[2]) << ' ' << fmt(p[0]) << ' '
          << fmt(p[1]) << ' ' << fmt(p[2]) << '\n';
    }
    out << "\n\n# block 1 marking points: x y z unsafe tumor_index [mm]\n";
    for (const auto& ms : spec.markings)
      for (std::size_t i = 0; i < ms.points.size(); ++i)
        out << fmt(ms.points[i][0]) << ' ' << fmt(ms.points[i][1]) << ' ' << fmt(ms.points[i][2]) << ' '
            << (ms.unsafe_flags[i] ? 1 : 0) << ' ' << ms.tumor_index << '\n';
    out << "\n\n# block 2 barrier boundaries: barrier_index x y z radius [mm]\n";
    std::size_t b = 0;
    auto outline = [&](const Vec3& c, double r) {
      for (const Vec3& p : sphere_outline(c, r, 72))
        out << b << ' ' << fmt(p[0]) << ' ' << fmt(p[1]) << ' ' << fmt(p[2]) << ' ' << fmt(r) << '\n';
      ++b;
    };
    for (const auto& t : spec.safe_set.tumors) outline(t.center, t.margin);
    for (const auto& s : spec.safe_set.shells) outline(s.center, s.outer_radius);
    check_written(out, path);
  }
  {
    const auto path = dir / (stem + "_barrier.dat");
    auto out = open_out(path);
    out << "# t[s]";
    for (const auto& n : log.barrier_names) out << " h_" << n << "[mm]";
    out << " gate_engaged\n";
    for (const auto& r : log.records) {
      out << fmt(r.t);
      for (double h : r.h) out << ' ' << fmt(h);
      out << ' ' << (r.gate_engaged ? 1 : 0) << '\n';
    }
    check_written(out, path);
  }
  {
    const auto path = dir / (stem + "_velocity.dat");
    auto out = open_out(path);
    out << "# t[s] vd_x vd_y vd_z vs_x vs_y vs_z v_x v_y v_z [mm/s]\n";
    for (const auto& r : log.records) {
      out << fmt(r.t);
      for (const Vec3* v : {&r.xdot_d, &r.xdot_s, &r.xdot})
        for (int i = 0; i < 3; ++i) out << ' ' << fmt((*v)[i]);
      out << '\n';
    }
    check_written(out, path);
  }
}

}  // namespace esdcbf
