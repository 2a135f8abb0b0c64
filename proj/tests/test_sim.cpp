#include "esdcbf/config.hpp"
#include "esdcbf/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace esdcbf;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("esdcbf_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ScenarioSpec short_spec(int id, double duration) {
  ScenarioSpec s = scenario_catalog(id);
  s.duration = duration;
  return s;
}

double min_h(const TrajectoryLog& log) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : log.records)
    for (double h : r.h) m = std::min(m, h);
  return m;
}

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("desired velocity blends feedforward and position feedback") {
    ReferenceTrajectory ref;
    ref.dt = 1.0;
    ref.samples = {{0.0, {1, 0, 0}, {0, 2, 0}}};
    CHECK(desired_velocity({1, 0, 0}, 0.0, ref, 5.0) == Vec3(0, 2, 0));
    CHECK(desired_velocity({0, 0, 0}, 0.0, ref, 5.0).isApprox(Vec3(5, 2, 0)));
  }

  TEST_CASE("filtered scenario 1 stays safe and the unfiltered one does not") {
    const ScenarioSpec spec = scenario_catalog(1);
    const TrajectoryLog log = run(spec);
    CHECK(min_h(log) >= -kSafetyTolerance);
    ScenarioSpec off = spec;
    off.filter.enabled = false;
    CHECK(min_h(run(off)) < -1.0);
  }

  TEST_CASE("runs are deterministic and causal") {
    const TrajectoryLog a = run(short_spec(3, 2.0));
    const TrajectoryLog b = run(short_spec(3, 2.0));
    CHECK(a == b);
    const TrajectoryLog shorter = run(short_spec(3, 1.0));
    REQUIRE(shorter.records.size() < a.records.size());
    for (std::size_t k = 0; k < shorter.records.size(); ++k) CHECK(shorter.records[k] == a.records[k]);
  }

  TEST_CASE("unconstrained steps pass the desired velocity through untouched") {
    const TrajectoryLog log = run(scenario_catalog(2));
    std::size_t free_steps = 0;
    for (const auto& r : log.records)
      if (r.active_rows == 0) {
        CHECK(r.xdot_s == r.xdot_d);
        ++free_steps;
      }
    CHECK(free_steps > 0);
  }

  TEST_CASE("logged control excludes the disturbance") {
    ScenarioSpec spec = short_spec(1, 0.05);
    spec.disturbance.waveform = Waveform::Constant;
    spec.disturbance.amplitude = {0.0, 10.0, 0.0};
    const TrajectoryLog log = run(spec);
    for (const auto& r : log.records) CHECK(r.d == spec.disturbance.amplitude);
    ScenarioSpec clean = spec;
    clean.disturbance = {};
    CHECK(run(clean).records[0].u == log.records[0].u);
  }

  TEST_CASE("scenario 4 engages the gate and then respects both boundaries") {
    const ScenarioSpec spec = scenario_catalog(4);
    const TrajectoryLog log = run(spec);
    const SafetyReport rep = summarize(log, spec);
    REQUIRE(rep.gate_time.has_value());
    CHECK(*rep.gate_time > 0.0);
    CHECK(*rep.gate_time <= 2.0);
    for (double h : rep.min_h) CHECK(h >= -kSafetyTolerance);
    CHECK(rep.safe());
    CHECK_FALSE(log.records.front().gate_engaged);
    bool engaged = false;
    for (const auto& r : log.records) {
      if (engaged) CHECK(r.gate_engaged);
      engaged = r.gate_engaged;
    }
  }

  TEST_CASE("a failing step is reported with its index and partial log") {
    ScenarioSpec spec = scenario_catalog(1);
    spec.safe_set.tumors.clear();
    spec.markings.clear();
    spec.safe_set.shells = {{forward_kinematics(spec.initial_state.q, spec.kinematics), 5.0}};
    spec.filter.mode = FilterMode::KeepOutAndDepth;
    try {
      run(spec);
      FAIL("run should fail at a shell center");
    } catch (const RunFailure& f) {
      CHECK(f.kind() == ErrorKind::DegeneratePoint);
      CHECK(f.step() == 0);
      CHECK(f.partial_log().records.empty());
    }
  }

  TEST_CASE("summary on an obstacle-free scenario") {
    ScenarioSpec spec = scenario_catalog(1);
    for (auto& t : spec.safe_set.tumors) t.center += Vec3(500, 500, 0);
    const TrajectoryLog log = run(spec);
    const SafetyReport rep = summarize(log, spec);
    CHECK(rep.deviation_integral == 0.0);
    CHECK_FALSE(rep.first_violation_time.has_value());
    CHECK(rep.path_completion == doctest::Approx(1.0));
    REQUIRE(rep.tracking_settle_time.has_value());
    CHECK(*rep.tracking_settle_time <= 0.5);
  }

  TEST_CASE("summary decay rate recovers a synthetic exponential") {
    ScenarioSpec spec = scenario_catalog(1);
    TrajectoryLog log;
    log.barrier_names = spec.safe_set.barrier_names();
    for (int k = 0; k <= 1000; ++k) {
      LogRecord r;
      r.t = k * 1e-3;
      r.edot = Vec3(std::exp(-4.0 * r.t), 0, 0);
      r.h = {1.5};
      r.gate_engaged = true;
      log.records.push_back(r);
    }
    const SafetyReport rep = summarize(log, spec);
    REQUIRE(rep.decay_rate.has_value());
    CHECK(*rep.decay_rate == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(rep.min_h == std::vector<double>{1.5});
    CHECK_FALSE(rep.first_violation_time.has_value());
    CHECK_THROWS_AS(summarize(TrajectoryLog{}, spec), Error);
  }

  TEST_CASE("CSV export round-trips exactly") {
    const fs::path dir = scratch_dir("csv");
    const TrajectoryLog log = run(short_spec(4, 1.5));
    export_csv(log, dir / "log.csv");
    CHECK(read_csv(dir / "log.csv") == log);
    const auto header = csv_header(log);
    CHECK(header.size() == kCsvFixedColumns + log.barrier_names.size());
    CHECK(header.front() == "t[s]");
  }

  TEST_CASE("CSV of an empty log is header-only") {
    const fs::path dir = scratch_dir("csv_empty");
    TrajectoryLog log;
    log.barrier_names = {"tumor0"};
    export_csv(log, dir / "empty.csv");
    std::ifstream in(dir / "empty.csv");
    int lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == 2);
    CHECK(read_csv(dir / "empty.csv") == log);
  }

  TEST_CASE("CSV errors") {
    try {
      export_csv(TrajectoryLog{}, "/nonexistent-dir/x/log.csv");
      FAIL("unwritable path accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Io);
    }
    const fs::path dir = scratch_dir("csv_bad");
    std::ofstream(dir / "bad.csv") << "not,a,log\n";
    CHECK_THROWS_AS(read_csv(dir / "bad.csv"), Error);
  }

  TEST_CASE("plot data files") {
    const fs::path dir = scratch_dir("plot");
    const ScenarioSpec spec = scenario_catalog(2);
    const TrajectoryLog log = run(spec);
    export_plot_data(log, spec, dir);
    for (const char* suffix : {"_path.dat", "_barrier.dat", "_velocity.dat"})
      CHECK(fs::exists(dir / ("scenario2" + std::string(suffix))));

    // Block 2 of the path file traces the keep-out boundaries.
    std::ifstream path(dir / "scenario2_path.dat");
    int block = 0;
    bool prev_blank = false;
    std::size_t boundary_points = 0;
    for (std::string line; std::getline(path, line);) {
      if (line.empty()) {
        if (!prev_blank) ++block;
        prev_blank = true;
        continue;
      }
      prev_blank = false;
      if (line[0] == '#' || block < 2) continue;
      std::istringstream ss(line);
      std::size_t b;
      Vec3 p;
      double radius;
      ss >> b >> p.x() >> p.y() >> p.z() >> radius;
      REQUIRE(b < spec.safe_set.tumors.size());
      CHECK(radius == spec.safe_set.tumors[b].margin);
      CHECK(std::abs(barrier_value(p, spec.safe_set.tumors[b])) < 1e-9);
      ++boundary_points;
    }
    CHECK(boundary_points > 0);

    // The barrier file minimum agrees with the summary.
    std::ifstream barrier(dir / "scenario2_barrier.dat");
    std::vector<double> mins(spec.safe_set.barrier_count(), std::numeric_limits<double>::infinity());
    for (std::string line; std::getline(barrier, line);) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss(line);
      double t;
      ss >> t;
      for (auto& m : mins) {
        double h;
        ss >> h;
        m = std::min(m, h);
      }
    }
    const SafetyReport rep = summarize(log, spec);
    for (std::size_t i = 0; i < mins.size(); ++i) CHECK(mins[i] == doctest::Approx(rep.min_h[i]).epsilon(1e-12));
  }
}

TEST_SUITE("config") {
  TEST_CASE("saved config reproduces the catalog scenario") {
    const fs::path dir = scratch_dir("config");
    for (int id = 1; id <= 4; ++id) {
      const ScenarioSpec spec = scenario_catalog(id);
      save_config(spec, dir / "s.cfg");
      const ScenarioSpec back = load_config(dir / "s.cfg");
      CHECK(to_config_text(back) == to_config_text(spec));
    }
    ScenarioSpec spec = short_spec(2, 0.5);
    const ScenarioSpec back = parse_config_text(to_config_text(spec));
    CHECK(run(back) == run(spec));
  }

  TEST_CASE("config overrides the catalog field by field") {
    const ScenarioSpec s = parse_config_text(
        "# sweep point\n"
        "scenario = 3\n"
        "filter.alpha = 0.8\n"
        "controller.k_d = 3000\n"
        "disturbance.waveform = constant\n"
        "disturbance.amplitude = 0, 5, 0\n");
    const ScenarioSpec base = scenario_catalog(3);
    CHECK(s.id == 3);
    CHECK(s.filter.alpha == 0.8);
    CHECK(s.controller.k_d == 3000.0);
    CHECK(s.disturbance.waveform == Waveform::Constant);
    CHECK(s.disturbance.amplitude == Vec3(0, 5, 0));
    CHECK(s.markings.size() == base.markings.size());
    CHECK(s.safe_set.tumors.size() == base.safe_set.tumors.size());
    CHECK(s.controller.damping == base.controller.damping);
  }

  TEST_CASE("config errors name the offending line") {
    try {
      parse_config_text("scenario = 1\nfilter.alhpa = 0.3\n");
      FAIL("unknown key accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
      CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("filter.alpha = abc\n"), Error);
    CHECK_THROWS_AS(parse_config_text("filter.alpha = -1\n"), Error);
    CHECK_THROWS_AS(parse_config_text("scenario = 9\n"), Error);
    CHECK_THROWS_AS(parse_config_text("just some words\n"), Error);
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), Error);
  }
}
