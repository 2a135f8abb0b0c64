// esdcbf command-line driver. Links only the C interface.
//
// Exit codes:
//   0  success (run: every run met safety invariance; verify: every suite passed)
//   1  run: at least one run violated a barrier; verify: at least one suite failed
//   2  usage or configuration error
//   3  simulation failure (the failing step is printed)
//   4  file I/O error

#include <esdcbf/esdcbf.h>

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUnsafe = 1, kUsage = 2, kRunFailure = 3, kIo = 4 };

struct ScenarioDeleter {
  void operator()(esd_scenario* s) const { esd_scenario_destroy(s); }
};
struct LogDeleter {
  void operator()(esd_log* l) const { esd_log_destroy(l); }
};
using ScenarioPtr = std::unique_ptr<esd_scenario, ScenarioDeleter>;
using LogPtr = std::unique_ptr<esd_log, LogDeleter>;

int exit_code_for(esd_status st) {
  switch (st) {
    case ESD_OK: return kOk;
    case ESD_ERR_IO: return kIo;
    case ESD_ERR_INVALID_ARGUMENT:
    case ESD_ERR_UNKNOWN_SCENARIO:
    case ESD_ERR_CONFIG: return kUsage;
    default: return kRunFailure;
  }
}

struct Disturbance {
  esd_waveform waveform = ESD_WAVEFORM_NONE;
  double amplitude[3] = {0.0, 0.0, 0.0};
  double frequency = 1.0;
};

// Accepts "none", "constant:a,b,c" or "sinusoid:a,b,c@f".
bool parse_disturbance(const std::string& text, Disturbance& out, std::string& error) {
  if (text == "none") {
    out = Disturbance{};
    return true;
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    error = "expected none, constant:a,b,c or sinusoid:a,b,c@f";
    return false;
  }
  const std::string kind = text.substr(0, colon);
  std::string rest = text.substr(colon + 1);
  if (kind == "constant") {
    out.waveform = ESD_WAVEFORM_CONSTANT;
  } else if (kind == "sinusoid") {
    out.waveform = ESD_WAVEFORM_SINUSOID;
    const auto at = rest.find('@');
    if (at == std::string::npos) {
      error = "sinusoid needs a frequency: sinusoid:a,b,c@f";
      return false;
    }
    try {
      out.frequency = std::stod(rest.substr(at + 1));
    } catch (const std::exception&) {
      error = "bad frequency '" + rest.substr(at + 1) + "'";
      return false;
    }
    rest = rest.substr(0, at);
  } else {
    error = "unknown waveform '" + kind + "'";
    return false;
  }
  std::stringstream ss(rest);
  std::string item;
  int n = 0;
  while (std::getline(ss, item, ',')) {
    if (n == 3) {
      error = "amplitude needs exactly three components";
      return false;
    }
    try {
      out.amplitude[n++] = std::stod(item);
    } catch (const std::exception&) {
      error = "bad amplitude component '" + item + "'";
      return false;
    }
  }
  if (n != 3) {
    error = "amplitude needs exactly three components";
    return false;
  }
  return true;
}

struct Job {
  int scenario_id = 0;          // catalog id, or 0 when loading a config file
  bool has_alpha = false;
  double alpha = 0.0;
  fs::path dir;
};

struct JobResult {
  int code = kOk;
  bool ran = false;
  esd_report report{};
  std::string message;
};

std::string alpha_dir_name(double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "alpha_%g", alpha);
  return buf;
}

struct RunSettings {
  std::string config_path;
  bool no_filter = false;
  bool has_disturbance = false;
  Disturbance disturbance;
  std::uint64_t seed = 0;
  bool emit_csv = false;
  bool emit_plot = false;
  bool emit_report = false;
};

void write_report_file(const fs::path& path, const esd_report& r, std::string& error) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) {
    error = "cannot write " + path.string();
    return;
  }
  std::fprintf(f, "scenario = %d\nalpha = %.17g\n", r.scenario_id, r.alpha);
  for (size_t i = 0; i < r.barrier_count; ++i)
    std::fprintf(f, "min_h.%s = %.17g\n", r.barrier_names[i], r.min_h[i]);
  if (r.has_gate_time) std::fprintf(f, "gate_time = %.17g\n", r.gate_time);
  if (r.has_violation) std::fprintf(f, "first_violation_time = %.17g\n", r.first_violation_time);
  std::fprintf(f, "max_tracking_error = %.17g\n", r.max_tracking_error);
  if (r.has_settle_time) std::fprintf(f, "tracking_settle_time = %.17g\n", r.tracking_settle_time);
  if (r.has_decay_rate) std::fprintf(f, "decay_rate = %.17g\n", r.decay_rate);
  std::fprintf(f, "path_completion = %.17g\n", r.path_completion);
  std::fprintf(f, "deviation_integral = %.17g\n", r.deviation_integral);
  std::fprintf(f, "safe = %d\n", r.safe);
  if (std::fclose(f) != 0) error = "cannot write " + path.string();
}

JobResult execute(const Job& job, const RunSettings& settings) {
  JobResult res;
  esd_scenario* raw = nullptr;
  esd_status st = job.scenario_id > 0 ? esd_scenario_from_catalog(job.scenario_id, &raw)
                                      : esd_scenario_load(settings.config_path.c_str(), &raw);
  ScenarioPtr scenario(raw);
  auto fail = [&](esd_status s) {
    res.code = exit_code_for(s);
    res.message = esd_last_error();
    return res;
  };
  if (st != ESD_OK) return fail(st);
  if (job.has_alpha && (st = esd_scenario_set_alpha(scenario.get(), job.alpha)) != ESD_OK) return fail(st);
  if (settings.no_filter && (st = esd_scenario_set_filter_enabled(scenario.get(), 0)) != ESD_OK) return fail(st);
  if (settings.has_disturbance) {
    const Disturbance& d = settings.disturbance;
    st = esd_scenario_set_disturbance(scenario.get(), d.waveform, d.amplitude, d.frequency, settings.seed);
    if (st != ESD_OK) return fail(st);
  }
  int id = 0;
  esd_scenario_id(scenario.get(), &id);

  esd_log* log_raw = nullptr;
  int64_t failed_step = -1;
  st = esd_run(scenario.get(), &log_raw, &failed_step);
  LogPtr log(log_raw);
  if (st != ESD_OK) {
    res.code = exit_code_for(st);
    res.message = esd_last_error();
    if (failed_step >= 0) res.message += " (failed at step " + std::to_string(failed_step) + ")";
    return res;
  }
  if ((st = esd_summarize(log.get(), scenario.get(), &res.report)) != ESD_OK) return fail(st);
  res.ran = true;

  std::error_code ec;
  fs::create_directories(job.dir, ec);
  if (ec) {
    res.code = kIo;
    res.message = "cannot create " + job.dir.string() + ": " + ec.message();
    return res;
  }
  const std::string stem = "scenario" + std::to_string(id);
  if (settings.emit_csv) {
    const fs::path path = job.dir / (stem + ".csv");
    if ((st = esd_export_csv(log.get(), path.string().c_str())) != ESD_OK) return fail(st);
  }
  if (settings.emit_plot) {
    if ((st = esd_export_plot_data(log.get(), scenario.get(), job.dir.string().c_str())) != ESD_OK) return fail(st);
  }
  if (settings.emit_report) {
    std::string error;
    write_report_file(job.dir / (stem + "_report.txt"), res.report, error);
    if (!error.empty()) {
      res.code = kIo;
      res.message = error;
      return res;
    }
  }
  res.code = res.report.safe ? kOk : kUnsafe;
  return res;
}

void print_table(const std::vector<Job>& jobs, const std::vector<JobResult>& results) {
  std::printf("%-8s %-6s %-12s %-10s %-12s %-10s %-10s %-10s %-12s %s\n", "scenario", "alpha", "min_h[mm]",
              "gate[s]", "violate[s]", "decay[1/s]", "settle[s]", "complete", "deviation", "safe");
  for (size_t i = 0; i < jobs.size(); ++i) {
    const JobResult& r = results[i];
    if (!r.ran) {
      std::printf("%-8s %-6s failed: %s\n", jobs[i].scenario_id ? std::to_string(jobs[i].scenario_id).c_str() : "config",
                  jobs[i].has_alpha ? alpha_dir_name(jobs[i].alpha).substr(6).c_str() : "-", r.message.c_str());
      continue;
    }
    const esd_report& rep = r.report;
    double min_h = rep.barrier_count ? rep.min_h[0] : 0.0;
    for (size_t b = 1; b < rep.barrier_count; ++b) min_h = std::min(min_h, rep.min_h[b]);
    auto opt = [](int has, double v) {
      char buf[32];
      if (has)
        std::snprintf(buf, sizeof buf, "%.4g", v);
      else
        std::snprintf(buf, sizeof buf, "-");
      return std::string(buf);
    };
    std::printf("%-8d %-6g %-12.6g %-10s %-12s %-10s %-10s %-10.3f %-12.6g %s\n", rep.scenario_id, rep.alpha, min_h,
                opt(rep.has_gate_time, rep.gate_time).c_str(), opt(rep.has_violation, rep.first_violation_time).c_str(),
                opt(rep.has_decay_rate, rep.decay_rate).c_str(),
                opt(rep.has_settle_time, rep.tracking_settle_time).c_str(), rep.path_completion,
                rep.deviation_integral, rep.safe ? "yes" : "NO");
    if (!r.message.empty()) std::printf("         error: %s\n", r.message.c_str());
  }
}

int cmd_run(const std::vector<int>& scenarios, const RunSettings& settings, const std::vector<double>& alphas,
            const fs::path& out_dir, unsigned jobs_limit) {
  std::vector<Job> jobs;
  std::vector<int> ids = scenarios;
  if (ids.empty()) ids.push_back(0);
  for (int id : ids) {
    if (alphas.empty()) {
      jobs.push_back(Job{id, false, 0.0, out_dir});
    } else {
      for (double a : alphas)
        jobs.push_back(Job{id, true, a, alphas.size() > 1 ? out_dir / alpha_dir_name(a) : out_dir});
    }
  }

  std::vector<JobResult> results(jobs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < jobs.size();) results[i] = execute(jobs[i], settings);
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs_limit, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  print_table(jobs, results);

  // The most severe outcome decides the exit code: usage, I/O, run failure, then safety.
  int code = kOk;
  for (const auto& r : results) {
    if (r.code == kOk) continue;
    if (!r.ran) std::fprintf(stderr, "esdcbf: %s\n", r.message.c_str());
    auto rank = [](int c) {
      switch (c) {
        case kUsage: return 4;
        case kIo: return 3;
        case kRunFailure: return 2;
        case kUnsafe: return 1;
        default: return 0;
      }
    };
    if (rank(r.code) > rank(code)) code = r.code;
  }
  return code;
}

void print_suite(const char* name, int passed, const char* detail, void*) {
  std::printf("%-4s %-22s %s\n", passed ? "PASS" : "FAIL", name, detail);
  std::fflush(stdout);
}

int cmd_verify(bool corrupt_gravity_sign) {
  int failures = 0;
  const esd_status st = esd_verify(corrupt_gravity_sign ? 1 : 0, print_suite, nullptr, &failures);
  if (st != ESD_OK) {
    std::fprintf(stderr, "esdcbf: %s\n", esd_last_error());
    return exit_code_for(st);
  }
  std::printf("%d of %zu suites failed\n", failures, esd_verify_suite_count());
  return failures == 0 ? kOk : kUnsafe;
}

int cmd_config(int scenario, const std::string& out) {
  esd_scenario* raw = nullptr;
  esd_status st = esd_scenario_from_catalog(scenario, &raw);
  ScenarioPtr s(raw);
  if (st == ESD_OK) st = esd_scenario_save(s.get(), out.c_str());
  if (st != ESD_OK) {
    std::fprintf(stderr, "esdcbf: %s\n", esd_last_error());
    return exit_code_for(st);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("esdcbf ") + esd_version() + ": safety-filtered endoscopic cutting simulation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  const char* env_out = std::getenv("ESDCBF_OUT_DIR");
  std::string out_dir = env_out && *env_out ? env_out : "out";

  auto* run = app.add_subcommand("run", "Run catalog scenarios or a config file and write results");
  std::vector<int> scenarios;
  std::string config_path;
  std::vector<double> alphas;
  std::string disturbance_text;
  std::vector<std::string> emit{"plotdata"};
  bool no_filter = false;
  std::uint64_t seed = 0;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* scenario_opt = run->add_option("-s,--scenario", scenarios, "Catalog scenario ids (1-4), comma separated")
                           ->delimiter(',');
  auto* config_opt = run->add_option("-c,--config", config_path, "Scenario config file")->check(CLI::ExistingFile);
  scenario_opt->excludes(config_opt);
  run->add_option("-a,--alpha", alphas, "Barrier gain override; a list runs a sweep")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  run->add_option("-d,--disturbance", disturbance_text, "none | constant:a,b,c | sinusoid:a,b,c@f");
  run->add_option("--seed", seed, "Phase seed for sinusoidal disturbances");
  run->add_option("-o,--out", out_dir, "Output directory (default $ESDCBF_OUT_DIR or ./out)");
  run->add_option("-e,--emit", emit, "Outputs to write: csv, plotdata, report")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "plotdata", "report"}));
  run->add_flag("--no-filter", no_filter, "Disable the safety filter (counterfactual run)");
  run->add_option("-j,--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run the oracle verification suites");
  bool corrupt = false;
  verify->add_flag("--corrupt-gravity-sign", corrupt, "Flip the gravity sign in the energy audit (negative control)");

  auto* config = app.add_subcommand("config", "Write a catalog scenario as an editable config file");
  int config_scenario = 0;
  std::string config_out;
  config->add_option("-s,--scenario", config_scenario, "Catalog scenario id")->required();
  config->add_option("-o,--out", config_out, "Destination file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (run->parsed()) {
    if (scenarios.empty() && config_path.empty()) {
      std::fprintf(stderr, "esdcbf: run needs --scenario or --config\n");
      return kUsage;
    }
    if (emit.empty()) {
      std::fprintf(stderr, "esdcbf: --emit needs at least one of csv, plotdata, report\n");
      return kUsage;
    }
    RunSettings settings;
    settings.config_path = config_path;
    settings.no_filter = no_filter;
    settings.seed = seed;
    for (const auto& e : emit) {
      settings.emit_csv |= e == "csv";
      settings.emit_plot |= e == "plotdata";
      settings.emit_report |= e == "report";
    }
    if (!disturbance_text.empty()) {
      std::string error;
      if (!parse_disturbance(disturbance_text, settings.disturbance, error)) {
        std::fprintf(stderr, "esdcbf: --disturbance: %s\n", error.c_str());
        return kUsage;
      }
      settings.has_disturbance = true;
    }
    for (int id : scenarios) {
      esd_scenario* probe = nullptr;
      if (esd_scenario_from_catalog(id, &probe) != ESD_OK) {
        std::fprintf(stderr, "esdcbf: %s\n", esd_last_error());
        return kUsage;
      }
      esd_scenario_destroy(probe);
    }
    return cmd_run(scenarios, settings, alphas, out_dir, jobs);
  }
  if (verify->parsed()) return cmd_verify(corrupt);
  return cmd_config(config_scenario, config_out);
}
