#include "esdcbf/esdcbf.h"

#include "esdcbf/config.hpp"
#include "esdcbf/sim.hpp"
#include "esdcbf/verify.hpp"

#include <cstring>
#include <exception>
#include <string>

struct esd_scenario {
  esdcbf::ScenarioSpec spec;
};

struct esd_log {
  esdcbf::TrajectoryLog log;
};

namespace {

thread_local std::string g_last_error;

esd_status to_status(esdcbf::ErrorKind k) {
  using esdcbf::ErrorKind;
  switch (k) {
    case ErrorKind::InvalidArgument: return ESD_ERR_INVALID_ARGUMENT;
    case ErrorKind::UnknownScenario: return ESD_ERR_UNKNOWN_SCENARIO;
    case ErrorKind::Config: return ESD_ERR_CONFIG;
    case ErrorKind::SingularMatrix: return ESD_ERR_SINGULAR;
    case ErrorKind::DegeneratePoint: return ESD_ERR_DEGENERATE;
    case ErrorKind::InfeasibleQp: return ESD_ERR_INFEASIBLE;
    case ErrorKind::InsufficientTransient: return ESD_ERR_INSUFFICIENT_TRANSIENT;
    case ErrorKind::EmptyLog: return ESD_ERR_EMPTY_LOG;
    case ErrorKind::Io: return ESD_ERR_IO;
  }
  return ESD_ERR_INTERNAL;
}

esd_status invalid(const char* what) {
  g_last_error = what;
  return ESD_ERR_INVALID_ARGUMENT;
}

// Runs fn, mapping exceptions onto status codes.
template <typename Fn>
esd_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ESD_OK;
  } catch (const esdcbf::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ESD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return ESD_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* esd_version(void) { return "1.0.0"; }

const char* esd_last_error(void) { return g_last_error.c_str(); }

const char* esd_status_string(esd_status status) {
  switch (status) {
    case ESD_OK: return "ok";
    case ESD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ESD_ERR_UNKNOWN_SCENARIO: return "unknown scenario";
    case ESD_ERR_CONFIG: return "configuration error";
    case ESD_ERR_SINGULAR: return "singular matrix";
    case ESD_ERR_DEGENERATE: return "degenerate point";
    case ESD_ERR_INFEASIBLE: return "infeasible safety QP";
    case ESD_ERR_INSUFFICIENT_TRANSIENT: return "insufficient transient";
    case ESD_ERR_EMPTY_LOG: return "empty log";
    case ESD_ERR_IO: return "I/O error";
    case ESD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

esd_status esd_scenario_from_catalog(int id, esd_scenario** out) {
  if (!out) return invalid("null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new esd_scenario{esdcbf::scenario_catalog(id)}; });
}

esd_status esd_scenario_load(const char* path, esd_scenario** out) {
  if (!path || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    auto spec = esdcbf::load_config(path);
    spec.validate();
    *out = new esd_scenario{std::move(spec)};
  });
}

esd_status esd_scenario_parse(const char* text, esd_scenario** out) {
  if (!text || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    auto spec = esdcbf::parse_config_text(text);
    spec.validate();
    *out = new esd_scenario{std::move(spec)};
  });
}

esd_status esd_scenario_save(const esd_scenario* s, const char* path) {
  if (!s || !path) return invalid("null argument");
  return guarded([&] { esdcbf::save_config(s->spec, path); });
}

esd_status esd_scenario_clone(const esd_scenario* s, esd_scenario** out) {
  if (!s || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new esd_scenario{s->spec}; });
}

void esd_scenario_destroy(esd_scenario* s) { delete s; }

esd_status esd_scenario_id(const esd_scenario* s, int* id) {
  if (!s || !id) return invalid("null argument");
  *id = s->spec.id;
  return ESD_OK;
}

esd_status esd_scenario_alpha(const esd_scenario* s, double* alpha) {
  if (!s || !alpha) return invalid("null argument");
  *alpha = s->spec.filter.alpha;
  return ESD_OK;
}

esd_status esd_scenario_set_alpha(esd_scenario* s, double alpha) {
  if (!s) return invalid("null scenario");
  if (!(alpha > 0.0)) return invalid("alpha must be positive");
  s->spec.filter.alpha = alpha;
  return ESD_OK;
}

esd_status esd_scenario_set_filter_enabled(esd_scenario* s, int enabled) {
  if (!s) return invalid("null scenario");
  s->spec.filter.enabled = enabled != 0;
  return ESD_OK;
}

esd_status esd_scenario_set_disturbance(esd_scenario* s, esd_waveform waveform, const double amplitude[3],
                                        double frequency, uint64_t seed) {
  if (!s) return invalid("null scenario");
  esdcbf::DisturbanceSpec d;
  switch (waveform) {
    case ESD_WAVEFORM_NONE: d.waveform = esdcbf::Waveform::None; break;
    case ESD_WAVEFORM_CONSTANT: d.waveform = esdcbf::Waveform::Constant; break;
    case ESD_WAVEFORM_SINUSOID: d.waveform = esdcbf::Waveform::Sinusoid; break;
    default: return invalid("unknown waveform");
  }
  if (amplitude) d.amplitude = esdcbf::Vec3(amplitude[0], amplitude[1], amplitude[2]);
  d.frequency = frequency;
  d.seed = seed;
  return guarded([&] {
    d.validate();
    s->spec.disturbance = d;
  });
}

esd_status esd_run(const esd_scenario* s, esd_log** out, int64_t* failed_step) {
  if (!s || !out) return invalid("null argument");
  *out = nullptr;
  if (failed_step) *failed_step = -1;
  try {
    *out = new esd_log{esdcbf::run(s->spec)};
    g_last_error.clear();
    return ESD_OK;
  } catch (const esdcbf::RunFailure& f) {
    g_last_error = f.what();
    if (failed_step) *failed_step = static_cast<int64_t>(f.step());
    return to_status(f.kind());
  } catch (...) {
    return guarded([] { throw; });
  }
}

void esd_log_destroy(esd_log* log) { delete log; }

esd_status esd_log_size(const esd_log* log, size_t* records) {
  if (!log || !records) return invalid("null argument");
  *records = log->log.records.size();
  return ESD_OK;
}

esd_status esd_log_barrier_count(const esd_log* log, size_t* count) {
  if (!log || !count) return invalid("null argument");
  *count = log->log.barrier_names.size();
  return ESD_OK;
}

esd_status esd_log_record(const esd_log* log, size_t i, double* t, double x[3], double xdot[3], double xdot_d[3],
                          double xdot_s[3], double* h) {
  if (!log) return invalid("null log");
  if (i >= log->log.records.size()) return invalid("record index out of range");
  const auto& r = log->log.records[i];
  auto copy = [](double* dst, const esdcbf::Vec3& v) {
    if (dst) std::memcpy(dst, v.data(), 3 * sizeof(double));
  };
  if (t) *t = r.t;
  copy(x, r.x);
  copy(xdot, r.xdot);
  copy(xdot_d, r.xdot_d);
  copy(xdot_s, r.xdot_s);
  if (h && !r.h.empty()) std::memcpy(h, r.h.data(), r.h.size() * sizeof(double));
  return ESD_OK;
}

esd_status esd_log_equal(const esd_log* a, const esd_log* b, int* equal) {
  if (!a || !b || !equal) return invalid("null argument");
  *equal = a->log == b->log ? 1 : 0;
  return ESD_OK;
}

esd_status esd_summarize(const esd_log* log, const esd_scenario* s, esd_report* out) {
  if (!log || !s || !out) return invalid("null argument");
  return guarded([&] {
    const auto rep = esdcbf::summarize(log->log, s->spec);
    if (rep.barrier_names.size() > ESD_MAX_BARRIERS)
      throw esdcbf::Error(esdcbf::ErrorKind::InvalidArgument, "too many barriers for esd_report");
    esd_report r{};
    r.scenario_id = s->spec.id;
    r.alpha = rep.alpha;
    r.barrier_count = rep.barrier_names.size();
    for (std::size_t i = 0; i < r.barrier_count; ++i) {
      std::strncpy(r.barrier_names[i], rep.barrier_names[i].c_str(), ESD_NAME_LEN - 1);
      r.min_h[i] = rep.min_h[i];
    }
    r.has_gate_time = rep.gate_time.has_value();
    r.gate_time = rep.gate_time.value_or(0.0);
    r.has_violation = rep.first_violation_time.has_value();
    r.first_violation_time = rep.first_violation_time.value_or(0.0);
    r.max_tracking_error = rep.max_tracking_error;
    r.has_settle_time = rep.tracking_settle_time.has_value();
    r.tracking_settle_time = rep.tracking_settle_time.value_or(0.0);
    r.has_decay_rate = rep.decay_rate.has_value();
    r.decay_rate = rep.decay_rate.value_or(0.0);
    r.path_completion = rep.path_completion;
    r.deviation_integral = rep.deviation_integral;
    r.safe = rep.safe() ? 1 : 0;
    *out = r;
  });
}

esd_status esd_export_csv(const esd_log* log, const char* path) {
  if (!log || !path) return invalid("null argument");
  return guarded([&] { esdcbf::export_csv(log->log, path); });
}

esd_status esd_read_csv(const char* path, esd_log** out) {
  if (!path || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new esd_log{esdcbf::read_csv(path)}; });
}

esd_status esd_export_plot_data(const esd_log* log, const esd_scenario* s, const char* dir) {
  if (!log || !s || !dir) return invalid("null argument");
  return guarded([&] { esdcbf::export_plot_data(log->log, s->spec, dir); });
}

size_t esd_verify_suite_count(void) { return esdcbf::verify_suite_names().size(); }

const char* esd_verify_suite_name(size_t i) {
  const auto& names = esdcbf::verify_suite_names();
  return i < names.size() ? names[i].c_str() : nullptr;
}

esd_status esd_verify(int corrupt_gravity_sign, esd_suite_callback cb, void* user, int* failures) {
  if (!failures) return invalid("null argument");
  return guarded([&] {
    esdcbf::VerifyOptions opts;
    opts.corrupt_gravity_sign = corrupt_gravity_sign != 0;
    int failed = 0;
    for (const auto& r : esdcbf::run_verification(opts)) {
      if (!r.passed) ++failed;
      if (cb) cb(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
    }
    *failures = failed;
  });
}

}  // extern "C"
