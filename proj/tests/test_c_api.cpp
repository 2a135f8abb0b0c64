#include <esdcbf/esdcbf.h>

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace fs = std::filesystem;

TEST_SUITE("c_api") {
  TEST_CASE("version and status strings") {
    CHECK(std::string(esd_version()) == "1.0.0");
    CHECK(std::string(esd_status_string(ESD_OK)) == "ok");
    CHECK(std::strlen(esd_status_string(ESD_ERR_INFEASIBLE)) > 0);
  }

  TEST_CASE("catalog run, summary and exports") {
    esd_scenario* s = nullptr;
    REQUIRE(esd_scenario_from_catalog(1, &s) == ESD_OK);
    int id = 0;
    double alpha = 0.0;
    CHECK(esd_scenario_id(s, &id) == ESD_OK);
    CHECK(id == 1);
    CHECK(esd_scenario_alpha(s, &alpha) == ESD_OK);
    CHECK(alpha == 0.4);

    esd_log* log = nullptr;
    int64_t failed = -1;
    REQUIRE(esd_run(s, &log, &failed) == ESD_OK);
    CHECK(failed == -1);
    size_t n = 0, nb = 0;
    CHECK(esd_log_size(log, &n) == ESD_OK);
    CHECK(esd_log_barrier_count(log, &nb) == ESD_OK);
    CHECK(n > 1000);
    CHECK(nb == 1);

    double t, x[3], xdot[3], vd[3], vs[3], h[1];
    CHECK(esd_log_record(log, 0, &t, x, xdot, vd, vs, h) == ESD_OK);
    CHECK(t == 0.0);
    CHECK(esd_log_record(log, n, &t, x, xdot, vd, vs, h) == ESD_ERR_INVALID_ARGUMENT);

    esd_report rep;
    REQUIRE(esd_summarize(log, s, &rep) == ESD_OK);
    CHECK(rep.scenario_id == 1);
    CHECK(rep.barrier_count == 1);
    CHECK(std::string(rep.barrier_names[0]) == "tumor0");
    CHECK(rep.safe == 1);
    CHECK(rep.min_h[0] >= -1e-3);

    const fs::path dir = fs::temp_directory_path() / "esdcbf_capi";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string csv = (dir / "log.csv").string();
    CHECK(esd_export_csv(log, csv.c_str()) == ESD_OK);
    esd_log* back = nullptr;
    REQUIRE(esd_read_csv(csv.c_str(), &back) == ESD_OK);
    int equal = 0;
    CHECK(esd_log_equal(log, back, &equal) == ESD_OK);
    CHECK(equal == 1);
    CHECK(esd_export_plot_data(log, s, dir.string().c_str()) == ESD_OK);
    CHECK(fs::exists(dir / "scenario1_velocity.dat"));

    esd_log_destroy(back);
    esd_log_destroy(log);
    esd_scenario_destroy(s);
  }

  TEST_CASE("scenario mutation and clone") {
    esd_scenario* s = nullptr;
    REQUIRE(esd_scenario_from_catalog(2, &s) == ESD_OK);
    esd_scenario* c = nullptr;
    REQUIRE(esd_scenario_clone(s, &c) == ESD_OK);
    CHECK(esd_scenario_set_alpha(c, 0.8) == ESD_OK);
    double a = 0.0;
    esd_scenario_alpha(s, &a);
    CHECK(a == 0.4);
    esd_scenario_alpha(c, &a);
    CHECK(a == 0.8);
    CHECK(esd_scenario_set_alpha(c, -1.0) == ESD_ERR_INVALID_ARGUMENT);
    const double amp[3] = {0.0, 10.0, 0.0};
    CHECK(esd_scenario_set_disturbance(c, ESD_WAVEFORM_SINUSOID, amp, 2.0, 5) == ESD_OK);
    CHECK(esd_scenario_set_disturbance(c, ESD_WAVEFORM_SINUSOID, amp, -2.0, 5) == ESD_ERR_INVALID_ARGUMENT);
    CHECK(esd_scenario_set_filter_enabled(c, 0) == ESD_OK);
    esd_scenario_destroy(c);
    esd_scenario_destroy(s);
  }

  TEST_CASE("config text round trip through the C interface") {
    esd_scenario* s = nullptr;
    REQUIRE(esd_scenario_parse("scenario = 3\nfilter.alpha = 0.2\nsim.duration = 0.2\n", &s) == ESD_OK);
    const fs::path path = fs::temp_directory_path() / "esdcbf_capi.cfg";
    CHECK(esd_scenario_save(s, path.string().c_str()) == ESD_OK);
    esd_scenario* back = nullptr;
    REQUIRE(esd_scenario_load(path.string().c_str(), &back) == ESD_OK);
    esd_log *a = nullptr, *b = nullptr;
    REQUIRE(esd_run(s, &a, nullptr) == ESD_OK);
    REQUIRE(esd_run(back, &b, nullptr) == ESD_OK);
    int equal = 0;
    esd_log_equal(a, b, &equal);
    CHECK(equal == 1);
    esd_log_destroy(a);
    esd_log_destroy(b);
    esd_scenario_destroy(back);
    esd_scenario_destroy(s);
  }

  TEST_CASE("error codes and messages") {
    esd_scenario* s = nullptr;
    CHECK(esd_scenario_from_catalog(9, &s) == ESD_ERR_UNKNOWN_SCENARIO);
    CHECK(s == nullptr);
    CHECK(std::strlen(esd_last_error()) > 0);
    CHECK(esd_scenario_parse("filter.bogus = 1\n", &s) == ESD_ERR_CONFIG);
    CHECK(esd_scenario_load("/nonexistent/x.cfg", &s) == ESD_ERR_IO);
    CHECK(esd_scenario_from_catalog(1, nullptr) == ESD_ERR_INVALID_ARGUMENT);
    CHECK(esd_run(nullptr, nullptr, nullptr) == ESD_ERR_INVALID_ARGUMENT);
    esd_log* log = nullptr;
    CHECK(esd_read_csv("/nonexistent/log.csv", &log) == ESD_ERR_IO);
    esd_scenario_destroy(nullptr);
    esd_log_destroy(nullptr);
  }

  TEST_CASE("failed run reports the failing step") {
    // A depth shell centred on the starting tip has no defined normal.
    esd_scenario* s = nullptr;
    REQUIRE(esd_scenario_parse("scenario = 1\n"
                               "tumors.count = 0\n"
                               "markings.count = 0\n"
                               "shells.count = 1\n"
                               "shell.0.center = 0, 0, 42.649110640673518\n"
                               "shell.0.outer_radius = 5\n"
                               "filter.mode = keep_out_and_depth\n",
                               &s) == ESD_OK);
    esd_log* log = nullptr;
    int64_t failed = -1;
    CHECK(esd_run(s, &log, &failed) == ESD_ERR_DEGENERATE);
    CHECK(log == nullptr);
    CHECK(failed == 0);
    esd_scenario_destroy(s);
  }

  TEST_CASE("verification suites through the C interface") {
    CHECK(esd_verify_suite_count() == 10);
    CHECK(std::string(esd_verify_suite_name(0)) == "jacobian-fd");
    CHECK(esd_verify_suite_name(100) == nullptr);
  }
}
