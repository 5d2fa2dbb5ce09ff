#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qotlab/qotlab.h"

namespace {

struct Runner {
    qot_runner *ptr = nullptr;
    Runner() { REQUIRE(qot_runner_create(&ptr) == QOT_OK); }
    ~Runner() { qot_runner_destroy(ptr); }
};

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_SUITE("capi") {

    TEST_CASE("version and scenario listing") {
        CHECK(std::strlen(qot_version()) > 0);
        const std::string names = qot_scenario_names();
        CHECK(names.find("honest-aon") != std::string::npos);
        CHECK(names.find("lo-bcqot") != std::string::npos);
    }

    TEST_CASE("invalid configuration is reported through status and message") {
        Runner r;
        CHECK(qot_runner_set_scenario(r.ptr, "no-such-thing") == QOT_ERROR_INVALID_ARGUMENT);
        CHECK(std::strlen(qot_runner_last_error(r.ptr)) > 0);
        CHECK(qot_runner_set_bc_mode(r.ptr, "sometimes") == QOT_ERROR_INVALID_ARGUMENT);
        CHECK(qot_runner_set_n(r.ptr, -3) == QOT_ERROR_INVALID_ARGUMENT);
        CHECK(qot_runner_summary_json(r.ptr) == nullptr);
        // n too small surfaces at run time.
        CHECK(qot_runner_set_scenario(r.ptr, "honest-aon") == QOT_OK);
        CHECK(qot_runner_set_n(r.ptr, 5) == QOT_OK);
        CHECK(qot_runner_run(r.ptr) == QOT_ERROR_INVALID_ARGUMENT);
    }

    TEST_CASE("variant conflicts with the scenario preset are rejected") {
        Runner r;
        REQUIRE(qot_runner_set_scenario(r.ptr, "cheat-12ot-t0") == QOT_OK);
        REQUIRE(qot_runner_set_variant(r.ptr, "aon") == QOT_OK);
        REQUIRE(qot_runner_set_trials(r.ptr, 50) == QOT_OK);
        CHECK(qot_runner_run(r.ptr) == QOT_ERROR_INVALID_ARGUMENT);
        CHECK(std::string(qot_runner_last_error(r.ptr)).find("variant") != std::string::npos);
    }

    TEST_CASE("a run produces a parseable summary with the fixed key order") {
        Runner r;
        REQUIRE(qot_runner_set_scenario(r.ptr, "honest-aon") == QOT_OK);
        REQUIRE(qot_runner_set_trials(r.ptr, 400) == QOT_OK);
        REQUIRE(qot_runner_set_seed(r.ptr, 11) == QOT_OK);
        REQUIRE(qot_runner_run(r.ptr) == QOT_OK);
        const char *json = qot_runner_summary_json(r.ptr);
        REQUIRE(json != nullptr);

        const auto parsed = nlohmann::json::parse(json);
        CHECK(parsed["scenario"] == "honest-aon");
        CHECK(parsed["trials"] == 400);
        CHECK(parsed["match_rate"].get<double>() > 0.6);
        CHECK(parsed["match_rate"].get<double>() < 0.9);
        CHECK(parsed["wilson95"].size() == 2);
        CHECK(parsed["abort_rate"] == 0.0);
        CHECK(parsed["analytic_reference"] == 0.75);

        const std::string text(json);
        CHECK(text.find("\"scenario\"") < text.find("\"trials\""));
        CHECK(text.find("\"trials\"") < text.find("\"match_rate\""));
        CHECK(text.find("\"match_rate\"") < text.find("\"wilson95\""));
        CHECK(text.find("\"wilson95\"") < text.find("\"abort_rate\""));
        CHECK(text.find("\"abort_rate\"") < text.find("\"analytic_reference\""));
    }

    TEST_CASE("identical configurations give identical summaries") {
        auto run_once = [] {
            Runner r;
            REQUIRE(qot_runner_set_scenario(r.ptr, "cheat-aon") == QOT_OK);
            REQUIRE(qot_runner_set_trials(r.ptr, 300) == QOT_OK);
            REQUIRE(qot_runner_set_seed(r.ptr, 99) == QOT_OK);
            REQUIRE(qot_runner_run(r.ptr) == QOT_OK);
            return std::string(qot_runner_summary_json(r.ptr));
        };
        CHECK(run_once() == run_once());
    }

    TEST_CASE("reports are written in both formats, bad paths fail with IO status") {
        Runner r;
        REQUIRE(qot_runner_set_scenario(r.ptr, "honest-aon") == QOT_OK);
        REQUIRE(qot_runner_set_trials(r.ptr, 150) == QOT_OK);
        REQUIRE(qot_runner_run(r.ptr) == QOT_OK);

        CHECK(qot_runner_write_report(r.ptr, "capi_report.json", "json") == QOT_OK);
        CHECK(qot_runner_write_report(r.ptr, "capi_report.csv", "csv") == QOT_OK);
        const std::string json = slurp("capi_report.json");
        CHECK(json == std::string(qot_runner_summary_json(r.ptr)));
        const std::string csv = slurp("capi_report.csv");
        CHECK(csv.rfind("scenario,trials,", 0) == 0);
        std::remove("capi_report.json");
        std::remove("capi_report.csv");

        CHECK(qot_runner_write_report(r.ptr, "/nonexistent_dir/x.json", "json") == QOT_ERROR_IO);
        CHECK(qot_runner_write_report(r.ptr, "x.bad", "xml") == QOT_ERROR_INVALID_ARGUMENT);
    }

    TEST_CASE("report before run is an error") {
        Runner r;
        CHECK(qot_runner_write_report(r.ptr, "nothing.json", "json") ==
              QOT_ERROR_INVALID_ARGUMENT);
    }

    TEST_CASE("session dump through the C API") {
        Runner r;
        REQUIRE(qot_runner_set_scenario(r.ptr, "honest-aon") == QOT_OK);
        REQUIRE(qot_runner_set_trials(r.ptr, 30) == QOT_OK);
        REQUIRE(qot_runner_set_session_dump(r.ptr, "capi_dump.txt", 1) == QOT_OK);
        REQUIRE(qot_runner_run(r.ptr) == QOT_OK);
        const std::string dump = slurp("capi_dump.txt");
        std::remove("capi_dump.txt");
        CHECK(dump.find("# session 0") != std::string::npos);
        CHECK(qot_runner_set_session_dump(r.ptr, "x", -1) == QOT_ERROR_INVALID_ARGUMENT);
    }
}
