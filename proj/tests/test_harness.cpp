#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "harness.hpp"
#include "stats.hpp"

using namespace qot;

namespace {

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_SUITE("harness") {

    TEST_CASE("wilson interval behaves sanely") {
        const Interval i = wilson95(75, 100);
        CHECK(i.lo < 0.75);
        CHECK(i.hi > 0.75);
        CHECK(i.contains(0.75));
        const Interval all = wilson95(100, 100);
        CHECK(all.hi == 1.0);
        CHECK(all.lo > 0.95);
        CHECK_THROWS_AS(wilson95(0, 0), std::invalid_argument);
    }

    TEST_CASE("chi-square p-values") {
        CHECK(chi_square_p_value(0.0, 1) == doctest::Approx(1.0));
        CHECK(chi_square_p_value(100.0, 1) < 1e-10);
        // Median of chi-square with 1 dof is about 0.455.
        CHECK(chi_square_p_value(0.455, 1) == doctest::Approx(0.5).epsilon(0.01));
        const std::vector<std::vector<std::size_t>> balanced = {{50, 50}, {50, 50}};
        CHECK(chi_square_independence(balanced) > 0.95);
        const std::vector<std::vector<std::size_t>> skewed = {{90, 10}, {10, 90}};
        CHECK(chi_square_independence(skewed) < 1e-6);
    }

    TEST_CASE("scenario names round-trip") {
        for (const std::string &name : scenario_names()) {
            CHECK(scenario_name(scenario_from_name(name)) == name);
        }
        CHECK_THROWS_AS(scenario_from_name("nope"), std::invalid_argument);
    }

    TEST_CASE("scenario presets pin variant and vault mode") {
        CHECK(make_scenario(ScenarioKind::Cheat12T0).config.variant == Variant::OneOfTwo);
        CHECK(make_scenario(ScenarioKind::CheatAonBccc).config.bc_mode == BcMode::Bccc);
        CHECK(make_scenario(ScenarioKind::HonestAon).config.n == 25);
        CHECK(make_scenario(ScenarioKind::LoIdeal).trials == 100);
    }

    TEST_CASE("run_scenario is deterministic and worker-count independent") {
        const Scenario sc = make_scenario(ScenarioKind::HonestAon, 25, 400, 0);
        setenv("QOTLAB_WORKERS", "1", 1);
        const RunSummary serial = run_scenario(sc, 2024);
        setenv("QOTLAB_WORKERS", "4", 1);
        const RunSummary parallel = run_scenario(sc, 2024);
        unsetenv("QOTLAB_WORKERS");
        CHECK(serial.digest == parallel.digest);
        CHECK(serial.match_rate == parallel.match_rate);
        CHECK(render_report_json({serial}) == render_report_json({parallel}));

        const RunSummary other_seed = run_scenario(sc, 2025);
        CHECK(other_seed.digest != serial.digest);
    }

    TEST_CASE("anchored scenarios carry their reference inside the wilson interval") {
        struct Anchor {
            ScenarioKind kind;
            double reference;
        };
        const Anchor anchors[] = {
            {ScenarioKind::HonestAon, 0.75},
            {ScenarioKind::CheatAon, entangled_decode_reliability()},
            {ScenarioKind::CheatAonBccc, 0.75},
        };
        for (const Anchor &a : anchors) {
            const RunSummary s = run_scenario(make_scenario(a.kind, 25, 3000, 0), 77);
            REQUIRE(s.analytic_reference.has_value());
            CHECK(*s.analytic_reference == doctest::Approx(a.reference).epsilon(1e-12));
            CHECK(s.wilson.contains(a.reference));
        }
    }

    TEST_CASE("reports render the fixed schema with 9 significant digits") {
        RunSummary s;
        s.scenario = "honest-aon";
        s.trials = 3;
        s.match_rate = 1.0 / 3.0;
        s.wilson = Interval{0.1, 0.2};
        s.abort_rate = 0.0;
        s.analytic_reference = 0.75;

        const std::string json = render_report_json({s});
        CHECK(json ==
              "{\"scenario\":\"honest-aon\",\"trials\":3,\"match_rate\":0.333333333,"
              "\"wilson95\":[0.1,0.2],\"abort_rate\":0,\"analytic_reference\":0.75}\n");
        const auto parsed = nlohmann::json::parse(json);
        CHECK(parsed["scenario"] == "honest-aon");
        CHECK(parsed["wilson95"].size() == 2);

        RunSummary bare = s;
        bare.analytic_reference.reset();
        const std::string json_null = render_report_json({bare});
        CHECK(json_null.find("\"analytic_reference\":null") != std::string::npos);

        const std::string csv = render_report_csv({s, bare});
        std::istringstream lines(csv);
        std::string header;
        std::getline(lines, header);
        CHECK(header == "scenario,trials,match_rate,wilson_lo,wilson_hi,abort_rate,analytic_reference");
        std::string row1, row2;
        std::getline(lines, row1);
        std::getline(lines, row2);
        CHECK(row1 == "honest-aon,3,0.333333333,0.1,0.2,0,0.75");
        CHECK(row2 == "honest-aon,3,0.333333333,0.1,0.2,0,");
    }

    TEST_CASE("emit_report writes byte-identical files and flags bad paths") {
        const Scenario sc = make_scenario(ScenarioKind::HonestAon, 25, 120, 0);
        const RunSummary s = run_scenario(sc, 5);
        const std::string path1 = "report_test_1.json";
        const std::string path2 = "report_test_2.json";
        emit_report({s}, "json", path1);
        emit_report({s}, "json", path2);
        CHECK(slurp(path1) == slurp(path2));
        std::remove(path1.c_str());
        std::remove(path2.c_str());
        CHECK_THROWS_AS(emit_report({s}, "json", "/nonexistent_dir/report.json"),
                        std::runtime_error);
        CHECK_THROWS_AS(emit_report({s}, "xml", "report.xml"), std::invalid_argument);
        CHECK_THROWS_AS(emit_report({}, "json", "report.json"), std::invalid_argument);
    }

    TEST_CASE("lying unveiler summary separates abort rate from match rate") {
        const RunSummary s = run_scenario(make_scenario(ScenarioKind::LyingUnveiler, 25, 2000, 0), 9);
        CHECK(s.abort_rate > 0.9);
        REQUIRE(s.analytic_reference.has_value());
        CHECK(*s.analytic_reference == doctest::Approx(1.0 - std::pow(0.5, 5)).epsilon(1e-12));
        CHECK(s.match_rate >= 0.0);
        CHECK(s.match_rate <= 1.0);
    }

    TEST_CASE("session dump writes transcripts and cheat-report lines") {
        Scenario sc = make_scenario(ScenarioKind::CheatAon, 25, 50, 0);
        sc.dump_path = "dump_test.txt";
        sc.dump_limit = 2;
        run_scenario(sc, 31);
        const std::string dump = slurp("dump_test.txt");
        std::remove("dump_test.txt");
        CHECK(dump.find("# session 0") != std::string::npos);
        CHECK(dump.find("# session 1") != std::string::npos);
        CHECK(dump.find("# session 2") == std::string::npos);
        CHECK(dump.find("\"p_correct\":0.933012702") != std::string::npos);
        CHECK(dump.find("transcript:") != std::string::npos);
    }

    TEST_CASE("run_scenario validates its inputs") {
        Scenario sc = make_scenario(ScenarioKind::HonestAon);
        sc.trials = 0;
        CHECK_THROWS_AS(run_scenario(sc, 1), std::invalid_argument);
        Scenario bad_n = make_scenario(ScenarioKind::HonestAon, 4, 10, 0);
        CHECK_THROWS_AS(run_scenario(bad_n, 1), std::invalid_argument);
    }
}
