// qotlab command line: scenario runs and the verification suite.
// Talks to the core exclusively through the C API.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "qotlab/qotlab.h"

namespace {

struct RunnerGuard {
    qot_runner *ptr = nullptr;
    ~RunnerGuard() { qot_runner_destroy(ptr); }
};

int check(qot_status status, qot_runner *runner) {
    if (status == QOT_OK) {
        return 0;
    }
    std::fprintf(stderr, "error: %s\n",
                 runner != nullptr ? qot_runner_last_error(runner) : "invalid arguments");
    return 1;
}

void print_line(int, const char *name, int passed, const char *detail, void *) {
    std::printf("%s %s: %s\n", passed != 0 ? "PASS" : "FAIL", name, detail);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"qotlab: commitment-based quantum oblivious transfer lab"};
    app.set_version_flag("--version", std::string(qot_version()));
    app.require_subcommand(1);

    // run
    std::string scenario = "honest-aon";
    int n = 0;
    long long trials = 0;
    std::uint64_t seed = 42;
    std::string bc_mode, variant, out_path, format = "json";
    CLI::App *run = app.add_subcommand("run", "run one scenario and report the statistics");
    run->add_option("--scenario", scenario,
                    std::string("one of: ") + qot_scenario_names())
        ->required();
    run->add_option("--n", n, "qubit count (default 25)");
    run->add_option("--trials", trials, "session count (default per scenario)");
    run->add_option("--seed", seed, "master seed (default 42)");
    run->add_option("--bc-mode", bc_mode, "non-bccc|bccc")
        ->check(CLI::IsMember({"non-bccc", "bccc"}));
    run->add_option("--variant", variant, "aon|12ot")->check(CLI::IsMember({"aon", "12ot"}));
    run->add_option("--out", out_path, "report file path (stdout when omitted)");
    run->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    std::string dump_path;
    long long dump_limit = 10;
    run->add_option("--dump-sessions", dump_path,
                    "debug: write per-session transcripts to this file");
    run->add_option("--dump-limit", dump_limit, "debug: how many sessions to dump (default 10)");

    // verify
    std::uint64_t verify_seed = 42;
    CLI::App *verify =
        app.add_subcommand("verify", "run the full acceptance suite; nonzero exit on violation");
    verify->add_option("--seed", verify_seed, "master seed (default 42)");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        RunnerGuard guard;
        if (check(qot_runner_create(&guard.ptr), nullptr) != 0) {
            return 1;
        }
        qot_runner *r = guard.ptr;
        if (check(qot_runner_set_scenario(r, scenario.c_str()), r) != 0 ||
            check(qot_runner_set_n(r, n), r) != 0 ||
            check(qot_runner_set_trials(r, trials), r) != 0 ||
            check(qot_runner_set_seed(r, seed), r) != 0) {
            return 1;
        }
        if (!bc_mode.empty() && check(qot_runner_set_bc_mode(r, bc_mode.c_str()), r) != 0) {
            return 1;
        }
        if (!variant.empty() && check(qot_runner_set_variant(r, variant.c_str()), r) != 0) {
            return 1;
        }
        if (!dump_path.empty() &&
            check(qot_runner_set_session_dump(r, dump_path.c_str(), dump_limit), r) != 0) {
            return 1;
        }
        if (check(qot_runner_run(r), r) != 0) {
            return 1;
        }
        if (out_path.empty()) {
            std::fputs(qot_runner_summary_json(r), stdout);
        } else if (check(qot_runner_write_report(r, out_path.c_str(), format.c_str()), r) != 0) {
            return 1;
        }
        return 0;
    }

    int failed = 0;
    if (qot_acceptance_run(verify_seed, print_line, nullptr, &failed) != QOT_OK) {
        std::fprintf(stderr, "error: acceptance suite could not run\n");
        return 2;
    }
    std::printf("%s (%d failed)\n", failed == 0 ? "all criteria satisfied" : "criteria violated",
                failed);
    return failed == 0 ? 0 : 1;
}
