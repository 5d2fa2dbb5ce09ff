#include "qotlab/qotlab.h"

#include <exception>
#include <new>
#include <string>

#include "acceptance.hpp"
#include "harness.hpp"

using namespace qot;

struct qot_runner {
    std::string scenario = "honest-aon";
    std::size_t n = 0;      // 0 → scenario default
    std::size_t trials = 0; // 0 → scenario default
    std::uint64_t seed = 42;
    std::string bc_mode;  // empty → scenario preset
    std::string variant;  // empty → scenario preset
    std::string dump_path;
    std::size_t dump_limit = 10;
    std::string last_error;
    std::string summary_json;
    bool has_result = false;
    RunSummary summary;
};

namespace {

qot_status fail(qot_runner *runner, qot_status status, const char *message) {
    if (runner != nullptr) {
        runner->last_error = message;
    }
    return status;
}

qot_status guarded(qot_runner *runner, const auto &fn) {
    if (runner == nullptr) {
        return QOT_ERROR_INVALID_ARGUMENT;
    }
    try {
        runner->last_error.clear();
        return fn();
    } catch (const InfeasibleSession &e) {
        return fail(runner, QOT_ERROR_INFEASIBLE, e.what());
    } catch (const std::invalid_argument &e) {
        return fail(runner, QOT_ERROR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception &e) {
        return fail(runner, QOT_ERROR_INTERNAL, e.what());
    }
}

Scenario build_scenario(const qot_runner &r) {
    const ScenarioKind kind = scenario_from_name(r.scenario);
    Scenario sc = make_scenario(kind, r.n, r.trials, r.seed);
    if (!r.bc_mode.empty()) {
        const BcMode requested = r.bc_mode == "bccc" ? BcMode::Bccc : BcMode::NonBccc;
        if (kind == ScenarioKind::CheatAonBccc && requested != BcMode::Bccc) {
            throw std::invalid_argument("scenario cheat-aon-bccc requires --bc-mode bccc");
        }
        sc.config.bc_mode = requested;
    }
    if (!r.variant.empty()) {
        const Variant requested = r.variant == "12ot" ? Variant::OneOfTwo : Variant::AoN;
        if (requested != sc.config.variant) {
            throw std::invalid_argument("variant conflicts with the scenario preset");
        }
    }
    sc.dump_path = r.dump_path;
    sc.dump_limit = r.dump_limit;
    return sc;
}

} // namespace

extern "C" {

const char *qot_version(void) { return "0.1.0"; }

const char *qot_scenario_names(void) {
    static const std::string names = [] {
        std::string s;
        for (const std::string &name : scenario_names()) {
            if (!s.empty()) {
                s += ",";
            }
            s += name;
        }
        return s;
    }();
    return names.c_str();
}

qot_status qot_runner_create(qot_runner **out_runner) {
    if (out_runner == nullptr) {
        return QOT_ERROR_INVALID_ARGUMENT;
    }
    *out_runner = new (std::nothrow) qot_runner();
    return *out_runner != nullptr ? QOT_OK : QOT_ERROR_INTERNAL;
}

void qot_runner_destroy(qot_runner *runner) { delete runner; }

qot_status qot_runner_set_scenario(qot_runner *runner, const char *name) {
    return guarded(runner, [&] {
        if (name == nullptr) {
            throw std::invalid_argument("scenario name is null");
        }
        scenario_from_name(name); // validates
        runner->scenario = name;
        return QOT_OK;
    });
}

qot_status qot_runner_set_n(qot_runner *runner, int n) {
    return guarded(runner, [&] {
        if (n < 0) {
            throw std::invalid_argument("n must be non-negative");
        }
        runner->n = static_cast<std::size_t>(n);
        return QOT_OK;
    });
}

qot_status qot_runner_set_trials(qot_runner *runner, long long trials) {
    return guarded(runner, [&] {
        if (trials < 0) {
            throw std::invalid_argument("trials must be non-negative");
        }
        runner->trials = static_cast<std::size_t>(trials);
        return QOT_OK;
    });
}

qot_status qot_runner_set_seed(qot_runner *runner, uint64_t seed) {
    return guarded(runner, [&] {
        runner->seed = seed;
        return QOT_OK;
    });
}

qot_status qot_runner_set_bc_mode(qot_runner *runner, const char *mode) {
    return guarded(runner, [&] {
        const std::string m = mode != nullptr ? mode : "";
        if (m != "bccc" && m != "non-bccc") {
            throw std::invalid_argument("bc mode must be non-bccc or bccc");
        }
        runner->bc_mode = m;
        return QOT_OK;
    });
}

qot_status qot_runner_set_variant(qot_runner *runner, const char *variant) {
    return guarded(runner, [&] {
        const std::string v = variant != nullptr ? variant : "";
        if (v != "aon" && v != "12ot") {
            throw std::invalid_argument("variant must be aon or 12ot");
        }
        runner->variant = v;
        return QOT_OK;
    });
}

qot_status qot_runner_set_session_dump(qot_runner *runner, const char *path, long long limit) {
    return guarded(runner, [&] {
        if (limit < 0) {
            throw std::invalid_argument("dump limit must be non-negative");
        }
        runner->dump_path = path != nullptr ? path : "";
        runner->dump_limit = static_cast<std::size_t>(limit);
        return QOT_OK;
    });
}

qot_status qot_runner_run(qot_runner *runner) {
    return guarded(runner, [&] {
        const Scenario sc = build_scenario(*runner);
        runner->summary = run_scenario(sc, runner->seed);
        runner->summary_json = render_report_json({runner->summary});
        runner->has_result = true;
        return QOT_OK;
    });
}

const char *qot_runner_summary_json(qot_runner *runner) {
    if (runner == nullptr || !runner->has_result) {
        return nullptr;
    }
    return runner->summary_json.c_str();
}

qot_status qot_runner_write_report(qot_runner *runner, const char *path, const char *format) {
    return guarded(runner, [&] {
        if (!runner->has_result) {
            throw std::invalid_argument("no run to report; call qot_runner_run first");
        }
        if (path == nullptr || format == nullptr) {
            throw std::invalid_argument("path and format are required");
        }
        try {
            emit_report({runner->summary}, format, path);
        } catch (const std::runtime_error &e) {
            runner->last_error = e.what();
            return QOT_ERROR_IO;
        }
        return QOT_OK;
    });
}

const char *qot_runner_last_error(const qot_runner *runner) {
    return runner != nullptr ? runner->last_error.c_str() : "";
}

qot_status qot_acceptance_run(uint64_t master_seed, qot_acceptance_cb callback, void *user,
                              int *out_failed) {
    try {
        const std::vector<CriterionResult> results = run_acceptance(master_seed);
        int failed = 0;
        for (const CriterionResult &r : results) {
            if (callback != nullptr) {
                callback(r.id, r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
            }
            failed += r.passed ? 0 : 1;
        }
        if (out_failed != nullptr) {
            *out_failed = failed;
        }
        return QOT_OK;
    } catch (const std::exception &) {
        return QOT_ERROR_INTERNAL;
    }
}

} // extern "C"
