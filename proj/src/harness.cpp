#include "harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "adversary.hpp"
#include "lo.hpp"

namespace qot {

const char *scenario_name(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::HonestAon:
        return "honest-aon";
    case ScenarioKind::CheatAon:
        return "cheat-aon";
    case ScenarioKind::CheatAonBccc:
        return "cheat-aon-bccc";
    case ScenarioKind::Honest12:
        return "honest-12ot";
    case ScenarioKind::Cheat12T0:
        return "cheat-12ot-t0";
    case ScenarioKind::Cheat12T1:
        return "cheat-12ot-t1";
    case ScenarioKind::LyingUnveiler:
        return "lying-unveiler";
    case ScenarioKind::LoIdeal:
        return "lo-ideal";
    case ScenarioKind::LoBcqot:
        return "lo-bcqot";
    }
    throw std::logic_error("unknown scenario kind");
}

std::vector<std::string> scenario_names() {
    return {"honest-aon", "cheat-aon",      "cheat-aon-bccc", "honest-12ot", "cheat-12ot-t0",
            "cheat-12ot-t1", "lying-unveiler", "lo-ideal",       "lo-bcqot"};
}

ScenarioKind scenario_from_name(const std::string &name) {
    const std::vector<std::string> names = scenario_names();
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k] == name) {
            return static_cast<ScenarioKind>(k);
        }
    }
    throw std::invalid_argument("unknown scenario: " + name);
}

double entangled_decode_reliability() { return 0.25 * (2.0 + std::sqrt(3.0)); }

Scenario make_scenario(ScenarioKind kind, std::size_t n, std::size_t trials, std::uint64_t seed) {
    Scenario sc;
    sc.kind = kind;
    sc.config.n = n != 0 ? n : 25;
    sc.config.seed = seed;
    sc.trials = trials != 0 ? trials : (kind == ScenarioKind::LoIdeal ? 100 : 10000);
    switch (kind) {
    case ScenarioKind::Honest12:
    case ScenarioKind::Cheat12T0:
    case ScenarioKind::Cheat12T1:
    case ScenarioKind::LoBcqot:
        sc.config.variant = Variant::OneOfTwo;
        break;
    default:
        sc.config.variant = Variant::AoN;
        break;
    }
    sc.config.bc_mode = kind == ScenarioKind::CheatAonBccc ? BcMode::Bccc : BcMode::NonBccc;
    return sc;
}

std::size_t worker_count() {
    if (const char *env = std::getenv("QOTLAB_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) {
            return static_cast<std::size_t>(std::min<long>(v, 64));
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return std::min<std::size_t>(std::max<unsigned>(hw, 1), 16);
}

namespace {

std::string fmt9(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
}

std::uint64_t fnv1a(std::uint64_t hash, std::uint64_t value) {
    for (int byte = 0; byte < 8; ++byte) {
        hash ^= (value >> (8 * byte)) & 0xffULL;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

struct PerSession {
    bool aborted = false;
    bool match = false;
    bool untargeted_match = false;
    bool joint = false;
    std::uint8_t retries = 0;
    std::int8_t output = -1;
};

BobStrategy strategy_of(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::CheatAon:
    case ScenarioKind::CheatAonBccc:
    case ScenarioKind::Cheat12T0:
    case ScenarioKind::Cheat12T1:
        return BobStrategy::Entangling;
    case ScenarioKind::LyingUnveiler:
        return BobStrategy::LyingUnveiler;
    default:
        return BobStrategy::Honest;
    }
}

RunSummary summarize_sessions(const Scenario &scenario, const std::vector<PerSession> &sessions) {
    RunSummary s;
    s.scenario = scenario_name(scenario.kind);
    s.trials = sessions.size();

    std::size_t aborts = 0, matches = 0, completed = 0, untargeted = 0, joints = 0;
    std::uint64_t digest = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        const PerSession &p = sessions[i];
        aborts += p.aborted ? 1 : 0;
        if (!p.aborted) {
            ++completed;
            matches += p.match ? 1 : 0;
            untargeted += p.untargeted_match ? 1 : 0;
            joints += p.joint ? 1 : 0;
        }
        digest = fnv1a(digest, (static_cast<std::uint64_t>(p.aborted) << 3) |
                                   (static_cast<std::uint64_t>(p.match) << 2) |
                                   (static_cast<std::uint64_t>(p.untargeted_match) << 1) |
                                   static_cast<std::uint64_t>(p.output == 1));
        s.infeasible_retries += p.retries;
    }
    s.abort_rate = static_cast<double>(aborts) / static_cast<double>(sessions.size());
    if (completed > 0) {
        s.match_rate = static_cast<double>(matches) / static_cast<double>(completed);
        s.wilson = wilson95(matches, completed);
    } else {
        s.match_rate = 0.0;
        s.wilson = Interval{0.0, 1.0};
    }
    s.digest = digest;

    const ScenarioKind kind = scenario.kind;
    if (kind == ScenarioKind::Cheat12T0 || kind == ScenarioKind::Cheat12T1 ||
        kind == ScenarioKind::Honest12) {
        if (completed > 0) {
            s.untargeted_rate = static_cast<double>(untargeted) / static_cast<double>(completed);
            s.joint_rate = static_cast<double>(joints) / static_cast<double>(completed);
        }
    }
    return s;
}

std::optional<double> analytic_reference_of(const Scenario &scenario) {
    switch (scenario.kind) {
    case ScenarioKind::HonestAon:
    case ScenarioKind::CheatAonBccc:
        return 0.75;
    case ScenarioKind::CheatAon:
    case ScenarioKind::Cheat12T0:
    case ScenarioKind::Cheat12T1:
        return entangled_decode_reliability();
    case ScenarioKind::Honest12:
    case ScenarioKind::LoIdeal:
        return 1.0;
    case ScenarioKind::LyingUnveiler:
        // Reference for the abort rate: the test trips unless every
        // tested index had mismatched bases.
        return 1.0 - std::pow(0.5, static_cast<double>(scenario.config.test_set_size_resolved()));
    case ScenarioKind::LoBcqot:
        return std::nullopt;
    }
    return std::nullopt;
}

RunSummary run_lo_ideal(const Scenario &scenario) {
    const IdealProtocolModel model = build_ideal_ot();
    const SwitchUnitary sw = construct_switch_unitary(model, 0, 1);
    const SwitchVerification ver = verify_switch(model, sw);

    std::size_t matches = 0;
    std::uint64_t digest = 0xcbf29ce484222325ULL;
    for (std::size_t t = 0; t < scenario.trials; ++t) {
        bool all = true;
        for (std::size_t i = 0; i < model.alice_dim; ++i) {
            const std::array<int, 2> got = double_extraction(model, i, sw);
            const bool ok = got[0] == model.f(i, 0) && got[1] == model.f(i, 1);
            all = all && ok;
            digest = fnv1a(digest, (t << 3) | (i << 1) | (ok ? 1 : 0));
        }
        matches += all ? 1 : 0;
    }

    RunSummary s;
    s.scenario = scenario_name(scenario.kind);
    s.trials = scenario.trials;
    s.match_rate = static_cast<double>(matches) / static_cast<double>(scenario.trials);
    s.wilson = wilson95(matches, scenario.trials);
    s.abort_rate = 0.0;
    s.digest = digest;
    s.max_trace_distance = ver.max_trace_distance;
    return s;
}

RunSummary run_lo_bcqot(const Scenario &scenario, std::uint64_t master_seed) {
    const DependenceReport report =
        bcqot_dependence_check(scenario.config, scenario.trials, master_seed);
    RunSummary s;
    s.scenario = scenario_name(scenario.kind);
    s.trials = scenario.trials;
    s.match_rate = report.entangling_joint_rate;
    s.wilson = wilson95(
        static_cast<std::size_t>(std::llround(report.entangling_joint_rate *
                                              static_cast<double>(report.sessions))),
        report.sessions);
    s.abort_rate = 0.0;
    s.digest = fnv1a(fnv1a(0xcbf29ce484222325ULL, report.parity_diff_sessions),
                     report.nonconstant_records);
    s.infeasible_retries = report.infeasible_retries;
    s.joint_rate = report.entangling_joint_rate;
    s.honest_joint_rate = report.honest_joint_rate;
    if (report.parity_diff_sessions > 0) {
        s.nonconstant_given_parity_diff = static_cast<double>(report.nonconstant_records) /
                                          static_cast<double>(report.parity_diff_sessions);
    }
    return s;
}

} // namespace

namespace {

// Per-session debug records: deterministic re-run of the leading
// session indices, so the parallel pass stays untouched.
void dump_sessions(const Scenario &scenario, std::uint64_t master_seed, BobStrategy strategy,
                   int target) {
    std::ofstream out(scenario.dump_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("session dump: cannot open " + scenario.dump_path);
    }
    const std::size_t count = std::min(scenario.dump_limit, scenario.trials);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t retries = 0;
        const SessionResult r =
            run_session_with_retry(scenario.config, strategy, master_seed, i, target, &retries);
        out << "# session " << i << " retries " << retries << "\n" << r.to_text();
        if (strategy == BobStrategy::Entangling) {
            CheatReport report;
            report.session = i;
            report.amp_good = r.eff_good_amp;
            report.amp_fail = r.eff_fail_amp;
            report.p_correct = r.p_correct;
            report.guess = r.bob_output;
            report.truth = scenario.config.variant == Variant::AoN
                               ? r.alice_bit
                               : r.alice_pair[static_cast<std::size_t>(r.obtained_index)];
            report.match = r.match;
            out << report.to_json_line() << "\n";
        }
        out << "\n";
    }
}

} // namespace

RunSummary run_scenario(const Scenario &scenario, std::uint64_t master_seed) {
    if (scenario.trials < 1) {
        throw std::invalid_argument("run_scenario: trials must be at least 1");
    }
    scenario.config.validate();

    if (scenario.kind == ScenarioKind::LoIdeal) {
        RunSummary s = run_lo_ideal(scenario);
        s.analytic_reference = analytic_reference_of(scenario);
        if (!scenario.dump_path.empty()) {
            std::ofstream out(scenario.dump_path, std::ios::binary);
            out << "max_trace_distance=" << fmt9(s.max_trace_distance.value_or(0.0))
                << "\njoint_extraction_rate=" << fmt9(s.match_rate) << "\n";
        }
        return s;
    }
    if (scenario.kind == ScenarioKind::LoBcqot) {
        RunSummary s = run_lo_bcqot(scenario, master_seed);
        s.analytic_reference = analytic_reference_of(scenario);
        if (!scenario.dump_path.empty()) {
            const DependenceReport report =
                bcqot_dependence_check(scenario.config, std::min<std::size_t>(scenario.trials, 200),
                                       master_seed);
            std::ofstream out(scenario.dump_path, std::ios::binary);
            out << report.to_text();
        }
        return s;
    }

    const BobStrategy strategy = strategy_of(scenario.kind);
    const int target = scenario.kind == ScenarioKind::Cheat12T1 ? 1 : 0;

    std::vector<PerSession> sessions(scenario.trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::atomic<bool> stop{false};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= scenario.trials || stop.load()) {
                return;
            }
            try {
                std::size_t retries = 0;
                const SessionResult r = run_session_with_retry(scenario.config, strategy,
                                                               master_seed, i, target, &retries);
                PerSession &p = sessions[i];
                p.aborted = r.aborted;
                p.match = r.match;
                p.untargeted_match = r.untargeted_match;
                p.joint = r.match && r.untargeted_match;
                p.retries = static_cast<std::uint8_t>(std::min<std::size_t>(retries, 255));
                p.output = static_cast<std::int8_t>(r.bob_output);
            } catch (const InfeasibleSession &e) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::make_exception_ptr(
                        InfeasibleSession("session " + std::to_string(i) + ": " + e.what()));
                }
                stop.store(true);
                return;
            } catch (const std::exception &e) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::make_exception_ptr(
                        std::runtime_error("session " + std::to_string(i) + ": " + e.what()));
                }
                stop.store(true);
                return;
            }
        }
    };

    const std::size_t workers = std::min(worker_count(), scenario.trials);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (std::thread &t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    RunSummary s = summarize_sessions(scenario, sessions);
    s.analytic_reference = analytic_reference_of(scenario);
    if (!scenario.dump_path.empty()) {
        dump_sessions(scenario, master_seed, strategy, target);
    }
    return s;
}

std::string render_report_json(const std::vector<RunSummary> &summaries) {
    auto one = [](const RunSummary &s) {
        std::ostringstream os;
        os << "{\"scenario\":\"" << s.scenario << "\",\"trials\":" << s.trials
           << ",\"match_rate\":" << fmt9(s.match_rate) << ",\"wilson95\":[" << fmt9(s.wilson.lo)
           << "," << fmt9(s.wilson.hi) << "],\"abort_rate\":" << fmt9(s.abort_rate)
           << ",\"analytic_reference\":"
           << (s.analytic_reference.has_value() ? fmt9(*s.analytic_reference) : "null") << "}";
        return os.str();
    };
    if (summaries.empty()) {
        throw std::invalid_argument("render_report_json: no summaries");
    }
    if (summaries.size() == 1) {
        return one(summaries.front()) + "\n";
    }
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        os << (i > 0 ? "," : "") << one(summaries[i]);
    }
    os << "]\n";
    return os.str();
}

std::string render_report_csv(const std::vector<RunSummary> &summaries) {
    if (summaries.empty()) {
        throw std::invalid_argument("render_report_csv: no summaries");
    }
    std::ostringstream os;
    os << "scenario,trials,match_rate,wilson_lo,wilson_hi,abort_rate,analytic_reference\n";
    for (const RunSummary &s : summaries) {
        os << s.scenario << "," << s.trials << "," << fmt9(s.match_rate) << "," << fmt9(s.wilson.lo)
           << "," << fmt9(s.wilson.hi) << "," << fmt9(s.abort_rate) << ","
           << (s.analytic_reference.has_value() ? fmt9(*s.analytic_reference) : "") << "\n";
    }
    return os.str();
}

void emit_report(const std::vector<RunSummary> &summaries, const std::string &format,
                 const std::string &path) {
    std::string body;
    if (format == "json") {
        body = render_report_json(summaries);
    } else if (format == "csv") {
        body = render_report_csv(summaries);
    } else {
        throw std::invalid_argument("emit_report: format must be json or csv");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("emit_report: cannot open " + path);
    }
    out << body;
    if (!out) {
        throw std::runtime_error("emit_report: write failed for " + path);
    }
}

} // namespace qot
