#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "protocol.hpp"
#include "stats.hpp"

namespace qot {

enum class ScenarioKind {
    HonestAon,
    CheatAon,
    CheatAonBccc,
    Honest12,
    Cheat12T0,
    Cheat12T1,
    LyingUnveiler,
    LoIdeal,
    LoBcqot,
};

const char *scenario_name(ScenarioKind kind);
ScenarioKind scenario_from_name(const std::string &name);
std::vector<std::string> scenario_names();

struct Scenario {
    ScenarioKind kind = ScenarioKind::HonestAon;
    ProtocolConfig config;
    std::size_t trials = 10000;
    // Debug dump: per-session records for the first dump_limit sessions
    // (transcripts plus, for entangling runs, one cheat-report line).
    std::string dump_path;
    std::size_t dump_limit = 10;
};

/// Scenario with the preset variant / vault mode for its kind. Explicit
/// n or trials of 0 keep the defaults (n=25, trials=10^4).
Scenario make_scenario(ScenarioKind kind, std::size_t n = 0, std::size_t trials = 0,
                       std::uint64_t seed = 0);

struct RunSummary {
    std::string scenario;
    std::size_t trials = 0;
    double match_rate = 0.0;
    Interval wilson;
    double abort_rate = 0.0;
    std::optional<double> analytic_reference;
    std::uint64_t digest = 0; // per-seed reproducibility digest
    std::size_t infeasible_retries = 0;

    // Scenario-specific extras; tracked for verification, not part of
    // the fixed report schema.
    std::optional<double> untargeted_rate;
    std::optional<double> joint_rate;
    std::optional<double> honest_joint_rate;
    std::optional<double> nonconstant_given_parity_diff;
    std::optional<double> max_trace_distance;
};

/// Average decode reliability of the entangling strategy on the
/// two-branch effective state.
double entangled_decode_reliability();

/// Monte Carlo run of one scenario. Deterministic given (scenario,
/// master_seed) independent of worker count; sessions are seeded by
/// index and infeasible draws redrawn with attempt-derived seeds.
RunSummary run_scenario(const Scenario &scenario, std::uint64_t master_seed);

/// Worker pool size: QOTLAB_WORKERS when set, hardware concurrency
/// otherwise (at least 1, at most 16).
std::size_t worker_count();

std::string render_report_json(const std::vector<RunSummary> &summaries);
std::string render_report_csv(const std::vector<RunSummary> &summaries);

/// Writes a report with stable field ordering and floats at 9
/// significant digits; identical input yields byte-identical files.
void emit_report(const std::vector<RunSummary> &summaries, const std::string &format,
                 const std::string &path);

} // namespace qot
