#pragma once

// Runs a loaded scenario and renders the outputs: a TSV trace, a human
// readable report with the acceptance criteria verdict, and a copy of
// the scenario source. The trace round-trips through text so a recorded
// run can be re-evaluated later without the simulator.

#include <optional>
#include <string>
#include <vector>

#include "ptpsim/netsim.hpp"
#include "ptpsim/scenario.hpp"

namespace ptpsim::report {

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

struct CriterionOutcome {
    std::string description;   // one line, includes measured vs limit
    bool pass = false;
    bool inconclusive = false;  // measurement not available
};

struct Evaluation {
    std::vector<CriterionOutcome> outcomes;
    Verdict verdict = Verdict::Pass;
};

// Applies the scenario's [criteria] section to a trace. Verdict is Pass
// only when every enabled check passes; a missing measurement makes it
// Inconclusive unless some other check already failed outright.
Evaluation evaluate(const scenario::LoadedScenario& sc, const trace::Trace& trace);

std::string render_trace_tsv(const trace::Trace& trace);
// Throws ScenarioInvalid on malformed input.
trace::Trace parse_trace_tsv(std::string_view text, std::string_view name);

// Full report text. `sim` adds per-node counters when available (null
// when re-evaluating a recorded trace).
std::string render_report(const scenario::LoadedScenario& sc, const trace::Trace& trace,
                          const netsim::SimResult* sim, const Evaluation& eval);

struct RunOutput {
    netsim::SimResult sim;
    Evaluation eval;
    std::string report_text;
};

RunOutput run_scenario(const scenario::LoadedScenario& sc);

// Writes trace.tsv, report.txt and scenario.scn into out_dir (created
// if missing). Throws std::runtime_error on I/O failure.
void write_outputs(const scenario::LoadedScenario& sc, const RunOutput& out,
                   const std::string& out_dir);

}  // namespace ptpsim::report
