#include "ptpsim/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ptpsim/errors.hpp"
#include "ptpsim/harness.hpp"

namespace ptpsim::report {

namespace {

std::string fmt_seconds(std::int64_t ns) {
    const bool neg = ns < 0;
    const std::uint64_t mag = neg ? static_cast<std::uint64_t>(-(ns + 1)) + 1
                                  : static_cast<std::uint64_t>(ns);
    std::ostringstream os;
    if (neg) os << '-';
    os << mag / 1'000'000'000u << '.';
    const std::uint64_t frac = mag % 1'000'000'000u;
    std::string digits = std::to_string(frac);
    os << std::string(9 - digits.size(), '0') << digits << " s";
    return os.str();
}

std::string fmt_hex64(std::uint64_t v) {
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[v & 0xF];
        v >>= 4;
    }
    return out;
}

// Nodes the criteria apply to: declared slave-only, or observed in the
// slave state at any point of the trace.
std::vector<std::string> slave_nodes(const scenario::LoadedScenario& sc,
                                     const trace::Trace& trace) {
    std::vector<std::string> out;
    for (const netsim::NodeSpec& n : sc.sim.nodes)
        if (n.port.role == engine::NodeRole::SlaveOnly) out.push_back(n.id);
    for (const trace::TraceRecord& r : trace) {
        const auto* st = std::get_if<trace::StateChange>(&r.kind);
        if (st == nullptr || st->to != "slave") continue;
        if (std::find(out.begin(), out.end(), r.node) == out.end()) out.push_back(r.node);
    }
    // Keep scenario declaration order where possible.
    std::vector<std::string> ordered;
    for (const netsim::NodeSpec& n : sc.sim.nodes)
        if (std::find(out.begin(), out.end(), n.id) != out.end()) ordered.push_back(n.id);
    return ordered;
}

std::map<std::string, std::string> final_states(const trace::Trace& trace) {
    std::map<std::string, std::string> out;
    for (const trace::TraceRecord& r : trace)
        if (const auto* st = std::get_if<trace::StateChange>(&r.kind)) out[r.node] = st->to;
    return out;
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass:         return "PASS";
    case Verdict::Fail:         return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

Evaluation evaluate(const scenario::LoadedScenario& sc, const trace::Trace& trace) {
    Evaluation ev;
    const scenario::Criteria& cr = sc.criteria;
    const std::vector<std::string> slaves = slave_nodes(sc, trace);
    const auto steady_ns = static_cast<std::int64_t>(std::llround(cr.steady_after_s * 1e9));

    const auto add = [&](bool pass, bool inconclusive, const std::string& text) {
        ev.outcomes.push_back({text, pass, inconclusive});
    };

    if (cr.require_convergence) {
        for (const std::string& node : slaves) {
            const auto t = harness::detect_convergence(trace, node, cr.convergence_bound_ns,
                                                       cr.convergence_window);
            std::ostringstream os;
            os << "convergence " << node << ": ";
            if (t)
                os << "converged at " << fmt_seconds(*t) << " (bound "
                   << cr.convergence_bound_ns << " ns, window " << cr.convergence_window
                   << ")";
            else
                os << "never held |offset| <= " << cr.convergence_bound_ns << " ns for "
                   << cr.convergence_window << " samples";
            add(t.has_value(), false, os.str());
        }
        if (slaves.empty())
            add(false, true, "convergence: no slave node to measure");
    }

    if (cr.max_p95_offset_ns > 0) {
        for (const std::string& node : slaves) {
            const auto st = harness::offset_stats(trace, node, steady_ns);
            std::ostringstream os;
            os << "steady offset " << node << ": ";
            if (st)
                os << "p95 |offset| = " << st->p95_abs_ns << " ns (limit "
                   << cr.max_p95_offset_ns << " ns, n=" << st->count
                   << ", max=" << st->max_abs_ns << " ns)";
            else
                os << "no offset samples after " << fmt_seconds(steady_ns);
            add(st && st->p95_abs_ns < cr.max_p95_offset_ns, !st.has_value(), os.str());
        }
        if (slaves.empty())
            add(false, true, "steady offset: no slave node to measure");
    }

    if (cr.max_p95_skew_ns > 0) {
        if (slaves.size() < 2) {
            add(false, true, "pps skew: fewer than two slave nodes to compare");
        } else {
            for (std::size_t i = 0; i < slaves.size(); ++i) {
                for (std::size_t j = i + 1; j < slaves.size(); ++j) {
                    const auto rep = harness::pps_skew(trace, slaves[i], slaves[j], steady_ns);
                    std::ostringstream os;
                    os << "pps skew " << slaves[i] << "/" << slaves[j] << ": ";
                    if (rep)
                        os << "p95 = " << rep->p95_abs_skew_ns << " ns (limit "
                           << cr.max_p95_skew_ns << " ns, pairs=" << rep->edge_count
                           << ", max=" << rep->max_abs_skew_ns << " ns)";
                    else
                        os << "no paired pulses after " << fmt_seconds(steady_ns);
                    add(rep && rep->p95_abs_skew_ns < cr.max_p95_skew_ns, !rep.has_value(),
                        os.str());
                }
            }
        }
    }

    bool any_fail = false;
    bool any_inconclusive = false;
    for (const CriterionOutcome& o : ev.outcomes) {
        if (!o.pass && o.inconclusive) any_inconclusive = true;
        else if (!o.pass) any_fail = true;
    }
    ev.verdict = any_fail            ? Verdict::Fail
                 : any_inconclusive  ? Verdict::Inconclusive
                                     : Verdict::Pass;
    return ev;
}

std::string render_trace_tsv(const trace::Trace& trace) {
    std::ostringstream os;
    os << "# ptpsim-trace 1\n";
    for (const trace::TraceRecord& r : trace) {
        os << r.true_time_ns << '\t' << r.node << '\t';
        if (const auto* s = std::get_if<trace::OffsetSample>(&r.kind))
            os << "offset\t" << s->offset_ns << '\t' << s->delay_ns;
        else if (std::holds_alternative<trace::PpsRising>(r.kind))
            os << "pps\t-\t-";
        else if (const auto* st = std::get_if<trace::StateChange>(&r.kind))
            os << "state\t" << st->from << '\t' << st->to;
        else if (const auto* d = std::get_if<trace::Drop>(&r.kind))
            os << "drop\t" << d->reason << "\t-";
        os << '\n';
    }
    return os.str();
}

trace::Trace parse_trace_tsv(std::string_view text, std::string_view name) {
    const auto fail = [&](int line, const std::string& msg) -> void {
        throw ScenarioInvalid(std::string(name) + ":" + std::to_string(line) + ": " + msg);
    };
    trace::Trace out;
    int line_no = 0;
    std::size_t pos = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != "# ptpsim-trace 1") fail(line_no, "missing `# ptpsim-trace 1` header");
            saw_header = true;
            continue;
        }
        std::vector<std::string_view> f;
        std::size_t start = 0;
        while (f.size() < 5) {
            const std::size_t tab = line.find('\t', start);
            if (tab == std::string_view::npos) {
                f.push_back(line.substr(start));
                break;
            }
            f.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (f.size() != 5) fail(line_no, "expected 5 tab-separated fields");

        std::int64_t t = 0;
        auto [p, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), t);
        if (ec != std::errc{} || p != f[0].data() + f[0].size())
            fail(line_no, "bad time field");

        const auto parse_i64 = [&](std::string_view s) {
            std::int64_t v = 0;
            auto [pp, e] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (e != std::errc{} || pp != s.data() + s.size())
                fail(line_no, "bad integer field");
            return v;
        };

        trace::TraceRecord rec;
        rec.true_time_ns = t;
        rec.node = std::string(f[1]);
        if (f[2] == "offset")
            rec.kind = trace::OffsetSample{parse_i64(f[3]), parse_i64(f[4])};
        else if (f[2] == "pps")
            rec.kind = trace::PpsRising{};
        else if (f[2] == "state")
            rec.kind = trace::StateChange{std::string(f[3]), std::string(f[4])};
        else if (f[2] == "drop")
            rec.kind = trace::Drop{std::string(f[3])};
        else
            fail(line_no, "unknown record kind");
        out.push_back(std::move(rec));
    }
    if (!saw_header) fail(1, "empty trace file");
    return out;
}

std::string render_report(const scenario::LoadedScenario& sc, const trace::Trace& trace,
                          const netsim::SimResult* sim, const Evaluation& eval) {
    std::ostringstream os;
    os << "ptpsim report\n";
    os << "scenario  " << sc.name << "\n";
    os << "digest    fnv1a64:" << fmt_hex64(sc.digest) << "\n";
    os << "seed      " << sc.sim.seed << "\n";
    os << "duration  " << fmt_seconds(sc.sim.duration_ns) << "\n";
    os << "\n";

    const std::map<std::string, std::string> states = final_states(trace);
    os << "nodes\n";
    for (const netsim::NodeSpec& n : sc.sim.nodes) {
        os << "  " << n.id << ": final=";
        const auto it = states.find(n.id);
        os << (it == states.end() ? "initializing" : it->second);
        if (sim != nullptr) {
            for (const netsim::NodeSummary& s : sim->summaries) {
                if (s.id != n.id) continue;
                os << " tx=" << s.tx_count << " rx=" << s.rx_count
                   << " link_drops=" << s.link_drops << " engine_drops=" << s.diag.dropped
                   << " servo_updates=" << s.diag.servo_updates
                   << " delay_exchanges=" << s.diag.delay_exchanges;
            }
        }
        const auto conv = harness::detect_convergence(
            trace, n.id, sc.criteria.convergence_bound_ns, sc.criteria.convergence_window);
        if (conv) os << " converged=" << fmt_seconds(*conv);
        os << "\n";
    }
    os << "\n";

    os << "criteria\n";
    if (eval.outcomes.empty()) os << "  (none declared)\n";
    for (const CriterionOutcome& o : eval.outcomes)
        os << "  " << (o.pass ? "PASS" : o.inconclusive ? "INCONCLUSIVE" : "FAIL") << "  "
           << o.description << "\n";
    os << "verdict " << to_string(eval.verdict) << "\n";
    os << "\n";

    os << "effective configuration\n";
    for (const std::string& line : sc.provenance) os << "  " << line << "\n";
    return os.str();
}

RunOutput run_scenario(const scenario::LoadedScenario& sc) {
    RunOutput out;
    out.sim = netsim::run(sc.sim);
    out.eval = evaluate(sc, out.sim.trace);
    out.report_text = render_report(sc, out.sim.trace, &out.sim, out.eval);
    return out;
}

void write_outputs(const scenario::LoadedScenario& sc, const RunOutput& out,
                   const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto write = [&](const std::string& file, const std::string& content) {
        const fs::path p = fs::path(out_dir) / file;
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        f << content;
        if (!f) throw std::runtime_error("short write to " + p.string());
    };
    write("trace.tsv", render_trace_tsv(out.sim.trace));
    write("report.txt", out.report_text);
    write("scenario.scn", sc.source_text);
}

}  // namespace ptpsim::report
