// ptpsim command line: validate scenarios, run them, re-evaluate recorded
// traces, and sweep one parameter over a list of values.
//
// Exit codes: 0 criteria pass, 1 criteria fail or inconclusive,
// 2 invalid scenario or trace, 3 internal error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ptpsim/errors.hpp"
#include "ptpsim/report.hpp"
#include "ptpsim/scenario.hpp"

namespace {

using ptpsim::scenario::Override;

std::vector<Override> parse_overrides(const std::vector<std::string>& params) {
    std::vector<Override> out;
    for (const std::string& p : params) {
        const std::size_t eq = p.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ptpsim::ScenarioInvalid("--param wants path=value, got: " + p);
        out.push_back({p.substr(0, eq), p.substr(eq + 1)});
    }
    return out;
}

int verdict_code(ptpsim::report::Verdict v) {
    return v == ptpsim::report::Verdict::Pass ? 0 : 1;
}

int cmd_validate(const std::string& file, const std::vector<std::string>& params) {
    const auto sc = ptpsim::scenario::load_scenario_file(file, parse_overrides(params));
    std::cout << "scenario " << sc.name << " is valid\n";
    std::cout << "digest   fnv1a64:" << std::hex << sc.digest << std::dec << "\n";
    std::cout << "effective configuration\n";
    for (const std::string& line : sc.provenance) std::cout << "  " << line << "\n";
    return 0;
}

int cmd_run(const std::string& file, const std::string& out_dir,
            const std::vector<std::string>& params, bool quiet) {
    const auto sc = ptpsim::scenario::load_scenario_file(file, parse_overrides(params));
    const auto out = ptpsim::report::run_scenario(sc);
    if (!out_dir.empty()) ptpsim::report::write_outputs(sc, out, out_dir);
    if (!quiet) std::cout << out.report_text;
    return verdict_code(out.eval.verdict);
}

int cmd_report(const std::string& trace_file, const std::string& scenario_file,
               const std::vector<std::string>& params) {
    const auto sc =
        ptpsim::scenario::load_scenario_file(scenario_file, parse_overrides(params));
    std::ifstream in(trace_file, std::ios::binary);
    if (!in) throw ptpsim::ScenarioInvalid("cannot open trace file: " + trace_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto trace = ptpsim::report::parse_trace_tsv(buf.str(), trace_file);
    const auto eval = ptpsim::report::evaluate(sc, trace);
    std::cout << ptpsim::report::render_report(sc, trace, nullptr, eval);
    return verdict_code(eval.verdict);
}

int cmd_sweep(const std::string& file, const std::string& over,
              const std::vector<std::string>& params, const std::string& out_dir) {
    const std::size_t eq = over.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ptpsim::ScenarioInvalid("--over wants path=v1,v2,..., got: " + over);
    const std::string path = over.substr(0, eq);
    std::vector<std::string> values;
    std::istringstream vs(over.substr(eq + 1));
    for (std::string v; std::getline(vs, v, ',');)
        if (!v.empty()) values.push_back(v);
    if (values.empty()) throw ptpsim::ScenarioInvalid("--over lists no values");

    bool all_pass = true;
    for (const std::string& v : values) {
        std::vector<std::string> run_params = params;
        run_params.push_back(path + "=" + v);
        const auto sc = ptpsim::scenario::load_scenario_file(file, parse_overrides(run_params));
        const auto out = ptpsim::report::run_scenario(sc);
        if (!out_dir.empty())
            ptpsim::report::write_outputs(sc, out, out_dir + "/" + path + "=" + v);
        std::cout << path << "=" << v << "  verdict="
                  << ptpsim::report::to_string(out.eval.verdict);
        for (const auto& o : out.eval.outcomes)
            if (!o.pass) std::cout << "  [" << o.description << "]";
        std::cout << "\n";
        all_pass = all_pass && out.eval.verdict == ptpsim::report::Verdict::Pass;
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PTP timing-node simulator"};
    app.require_subcommand(1);

    std::string scenario_file;
    std::string trace_file;
    std::string out_dir;
    std::string over;
    std::vector<std::string> params;
    bool quiet = false;

    CLI::App* validate = app.add_subcommand("validate", "parse and check a scenario");
    validate->add_option("scenario", scenario_file, "scenario file")->required();
    validate->add_option("--param", params, "override, path=value");

    CLI::App* run = app.add_subcommand("run", "run a scenario and report");
    run->add_option("scenario", scenario_file, "scenario file")->required();
    run->add_option("--out", out_dir, "directory for trace.tsv / report.txt");
    run->add_option("--param", params, "override, path=value");
    run->add_flag("--quiet", quiet, "suppress the report on stdout");

    CLI::App* report = app.add_subcommand("report", "re-evaluate a recorded trace");
    report->add_option("trace", trace_file, "trace.tsv from a run")->required();
    report->add_option("--scenario", scenario_file, "scenario the trace came from")
        ->required();
    report->add_option("--param", params, "override, path=value");

    CLI::App* sweep = app.add_subcommand("sweep", "run once per value of one parameter");
    sweep->add_option("scenario", scenario_file, "scenario file")->required();
    sweep->add_option("--over", over, "swept parameter, path=v1,v2,...")->required();
    sweep->add_option("--param", params, "fixed override, path=value");
    sweep->add_option("--out", out_dir, "directory for per-value outputs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(scenario_file, params);
        if (run->parsed()) return cmd_run(scenario_file, out_dir, params, quiet);
        if (report->parsed()) return cmd_report(trace_file, scenario_file, params);
        if (sweep->parsed()) return cmd_sweep(scenario_file, over, params, out_dir);
    } catch (const ptpsim::ScenarioInvalid& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
