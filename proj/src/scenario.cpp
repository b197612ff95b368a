#include "ptpsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "ptpsim/errors.hpp"
#include "ptpsim/rng.hpp"

namespace ptpsim::scenario {

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;          // 0 for entries injected by overrides
    bool overridden = false;
};

struct Section {
    std::string kind;  // "servo", "switch", "criteria", "node"
    std::string id;    // node id, empty otherwise
    int line = 0;
    std::vector<Entry> entries;
};

struct Document {
    std::string name;
    std::vector<Entry> global;
    std::vector<Section> sections;
};

[[noreturn]] void fail(const Document& doc, int line, const std::string& msg) {
    throw ScenarioInvalid(doc.name + ":" + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

Document parse_document(std::string_view text, std::string_view name) {
    Document doc;
    doc.name = std::string(name);
    Section* current = nullptr;
    bool saw_directive = false;
    int line_no = 0;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                              : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        const std::size_t hash = raw.find('#');
        if (hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string_view line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(doc, line_no, "unterminated section header");
            std::string_view inner = trim(line.substr(1, line.size() - 2));
            const std::size_t sp = inner.find(' ');
            std::string kind(trim(sp == std::string_view::npos ? inner : inner.substr(0, sp)));
            std::string id(sp == std::string_view::npos ? std::string_view{}
                                                        : trim(inner.substr(sp + 1)));
            if (kind != "servo" && kind != "switch" && kind != "criteria" && kind != "node")
                fail(doc, line_no, "unknown section [" + kind + "]");
            if (kind == "node" && id.empty())
                fail(doc, line_no, "[node] needs an id: [node s1]");
            if (kind != "node" && !id.empty())
                fail(doc, line_no, "section [" + kind + "] takes no id");
            doc.sections.push_back({kind, id, line_no, {}});
            current = &doc.sections.back();
            continue;
        }

        const std::size_t sp = line.find_first_of(" \t");
        std::string key(sp == std::string_view::npos ? line : trim(line.substr(0, sp)));
        std::string value(sp == std::string_view::npos ? std::string_view{}
                                                       : trim(line.substr(sp + 1)));

        if (!saw_directive) {
            if (key != "ptpsim_scenario")
                fail(doc, line_no, "first directive must be `ptpsim_scenario 1`");
            if (value != "1") fail(doc, line_no, "unsupported scenario format version");
            saw_directive = true;
            continue;
        }
        if (value.empty()) fail(doc, line_no, "key `" + key + "` has no value");

        std::vector<Entry>& target = current ? current->entries : doc.global;
        for (const Entry& e : target)
            if (e.key == key) fail(doc, line_no, "duplicate key `" + key + "`");
        target.push_back({key, value, line_no, false});
    }
    if (!saw_directive) fail(doc, 1, "missing `ptpsim_scenario 1` directive");
    return doc;
}

void apply_override(Document& doc, const Override& ov) {
    const auto set = [&](std::vector<Entry>& entries, const std::string& key) {
        for (Entry& e : entries) {
            if (e.key == key) {
                e.value = ov.value;
                e.overridden = true;
                return;
            }
        }
        entries.push_back({key, ov.value, 0, true});
    };

    const std::size_t dot = ov.path.find('.');
    if (dot == std::string::npos) {
        set(doc.global, ov.path);
        return;
    }
    const std::string head = ov.path.substr(0, dot);
    std::string rest = ov.path.substr(dot + 1);
    if (head == "node") {
        const std::size_t dot2 = rest.find('.');
        if (dot2 == std::string::npos)
            throw ScenarioInvalid("override path needs node.<id>.<key>: " + ov.path);
        const std::string id = rest.substr(0, dot2);
        const std::string key = rest.substr(dot2 + 1);
        for (Section& s : doc.sections)
            if (s.kind == "node" && s.id == id) {
                set(s.entries, key);
                return;
            }
        throw ScenarioInvalid("override targets unknown node `" + id + "`");
    }
    for (Section& s : doc.sections)
        if (s.kind == head) {
            set(s.entries, rest);
            return;
        }
    if (head == "servo" || head == "switch" || head == "criteria") {
        doc.sections.push_back({head, "", 0, {{rest, ov.value, 0, true}}});
        return;
    }
    throw ScenarioInvalid("override path has unknown section `" + head + "`");
}

// Typed access over one section's entries; tracks which keys were
// consumed so unknown keys can be reported, and builds the provenance
// list as a side effect.
class KeyReader {
public:
    KeyReader(const Document& doc, std::string scope, const std::vector<Entry>& entries,
              std::vector<std::string>& provenance)
        : doc_(doc), scope_(std::move(scope)), entries_(entries), provenance_(provenance) {}

    std::int64_t i64(const std::string& key, std::int64_t def) {
        return numeric<std::int64_t>(key, def);
    }
    double dbl(const std::string& key, double def) { return numeric<double>(key, def); }

    std::uint64_t u64(const std::string& key, std::uint64_t def) {
        return numeric<std::uint64_t>(key, def);
    }

    bool boolean(const std::string& key, bool def) {
        const Entry* e = find(key);
        if (!e) {
            note(key, def ? "true" : "false", " (default)");
            return def;
        }
        if (e->value != "true" && e->value != "false")
            fail(doc_, e->line, "`" + key + "` wants true or false, got `" + e->value + "`");
        note(key, e->value, marker(*e));
        return e->value == "true";
    }

    const Entry* find(const std::string& key) {
        for (const Entry& e : entries_)
            if (e.key == key) {
                consumed_.push_back(key);
                return &e;
            }
        return nullptr;
    }

    void note(const std::string& key, const std::string& rendered, const char* mark) {
        provenance_.push_back(scope_ + "." + key + " = " + rendered + mark);
    }

    static const char* marker(const Entry& e) { return e.overridden ? " (override)" : ""; }

    // Call last: every entry must have been consumed by a typed getter.
    void reject_unknown() const {
        for (const Entry& e : entries_)
            if (std::find(consumed_.begin(), consumed_.end(), e.key) == consumed_.end())
                fail(doc_, e.line, "unknown key `" + e.key + "` in " + scope_);
    }

    const Document& doc() const { return doc_; }

private:
    template <typename T>
    T numeric(const std::string& key, T def) {
        const Entry* e = find(key);
        if (!e) {
            note(key, render(def), " (default)");
            return def;
        }
        T out{};
        if (!parse_number(e->value, out))
            fail(doc_, e->line, "`" + key + "` wants a number, got `" + e->value + "`");
        note(key, render(out), marker(*e));
        return out;
    }

    template <typename T>
    static bool parse_number(const std::string& s, T& out) {
        if constexpr (std::is_floating_point_v<T>) {
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(s.c_str(), &end);
            if (errno != 0 || end != s.c_str() + s.size() || s.empty()) return false;
            out = v;
            return true;
        } else {
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            return ec == std::errc{} && p == s.data() + s.size();
        }
    }

    template <typename T>
    static std::string render(T v) {
        if constexpr (std::is_floating_point_v<T>) {
            std::ostringstream os;
            os << v;
            return os.str();
        } else {
            return std::to_string(v);
        }
    }

    const Document& doc_;
    std::string scope_;
    const std::vector<Entry>& entries_;
    std::vector<std::string>& provenance_;
    std::vector<std::string> consumed_;
};

netsim::NoiseModel parse_noise(const Document& doc, const Entry& e) {
    std::istringstream is(e.value);
    std::string kind;
    is >> kind;
    netsim::NoiseModel m;
    if (kind == "none") {
        m.kind = netsim::NoiseModel::Kind::None;
    } else if (kind == "uniform") {
        m.kind = netsim::NoiseModel::Kind::Uniform;
    } else if (kind == "uniform_pos") {
        m.kind = netsim::NoiseModel::Kind::UniformPos;
    } else if (kind == "gaussian") {
        m.kind = netsim::NoiseModel::Kind::Gaussian;
    } else {
        fail(doc, e.line, "`" + e.key + "`: unknown noise kind `" + kind + "`");
    }
    if (m.kind != netsim::NoiseModel::Kind::None) {
        if (!(is >> m.magnitude_ns) || m.magnitude_ns < 0)
            fail(doc, e.line, "`" + e.key + "`: needs a non-negative magnitude");
    }
    std::string extra;
    if (is >> extra) fail(doc, e.line, "`" + e.key + "`: trailing tokens");
    return m;
}

std::string render_noise(const netsim::NoiseModel& m) {
    std::ostringstream os;
    switch (m.kind) {
    case netsim::NoiseModel::Kind::None: return "none";
    case netsim::NoiseModel::Kind::Uniform: os << "uniform "; break;
    case netsim::NoiseModel::Kind::UniformPos: os << "uniform_pos "; break;
    case netsim::NoiseModel::Kind::Gaussian: os << "gaussian "; break;
    }
    os << m.magnitude_ns;
    return os.str();
}

// Timestamping presets: ideal, phy (uniform 25), mac (uniform 100),
// app (gaussian 20000); a trailing number rescales the preset. Raw
// noise-model syntax is accepted too.
netsim::NoiseModel parse_ts_model(const Document& doc, const Entry& e) {
    std::istringstream is(e.value);
    std::string kind;
    is >> kind;
    netsim::NoiseModel m;
    if (kind == "ideal") {
        m = {netsim::NoiseModel::Kind::None, 0.0};
    } else if (kind == "phy") {
        m = {netsim::NoiseModel::Kind::Uniform, 25.0};
    } else if (kind == "mac") {
        m = {netsim::NoiseModel::Kind::Uniform, 100.0};
    } else if (kind == "app") {
        m = {netsim::NoiseModel::Kind::Gaussian, 20000.0};
    } else {
        return parse_noise(doc, e);
    }
    double mag = 0.0;
    if (is >> mag) {
        if (mag < 0) fail(doc, e.line, "`" + e.key + "`: negative magnitude");
        if (kind == "ideal") fail(doc, e.line, "`ideal` takes no magnitude");
        m.magnitude_ns = mag;
    }
    std::string extra;
    if (is >> extra) fail(doc, e.line, "`" + e.key + "`: trailing tokens");
    return m;
}

wire::ClockIdentity identity_for(const std::string& id) {
    const std::uint64_t h = netsim::fnv1a64(id);
    wire::ClockIdentity out{};
    for (int i = 0; i < 8; ++i)
        out[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>((h >> (8 * (7 - i))) & 0xFF);
    return out;
}

servo::ServoConfig build_servo(const Document& doc, const std::vector<Entry>& entries,
                               std::vector<std::string>& prov) {
    KeyReader r(doc, "servo", entries, prov);
    servo::ServoConfig cfg;
    cfg.kp = r.dbl("kp", cfg.kp);
    cfg.ki = r.dbl("ki", cfg.ki);
    cfg.step_threshold_ns = r.i64("step_threshold_ns", cfg.step_threshold_ns);
    cfg.delay_filter_alpha = r.dbl("delay_filter_alpha", cfg.delay_filter_alpha);
    cfg.slew_cap_ppb = r.dbl("slew_cap_ppb", cfg.slew_cap_ppb);
    cfg.integral_clamp_ns_s = r.dbl("integral_clamp_ns_s", cfg.integral_clamp_ns_s);
    r.reject_unknown();
    if (cfg.kp < 0 || cfg.ki < 0 || cfg.kp + cfg.ki == 0)
        throw ScenarioInvalid(doc.name + ": servo gains must be non-negative, not both zero");
    if (cfg.step_threshold_ns <= 0)
        throw ScenarioInvalid(doc.name + ": step_threshold_ns must be positive");
    if (cfg.delay_filter_alpha <= 0 || cfg.delay_filter_alpha > 1)
        throw ScenarioInvalid(doc.name + ": delay_filter_alpha must be in (0, 1]");
    if (cfg.slew_cap_ppb <= 0)
        throw ScenarioInvalid(doc.name + ": slew_cap_ppb must be positive");
    return cfg;
}

netsim::SwitchModel build_switch(const Document& doc, const std::vector<Entry>& entries,
                                 std::vector<std::string>& prov) {
    KeyReader r(doc, "switch", entries, prov);
    netsim::SwitchModel sw;
    sw.forward_delay_ns = r.i64("forward_delay_ns", sw.forward_delay_ns);
    if (const Entry* e = r.find("queue_jitter")) {
        sw.queue_jitter = parse_noise(doc, *e);
        r.note("queue_jitter", render_noise(sw.queue_jitter), KeyReader::marker(*e));
    } else {
        r.note("queue_jitter", render_noise(sw.queue_jitter), " (default)");
    }
    sw.transparent_clock = r.boolean("transparent_clock", sw.transparent_clock);
    r.reject_unknown();
    if (sw.forward_delay_ns < 0)
        throw ScenarioInvalid(doc.name + ": forward_delay_ns must be non-negative");
    return sw;
}

Criteria build_criteria(const Document& doc, const std::vector<Entry>& entries,
                        std::vector<std::string>& prov) {
    KeyReader r(doc, "criteria", entries, prov);
    Criteria c;
    c.require_convergence = r.boolean("require_convergence", c.require_convergence);
    c.convergence_bound_ns = r.i64("convergence_bound_ns", c.convergence_bound_ns);
    c.convergence_window = static_cast<int>(r.i64("convergence_window", c.convergence_window));
    c.max_p95_skew_ns = r.i64("max_p95_skew_ns", c.max_p95_skew_ns);
    c.max_p95_offset_ns = r.i64("max_p95_offset_ns", c.max_p95_offset_ns);
    c.steady_after_s = r.dbl("steady_after_s", c.steady_after_s);
    r.reject_unknown();
    if (c.convergence_bound_ns <= 0 || c.convergence_window <= 0)
        throw ScenarioInvalid(doc.name + ": convergence bound and window must be positive");
    if (c.max_p95_skew_ns < 0 || c.max_p95_offset_ns < 0 || c.steady_after_s < 0)
        throw ScenarioInvalid(doc.name + ": criteria limits must be non-negative");
    return c;
}

netsim::NodeSpec build_node(const Document& doc, const Section& sec,
                            const servo::ServoConfig& servo_cfg,
                            std::vector<std::string>& prov) {
    KeyReader r(doc, "node." + sec.id, sec.entries, prov);
    netsim::NodeSpec n;
    n.id = sec.id;

    std::string role = "auto";
    if (const Entry* e = r.find("role")) {
        role = e->value;
        if (role != "master" && role != "slave_only" && role != "auto")
            fail(doc, e->line, "role wants master, slave_only or auto");
        r.note("role", role, KeyReader::marker(*e));
    } else {
        r.note("role", role, " (default)");
    }
    n.port.role = role == "master"       ? engine::NodeRole::MasterPinned
                  : role == "slave_only" ? engine::NodeRole::SlaveOnly
                                         : engine::NodeRole::Auto;

    n.clock.base_offset_ns = r.i64("clock_offset_ns", 0);
    n.clock.frequency_offset_ppm = r.dbl("clock_freq_ppm", 0.0);
    n.clock.granularity_ns = r.i64("granularity_ns", n.clock.granularity_ns);
    n.clock.slew_cap_ppb = servo_cfg.slew_cap_ppb;

    if (const Entry* e = r.find("timestamp_model")) {
        n.timestamp_error = parse_ts_model(doc, *e);
        r.note("timestamp_model", render_noise(n.timestamp_error), KeyReader::marker(*e));
    } else {
        r.note("timestamp_model", "none", " (default)");
    }

    n.link.base_delay_ns = r.i64("link_delay_ns", n.link.base_delay_ns);
    if (const Entry* e = r.find("link_jitter")) {
        n.link.jitter = parse_noise(doc, *e);
        r.note("link_jitter", render_noise(n.link.jitter), KeyReader::marker(*e));
    } else {
        r.note("link_jitter", "none", " (default)");
    }
    n.link.asymmetry_ns = r.i64("link_asymmetry_ns", 0);
    n.link.loss_prob = r.dbl("link_loss", 0.0);

    n.port.domain = static_cast<std::uint8_t>(r.i64("domain", 0));
    n.port.log_sync_interval = static_cast<std::int8_t>(r.i64("log_sync_interval", 0));
    n.port.log_announce_interval =
        static_cast<std::int8_t>(r.i64("log_announce_interval", 1));
    n.port.log_min_delay_req_interval =
        static_cast<std::int8_t>(r.i64("log_min_delay_req_interval", 0));
    n.port.announce_receipt_timeout_multiplier =
        static_cast<int>(r.i64("announce_receipt_timeout", 3));
    n.port.foreign_master_threshold =
        static_cast<int>(r.i64("foreign_master_threshold", 2));

    n.port.descriptor.priority1 = static_cast<std::uint8_t>(r.i64("priority1", 128));
    n.port.descriptor.priority2 = static_cast<std::uint8_t>(r.i64("priority2", 128));
    n.port.descriptor.clock_class = static_cast<std::uint8_t>(
        r.i64("clock_class", n.port.role == engine::NodeRole::MasterPinned ? 6 : 248));
    n.port.descriptor.clock_identity = identity_for(sec.id);
    n.port.identity = {n.port.descriptor.clock_identity, 1};
    n.port.servo = servo_cfg;

    r.reject_unknown();

    if (n.clock.granularity_ns < 1)
        fail(doc, sec.line, "granularity_ns must be at least 1");
    if (std::abs(n.clock.frequency_offset_ppm) > n.clock.max_frequency_offset_ppm)
        fail(doc, sec.line, "clock_freq_ppm exceeds the +/-500 ppm oscillator model");
    if (n.link.loss_prob < 0 || n.link.loss_prob >= 1)
        fail(doc, sec.line, "link_loss must be in [0, 1)");
    if (n.link.base_delay_ns < 0) fail(doc, sec.line, "link_delay_ns must be non-negative");
    return n;
}

}  // namespace

LoadedScenario parse_scenario(std::string_view text, std::string_view name,
                              std::span<const Override> overrides) {
    Document doc = parse_document(text, name);
    for (const Override& ov : overrides) apply_override(doc, ov);

    LoadedScenario out;
    out.name = std::string(name);
    out.source_text = std::string(text);
    out.digest = netsim::fnv1a64(text);

    {
        KeyReader r(doc, "global", doc.global, out.provenance);
        out.sim.seed = r.u64("seed", 1);
        const double duration_s = r.dbl("duration_s", 0.0);
        r.reject_unknown();
        if (duration_s <= 0)
            throw ScenarioInvalid(doc.name + ": duration_s must be set and positive");
        out.sim.duration_ns = std::llround(duration_s * 1e9);
    }

    const std::vector<Entry> empty;
    const std::vector<Entry>* servo_entries = &empty;
    const std::vector<Entry>* switch_entries = &empty;
    const std::vector<Entry>* criteria_entries = &empty;
    for (const Section& s : doc.sections) {
        if (s.kind == "servo") servo_entries = &s.entries;
        if (s.kind == "switch") switch_entries = &s.entries;
        if (s.kind == "criteria") criteria_entries = &s.entries;
    }

    const servo::ServoConfig servo_cfg = build_servo(doc, *servo_entries, out.provenance);
    out.sim.switch_model = build_switch(doc, *switch_entries, out.provenance);
    out.criteria = build_criteria(doc, *criteria_entries, out.provenance);

    for (const Section& s : doc.sections)
        if (s.kind == "node")
            out.sim.nodes.push_back(build_node(doc, s, servo_cfg, out.provenance));
    if (out.sim.nodes.empty())
        throw ScenarioInvalid(doc.name + ": scenario declares no [node] sections");

    return out;
}

LoadedScenario load_scenario_file(const std::string& path,
                                  std::span<const Override> overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioInvalid("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string name = path;
    const std::size_t slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    return parse_scenario(buf.str(), name, overrides);
}

}  // namespace ptpsim::scenario
