// Acceptance gate for the timing-node simulator. Each criterion prints
// exactly one PASS/FAIL line with the measured value next to its pinned
// limit; the process exits nonzero if any criterion fails. Limits live
// here as literals on purpose: this binary is the contract.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "ptpsim/bmc.hpp"
#include "ptpsim/harness.hpp"
#include "ptpsim/netsim.hpp"
#include "ptpsim/report.hpp"
#include "ptpsim/rng.hpp"
#include "ptpsim/scenario.hpp"
#include "ptpsim/servo.hpp"
#include "ptpsim/wire.hpp"

using namespace ptpsim;

namespace {

int g_failures = 0;

void verdict_line(int index, bool pass, const std::string& detail) {
    if (!pass) ++g_failures;
    std::printf("criterion %d: %s  %s\n", index, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

double wall_seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string scenario_path(const char* file) {
    return std::string(PTPSIM_SCENARIO_DIR) + "/" + file;
}

std::vector<std::int64_t> offsets_after(const trace::Trace& tr, const std::string& node,
                                        std::int64_t after_ns) {
    std::vector<std::int64_t> out;
    for (const auto& r : tr)
        if (r.true_time_ns >= after_ns && r.node == node)
            if (const auto* s = std::get_if<trace::OffsetSample>(&r.kind))
                out.push_back(s->offset_ns);
    return out;
}

double sample_std(const std::vector<std::int64_t>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (std::int64_t x : v) mean += static_cast<double>(x);
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (std::int64_t x : v) {
        const double d = static_cast<double>(x) - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------- 1 & 2

// Shared run: criteria 1 and 2 read the same reference scenario.
struct ReferenceRun {
    scenario::LoadedScenario sc;
    netsim::SimResult sim;
    double wall_s = 0.0;
};

ReferenceRun run_reference() {
    ReferenceRun r{scenario::load_scenario_file(scenario_path("paper_fig5.scn")), {}, 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    r.sim = netsim::run(r.sc.sim);
    r.wall_s = wall_seconds_since(t0);
    return r;
}

void criterion_1(const ReferenceRun& r) {
    constexpr std::int64_t kConvergenceBoundNs = 1000;
    constexpr int kConvergenceWindow = 10;
    constexpr std::int64_t kSteadyAfterNs = 180'000'000'000;
    constexpr std::int64_t kSkewLimitNs = 100;
    constexpr double kWallLimitS = 5.0;

    const auto c1 = harness::detect_convergence(r.sim.trace, "s1", kConvergenceBoundNs,
                                                kConvergenceWindow);
    const auto c2 = harness::detect_convergence(r.sim.trace, "s2", kConvergenceBoundNs,
                                                kConvergenceWindow);
    const auto skew = harness::pps_skew(r.sim.trace, "s1", "s2", kSteadyAfterNs);

    char buf[256];
    if (!c1 || !c2 || !skew) {
        std::snprintf(buf, sizeof buf,
                      "reference scenario: convergence or pps data missing (s1 %s, s2 %s)",
                      c1 ? "converged" : "missing", c2 ? "converged" : "missing");
        verdict_line(1, false, buf);
        return;
    }
    const bool pass = skew->p95_abs_skew_ns < kSkewLimitNs && r.wall_s < kWallLimitS;
    std::snprintf(buf, sizeof buf,
                  "slave-slave pps skew p95 %lld ns (max %lld, %zu pulses, limit < %lld); "
                  "converged at %.1f s / %.1f s; wall %.2f s (limit < %.0f)",
                  static_cast<long long>(skew->p95_abs_skew_ns),
                  static_cast<long long>(skew->max_abs_skew_ns), skew->edge_count,
                  static_cast<long long>(kSkewLimitNs), static_cast<double>(*c1) / 1e9,
                  static_cast<double>(*c2) / 1e9, r.wall_s, kWallLimitS);
    verdict_line(1, pass, buf);
}

void criterion_2(const ReferenceRun& r) {
    constexpr std::int64_t kSteadyAfterNs = 180'000'000'000;
    constexpr std::int64_t kOffsetP95LimitNs = 1000;

    const auto s1 = harness::offset_stats(r.sim.trace, "s1", kSteadyAfterNs);
    const auto s2 = harness::offset_stats(r.sim.trace, "s2", kSteadyAfterNs);
    if (!s1 || !s2) {
        verdict_line(2, false, "reference scenario: steady-state offset samples missing");
        return;
    }
    const bool pass =
        s1->p95_abs_ns < kOffsetP95LimitNs && s2->p95_abs_ns < kOffsetP95LimitNs;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "steady |offset| p95: s1 %lld ns, s2 %lld ns (limit < %lld each)",
                  static_cast<long long>(s1->p95_abs_ns),
                  static_cast<long long>(s2->p95_abs_ns),
                  static_cast<long long>(kOffsetP95LimitNs));
    verdict_line(2, pass, buf);
}

// ------------------------------------------------------------------- 3

void criterion_3() {
    constexpr int kTuples = 10'000;
    netsim::Rng rng(0xC3C3'0001);
    int bad = 0;
    for (int i = 0; i < kTuples && bad < 5; ++i) {
        const std::int64_t base = 4'000'000'000 + static_cast<std::int64_t>(
                                                      rng.next_u64() % 1'000'000'000'000ULL);
        const std::int64_t off =
            static_cast<std::int64_t>(rng.next_u64() % 2'000'000'001ULL) - 1'000'000'000;
        std::int64_t df = static_cast<std::int64_t>(rng.next_u64() % 1'000'001ULL);
        std::int64_t dr = static_cast<std::int64_t>(rng.next_u64() % 1'000'001ULL);
        if ((df + dr) % 2 != 0) ++dr;  // keep the half-sum exact
        const bool with_corrections = (i % 2) == 1;
        const std::int64_t cs =
            with_corrections ? static_cast<std::int64_t>(rng.next_u64() % 100'000ULL) : 0;
        const std::int64_t cd =
            with_corrections ? static_cast<std::int64_t>(rng.next_u64() % 100'000ULL) : 0;
        const std::int64_t gap = static_cast<std::int64_t>(rng.next_u64() % 1'000'000'000ULL);

        const std::int64_t t1 = base;
        const std::int64_t t2 = t1 + df + cs + off;
        const std::int64_t t3 = t2 + gap;
        const std::int64_t t4 = t3 + dr + cd - off;

        const servo::ExchangeTimestamps x{
            wire::to_timestamp(t1), wire::to_timestamp(t2), wire::to_timestamp(t3),
            wire::to_timestamp(t4), wire::TimeInterval::from_ns(cs),
            wire::TimeInterval::from_ns(cd)};
        const servo::OffsetDelay got = servo::compute_offset_and_delay(x);

        // Closed form: measured offset exceeds the true offset by exactly
        // half the forward/reverse delay difference.
        const std::int64_t want_delay = (df + dr) / 2;
        const std::int64_t want_offset = off + (df - dr) / 2;
        if (got.mean_path_delay_ns != want_delay || got.offset_from_master_ns != want_offset) {
            ++bad;
            std::fprintf(stderr,
                         "  tuple %d: off=%lld df=%lld dr=%lld cs=%lld cd=%lld -> "
                         "got (%lld, %lld) want (%lld, %lld)\n",
                         i, static_cast<long long>(off), static_cast<long long>(df),
                         static_cast<long long>(dr), static_cast<long long>(cs),
                         static_cast<long long>(cd),
                         static_cast<long long>(got.offset_from_master_ns),
                         static_cast<long long>(got.mean_path_delay_ns),
                         static_cast<long long>(want_offset),
                         static_cast<long long>(want_delay));
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "offset/delay closed form, %d random tuples incl. asymmetry law: "
                  "%d mismatches (limit 0)",
                  kTuples, bad);
    verdict_line(3, bad == 0, buf);
}

// ------------------------------------------------------------------- 4

netsim::Scenario stamp_noise_scenario(std::uint64_t seed, const netsim::NoiseModel& model) {
    netsim::Scenario sc;
    sc.seed = seed;
    sc.duration_ns = 260'000'000'000;

    netsim::NodeSpec m;
    m.id = "m";
    m.port.role = engine::NodeRole::MasterPinned;
    m.port.identity = {{0xA0, 0, 0, 0, 0, 0, 0, 1}, 1};
    m.port.descriptor.clock_class = 6;
    m.port.descriptor.clock_identity = m.port.identity.clock_identity;
    m.clock.granularity_ns = 1;
    m.timestamp_error = model;

    netsim::NodeSpec s;
    s.id = "s";
    s.port.role = engine::NodeRole::SlaveOnly;
    s.port.identity = {{0xB0, 0, 0, 0, 0, 0, 0, 1}, 1};
    s.port.descriptor.clock_identity = s.port.identity.clock_identity;
    s.clock.granularity_ns = 1;
    s.clock.frequency_offset_ppm = 2.0;
    s.timestamp_error = model;

    sc.nodes.push_back(m);
    sc.nodes.push_back(s);
    return sc;
}

void criterion_4() {
    constexpr int kSeeds = 10;
    constexpr std::int64_t kSteadyAfterNs = 180'000'000'000;
    constexpr double kWallLimitS = 60.0;

    const netsim::NoiseModel models[3] = {
        {netsim::NoiseModel::Kind::Uniform, 25.0},     // hardware-adjacent stamping
        {netsim::NoiseModel::Kind::Uniform, 100.0},    // mac-level stamping
        {netsim::NoiseModel::Kind::Gaussian, 20000.0}, // application-level stamping
    };
    const char* names[3] = {"phy", "mac", "app"};

    const auto t0 = std::chrono::steady_clock::now();
    double mean[3] = {0, 0, 0};
    double var[3] = {0, 0, 0};
    for (int mi = 0; mi < 3; ++mi) {
        std::vector<double> stds;
        for (int seed = 1; seed <= kSeeds; ++seed) {
            const netsim::SimResult res =
                netsim::run(stamp_noise_scenario(static_cast<std::uint64_t>(seed), models[mi]));
            const auto samples = offsets_after(res.trace, "s", kSteadyAfterNs);
            if (samples.size() < 10) {
                verdict_line(4, false, "a run produced too few steady-state samples");
                return;
            }
            stds.push_back(sample_std(samples));
        }
        for (double s : stds) mean[mi] += s;
        mean[mi] /= kSeeds;
        for (double s : stds) var[mi] += (s - mean[mi]) * (s - mean[mi]);
        var[mi] /= (kSeeds - 1);
    }
    const double wall = wall_seconds_since(t0);

    const double se01 = std::sqrt(var[0] / kSeeds + var[1] / kSeeds);
    const double se12 = std::sqrt(var[1] / kSeeds + var[2] / kSeeds);
    const bool ordered = mean[0] <= mean[1] && mean[1] <= mean[2];
    const bool significant =
        (mean[1] - mean[0]) >= 2.0 * se01 && (mean[2] - mean[1]) >= 2.0 * se12;
    const bool pass = ordered && significant && wall < kWallLimitS;

    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "steady offset std over %d seeds: %s %.1f ns, %s %.1f ns, %s %.1f ns; "
                  "gaps %.1f/%.1f vs 2se %.1f/%.1f; wall %.1f s (limit < %.0f)",
                  kSeeds, names[0], mean[0], names[1], mean[1], names[2], mean[2],
                  mean[1] - mean[0], mean[2] - mean[1], 2.0 * se01, 2.0 * se12, wall,
                  kWallLimitS);
    verdict_line(4, pass, buf);
}

// ------------------------------------------------------------------- 5

void criterion_5() {
    constexpr std::int64_t kGranularityNs = 20;
    constexpr std::int64_t kBoundNs = 2 * kGranularityNs;
    constexpr std::int64_t kSettleNs = 60'000'000'000;
    constexpr std::int64_t kDurationNs = 70'000'000'000;

    const std::int64_t offsets[5] = {-1'000'000, -500'000, 0, 500'000, 1'000'000};
    const double drifts[5] = {-100.0, -50.0, 0.0, 50.0, 100.0};

    std::int64_t worst = 0;
    int checked = 0;
    char fail_at[96] = "";
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            netsim::Scenario sc;
            sc.seed = 1;
            sc.duration_ns = kDurationNs;

            netsim::NodeSpec m;
            m.id = "m";
            m.port.role = engine::NodeRole::MasterPinned;
            m.port.identity = {{0xA0, 0, 0, 0, 0, 0, 0, 1}, 1};
            m.port.descriptor.clock_class = 6;
            m.port.descriptor.clock_identity = m.port.identity.clock_identity;
            m.clock.granularity_ns = 1;

            netsim::NodeSpec s;
            s.id = "s";
            s.port.role = engine::NodeRole::SlaveOnly;
            s.port.identity = {{0xB0, 0, 0, 0, 0, 0, 0, 1}, 1};
            s.port.descriptor.clock_identity = s.port.identity.clock_identity;
            s.clock.base_offset_ns = offsets[i];
            s.clock.frequency_offset_ppm = drifts[j];
            s.clock.granularity_ns = kGranularityNs;

            sc.nodes.push_back(m);
            sc.nodes.push_back(s);

            const netsim::SimResult res = netsim::run(sc);
            const auto samples = offsets_after(res.trace, "s", kSettleNs);
            if (samples.size() < 5) {
                verdict_line(5, false, "grid cell produced too few settled samples");
                return;
            }
            for (std::int64_t v : samples) {
                const std::int64_t a = std::llabs(v);
                if (a > worst) {
                    worst = a;
                    if (a > kBoundNs)
                        std::snprintf(fail_at, sizeof fail_at, " (first at %+lld ns, %+.0f ppm)",
                                      static_cast<long long>(offsets[i]), drifts[j]);
                }
                ++checked;
            }
        }
    }
    char buf[224];
    std::snprintf(buf, sizeof buf,
                  "noiseless 5x5 grid (|offset| <= 1 ms, |drift| <= 100 ppm): worst settled "
                  "|offset| %lld ns over %d samples after 60 s (limit <= %lld)%s",
                  static_cast<long long>(worst), checked, static_cast<long long>(kBoundNs),
                  fail_at);
    verdict_line(5, worst <= kBoundNs, buf);
}

// ------------------------------------------------------------------- 6

wire::Timestamp random_timestamp(netsim::Rng& rng) {
    return {rng.next_u64() & 0xFFFF'FFFF'FFFFULL,
            static_cast<std::uint32_t>(rng.next_u64() % 1'000'000'000ULL)};
}

wire::PortIdentity random_port_identity(netsim::Rng& rng) {
    wire::PortIdentity p;
    for (auto& b : p.clock_identity) b = static_cast<std::uint8_t>(rng.next_u64());
    p.port_number = static_cast<std::uint16_t>(rng.next_u64());
    return p;
}

wire::PtpMessage random_message(netsim::Rng& rng) {
    static const wire::MessageType kTypes[5] = {
        wire::MessageType::Sync, wire::MessageType::DelayReq, wire::MessageType::FollowUp,
        wire::MessageType::DelayResp, wire::MessageType::Announce};
    const wire::MessageType t = kTypes[rng.next_u64() % 5];
    wire::PtpMessage msg;
    msg.header = wire::make_header(t);
    msg.header.domain = static_cast<std::uint8_t>(rng.next_u64());
    msg.header.flags = static_cast<std::uint16_t>(rng.next_u64());
    msg.header.correction.scaled_ns = static_cast<std::int64_t>(rng.next_u64());
    msg.header.source_port = random_port_identity(rng);
    msg.header.sequence_id = static_cast<std::uint16_t>(rng.next_u64());
    msg.header.log_message_interval = static_cast<std::int8_t>(rng.next_u64());
    switch (t) {
        case wire::MessageType::Sync:
            msg.body = wire::SyncBody{random_timestamp(rng)};
            break;
        case wire::MessageType::DelayReq:
            msg.body = wire::DelayReqBody{random_timestamp(rng)};
            break;
        case wire::MessageType::FollowUp:
            msg.body = wire::FollowUpBody{random_timestamp(rng)};
            break;
        case wire::MessageType::DelayResp:
            msg.body = wire::DelayRespBody{random_timestamp(rng), random_port_identity(rng)};
            break;
        case wire::MessageType::Announce: {
            wire::AnnounceBody a;
            a.origin_timestamp = random_timestamp(rng);
            a.grandmaster_priority1 = static_cast<std::uint8_t>(rng.next_u64());
            a.grandmaster_quality.clock_class = static_cast<std::uint8_t>(rng.next_u64());
            a.grandmaster_quality.clock_accuracy = static_cast<std::uint8_t>(rng.next_u64());
            a.grandmaster_quality.offset_scaled_log_variance =
                static_cast<std::uint16_t>(rng.next_u64());
            a.grandmaster_priority2 = static_cast<std::uint8_t>(rng.next_u64());
            for (auto& b : a.grandmaster_identity) b = static_cast<std::uint8_t>(rng.next_u64());
            a.steps_removed = static_cast<std::uint16_t>(rng.next_u64());
            a.time_source = static_cast<std::uint8_t>(rng.next_u64());
            msg.body = a;
            break;
        }
    }
    return msg;
}

void criterion_6() {
    constexpr int kMessages = 100'000;
    constexpr int kBuffers = 100'000;

    netsim::Rng rng(0xC6C6'0001);
    int roundtrip_bad = 0;
    std::vector<std::vector<std::uint8_t>> corpus;
    for (int i = 0; i < kMessages && roundtrip_bad < 5; ++i) {
        const wire::PtpMessage msg = random_message(rng);
        const std::vector<std::uint8_t> bytes = wire::encode_message(msg);
        const wire::DecodeResult back = wire::decode_message(bytes);
        const auto* decoded = std::get_if<wire::PtpMessage>(&back);
        if (decoded == nullptr || !(*decoded == msg)) ++roundtrip_bad;
        if (corpus.size() < 64) corpus.push_back(bytes);
    }

    // Decoder totality: arbitrary octets and bit-flipped valid frames may
    // be rejected but must never throw.
    int crashes = 0;
    std::vector<std::uint8_t> buf;
    for (int i = 0; i < kBuffers; ++i) {
        const bool mutate = !corpus.empty() && (i % 4 == 0);
        if (mutate) {
            buf = corpus[rng.next_u64() % corpus.size()];
            const std::size_t flips = 1 + rng.next_u64() % 4;
            for (std::size_t f = 0; f < flips; ++f)
                buf[rng.next_u64() % buf.size()] ^= static_cast<std::uint8_t>(
                    1u << (rng.next_u64() % 8));
        } else {
            buf.resize(rng.next_u64() % 4097);
            for (auto& b : buf) b = static_cast<std::uint8_t>(rng.next_u64());
        }
        try {
            (void)wire::decode_message(buf);
        } catch (...) {
            ++crashes;
            if (crashes >= 5) break;
        }
    }

    char out[200];
    std::snprintf(out, sizeof out,
                  "%d valid-message roundtrips: %d mismatches; %d fuzz buffers: %d throws "
                  "(limits 0/0)",
                  kMessages, roundtrip_bad, kBuffers, crashes);
    verdict_line(6, roundtrip_bad == 0 && crashes == 0, out);
}

// ------------------------------------------------------------------- 7

bmc::ClockDescriptor random_descriptor(netsim::Rng& rng) {
    // Small pools force frequent ties so later fields actually decide.
    static const std::uint8_t p1[] = {127, 128};
    static const std::uint8_t cls[] = {6, 13, 248};
    static const std::uint8_t acc[] = {0x20, 0xFE};
    static const std::uint16_t var[] = {0x4E5D, 0xFFFF};
    static const std::uint8_t p2[] = {128, 129};
    bmc::ClockDescriptor d;
    d.priority1 = p1[rng.next_u64() % 2];
    d.clock_class = cls[rng.next_u64() % 3];
    d.clock_accuracy = acc[rng.next_u64() % 2];
    d.offset_scaled_log_variance = var[rng.next_u64() % 2];
    d.priority2 = p2[rng.next_u64() % 2];
    d.steps_removed = static_cast<std::uint16_t>(rng.next_u64() % 3);
    d.clock_identity = {};
    d.clock_identity[7] = static_cast<std::uint8_t>(rng.next_u64() % 4);
    return d;
}

void criterion_7() {
    constexpr int kTriples = 10'000;
    constexpr int kDecisions = 10'000;
    netsim::Rng rng(0xC7C7'0001);

    int order_bad = 0;
    for (int i = 0; i < kTriples && order_bad < 5; ++i) {
        const auto a = random_descriptor(rng);
        const auto b = random_descriptor(rng);
        const auto c = random_descriptor(rng);
        const auto ab = bmc::compare_descriptors(a, b);
        const auto ba = bmc::compare_descriptors(b, a);
        const auto bc = bmc::compare_descriptors(b, c);
        const auto ac = bmc::compare_descriptors(a, c);
        // Antisymmetry.
        if ((ab == std::strong_ordering::less) != (ba == std::strong_ordering::greater))
            ++order_bad;
        // Trichotomy: equivalence under the order is exactly field equality.
        if ((ab == std::strong_ordering::equal) != (a == b)) ++order_bad;
        // Transitivity of "not worse".
        if (ab != std::strong_ordering::greater && bc != std::strong_ordering::greater &&
            ac == std::strong_ordering::greater)
            ++order_bad;
    }

    int master_recommendations = 0;
    for (int i = 0; i < kDecisions && master_recommendations < 5; ++i) {
        const auto own = random_descriptor(rng);
        std::vector<bmc::ForeignMasterRecord> records;
        const std::size_t n = rng.next_u64() % 6;
        for (std::size_t k = 0; k < n; ++k) {
            bmc::ForeignMasterRecord rec;
            rec.descriptor = random_descriptor(rng);
            rec.source_port = {rec.descriptor.clock_identity,
                               static_cast<std::uint16_t>(1 + rng.next_u64() % 3)};
            rec.announce_count = static_cast<std::uint32_t>(rng.next_u64() % 5);
            records.push_back(rec);
        }
        const auto best = bmc::best_foreign(records, 2);
        const auto rec = bmc::state_decision(own, best, true);
        if (std::holds_alternative<bmc::BecomeMaster>(rec)) ++master_recommendations;
    }

    char out[200];
    std::snprintf(out, sizeof out,
                  "%d descriptor triples: %d order violations; %d slave-only decisions: "
                  "%d master recommendations (limits 0/0)",
                  kTriples, order_bad, kDecisions, master_recommendations);
    verdict_line(7, order_bad == 0 && master_recommendations == 0, out);
}

// ------------------------------------------------------------------- 8

void criterion_8() {
    constexpr std::int64_t kSteadyAfterNs = 220'000'000'000;
    constexpr std::int64_t kLossySkewLimitNs = 300;

    const auto sc = scenario::load_scenario_file(scenario_path("paper_fig5.scn"));
    const std::string trace_a = report::render_trace_tsv(netsim::run(sc.sim).trace);
    const std::string trace_b = report::render_trace_tsv(netsim::run(sc.sim).trace);
    const bool identical = trace_a == trace_b;

    const auto lossy = scenario::load_scenario_file(scenario_path("paper_fig5_lossy.scn"));
    const netsim::SimResult res = netsim::run(lossy.sim);
    const auto c1 = harness::detect_convergence(res.trace, "s1", 1000, 10);
    const auto c2 = harness::detect_convergence(res.trace, "s2", 1000, 10);
    const auto skew = harness::pps_skew(res.trace, "s1", "s2", kSteadyAfterNs);
    const bool lossy_ok =
        c1 && c2 && skew && skew->p95_abs_skew_ns < kLossySkewLimitNs;

    char out[240];
    std::snprintf(out, sizeof out,
                  "repeat run trace bytes %s (%zu bytes); 20%% loss: %s, skew p95 %lld ns "
                  "(limit < %lld)",
                  identical ? "identical" : "DIFFER", trace_a.size(),
                  (c1 && c2) ? "both slaves converge" : "convergence missing",
                  skew ? static_cast<long long>(skew->p95_abs_skew_ns) : -1LL,
                  static_cast<long long>(kLossySkewLimitNs));
    verdict_line(8, identical && lossy_ok, out);
}

}  // namespace

int main() {
    std::printf("acceptance gate: ptpsim\n");
    try {
        const ReferenceRun ref = run_reference();
        criterion_1(ref);
        criterion_2(ref);
    } catch (const std::exception& e) {
        verdict_line(1, false, std::string("exception: ") + e.what());
        verdict_line(2, false, "skipped: reference run failed");
    }
    struct Step {
        int index;
        void (*fn)();
    };
    const Step steps[] = {{3, criterion_3}, {4, criterion_4}, {5, criterion_5},
                          {6, criterion_6}, {7, criterion_7}, {8, criterion_8}};
    for (const Step& s : steps) {
        try {
            s.fn();
        } catch (const std::exception& e) {
            verdict_line(s.index, false, std::string("exception: ") + e.what());
        }
    }
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", g_failures);
    return 1;
}
