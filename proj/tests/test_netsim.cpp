#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "ptpsim/errors.hpp"
#include "ptpsim/harness.hpp"
#include "ptpsim/netsim.hpp"

using namespace ptpsim;

namespace {

netsim::NodeSpec master_node(const std::string& id) {
    netsim::NodeSpec n;
    n.id = id;
    n.port.role = engine::NodeRole::MasterPinned;
    n.port.identity = {{0xA0, 0, 0, 0, 0, 0, 0, 1}, 1};
    n.port.descriptor.clock_class = 6;
    n.port.descriptor.clock_identity = n.port.identity.clock_identity;
    n.clock.granularity_ns = 1;
    return n;
}

netsim::NodeSpec slave_node(const std::string& id, std::int64_t offset_ns,
                            double freq_ppm) {
    netsim::NodeSpec n;
    n.id = id;
    n.port.role = engine::NodeRole::SlaveOnly;
    n.port.identity = {{0xB0, 0, 0, 0, 0, 0, 0, static_cast<std::uint8_t>(id.back())}, 1};
    n.port.descriptor.clock_identity = n.port.identity.clock_identity;
    n.clock.base_offset_ns = offset_ns;
    n.clock.frequency_offset_ppm = freq_ppm;
    n.clock.granularity_ns = 1;
    return n;
}

netsim::Scenario two_node_scenario(std::int64_t duration_s) {
    netsim::Scenario sc;
    sc.seed = 7;
    sc.duration_ns = duration_s * 1'000'000'000;
    sc.nodes.push_back(master_node("m"));
    sc.nodes.push_back(slave_node("s", 5'000'000, 0.0));
    return sc;
}

// Offset samples of `node` at true time >= after_ns.
std::vector<std::int64_t> offsets_after(const trace::Trace& tr, const std::string& node,
                                        std::int64_t after_ns) {
    std::vector<std::int64_t> out;
    for (const auto& r : tr)
        if (r.true_time_ns >= after_ns && r.node == node)
            if (const auto* s = std::get_if<trace::OffsetSample>(&r.kind))
                out.push_back(s->offset_ns);
    return out;
}

}  // namespace

TEST_CASE("identical scenarios replay to identical traces") {
    netsim::Scenario sc = two_node_scenario(30);
    sc.nodes[1].timestamp_error = {netsim::NoiseModel::Kind::Uniform, 100.0};
    sc.switch_model.queue_jitter = {netsim::NoiseModel::Kind::UniformPos, 200.0};
    sc.nodes[0].link.loss_prob = 0.05;
    const netsim::SimResult a = netsim::run(sc);
    const netsim::SimResult b = netsim::run(sc);
    CHECK(a.trace == b.trace);
    REQUIRE(a.summaries.size() == b.summaries.size());
    for (std::size_t i = 0; i < a.summaries.size(); ++i) {
        CHECK(a.summaries[i].tx_count == b.summaries[i].tx_count);
        CHECK(a.summaries[i].rx_count == b.summaries[i].rx_count);
        CHECK(a.summaries[i].link_drops == b.summaries[i].link_drops);
    }
    // A different seed must not replay the same trace.
    sc.seed = 8;
    const netsim::SimResult c = netsim::run(sc);
    CHECK(a.trace != c.trace);
}

TEST_CASE("a lone pinned master transmits on schedule and hears nothing") {
    netsim::Scenario sc;
    sc.seed = 1;
    sc.duration_ns = 10'500'000'000;  // 10.5 s
    netsim::NodeSpec m = master_node("m");
    m.port.log_announce_interval = 0;  // one per second, same as sync
    sc.nodes.push_back(m);
    const netsim::SimResult r = netsim::run(sc);
    REQUIRE(r.summaries.size() == 1);
    // Syncs at 1..10 s, each followed by a Follow_Up, announces at 1..10 s.
    CHECK(r.summaries[0].tx_count == 30);
    CHECK(r.summaries[0].rx_count == 0);
    CHECK(r.summaries[0].final_state == engine::PortState::Master);
}

TEST_CASE("noiseless rig settles to a zero-offset fixed point") {
    netsim::Scenario sc = two_node_scenario(60);
    const netsim::SimResult r = netsim::run(sc);
    REQUIRE(r.summaries.size() == 2);
    CHECK(r.summaries[1].final_state == engine::PortState::Slave);
    const auto tail = offsets_after(r.trace, "s", 50'000'000'000);
    REQUIRE(!tail.empty());
    // Reads floor to the tick, so t2 and the filtered delay each carry up
    // to one quantum: the fixed point sits within 2 ticks, not 1.
    for (const std::int64_t o : tail) CHECK(std::llabs(o) <= 2);
}

TEST_CASE("the slave measures the symmetric path delay to within a tick") {
    netsim::Scenario sc = two_node_scenario(60);
    const netsim::SimResult r = netsim::run(sc);
    // Link 100 ns out, 2000 ns switch, 100 ns in: 2200 ns one way. The
    // floor quantizer may shave a tick off either leg.
    bool saw = false;
    for (const auto& rec : r.trace) {
        if (rec.true_time_ns < 50'000'000'000 || rec.node != "s") continue;
        if (const auto* s = std::get_if<trace::OffsetSample>(&rec.kind)) {
            CHECK(s->delay_ns >= 2199);
            CHECK(s->delay_ns <= 2200);
            saw = true;
        }
    }
    CHECK(saw);
}

TEST_CASE("link asymmetry shifts the offset by half the difference") {
    netsim::Scenario sc = two_node_scenario(60);
    // Slave uplink 500 ns longer than its downlink.
    sc.nodes[1].link.asymmetry_ns = 500;
    const netsim::SimResult r = netsim::run(sc);
    const auto tail = offsets_after(r.trace, "s", 50'000'000'000);
    REQUIRE(!tail.empty());
    // The servo nulls the measured offset; the measurement error itself
    // is visible as the true clock error, checked via the PPS skew
    // against the master's pulses.
    for (const std::int64_t o : tail) CHECK(std::llabs(o) <= 2);
    const auto skew = harness::pps_skew(r.trace, "m", "s", 50'000'000'000);
    REQUIRE(skew.has_value());
    // True offset settles at -asym/2 = -250 ns.
    CHECK(skew->p95_abs_skew_ns >= 248);
    CHECK(skew->p95_abs_skew_ns <= 252);
}

TEST_CASE("transparent clock residence accounting is exact when quiet") {
    // With a fixed forwarding delay and an idle queue the correction
    // cancels residence to the tick: the slave sees only the 200 ns of
    // cable and reaches the same fixed point as without the switch model.
    netsim::Scenario sc = two_node_scenario(60);
    sc.switch_model.transparent_clock = true;
    const netsim::SimResult r = netsim::run(sc);
    for (const auto& rec : r.trace) {
        if (rec.true_time_ns < 50'000'000'000 || rec.node != "s") continue;
        if (const auto* s = std::get_if<trace::OffsetSample>(&rec.kind)) {
            CHECK(std::llabs(s->offset_ns) <= 2);
            CHECK(s->delay_ns >= 199);
            CHECK(s->delay_ns <= 200);
        }
    }
}

TEST_CASE("transparent clock suppresses queue jitter in closed loop") {
    netsim::Scenario noisy = two_node_scenario(60);
    noisy.switch_model.queue_jitter = {netsim::NoiseModel::Kind::UniformPos, 100'000.0};

    netsim::Scenario corrected = noisy;
    corrected.switch_model.transparent_clock = true;

    const auto tail_noisy = offsets_after(netsim::run(noisy).trace, "s", 50'000'000'000);
    const auto tail_tc = offsets_after(netsim::run(corrected).trace, "s", 50'000'000'000);
    REQUIRE(!tail_noisy.empty());
    REQUIRE(!tail_tc.empty());

    std::int64_t max_noisy = 0;
    for (const std::int64_t o : tail_noisy)
        max_noisy = std::max<std::int64_t>(max_noisy, std::llabs(o));
    std::int64_t max_tc = 0;
    for (const std::int64_t o : tail_tc)
        max_tc = std::max<std::int64_t>(max_tc, std::llabs(o));

    // 100 us of uncorrected queue noise swamps the loop. Residence
    // accounting takes the noise out of each measurement, but not out of
    // the loop entirely: queue spread still reorders Sync against its
    // Follow_Up (dropping those updates) and shifts delay sampling while
    // the clock slews, which sustains a small limit cycle. The win is
    // measured as a large ratio, not perfection.
    CHECK(max_noisy > 1000);
    CHECK(max_tc <= 50);
    CHECK(max_noisy >= 20 * max_tc);
}

TEST_CASE("total loss delivers nothing") {
    netsim::Scenario sc = two_node_scenario(20);
    sc.nodes[0].link.loss_prob = 0.999999;  // uplink dies
    sc.nodes[1].link.loss_prob = 0.999999;
    const netsim::SimResult r = netsim::run(sc);
    CHECK(r.summaries[0].rx_count == 0);
    CHECK(r.summaries[1].rx_count == 0);
    CHECK(r.summaries[1].final_state == engine::PortState::Listening);
}

TEST_CASE("pps edges keep coming during holdover and re-locks") {
    netsim::Scenario sc = two_node_scenario(30);
    const netsim::SimResult r = netsim::run(sc);
    std::size_t master_edges = 0;
    std::size_t slave_edges = 0;
    for (const auto& rec : r.trace)
        if (std::holds_alternative<trace::PpsRising>(rec.kind)) {
            if (rec.node == "m") ++master_edges;
            if (rec.node == "s") ++slave_edges;
        }
    // One edge per second, give or take the edges lost to steps.
    CHECK(master_edges == 30);
    CHECK(slave_edges >= 27);
    CHECK(slave_edges <= 31);
}

TEST_CASE("scenario validation refuses nonsense") {
    netsim::Scenario empty;
    empty.duration_ns = 1'000'000'000;
    CHECK_THROWS_AS((void)netsim::run(empty), ScenarioInvalid);

    netsim::Scenario dup = two_node_scenario(1);
    dup.nodes[1].id = "m";
    CHECK_THROWS_AS((void)netsim::run(dup), ScenarioInvalid);

    netsim::Scenario no_time = two_node_scenario(1);
    no_time.duration_ns = 0;
    CHECK_THROWS_AS((void)netsim::run(no_time), ScenarioInvalid);
}

TEST_CASE("noise model draws respect their bounds") {
    netsim::Rng rng(123);
    netsim::NoiseModel uni{netsim::NoiseModel::Kind::Uniform, 25.0};
    netsim::NoiseModel pos{netsim::NoiseModel::Kind::UniformPos, 200.0};
    netsim::NoiseModel gau{netsim::NoiseModel::Kind::Gaussian, 50.0};
    for (int i = 0; i < 20000; ++i) {
        const double u = uni.draw(rng);
        CHECK(u >= -25.0);
        CHECK(u <= 25.0);
        const double p = pos.draw(rng);
        CHECK(p >= 0.0);
        CHECK(p <= 200.0);
        const double g = gau.draw(rng);
        CHECK(std::abs(g) <= 200.0);  // 4 sigma clamp
    }
}

TEST_CASE("gaussian draws hit the requested sigma") {
    netsim::Rng rng(2024);
    const double sigma = 20000.0;
    double sum = 0.0;
    double sum_sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.gaussian(sigma);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < sigma * 0.02);
    CHECK(std::sqrt(var) == doctest::Approx(sigma).epsilon(0.05));
}
