#include "doctest.h"
#include "ptpsim/harness.hpp"

using namespace ptpsim;

namespace {

trace::TraceRecord offset_at(std::int64_t t, const char* node, std::int64_t offset) {
    return {t, node, trace::OffsetSample{offset, 0}};
}

trace::TraceRecord pps_at(std::int64_t t, const char* node) {
    return {t, node, trace::PpsRising{}};
}

}  // namespace

TEST_CASE("convergence starts at the first sample of the first full run") {
    trace::Trace tr;
    // Three good samples, a spike, then a sustained run.
    for (int i = 0; i < 3; ++i) tr.push_back(offset_at(1'000 + i, "s", 500));
    tr.push_back(offset_at(2'000, "s", 5'000));
    for (int i = 0; i < 12; ++i) tr.push_back(offset_at(3'000 + i, "s", -800));

    CHECK(harness::detect_convergence(tr, "s", 1'000, 10) == 3'000);
    // A window of three is satisfied by the opening run.
    CHECK(harness::detect_convergence(tr, "s", 1'000, 3) == 1'000);
    // Never twelve good samples within a tighter bound.
    CHECK_FALSE(harness::detect_convergence(tr, "s", 100, 10).has_value());
    // Other nodes' samples are invisible.
    CHECK_FALSE(harness::detect_convergence(tr, "x", 1'000, 1).has_value());
}

TEST_CASE("offset statistics use the nearest-rank percentile") {
    trace::Trace tr;
    for (int i = 1; i <= 20; ++i) tr.push_back(offset_at(i, "s", i % 2 == 0 ? i : -i));
    const auto st = harness::offset_stats(tr, "s", 0);
    REQUIRE(st.has_value());
    CHECK(st->count == 20);
    CHECK(st->max_abs_ns == 20);
    CHECK(st->p95_abs_ns == 19);  // rank ceil(0.95*20) = 19th of 1..20

    // Window start excludes earlier samples.
    const auto late = harness::offset_stats(tr, "s", 18);
    REQUIRE(late.has_value());
    CHECK(late->count == 3);
    CHECK_FALSE(harness::offset_stats(tr, "s", 100).has_value());
}

TEST_CASE("pps skew pairs nearest pulses and reports absolute deltas") {
    trace::Trace tr;
    for (int k = 1; k <= 10; ++k) {
        tr.push_back(pps_at(k * 1'000'000'000LL, "a"));
        tr.push_back(pps_at(k * 1'000'000'000LL + 10 * k, "b"));  // 10..100 ns late
    }
    const auto rep = harness::pps_skew(tr, "a", "b", 0);
    REQUIRE(rep.has_value());
    CHECK(rep->edge_count == 10);
    CHECK(rep->max_abs_skew_ns == 100);
    CHECK(rep->p95_abs_skew_ns == 100);  // rank ceil(0.95*10) = 10th
    CHECK(rep->node_a == "a");
}

TEST_CASE("pulses with no partner within half a period stay unpaired") {
    trace::Trace tr;
    tr.push_back(pps_at(1'000'000'000, "a"));
    tr.push_back(pps_at(1'000'000'050, "b"));
    tr.push_back(pps_at(2'000'000'000, "a"));  // b misses this second entirely
    tr.push_back(pps_at(3'000'000'000, "a"));
    tr.push_back(pps_at(3'000'000'010, "b"));
    const auto rep = harness::pps_skew(tr, "a", "b", 0);
    REQUIRE(rep.has_value());
    CHECK(rep->edge_count == 2);
    CHECK(rep->max_abs_skew_ns == 50);

    // One channel silent: no measurement rather than a fake zero.
    trace::Trace lone;
    lone.push_back(pps_at(1'000'000'000, "a"));
    CHECK_FALSE(harness::pps_skew(lone, "a", "b", 0).has_value());
}

TEST_CASE("the measurement window start is honored") {
    trace::Trace tr;
    tr.push_back(pps_at(1'000'000'000, "a"));
    tr.push_back(pps_at(1'400'000'000, "b"));  // wild early skew
    tr.push_back(pps_at(5'000'000'000, "a"));
    tr.push_back(pps_at(5'000'000'020, "b"));
    const auto all = harness::pps_skew(tr, "a", "b", 0);
    REQUIRE(all.has_value());
    CHECK(all->max_abs_skew_ns == 400'000'000);
    const auto late = harness::pps_skew(tr, "a", "b", 2'000'000'000);
    REQUIRE(late.has_value());
    CHECK(late->max_abs_skew_ns == 20);
    CHECK(late->edge_count == 1);
}
