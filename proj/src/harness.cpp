#include "ptpsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <utility>
#include <vector>

namespace ptpsim::harness {

namespace {

constexpr std::int64_t kPairWindowNs = 500'000'000;  // half the 1 Hz period

std::int64_t nearest_rank_p95(std::vector<std::int64_t>& abs_values) {
    std::sort(abs_values.begin(), abs_values.end());
    const std::size_t n = abs_values.size();
    const std::size_t rank = (95 * n + 99) / 100;  // ceil(0.95 n), 1-based
    return abs_values[rank - 1];
}

std::vector<std::int64_t> edge_times(const trace::Trace& trace, std::string_view node,
                                     std::int64_t after_true_ns) {
    std::vector<std::int64_t> out;
    for (const trace::TraceRecord& r : trace)
        if (r.true_time_ns >= after_true_ns && r.node == node &&
            std::holds_alternative<trace::PpsRising>(r.kind))
            out.push_back(r.true_time_ns);
    std::sort(out.begin(), out.end());
    return out;
}

// Index of the element of `sorted` closest to x (ties keep the earlier).
std::size_t nearest_index(const std::vector<std::int64_t>& sorted, std::int64_t x) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    if (it == sorted.begin()) return 0;
    if (it == sorted.end()) return sorted.size() - 1;
    const auto prev = it - 1;
    return (x - *prev <= *it - x) ? static_cast<std::size_t>(prev - sorted.begin())
                                  : static_cast<std::size_t>(it - sorted.begin());
}

}  // namespace

std::optional<std::int64_t> detect_convergence(const trace::Trace& trace,
                                               std::string_view node,
                                               std::int64_t bound_ns, int window) {
    if (window <= 0) return std::nullopt;
    int run = 0;
    std::int64_t run_start = 0;
    for (const trace::TraceRecord& r : trace) {
        if (r.node != node) continue;
        const auto* s = std::get_if<trace::OffsetSample>(&r.kind);
        if (s == nullptr) continue;
        if (std::llabs(s->offset_ns) <= bound_ns) {
            if (run == 0) run_start = r.true_time_ns;
            if (++run >= window) return run_start;
        } else {
            run = 0;
        }
    }
    return std::nullopt;
}

std::optional<OffsetStats> offset_stats(const trace::Trace& trace, std::string_view node,
                                        std::int64_t after_true_ns) {
    std::vector<std::int64_t> abs_values;
    for (const trace::TraceRecord& r : trace) {
        if (r.true_time_ns < after_true_ns || r.node != node) continue;
        if (const auto* s = std::get_if<trace::OffsetSample>(&r.kind))
            abs_values.push_back(std::llabs(s->offset_ns));
    }
    if (abs_values.empty()) return std::nullopt;
    OffsetStats st;
    st.count = abs_values.size();
    st.max_abs_ns = *std::max_element(abs_values.begin(), abs_values.end());
    st.p95_abs_ns = nearest_rank_p95(abs_values);
    return st;
}

std::optional<SkewReport> pps_skew(const trace::Trace& trace, std::string_view node_a,
                                   std::string_view node_b, std::int64_t after_true_ns) {
    const std::vector<std::int64_t> a = edge_times(trace, node_a, after_true_ns);
    const std::vector<std::int64_t> b = edge_times(trace, node_b, after_true_ns);
    if (a.empty() || b.empty()) return std::nullopt;

    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t j = nearest_index(b, a[i]);
        if (std::llabs(a[i] - b[j]) <= kPairWindowNs) pairs.emplace(i, j);
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        const std::size_t i = nearest_index(a, b[j]);
        if (std::llabs(a[i] - b[j]) <= kPairWindowNs) pairs.emplace(i, j);
    }
    if (pairs.empty()) return std::nullopt;

    std::vector<std::int64_t> abs_skews;
    abs_skews.reserve(pairs.size());
    for (const auto& [i, j] : pairs) abs_skews.push_back(std::llabs(a[i] - b[j]));

    SkewReport rep;
    rep.node_a = std::string(node_a);
    rep.node_b = std::string(node_b);
    rep.after_true_ns = after_true_ns;
    rep.max_abs_skew_ns = *std::max_element(abs_skews.begin(), abs_skews.end());
    rep.p95_abs_skew_ns = nearest_rank_p95(abs_skews);
    rep.edge_count = pairs.size();
    return rep;
}

}  // namespace ptpsim::harness
