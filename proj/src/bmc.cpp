#include "ptpsim/bmc.hpp"

namespace ptpsim::bmc {

std::strong_ordering compare_descriptors(const ClockDescriptor& a, const ClockDescriptor& b) {
    if (auto c = a.priority1 <=> b.priority1; c != 0) return c;
    if (auto c = a.clock_class <=> b.clock_class; c != 0) return c;
    if (auto c = a.clock_accuracy <=> b.clock_accuracy; c != 0) return c;
    if (auto c = a.offset_scaled_log_variance <=> b.offset_scaled_log_variance; c != 0) return c;
    if (auto c = a.priority2 <=> b.priority2; c != 0) return c;
    if (auto c = a.steps_removed <=> b.steps_removed; c != 0) return c;
    return a.clock_identity <=> b.clock_identity;
}

std::optional<ForeignMasterRecord> best_foreign(std::span<const ForeignMasterRecord> records,
                                                std::uint32_t qualification_threshold) {
    const ForeignMasterRecord* best = nullptr;
    for (const auto& r : records) {
        if (r.announce_count < qualification_threshold) continue;
        if (best == nullptr) {
            best = &r;
            continue;
        }
        auto c = compare_descriptors(r.descriptor, best->descriptor);
        if (c < 0 ||
            (c == 0 && wire::compare_port_identity(r.source_port, best->source_port) < 0))
            best = &r;
    }
    if (best == nullptr) return std::nullopt;
    return *best;
}

Recommendation state_decision(const ClockDescriptor& own,
                              const std::optional<ForeignMasterRecord>& best,
                              bool slave_only) {
    if (!best) {
        if (slave_only) return BecomePassive{};
        return BecomeMaster{};
    }
    if (slave_only) return BecomeSlaveOf{*best};
    if (compare_descriptors(best->descriptor, own) < 0) return BecomeSlaveOf{*best};
    return BecomeMaster{};
}

}  // namespace ptpsim::bmc
