#pragma once

// Best-master-clock comparison and state decision, following the
// IEEE 1588-2008 clause 9.3 dataset comparison reduced to the fields a
// single-domain ordinary clock needs. Grandmaster identity is the final
// tie-breaker, so the order is total over distinct clocks.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>

#include "ptpsim/wire.hpp"

namespace ptpsim::bmc {

struct ClockDescriptor {
    std::uint8_t priority1 = 128;
    std::uint8_t clock_class = 248;
    std::uint8_t clock_accuracy = 0xFE;
    std::uint16_t offset_scaled_log_variance = 0xFFFF;
    std::uint8_t priority2 = 128;
    std::uint16_t steps_removed = 0;
    wire::ClockIdentity clock_identity{};

    friend bool operator==(const ClockDescriptor&, const ClockDescriptor&) = default;
};

// Less means a is the better master. Lexicographic over (priority1,
// clockClass, clockAccuracy, offsetScaledLogVariance, priority2,
// stepsRemoved, clockIdentity); lower wins on every field.
std::strong_ordering compare_descriptors(const ClockDescriptor& a, const ClockDescriptor& b);

struct ForeignMasterRecord {
    ClockDescriptor descriptor{};
    wire::PortIdentity source_port{};
    std::uint32_t announce_count = 0;
    std::int64_t last_announce_local_ns = 0;

    friend bool operator==(const ForeignMasterRecord&, const ForeignMasterRecord&) = default;
};

// Best qualified record (announce_count >= qualification_threshold), or
// nullopt when none qualifies. Result is independent of input order:
// ties on the descriptor fall back to the source port identity.
std::optional<ForeignMasterRecord> best_foreign(std::span<const ForeignMasterRecord> records,
                                                std::uint32_t qualification_threshold);

struct BecomeMaster {};
struct BecomeSlaveOf {
    ForeignMasterRecord parent;
};
struct BecomePassive {};

using Recommendation = std::variant<BecomeMaster, BecomeSlaveOf, BecomePassive>;

// Port state recommendation given our own descriptor and the best
// qualified foreign master. A slave-only port never becomes master: with
// no master in sight it holds in a passive listen.
Recommendation state_decision(const ClockDescriptor& own,
                              const std::optional<ForeignMasterRecord>& best,
                              bool slave_only);

}  // namespace ptpsim::bmc
