#pragma once

// IEEE 1588-2008 message codec for the five message types used by a
// delay-request/response ordinary clock: Sync, Delay_Req, Follow_Up,
// Delay_Resp, Announce.  Messages are raw PTP payloads (no UDP/IP or
// Ethernet framing) encoded big-endian per the field tables in
// IEEE 1588-2008 clause 13.

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ptpsim::wire {

constexpr std::int64_t NS_PER_S = 1'000'000'000;

// IEEE 1588 Timestamp: 48-bit seconds + 32-bit nanoseconds, 10 octets.
struct Timestamp {
    std::uint64_t seconds = 0;      // only the low 48 bits are encodable
    std::uint32_t nanoseconds = 0;  // invariant: < NS_PER_S

    friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

// Timestamp <-> signed nanosecond count. Both directions throw
// ArithmeticOverflow when the value does not fit (negative ns, or
// seconds too large for an int64 nanosecond count).
std::int64_t to_ns(const Timestamp& t);
Timestamp to_timestamp(std::int64_t ns);

// correctionField units: nanoseconds scaled by 2^16 (clause 5.3.4).
struct TimeInterval {
    std::int64_t scaled_ns = 0;

    static TimeInterval from_ns(std::int64_t ns) { return {ns * 65536}; }
    // Integer nanoseconds, fraction discarded toward zero.
    std::int64_t to_ns() const { return scaled_ns / 65536; }

    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

using ClockIdentity = std::array<std::uint8_t, 8>;

struct PortIdentity {
    ClockIdentity clock_identity{};
    std::uint16_t port_number = 0;

    friend bool operator==(const PortIdentity&, const PortIdentity&) = default;
};

// Total order used as the BMC tie-breaker: clockIdentity octets first,
// then portNumber.
std::strong_ordering compare_port_identity(const PortIdentity& a, const PortIdentity& b);

// messageType nibble values (Table 19).
enum class MessageType : std::uint8_t {
    Sync = 0x0,
    DelayReq = 0x1,
    FollowUp = 0x8,
    DelayResp = 0x9,
    Announce = 0xB,
};

const char* to_string(MessageType t);

// flagField, with octet 6 as the high byte of the 16-bit value.
// Unknown bits are preserved verbatim through decode/encode.
constexpr std::uint16_t FLAG_TWO_STEP = 0x0200;

struct ClockQuality {
    std::uint8_t clock_class = 248;
    std::uint8_t clock_accuracy = 0xFE;              // "unknown"
    std::uint16_t offset_scaled_log_variance = 0xFFFF;

    friend bool operator==(const ClockQuality&, const ClockQuality&) = default;
};

// Common 34-octet header (Table 18). versionPTP is fixed at 2 and
// transportSpecific at 0; neither is carried here. controlField is
// derived from messageType on encode and ignored on decode.
struct PtpHeader {
    MessageType type = MessageType::Sync;
    std::uint16_t message_length = 0;  // must equal encoded_length(type)
    std::uint8_t domain = 0;
    std::uint16_t flags = 0;
    TimeInterval correction{};
    PortIdentity source_port{};
    std::uint16_t sequence_id = 0;
    std::int8_t log_message_interval = 0x7F;

    friend bool operator==(const PtpHeader&, const PtpHeader&) = default;
};

struct SyncBody {
    Timestamp origin_timestamp{};
    friend bool operator==(const SyncBody&, const SyncBody&) = default;
};

struct DelayReqBody {
    Timestamp origin_timestamp{};
    friend bool operator==(const DelayReqBody&, const DelayReqBody&) = default;
};

struct FollowUpBody {
    Timestamp precise_origin_timestamp{};
    friend bool operator==(const FollowUpBody&, const FollowUpBody&) = default;
};

struct DelayRespBody {
    Timestamp receive_timestamp{};
    PortIdentity requesting_port{};
    friend bool operator==(const DelayRespBody&, const DelayRespBody&) = default;
};

struct AnnounceBody {
    Timestamp origin_timestamp{};
    std::uint8_t grandmaster_priority1 = 128;
    ClockQuality grandmaster_quality{};
    std::uint8_t grandmaster_priority2 = 128;
    ClockIdentity grandmaster_identity{};
    std::uint16_t steps_removed = 0;
    std::uint8_t time_source = 0xA0;  // INTERNAL_OSCILLATOR

    friend bool operator==(const AnnounceBody&, const AnnounceBody&) = default;
};

using MessageBody =
    std::variant<SyncBody, DelayReqBody, FollowUpBody, DelayRespBody, AnnounceBody>;

struct PtpMessage {
    PtpHeader header{};
    MessageBody body{};

    friend bool operator==(const PtpMessage&, const PtpMessage&) = default;
};

constexpr std::size_t HEADER_LENGTH = 34;

// Canonical encoded length per type: 44 for the event/follow-up family,
// 54 for Delay_Resp, 64 for Announce.
std::size_t encoded_length(MessageType t);
MessageType body_message_type(const MessageBody& b);

// Convenience: header with length/type filled in consistently.
PtpHeader make_header(MessageType t);

// Serializes to exactly header.message_length octets.
// Throws InvariantViolation on type/body mismatch, nanoseconds >= 1e9,
// seconds >= 2^48, or a dishonest message_length.
std::vector<std::uint8_t> encode_message(const PtpMessage& msg);

enum class DecodeError : std::uint8_t {
    Truncated,            // fewer octets than the header or messageLength
    UnknownMessageType,   // type nibble outside the five supported types
    BadVersion,           // versionPTP != 2
    LengthMismatch,       // messageLength wrong for the type
    FieldRange,           // nanoseconds field >= 1e9
};

const char* to_string(DecodeError e);

using DecodeResult = std::variant<PtpMessage, DecodeError>;

// Total over arbitrary octet sequences: never throws, never reads out
// of bounds. Octets beyond messageLength are ignored.
DecodeResult decode_message(std::span<const std::uint8_t> octets);

}  // namespace ptpsim::wire
