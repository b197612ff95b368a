#include "ptpsim/wire.hpp"

#include <limits>

#include "ptpsim/errors.hpp"

namespace ptpsim::wire {

namespace {

constexpr std::uint64_t SECONDS_MASK = 0xFFFF'FFFF'FFFFull;  // 48 bits
constexpr std::uint8_t VERSION_PTP = 2;

// controlField values per Table 23. Redundant with messageType; kept on
// the wire for conformance, ignored on decode.
std::uint8_t control_field(MessageType t) {
    switch (t) {
    case MessageType::Sync:      return 0x00;
    case MessageType::DelayReq:  return 0x01;
    case MessageType::FollowUp:  return 0x02;
    case MessageType::DelayResp: return 0x03;
    default:                     return 0x05;
    }
}

struct Writer {
    std::vector<std::uint8_t>& out;

    void u8(std::uint8_t v) { out.push_back(v); }
    void u16(std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v));
    }
    void u32(std::uint32_t v) {
        u16(static_cast<std::uint16_t>(v >> 16));
        u16(static_cast<std::uint16_t>(v));
    }
    void u48(std::uint64_t v) {
        u16(static_cast<std::uint16_t>(v >> 32));
        u32(static_cast<std::uint32_t>(v));
    }
    void i64(std::int64_t v) {
        auto u = static_cast<std::uint64_t>(v);
        u32(static_cast<std::uint32_t>(u >> 32));
        u32(static_cast<std::uint32_t>(u));
    }
    void bytes(std::span<const std::uint8_t> b) { out.insert(out.end(), b.begin(), b.end()); }
    void zeros(std::size_t n) { out.insert(out.end(), n, 0); }
};

// Bounds are validated once against messageLength before any field read.
struct Reader {
    std::span<const std::uint8_t> in;

    std::uint8_t u8(std::size_t at) const { return in[at]; }
    std::uint16_t u16(std::size_t at) const {
        return static_cast<std::uint16_t>((in[at] << 8) | in[at + 1]);
    }
    std::uint32_t u32(std::size_t at) const {
        return (static_cast<std::uint32_t>(u16(at)) << 16) | u16(at + 2);
    }
    std::uint64_t u48(std::size_t at) const {
        return (static_cast<std::uint64_t>(u16(at)) << 32) | u32(at + 2);
    }
    std::int64_t i64(std::size_t at) const {
        std::uint64_t v = (static_cast<std::uint64_t>(u32(at)) << 32) | u32(at + 4);
        return static_cast<std::int64_t>(v);
    }
    ClockIdentity identity(std::size_t at) const {
        ClockIdentity id{};
        for (std::size_t i = 0; i < id.size(); ++i) id[i] = in[at + i];
        return id;
    }
};

void check_timestamp(const Timestamp& t) {
    if (t.nanoseconds >= NS_PER_S)
        throw InvariantViolation("timestamp nanoseconds out of range");
    if (t.seconds > SECONDS_MASK)
        throw InvariantViolation("timestamp seconds exceed 48 bits");
}

void put_timestamp(Writer& w, const Timestamp& t) {
    w.u48(t.seconds);
    w.u32(t.nanoseconds);
}

Timestamp get_timestamp(const Reader& r, std::size_t at) {
    return {r.u48(at), r.u32(at + 6)};
}

}  // namespace

std::int64_t to_ns(const Timestamp& t) {
    check_timestamp(t);
    if (t.seconds > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max() / NS_PER_S))
        throw ArithmeticOverflow("timestamp seconds exceed int64 nanosecond range");
    std::int64_t ns = static_cast<std::int64_t>(t.seconds) * NS_PER_S;
    if (ns > std::numeric_limits<std::int64_t>::max() - t.nanoseconds)
        throw ArithmeticOverflow("timestamp exceeds int64 nanosecond range");
    return ns + t.nanoseconds;
}

Timestamp to_timestamp(std::int64_t ns) {
    if (ns < 0) throw ArithmeticOverflow("negative time has no wire encoding");
    return {static_cast<std::uint64_t>(ns / NS_PER_S),
            static_cast<std::uint32_t>(ns % NS_PER_S)};
}

std::strong_ordering compare_port_identity(const PortIdentity& a, const PortIdentity& b) {
    if (auto c = a.clock_identity <=> b.clock_identity; c != 0) return c;
    return a.port_number <=> b.port_number;
}

const char* to_string(MessageType t) {
    switch (t) {
    case MessageType::Sync:      return "Sync";
    case MessageType::DelayReq:  return "Delay_Req";
    case MessageType::FollowUp:  return "Follow_Up";
    case MessageType::DelayResp: return "Delay_Resp";
    case MessageType::Announce:  return "Announce";
    }
    return "?";
}

const char* to_string(DecodeError e) {
    switch (e) {
    case DecodeError::Truncated:          return "Truncated";
    case DecodeError::UnknownMessageType: return "UnknownMessageType";
    case DecodeError::BadVersion:         return "BadVersion";
    case DecodeError::LengthMismatch:     return "LengthMismatch";
    case DecodeError::FieldRange:         return "FieldRange";
    }
    return "?";
}

std::size_t encoded_length(MessageType t) {
    switch (t) {
    case MessageType::Sync:
    case MessageType::DelayReq:
    case MessageType::FollowUp:  return 44;
    case MessageType::DelayResp: return 54;
    case MessageType::Announce:  return 64;
    }
    throw InvariantViolation("unknown message type");
}

MessageType body_message_type(const MessageBody& b) {
    struct Visitor {
        MessageType operator()(const SyncBody&) const { return MessageType::Sync; }
        MessageType operator()(const DelayReqBody&) const { return MessageType::DelayReq; }
        MessageType operator()(const FollowUpBody&) const { return MessageType::FollowUp; }
        MessageType operator()(const DelayRespBody&) const { return MessageType::DelayResp; }
        MessageType operator()(const AnnounceBody&) const { return MessageType::Announce; }
    };
    return std::visit(Visitor{}, b);
}

PtpHeader make_header(MessageType t) {
    PtpHeader h;
    h.type = t;
    h.message_length = static_cast<std::uint16_t>(encoded_length(t));
    return h;
}

std::vector<std::uint8_t> encode_message(const PtpMessage& msg) {
    const MessageType type = msg.header.type;
    if (body_message_type(msg.body) != type)
        throw InvariantViolation("message body does not match header type");
    if (msg.header.message_length != encoded_length(type))
        throw InvariantViolation("messageLength does not match encoded length");

    std::vector<std::uint8_t> out;
    out.reserve(msg.header.message_length);
    Writer w{out};

    w.u8(static_cast<std::uint8_t>(type));  // transportSpecific = 0
    w.u8(VERSION_PTP);
    w.u16(msg.header.message_length);
    w.u8(msg.header.domain);
    w.u8(0);
    w.u16(msg.header.flags);
    w.i64(msg.header.correction.scaled_ns);
    w.zeros(4);
    w.bytes(msg.header.source_port.clock_identity);
    w.u16(msg.header.source_port.port_number);
    w.u16(msg.header.sequence_id);
    w.u8(control_field(type));
    w.u8(static_cast<std::uint8_t>(msg.header.log_message_interval));

    struct BodyWriter {
        Writer& w;
        void operator()(const SyncBody& b) {
            check_timestamp(b.origin_timestamp);
            put_timestamp(w, b.origin_timestamp);
        }
        void operator()(const DelayReqBody& b) {
            check_timestamp(b.origin_timestamp);
            put_timestamp(w, b.origin_timestamp);
        }
        void operator()(const FollowUpBody& b) {
            check_timestamp(b.precise_origin_timestamp);
            put_timestamp(w, b.precise_origin_timestamp);
        }
        void operator()(const DelayRespBody& b) {
            check_timestamp(b.receive_timestamp);
            put_timestamp(w, b.receive_timestamp);
            w.bytes(b.requesting_port.clock_identity);
            w.u16(b.requesting_port.port_number);
        }
        void operator()(const AnnounceBody& b) {
            check_timestamp(b.origin_timestamp);
            put_timestamp(w, b.origin_timestamp);
            w.u16(0);  // currentUtcOffset: not modeled
            w.u8(0);
            w.u8(b.grandmaster_priority1);
            w.u8(b.grandmaster_quality.clock_class);
            w.u8(b.grandmaster_quality.clock_accuracy);
            w.u16(b.grandmaster_quality.offset_scaled_log_variance);
            w.u8(b.grandmaster_priority2);
            w.bytes(b.grandmaster_identity);
            w.u16(b.steps_removed);
            w.u8(b.time_source);
        }
    };
    std::visit(BodyWriter{w}, msg.body);

    return out;
}

DecodeResult decode_message(std::span<const std::uint8_t> octets) {
    if (octets.size() < HEADER_LENGTH) return DecodeError::Truncated;

    Reader r{octets};

    const std::uint8_t type_nibble = r.u8(0) & 0x0F;
    MessageType type;
    switch (type_nibble) {
    case 0x0: type = MessageType::Sync; break;
    case 0x1: type = MessageType::DelayReq; break;
    case 0x8: type = MessageType::FollowUp; break;
    case 0x9: type = MessageType::DelayResp; break;
    case 0xB: type = MessageType::Announce; break;
    default:  return DecodeError::UnknownMessageType;
    }

    if ((r.u8(1) & 0x0F) != VERSION_PTP) return DecodeError::BadVersion;

    const std::uint16_t length = r.u16(2);
    if (length != encoded_length(type)) return DecodeError::LengthMismatch;
    if (octets.size() < length) return DecodeError::Truncated;

    PtpMessage msg;
    msg.header.type = type;
    msg.header.message_length = length;
    msg.header.domain = r.u8(4);
    msg.header.flags = r.u16(6);
    msg.header.correction.scaled_ns = r.i64(8);
    msg.header.source_port.clock_identity = r.identity(20);
    msg.header.source_port.port_number = r.u16(28);
    msg.header.sequence_id = r.u16(30);
    msg.header.log_message_interval = static_cast<std::int8_t>(r.u8(33));

    const Timestamp ts = get_timestamp(r, 34);
    if (ts.nanoseconds >= NS_PER_S) return DecodeError::FieldRange;

    switch (type) {
    case MessageType::Sync:
        msg.body = SyncBody{ts};
        break;
    case MessageType::DelayReq:
        msg.body = DelayReqBody{ts};
        break;
    case MessageType::FollowUp:
        msg.body = FollowUpBody{ts};
        break;
    case MessageType::DelayResp: {
        DelayRespBody b;
        b.receive_timestamp = ts;
        b.requesting_port.clock_identity = r.identity(44);
        b.requesting_port.port_number = r.u16(52);
        msg.body = b;
        break;
    }
    case MessageType::Announce: {
        AnnounceBody b;
        b.origin_timestamp = ts;
        b.grandmaster_priority1 = r.u8(47);
        b.grandmaster_quality.clock_class = r.u8(48);
        b.grandmaster_quality.clock_accuracy = r.u8(49);
        b.grandmaster_quality.offset_scaled_log_variance = r.u16(50);
        b.grandmaster_priority2 = r.u8(52);
        b.grandmaster_identity = r.identity(53);
        b.steps_removed = r.u16(61);
        b.time_source = r.u8(63);
        msg.body = b;
        break;
    }
    }

    return msg;
}

}  // namespace ptpsim::wire
