#include "bisched/codec.hpp"

#include "bisched/error.hpp"

#include <algorithm>
#include <string>

namespace bisched {

namespace {

constexpr std::array<std::uint8_t, 256> make_crc8_table() {
    std::array<std::uint8_t, 256> table{};
    for (int i = 0; i < 256; ++i) {
        auto c = static_cast<std::uint8_t>(i);
        for (int b = 0; b < 8; ++b) c = (c & 0x80) ? static_cast<std::uint8_t>((c << 1) ^ 0x07) : static_cast<std::uint8_t>(c << 1);
        table[i] = c;
    }
    return table;
}

constexpr std::array<std::uint32_t, 256> make_crc32_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int b = 0; b < 8; ++b) c = (c & 1u) ? (c >> 1) ^ 0xEDB88320u : c >> 1;
        table[i] = c;
    }
    return table;
}

constexpr auto kCrc8Table = make_crc8_table();
constexpr auto kCrc32Table = make_crc32_table();

void put_le16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_le32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_addr(std::vector<std::uint8_t>& out, MacAddress addr) {
    const auto o = addr.octets();
    out.insert(out.end(), o.begin(), o.end());
}

std::uint16_t get_le16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_le32(std::span<const std::uint8_t> b, std::size_t at) {
    return std::uint32_t{b[at]} | (std::uint32_t{b[at + 1]} << 8) | (std::uint32_t{b[at + 2]} << 16) |
           (std::uint32_t{b[at + 3]} << 24);
}

MacAddress get_addr(std::span<const std::uint8_t> b, std::size_t at) {
    return MacAddress::from_octets(b.subspan(at).first<6>());
}

// Frame control for a To-DS QoS data frame.
constexpr std::uint16_t kQosDataFrameControl = 0x0188;

// Collects skipped bytes into maximal contiguous runs.
class SkipTracker {
public:
    explicit SkipTracker(std::vector<ByteRegion>& out) : out_(out) {}

    void add(std::size_t offset, std::size_t length) {
        if (length == 0) return;
        if (open_ && open_->offset + open_->length == offset) {
            open_->length += length;
            return;
        }
        close();
        open_ = ByteRegion{offset, length};
    }

    void close() {
        if (open_) out_.push_back(*open_);
        open_.reset();
    }

private:
    std::vector<ByteRegion>& out_;
    std::optional<ByteRegion> open_;
};

}  // namespace

std::string_view to_string(FrameKind kind) {
    switch (kind) {
        case FrameKind::PlainMsdu: return "plain";
        case FrameKind::Amsdu: return "amsdu";
        case FrameKind::Ampdu: return "ampdu";
    }
    return "?";
}

std::uint8_t crc8(std::span<const std::uint8_t> data) {
    std::uint8_t crc = 0x00;
    for (auto byte : data) crc = kCrc8Table[crc ^ byte];
    return crc;
}

std::uint32_t fcs32(std::span<const std::uint8_t> data) {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (auto byte : data) crc = (crc >> 8) ^ kCrc32Table[(crc ^ byte) & 0xFFu];
    return crc ^ 0xFFFFFFFFu;
}

MpduDelimiter MpduDelimiter::make(std::uint16_t mpdu_length) {
    if (mpdu_length > kMaxDelimitedMpduLen) {
        throw Error(ErrorCode::DelimiterOverflow, "MPDU length " + std::to_string(mpdu_length) + " exceeds 4095");
    }
    MpduDelimiter d;
    d.mpdu_length = mpdu_length;
    const auto raw = d.serialize();
    d.crc = crc8(std::span<const std::uint8_t>(raw.data(), 2));
    return d;
}

std::array<std::uint8_t, 4> MpduDelimiter::serialize() const {
    const auto word = static_cast<std::uint16_t>((reserved & 0x0F) | ((mpdu_length & 0x0FFF) << 4));
    return {static_cast<std::uint8_t>(word), static_cast<std::uint8_t>(word >> 8), crc, signature};
}

MpduDelimiter MpduDelimiter::parse(std::span<const std::uint8_t, 4> raw) {
    const auto word = static_cast<std::uint16_t>(raw[0] | (raw[1] << 8));
    MpduDelimiter d;
    d.reserved = static_cast<std::uint8_t>(word & 0x0F);
    d.mpdu_length = static_cast<std::uint16_t>(word >> 4);
    d.crc = raw[2];
    d.signature = raw[3];
    return d;
}

bool MpduDelimiter::valid() const {
    if (signature != kDelimiterSignature) return false;
    const auto word = static_cast<std::uint16_t>((reserved & 0x0F) | ((mpdu_length & 0x0FFF) << 4));
    const std::array<std::uint8_t, 2> covered{static_cast<std::uint8_t>(word), static_cast<std::uint8_t>(word >> 8)};
    return crc8(covered) == crc;
}

std::vector<std::uint8_t> encode_mpdu(const Mpdu& mpdu) {
    if (!mpdu.body.empty() && mpdu.body.size() != mpdu.body_len) {
        throw Error(ErrorCode::InvalidPayload, "MPDU body bytes disagree with body_len");
    }
    std::vector<std::uint8_t> out;
    out.reserve(mpdu.total_len());
    put_le16(out, kQosDataFrameControl);
    put_le16(out, 0);  // duration
    put_addr(out, mpdu.receiver_addr);
    put_addr(out, mpdu.transmitter_addr);
    put_addr(out, mpdu.receiver_addr);
    put_le16(out, static_cast<std::uint16_t>((mpdu.seq_no % kSeqModulo) << 4));
    put_le16(out, static_cast<std::uint16_t>(tid_of(mpdu.ac) | (mpdu.amsdu_present ? 0x80 : 0x00)));
    if (mpdu.body.empty()) {
        out.resize(out.size() + mpdu.body_len, 0);
    } else {
        out.insert(out.end(), mpdu.body.begin(), mpdu.body.end());
    }
    put_le32(out, fcs32(out));
    return out;
}

std::optional<Mpdu> decode_mpdu(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kMpduOverhead) return std::nullopt;
    const std::size_t covered = bytes.size() - kFcsLen;
    if (fcs32(bytes.first(covered)) != get_le32(bytes, covered)) return std::nullopt;

    Mpdu m;
    m.receiver_addr = get_addr(bytes, 4);
    m.transmitter_addr = get_addr(bytes, 10);
    m.seq_no = static_cast<std::uint16_t>(get_le16(bytes, 22) >> 4);
    const auto qos = get_le16(bytes, 24);
    m.ac = ac_from_tid(static_cast<std::uint8_t>(qos & 0x0F));
    m.amsdu_present = (qos & 0x80) != 0;
    m.body.assign(bytes.begin() + kMpduHeaderLen, bytes.begin() + static_cast<std::ptrdiff_t>(covered));
    m.body_len = static_cast<std::uint32_t>(m.body.size());
    return m;
}

ByteFrame encode_amsdu(std::span<const Msdu> msdus, const AggregateLimits& limits) {
    if (msdus.empty()) throw Error(ErrorCode::EmptyAggregate, "A-MSDU needs at least one MSDU");
    std::vector<std::uint32_t> lens;
    lens.reserve(msdus.size());
    for (const auto& m : msdus) {
        validate_msdu(m);
        if (m.ac != msdus.front().ac) throw Error(ErrorCode::MixedTid, "A-MSDU subframes must share one TID");
        if (m.dest_addr != msdus.front().dest_addr) {
            throw Error(ErrorCode::MixedDestination, "A-MSDU subframes must share one destination");
        }
        lens.push_back(m.payload_len);
    }
    const auto total = amsdu_total_len(lens);
    if (total > limits.amsdu_max) {
        throw Error(ErrorCode::LimitExceeded,
                    "A-MSDU of " + std::to_string(total) + " bytes exceeds " + std::to_string(limits.amsdu_max));
    }

    ByteFrame frame;
    frame.kind = FrameKind::Amsdu;
    frame.ac = msdus.front().ac;
    frame.bytes.reserve(total);
    for (std::size_t i = 0; i < msdus.size(); ++i) {
        const auto& m = msdus[i];
        put_addr(frame.bytes, m.dest_addr);
        put_addr(frame.bytes, m.src_addr);
        frame.bytes.push_back(static_cast<std::uint8_t>(m.payload_len >> 8));
        frame.bytes.push_back(static_cast<std::uint8_t>(m.payload_len));
        if (m.payload.empty()) {
            frame.bytes.resize(frame.bytes.size() + m.payload_len, 0);
        } else {
            frame.bytes.insert(frame.bytes.end(), m.payload.begin(), m.payload.end());
        }
        frame.bytes.resize(frame.bytes.size() + subframe_pad_len(m.payload_len, i + 1 == msdus.size()), 0);
    }
    return frame;
}

std::vector<Msdu> decode_amsdu(const ByteFrame& frame) {
    if (frame.kind != FrameKind::Amsdu) throw Error(ErrorCode::PreconditionFailed, "frame is not an A-MSDU");
    const std::span<const std::uint8_t> b(frame.bytes);
    std::vector<Msdu> out;
    std::size_t pos = 0;
    while (pos < b.size()) {
        if (b.size() - pos < kAmsduSubframeHeaderLen) {
            throw Error(ErrorCode::TruncatedSubframe, "subframe header cut at offset " + std::to_string(pos));
        }
        const std::uint32_t len = (std::uint32_t{b[pos + 12]} << 8) | b[pos + 13];
        const std::size_t remaining = b.size() - pos - kAmsduSubframeHeaderLen;
        if (len > remaining) {
            throw Error(ErrorCode::TruncatedSubframe, "length field " + std::to_string(len) + " exceeds the " +
                                                          std::to_string(remaining) + " bytes remaining");
        }
        if (len == 0) throw Error(ErrorCode::InvalidPayload, "zero-length subframe at offset " + std::to_string(pos));

        Msdu m;
        m.ac = frame.ac;
        m.dest_addr = get_addr(b, pos);
        m.src_addr = get_addr(b, pos + 6);
        m.payload_len = len;
        const auto first = b.begin() + static_cast<std::ptrdiff_t>(pos + kAmsduSubframeHeaderLen);
        m.payload.assign(first, first + len);
        out.push_back(std::move(m));

        pos += kAmsduSubframeHeaderLen + len;
        if (pos < b.size()) {
            pos += subframe_pad_len(len, false);
            if (pos >= b.size()) {
                throw Error(ErrorCode::TruncatedSubframe, "padding without a following subframe");
            }
        }
    }
    return out;
}

ByteFrame encode_ampdu(std::span<const Mpdu> mpdus, const AggregateLimits& limits) {
    if (mpdus.empty()) throw Error(ErrorCode::EmptyAggregate, "A-MPDU needs at least one MPDU");
    if (mpdus.size() > limits.ampdu_max_mpdus) {
        throw Error(ErrorCode::TooManyMpdus, std::to_string(mpdus.size()) + " MPDUs exceed the limit of " +
                                                 std::to_string(limits.ampdu_max_mpdus));
    }
    std::vector<std::uint32_t> lens;
    lens.reserve(mpdus.size());
    for (const auto& m : mpdus) {
        if (m.receiver_addr != mpdus.front().receiver_addr) {
            throw Error(ErrorCode::MixedReceiver, "A-MPDU members must share one receiver address");
        }
        lens.push_back(m.total_len());
    }
    const auto total = ampdu_total_len(lens);
    if (total > limits.ampdu_max_bytes) {
        throw Error(ErrorCode::LimitExceeded, "A-MPDU of " + std::to_string(total) + " bytes exceeds " +
                                                  std::to_string(limits.ampdu_max_bytes));
    }

    ByteFrame frame;
    frame.kind = FrameKind::Ampdu;
    frame.ac = mpdus.front().ac;
    frame.bytes.reserve(total);
    for (std::size_t i = 0; i < mpdus.size(); ++i) {
        const auto encoded = encode_mpdu(mpdus[i]);
        const auto delim = MpduDelimiter::make(static_cast<std::uint16_t>(encoded.size())).serialize();
        frame.bytes.insert(frame.bytes.end(), delim.begin(), delim.end());
        frame.bytes.insert(frame.bytes.end(), encoded.begin(), encoded.end());
        const auto pad = ampdu_pad_len(static_cast<std::uint32_t>(encoded.size()), i + 1 == mpdus.size());
        frame.bytes.resize(frame.bytes.size() + pad, 0);
    }
    return frame;
}

DecodeReport decode_ampdu(const ByteFrame& frame) {
    if (frame.kind != FrameKind::Ampdu) throw Error(ErrorCode::PreconditionFailed, "frame is not an A-MPDU");
    const std::span<const std::uint8_t> b(frame.bytes);
    DecodeReport report;
    SkipTracker skipped(report.skipped_regions);

    // A delimiter is "in sync" when it sits where the previous unit said the
    // next one starts. While scanning for resynchronization a CRC-valid word
    // whose MPDU then fails its FCS is taken to be payload that happened to
    // look like a delimiter, and scanning resumes four bytes later.
    bool in_sync = true;
    std::size_t offset = 0;
    while (b.size() - offset >= kDelimiterLen) {
        const auto delim = MpduDelimiter::parse(b.subspan(offset).first<4>());
        const std::size_t len = delim.mpdu_length;
        if (delim.valid()) {
            if (len == 0) {
                skipped.close();
                report.padding_bytes += kDelimiterLen;
                offset += kDelimiterLen;
                in_sync = true;
                continue;
            }
            const std::size_t unit_end = offset + kDelimiterLen + len;
            if (len >= kMpduOverhead && unit_end <= b.size()) {
                const auto pad = std::min<std::size_t>(ampdu_pad_len(static_cast<std::uint32_t>(len), false),
                                                       b.size() - unit_end);
                if (auto mpdu = decode_mpdu(b.subspan(offset + kDelimiterLen, len))) {
                    skipped.close();
                    report.recovered.push_back(std::move(*mpdu));
                    report.recovered_regions.push_back({offset, kDelimiterLen + len});
                    report.padding_bytes += pad;
                    offset = unit_end + pad;
                    in_sync = true;
                    continue;
                }
                if (in_sync) {
                    ++report.crc_failures;
                    skipped.add(offset, kDelimiterLen + len + pad);
                    offset = unit_end + pad;
                    continue;
                }
            }
        }
        skipped.add(offset, kDelimiterLen);
        offset += kDelimiterLen;
        in_sync = false;
    }
    skipped.add(offset, b.size() - offset);
    skipped.close();
    return report;
}

}  // namespace bisched
