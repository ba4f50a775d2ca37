#pragma once

// Byte-exact A-MSDU / A-MPDU serialization.
//
// Wire layout (all multi-byte MAC header fields little-endian):
//
//   MPDU      : FrameControl(2) Duration(2) Addr1=RA(6) Addr2=TA(6) Addr3=RA(6)
//               SeqCtl(2, seq << 4) QoSCtl(2, TID | A-MSDU-present << 7) body FCS(4)
//   A-MSDU    : repeated { DA(6) SA(6) Length(2, big-endian) payload pad(0..3) },
//               last subframe unpadded
//   Delimiter : w = reserved | length << 4 as 16-bit little-endian, CRC-8 over
//               those two octets, signature 0x4E
//   A-MPDU    : repeated { delimiter MPDU pad(0..3) }, last MPDU unpadded

#include "bisched/frame_model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace bisched {

enum class FrameKind : std::uint8_t { PlainMsdu, Amsdu, Ampdu };

std::string_view to_string(FrameKind kind);

struct ByteFrame {
    std::vector<std::uint8_t> bytes;
    FrameKind kind = FrameKind::PlainMsdu;
    // TID of the enclosing MPDU; an A-MSDU body does not carry it on the wire.
    AccessCategory ac = AccessCategory::BestEffort;
};

inline constexpr std::uint8_t kDelimiterSignature = 0x4E;

// CRC-8, polynomial 0x07, init 0x00, no reflection, no final xor.
std::uint8_t crc8(std::span<const std::uint8_t> data);

// IEEE 802.3 CRC-32 (reflected 0x04C11DB7, init and final xor all-ones).
std::uint32_t fcs32(std::span<const std::uint8_t> data);

struct MpduDelimiter {
    std::uint8_t reserved = 0;  // 4 bits
    std::uint16_t mpdu_length = 0;  // 12 bits
    std::uint8_t crc = 0;
    std::uint8_t signature = kDelimiterSignature;

    static MpduDelimiter make(std::uint16_t mpdu_length);
    std::array<std::uint8_t, 4> serialize() const;
    static MpduDelimiter parse(std::span<const std::uint8_t, 4> raw);
    // Signature matches and the CRC covers reserved/length.
    bool valid() const;
};

// Single MPDU: header, body (zero-filled when Mpdu::body is empty), FCS.
std::vector<std::uint8_t> encode_mpdu(const Mpdu& mpdu);
// Returns nullopt when the buffer is shorter than header + FCS or the FCS fails.
std::optional<Mpdu> decode_mpdu(std::span<const std::uint8_t> bytes);

ByteFrame encode_amsdu(std::span<const Msdu> msdus, const AggregateLimits& limits);
std::vector<Msdu> decode_amsdu(const ByteFrame& frame);

ByteFrame encode_ampdu(std::span<const Mpdu> mpdus, const AggregateLimits& limits);

struct ByteRegion {
    std::size_t offset = 0;
    std::size_t length = 0;
    friend bool operator==(const ByteRegion&, const ByteRegion&) = default;
};

struct DecodeReport {
    std::vector<Mpdu> recovered;
    // Delimiter + MPDU span of each recovered unit, parallel to `recovered`.
    std::vector<ByteRegion> recovered_regions;
    // Maximal runs of bytes that did not yield a valid MPDU.
    std::vector<ByteRegion> skipped_regions;
    std::size_t padding_bytes = 0;
    std::size_t crc_failures = 0;
};

DecodeReport decode_ampdu(const ByteFrame& frame);

}  // namespace bisched
