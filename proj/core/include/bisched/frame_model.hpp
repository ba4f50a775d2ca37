#pragma once

// Frame and aggregate domain types plus the size/padding arithmetic shared by
// the codec, the scheduler and the channel model.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace bisched {

using TimeUs = std::int64_t;

// Declared lowest-priority first so that the enum order matches the QoS order:
// Voice > Video > BestEffort > Background.
enum class AccessCategory : std::uint8_t { Background = 0, BestEffort = 1, Video = 2, Voice = 3 };

inline constexpr std::array<AccessCategory, 4> kAllAccessCategories = {
    AccessCategory::Voice, AccessCategory::Video, AccessCategory::BestEffort,
    AccessCategory::Background};

constexpr int priority(AccessCategory ac) { return static_cast<int>(ac); }
constexpr bool higher_priority(AccessCategory a, AccessCategory b) { return priority(a) > priority(b); }

// QoS TID carried in the MAC header (user priority of the access category).
std::uint8_t tid_of(AccessCategory ac);
AccessCategory ac_from_tid(std::uint8_t tid);

std::string_view to_string(AccessCategory ac);
// Accepts the names produced by to_string; throws Error(ValidationError) otherwise.
AccessCategory parse_access_category(std::string_view name);

// 48-bit IEEE MAC address stored in the low bits of a 64-bit word.
struct MacAddress {
    std::uint64_t value = 0;

    static constexpr std::uint64_t kMask = 0xFFFF'FFFF'FFFFULL;

    constexpr MacAddress() = default;
    constexpr explicit MacAddress(std::uint64_t v) : value(v & kMask) {}

    // Network order: octet 0 is the most significant.
    std::array<std::uint8_t, 6> octets() const;
    static MacAddress from_octets(std::span<const std::uint8_t, 6> octets);

    friend constexpr bool operator==(MacAddress, MacAddress) = default;
};

inline constexpr std::size_t kMaxMsduPayload = 2304;
inline constexpr std::size_t kAmsduSubframeHeaderLen = 14;  // DA + SA + Length
inline constexpr std::size_t kMpduHeaderLen = 26;           // QoS data header
inline constexpr std::size_t kFcsLen = 4;
inline constexpr std::size_t kMpduOverhead = kMpduHeaderLen + kFcsLen;
inline constexpr std::size_t kDelimiterLen = 4;
inline constexpr std::size_t kMaxDelimitedMpduLen = 4095;  // 12-bit length field
inline constexpr std::uint16_t kSeqModulo = 4096;

struct Msdu {
    std::uint64_t id = 0;
    AccessCategory ac = AccessCategory::BestEffort;
    MacAddress dest_addr;
    MacAddress src_addr;
    std::uint32_t payload_len = 0;
    TimeUs created_at = 0;
    std::uint32_t flow_id = 0;
    // Optional concrete bytes. Empty means "payload_len zero bytes" to the codec;
    // the simulator never materializes payloads.
    std::vector<std::uint8_t> payload;
};

// Throws Error(InvalidPayload) unless 1 <= payload_len <= 2304 and the optional
// payload bytes agree with payload_len.
void validate_msdu(const Msdu& msdu);

struct AmsduSubframe {
    MacAddress da;
    MacAddress sa;
    std::uint16_t length = 0;
    std::uint32_t payload_len = 0;
    std::uint8_t pad_len = 0;
};

struct Mpdu {
    std::uint16_t seq_no = 0;
    MacAddress receiver_addr;
    MacAddress transmitter_addr;
    AccessCategory ac = AccessCategory::BestEffort;
    bool amsdu_present = false;
    std::uint32_t body_len = 0;
    std::uint32_t retries = 0;
    // MSDUs carried by this MPDU: one for a plain MSDU, several for an A-MSDU.
    std::vector<Msdu> msdus;
    // Optional concrete body bytes for the codec; empty means zero-filled.
    std::vector<std::uint8_t> body;

    std::uint32_t total_len() const { return static_cast<std::uint32_t>(kMpduOverhead) + body_len; }
    std::uint64_t payload_bytes() const;
};

struct AggregateLimits {
    std::uint32_t amsdu_max = 3839;
    std::uint32_t ampdu_max_bytes = 65535;
    std::uint32_t ampdu_max_mpdus = 64;

    static constexpr std::uint32_t kAmsduSmall = 3839;
    static constexpr std::uint32_t kAmsduLarge = 7935;

    // Throws Error(LimitExceeded) when amsdu_max is not one of the two allowed values.
    void validate() const;
};

// Padding after an A-MSDU subframe so the next one starts 4-aligned; the final
// subframe is never padded.
std::uint32_t subframe_pad_len(std::uint32_t payload_len, bool is_last);

std::uint32_t amsdu_total_len(std::span<const std::uint32_t> payload_lens);

// Pad after a delimited MPDU inside an A-MPDU (final entry unpadded).
constexpr std::uint32_t ampdu_pad_len(std::uint32_t mpdu_len, bool is_last) {
    return is_last ? 0u : (4u - mpdu_len % 4u) % 4u;
}

std::uint32_t ampdu_total_len(std::span<const std::uint32_t> mpdu_lens);

// current_len is the length of an A-MSDU whose last subframe is currently unpadded.
bool fits_in_amsdu(std::uint32_t current_len, std::uint32_t next_payload, const AggregateLimits& limits);

// Same test against an arbitrary byte budget; a budget of 0 admits nothing.
bool fits_in_amsdu_budget(std::uint32_t current_len, std::uint32_t next_payload, std::uint32_t budget);

// Sequence arithmetic modulo 4096.
constexpr std::uint16_t seq_add(std::uint16_t seq, std::uint32_t delta) {
    return static_cast<std::uint16_t>((seq + delta) % kSeqModulo);
}
constexpr std::uint16_t seq_distance(std::uint16_t from, std::uint16_t to) {
    return static_cast<std::uint16_t>((to + kSeqModulo - from) % kSeqModulo);
}

}  // namespace bisched
