#include "bisched/frame_model.hpp"

#include "bisched/error.hpp"

#include <string>

namespace bisched {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidPayload: return "InvalidPayload";
        case ErrorCode::EmptyAggregate: return "EmptyAggregate";
        case ErrorCode::DelimiterOverflow: return "DelimiterOverflow";
        case ErrorCode::MixedTid: return "MixedTid";
        case ErrorCode::MixedDestination: return "MixedDestination";
        case ErrorCode::MixedReceiver: return "MixedReceiver";
        case ErrorCode::TooManyMpdus: return "TooManyMpdus";
        case ErrorCode::LimitExceeded: return "LimitExceeded";
        case ErrorCode::TruncatedSubframe: return "TruncatedSubframe";
        case ErrorCode::SeqOutOfWindow: return "SeqOutOfWindow";
        case ErrorCode::PreconditionFailed: return "PreconditionFailed";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

std::uint8_t tid_of(AccessCategory ac) {
    switch (ac) {
        case AccessCategory::Voice: return 6;
        case AccessCategory::Video: return 5;
        case AccessCategory::BestEffort: return 0;
        case AccessCategory::Background: return 1;
    }
    return 0;
}

AccessCategory ac_from_tid(std::uint8_t tid) {
    switch (tid & 0x7) {
        case 1:
        case 2: return AccessCategory::Background;
        case 0:
        case 3: return AccessCategory::BestEffort;
        case 4:
        case 5: return AccessCategory::Video;
        default: return AccessCategory::Voice;
    }
}

std::string_view to_string(AccessCategory ac) {
    switch (ac) {
        case AccessCategory::Voice: return "voice";
        case AccessCategory::Video: return "video";
        case AccessCategory::BestEffort: return "best_effort";
        case AccessCategory::Background: return "background";
    }
    return "?";
}

AccessCategory parse_access_category(std::string_view name) {
    for (auto ac : kAllAccessCategories) {
        if (name == to_string(ac)) return ac;
    }
    if (name == "be") return AccessCategory::BestEffort;
    if (name == "bk") return AccessCategory::Background;
    if (name == "vo") return AccessCategory::Voice;
    if (name == "vi") return AccessCategory::Video;
    throw Error(ErrorCode::ValidationError, "unknown access category '" + std::string(name) + "'");
}

std::array<std::uint8_t, 6> MacAddress::octets() const {
    std::array<std::uint8_t, 6> out{};
    for (int i = 0; i < 6; ++i) out[i] = static_cast<std::uint8_t>(value >> (8 * (5 - i)));
    return out;
}

MacAddress MacAddress::from_octets(std::span<const std::uint8_t, 6> octets) {
    std::uint64_t v = 0;
    for (auto o : octets) v = (v << 8) | o;
    return MacAddress(v);
}

void validate_msdu(const Msdu& msdu) {
    if (msdu.payload_len == 0 || msdu.payload_len > kMaxMsduPayload) {
        throw Error(ErrorCode::InvalidPayload,
                    "payload_len " + std::to_string(msdu.payload_len) + " outside 1..2304");
    }
    if (!msdu.payload.empty() && msdu.payload.size() != msdu.payload_len) {
        throw Error(ErrorCode::InvalidPayload, "payload bytes disagree with payload_len");
    }
}

std::uint64_t Mpdu::payload_bytes() const {
    std::uint64_t sum = 0;
    for (const auto& m : msdus) sum += m.payload_len;
    return sum;
}

void AggregateLimits::validate() const {
    if (amsdu_max != kAmsduSmall && amsdu_max != kAmsduLarge) {
        throw Error(ErrorCode::LimitExceeded,
                    "amsdu_max must be 3839 or 7935, got " + std::to_string(amsdu_max));
    }
    if (ampdu_max_mpdus == 0 || ampdu_max_mpdus > 64) {
        throw Error(ErrorCode::LimitExceeded, "ampdu_max_mpdus must be in 1..64");
    }
    if (ampdu_max_bytes == 0 || ampdu_max_bytes > 65535) {
        throw Error(ErrorCode::LimitExceeded, "ampdu_max_bytes must be in 1..65535");
    }
}

std::uint32_t subframe_pad_len(std::uint32_t payload_len, bool is_last) {
    if (payload_len == 0) throw Error(ErrorCode::InvalidPayload, "zero-length subframe payload");
    if (is_last) return 0;
    return (4u - (static_cast<std::uint32_t>(kAmsduSubframeHeaderLen) + payload_len) % 4u) % 4u;
}

std::uint32_t amsdu_total_len(std::span<const std::uint32_t> payload_lens) {
    if (payload_lens.empty()) throw Error(ErrorCode::EmptyAggregate, "A-MSDU needs at least one subframe");
    std::uint32_t total = 0;
    for (std::size_t i = 0; i < payload_lens.size(); ++i) {
        const bool last = i + 1 == payload_lens.size();
        total += static_cast<std::uint32_t>(kAmsduSubframeHeaderLen) + payload_lens[i] +
                 subframe_pad_len(payload_lens[i], last);
    }
    return total;
}

std::uint32_t ampdu_total_len(std::span<const std::uint32_t> mpdu_lens) {
    if (mpdu_lens.empty()) throw Error(ErrorCode::EmptyAggregate, "A-MPDU needs at least one MPDU");
    std::uint32_t total = 0;
    for (std::size_t i = 0; i < mpdu_lens.size(); ++i) {
        if (mpdu_lens[i] > kMaxDelimitedMpduLen) {
            throw Error(ErrorCode::DelimiterOverflow,
                        "MPDU length " + std::to_string(mpdu_lens[i]) + " exceeds 4095");
        }
        const bool last = i + 1 == mpdu_lens.size();
        total += static_cast<std::uint32_t>(kDelimiterLen) + mpdu_lens[i] + ampdu_pad_len(mpdu_lens[i], last);
    }
    return total;
}

bool fits_in_amsdu_budget(std::uint32_t current_len, std::uint32_t next_payload, std::uint32_t budget) {
    // Every earlier subframe ends 4-aligned, so the open last subframe pads to
    // the next multiple of four once another subframe follows it.
    const std::uint32_t repadded = current_len == 0 ? 0 : current_len + (4u - current_len % 4u) % 4u;
    const std::uint64_t grown =
        std::uint64_t{repadded} + kAmsduSubframeHeaderLen + std::uint64_t{next_payload};
    return grown <= budget;
}

bool fits_in_amsdu(std::uint32_t current_len, std::uint32_t next_payload, const AggregateLimits& limits) {
    return fits_in_amsdu_budget(current_len, next_payload, limits.amsdu_max);
}

}  // namespace bisched
