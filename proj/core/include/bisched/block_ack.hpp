#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bisched {

inline constexpr std::uint32_t kBlockAckWindow = 64;
// Compressed BlockAck control frame size charged on air.
inline constexpr std::uint32_t kBlockAckFrameBytes = 32;

// Compressed block acknowledgement: bit i acknowledges (starting_seq + i) mod 4096.
struct BlockAck {
    std::uint16_t starting_seq = 0;
    std::uint64_t bitmap = 0;

    bool in_window(std::uint16_t seq) const;
    // Throws Error(SeqOutOfWindow) for sequence numbers outside the window.
    bool acked(std::uint16_t seq) const;

    friend bool operator==(const BlockAck&, const BlockAck&) = default;
};

BlockAck make_block_ack(std::span<const std::uint16_t> received, std::uint16_t starting_seq);

// Members of `sent` whose bit is clear, in their original order.
std::vector<std::uint16_t> missing_seqs(const BlockAck& ba, std::span<const std::uint16_t> sent);

}  // namespace bisched
