#include "bisched/block_ack.hpp"

#include "bisched/error.hpp"
#include "bisched/frame_model.hpp"

#include <string>

namespace bisched {

namespace {

[[noreturn]] void out_of_window(std::uint16_t seq, std::uint16_t start) {
    throw Error(ErrorCode::SeqOutOfWindow,
                "seq " + std::to_string(seq) + " outside window starting at " + std::to_string(start));
}

}  // namespace

bool BlockAck::in_window(std::uint16_t seq) const {
    return seq < kSeqModulo && seq_distance(starting_seq, seq) < kBlockAckWindow;
}

bool BlockAck::acked(std::uint16_t seq) const {
    if (!in_window(seq)) out_of_window(seq, starting_seq);
    return (bitmap >> seq_distance(starting_seq, seq)) & 1u;
}

BlockAck make_block_ack(std::span<const std::uint16_t> received, std::uint16_t starting_seq) {
    BlockAck ba;
    ba.starting_seq = static_cast<std::uint16_t>(starting_seq % kSeqModulo);
    for (auto seq : received) {
        if (!ba.in_window(seq)) out_of_window(seq, ba.starting_seq);
        ba.bitmap |= std::uint64_t{1} << seq_distance(ba.starting_seq, seq);
    }
    return ba;
}

std::vector<std::uint16_t> missing_seqs(const BlockAck& ba, std::span<const std::uint16_t> sent) {
    std::vector<std::uint16_t> out;
    for (auto seq : sent) {
        if (!ba.acked(seq)) out.push_back(seq);
    }
    return out;
}

}  // namespace bisched
