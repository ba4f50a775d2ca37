#include "golden.hpp"

#include "bisched/error.hpp"
#include "bisched/scheduler.hpp"

#include <fstream>

namespace bisched::cli {

namespace {

std::vector<std::uint8_t> pattern(std::size_t len, std::uint8_t salt) {
    std::vector<std::uint8_t> out(len);
    for (std::size_t i = 0; i < len; ++i) out[i] = static_cast<std::uint8_t>(i * 31 + salt);
    return out;
}

Msdu msdu(AccessCategory ac, std::uint32_t len, std::uint8_t salt) {
    Msdu m;
    m.ac = ac;
    m.dest_addr = kDefaultReceiver;
    m.src_addr = kDefaultTransmitter;
    m.payload_len = len;
    m.payload = pattern(len, salt);
    return m;
}

Mpdu plain_mpdu(AccessCategory ac, std::uint16_t seq, std::uint32_t body_len, std::uint8_t salt) {
    Mpdu m;
    m.seq_no = seq;
    m.receiver_addr = kDefaultReceiver;
    m.transmitter_addr = kDefaultTransmitter;
    m.ac = ac;
    m.body_len = body_len;
    m.body = pattern(body_len, salt);
    return m;
}

Mpdu amsdu_mpdu(std::span<const Msdu> msdus, std::uint16_t seq) {
    const auto body = encode_amsdu(msdus, AggregateLimits{});
    Mpdu m;
    m.seq_no = seq;
    m.receiver_addr = kDefaultReceiver;
    m.transmitter_addr = kDefaultTransmitter;
    m.ac = msdus.front().ac;
    m.amsdu_present = true;
    m.body = body.bytes;
    m.body_len = static_cast<std::uint32_t>(body.bytes.size());
    return m;
}

}  // namespace

std::vector<GoldenFrame> golden_corpus() {
    const AggregateLimits limits;
    std::vector<GoldenFrame> out;

    out.push_back({"plain_voice_mpdu.bin", FrameKind::PlainMsdu, 1,
                   encode_mpdu(plain_mpdu(AccessCategory::Voice, 1, 160, 0x11))});

    const std::vector<Msdu> voice = {msdu(AccessCategory::Voice, 160, 1), msdu(AccessCategory::Voice, 161, 2),
                                     msdu(AccessCategory::Voice, 163, 3)};
    out.push_back({"amsdu_three_voice.bin", FrameKind::Amsdu, 3, encode_amsdu(voice, limits).bytes});
    out.push_back({"amsdu_voice_in_mpdu.bin", FrameKind::PlainMsdu, 3, encode_mpdu(amsdu_mpdu(voice, 7))});

    const std::vector<Mpdu> video = {plain_mpdu(AccessCategory::Video, 100, 1, 0x21),
                                     plain_mpdu(AccessCategory::Video, 101, 2, 0x22),
                                     plain_mpdu(AccessCategory::Video, 102, 3, 0x23),
                                     plain_mpdu(AccessCategory::Video, 103, 1500, 0x24)};
    out.push_back({"ampdu_four_video.bin", FrameKind::Ampdu, 4, encode_ampdu(video, limits).bytes});

    const std::vector<Mpdu> mixed = {amsdu_mpdu(voice, 4094), plain_mpdu(AccessCategory::BestEffort, 4095, 64, 0x31),
                                     plain_mpdu(AccessCategory::Background, 0, 1, 0x32)};
    out.push_back({"ampdu_wrapping_seq.bin", FrameKind::Ampdu, 3, encode_ampdu(mixed, limits).bytes});

    const std::vector<Mpdu> longest = {
        plain_mpdu(AccessCategory::Video, 9, kMaxDelimitedMpduLen - kMpduOverhead, 0x41)};
    out.push_back({"ampdu_max_delimited.bin", FrameKind::Ampdu, 1, encode_ampdu(longest, limits).bytes});
    return out;
}

void write_golden(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream manifest(dir / "MANIFEST", std::ios::binary);
    if (!manifest) throw Error(ErrorCode::ConfigInvalid, "cannot write to '" + dir.string() + "'");
    for (const auto& f : golden_corpus()) {
        std::ofstream file(dir / f.name, std::ios::binary);
        file.write(reinterpret_cast<const char*>(f.bytes.data()), static_cast<std::streamsize>(f.bytes.size()));
        if (!file) throw Error(ErrorCode::ConfigInvalid, "cannot write '" + f.name + "'");
        manifest << f.name << ' ' << to_string(f.kind) << ' ' << f.units << ' ' << f.bytes.size() << '\n';
    }
}

}  // namespace bisched::cli
