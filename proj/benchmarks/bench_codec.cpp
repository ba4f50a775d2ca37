#include "bisched/codec.hpp"
#include "bisched/scheduler.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace bisched;

std::vector<Mpdu> video_mpdus(std::size_t n, std::uint32_t body) {
    std::vector<Mpdu> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].seq_no = static_cast<std::uint16_t>(i);
        out[i].receiver_addr = kDefaultReceiver;
        out[i].transmitter_addr = kDefaultTransmitter;
        out[i].ac = AccessCategory::Video;
        out[i].body_len = body;
    }
    return out;
}

void BM_EncodeAmpdu(benchmark::State& state) {
    const auto mpdus = video_mpdus(static_cast<std::size_t>(state.range(0)), 1500);
    for (auto _ : state) {
        auto frame = encode_ampdu(mpdus, AggregateLimits{});
        benchmark::DoNotOptimize(frame.bytes.data());
    }
    state.SetBytesProcessed(state.iterations() * state.range(0) * 1534);
}
BENCHMARK(BM_EncodeAmpdu)->Arg(1)->Arg(16)->Arg(42);

void BM_DecodeAmpdu(benchmark::State& state) {
    const auto frame = encode_ampdu(video_mpdus(static_cast<std::size_t>(state.range(0)), 1500), AggregateLimits{});
    for (auto _ : state) {
        auto report = decode_ampdu(frame);
        benchmark::DoNotOptimize(report.recovered.size());
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(frame.bytes.size()));
}
BENCHMARK(BM_DecodeAmpdu)->Arg(1)->Arg(16)->Arg(42);

void BM_EncodeDecodeAmsdu(benchmark::State& state) {
    std::vector<Msdu> msdus(static_cast<std::size_t>(state.range(0)));
    for (auto& m : msdus) {
        m.ac = AccessCategory::Voice;
        m.dest_addr = kDefaultReceiver;
        m.src_addr = kDefaultTransmitter;
        m.payload_len = 160;
    }
    for (auto _ : state) {
        const auto frame = encode_amsdu(msdus, AggregateLimits{});
        auto back = decode_amsdu(frame);
        benchmark::DoNotOptimize(back.size());
    }
}
BENCHMARK(BM_EncodeDecodeAmsdu)->Arg(1)->Arg(8)->Arg(21);

}  // namespace
