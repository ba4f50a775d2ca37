#pragma once

// Hand-rolled random generators for property tests. They draw from their own
// std::mt19937_64 so test inputs do not depend on the library's Rng.

#include "bisched/codec.hpp"
#include "bisched/scenario.hpp"
#include "bisched/scheduler.hpp"

#include "oracles.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace gen {

using Engine = std::mt19937_64;

// Uniform integer in [lo, hi]; bias is irrelevant at these ranges.
inline std::uint64_t between(Engine& g, std::uint64_t lo, std::uint64_t hi) { return lo + g() % (hi - lo + 1); }

inline bool coin(Engine& g, unsigned percent = 50) { return between(g, 0, 99) < percent; }

inline std::vector<std::uint8_t> bytes(Engine& g, std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(g());
    return out;
}

inline bisched::AccessCategory any_ac(Engine& g) {
    return static_cast<bisched::AccessCategory>(between(g, 0, 3));
}

inline bisched::Msdu msdu(bisched::AccessCategory ac, std::uint32_t len, std::uint64_t id = 0, bisched::TimeUs at = 0) {
    bisched::Msdu m;
    m.id = id;
    m.ac = ac;
    m.dest_addr = bisched::kDefaultReceiver;
    m.src_addr = bisched::kDefaultTransmitter;
    m.payload_len = len;
    m.created_at = at;
    m.flow_id = static_cast<std::uint32_t>(ac) + 1;
    return m;
}

inline bisched::Mpdu mpdu(bisched::AccessCategory ac, std::uint16_t seq, std::vector<std::uint8_t> body) {
    bisched::Mpdu m;
    m.seq_no = seq;
    m.receiver_addr = bisched::kDefaultReceiver;
    m.transmitter_addr = bisched::kDefaultTransmitter;
    m.ac = ac;
    m.body_len = static_cast<std::uint32_t>(body.size());
    m.body = std::move(body);
    return m;
}

// MSDUs with concrete payloads whose A-MSDU stays within amsdu_max.
inline std::vector<bisched::Msdu> amsdu_members(Engine& g, std::uint32_t amsdu_max) {
    const auto ac = any_ac(g);
    const auto target = between(g, 1, 24);
    std::vector<bisched::Msdu> out;
    std::vector<std::uint32_t> lens;
    while (out.size() < target) {
        // Mix tiny, mid and large payloads so every pad length shows up.
        const std::uint32_t len = coin(g, 70) ? static_cast<std::uint32_t>(between(g, 1, 200))
                                              : static_cast<std::uint32_t>(between(g, 201, 2304));
        lens.push_back(len);
        if (oracle::amsdu_len(lens) > amsdu_max) {
            lens.pop_back();
            break;
        }
        auto m = msdu(ac, len);
        m.payload = bytes(g, len);
        out.push_back(std::move(m));
    }
    if (out.empty()) {
        auto m = msdu(ac, 1);
        m.payload = bytes(g, 1);
        out.push_back(std::move(m));
    }
    return out;
}

// MPDUs with concrete bodies whose A-MPDU respects the default limits.
inline std::vector<bisched::Mpdu> ampdu_members(Engine& g, std::size_t min_units = 1, std::size_t max_units = 64) {
    const auto count = between(g, min_units, max_units);
    // Keep the average small enough that large counts still fit 65535 bytes.
    const std::uint32_t max_body = count > 40 ? 900 : count > 16 ? 1500 : 4065;
    std::vector<bisched::Mpdu> out;
    std::vector<std::uint32_t> lens;
    auto seq = static_cast<std::uint16_t>(between(g, 0, 4095));
    while (out.size() < count) {
        const auto body = static_cast<std::uint32_t>(coin(g, 20) ? between(g, 0, 8) : between(g, 1, max_body));
        lens.push_back(body + 30);
        if (oracle::ampdu_len(lens) > 65535) break;
        out.push_back(mpdu(any_ac(g), seq, bytes(g, body)));
        seq = static_cast<std::uint16_t>((seq + 1) % 4096);
    }
    return out;
}

// Small random scenario: mixed flows, random PHY loss, any policy.
inline bisched::Scenario scenario(Engine& g) {
    using namespace bisched;
    Scenario sc;
    sc.name = "random";
    sc.duration = static_cast<TimeUs>(between(g, 20'000, 200'000));
    sc.seed = g();
    sc.retry_limit = static_cast<std::uint32_t>(between(g, 0, 7));
    sc.phy.ber = coin(g, 40) ? 0.0 : std::pow(10.0, -static_cast<double>(between(g, 4, 7)));
    sc.phy.single_checksum = coin(g, 20);
    sc.phy.data_rate_mbps = static_cast<double>(between(g, 6, 600));
    sc.scheduler.policy = static_cast<SchedulerPolicy>(between(g, 0, 2));
    sc.scheduler.q1_timer = static_cast<TimeUs>(between(g, 50, 5000));
    sc.scheduler.q23_timer = static_cast<TimeUs>(between(g, 100, 10000));
    sc.scheduler.q2_target_mpdus = static_cast<std::uint32_t>(between(g, 1, 64));
    sc.scheduler.limits.amsdu_max = coin(g) ? 3839 : 7935;
    if (coin(g, 20)) sc.scheduler.q1_target_bytes = static_cast<std::uint32_t>(between(g, 0, 3839));
    sc.scheduler.queue_capacity = coin(g, 30) ? between(g, 1, 32) : 1024;

    const auto flows = between(g, 1, 5);
    for (std::uint32_t i = 0; i < flows; ++i) {
        FlowSpec f;
        f.flow_id = i + 1;
        f.ac = any_ac(g);
        f.payload_bytes = static_cast<std::uint32_t>(coin(g) ? between(g, 40, 400) : between(g, 401, 2304));
        f.start = static_cast<TimeUs>(between(g, 0, 5000));
        if (coin(g, 20)) f.stop = f.start + static_cast<TimeUs>(between(g, 1000, 100'000));
        switch (between(g, 0, 3)) {
            case 0: f.model = CbrModel{static_cast<TimeUs>(between(g, 100, 20'000))}; break;
            case 1: f.model = PoissonModel{static_cast<double>(between(g, 50, 5000))}; break;
            case 2:
                f.model = OnOffModel{static_cast<TimeUs>(between(g, 1000, 50'000)),
                                     static_cast<TimeUs>(between(g, 0, 50'000)),
                                     static_cast<TimeUs>(between(g, 100, 5000))};
                break;
            default: f.saturated = true; break;
        }
        sc.flows.push_back(f);
    }
    return sc;
}

}  // namespace gen
