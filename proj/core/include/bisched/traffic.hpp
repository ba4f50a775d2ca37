#pragma once

#include "bisched/frame_model.hpp"
#include "bisched/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace bisched {

struct CbrModel {
    TimeUs period = 20000;
};

struct PoissonModel {
    double rate_per_s = 1000.0;
};

// CBR gated by an on/off envelope anchored at the flow start.
struct OnOffModel {
    TimeUs on = 100000;
    TimeUs off = 100000;
    TimeUs period = 2000;
};

using TrafficModel = std::variant<CbrModel, PoissonModel, OnOffModel>;

std::string_view model_name(const TrafficModel& model);

struct FlowSpec {
    std::uint32_t flow_id = 0;
    AccessCategory ac = AccessCategory::BestEffort;
    TrafficModel model = CbrModel{};
    std::uint32_t payload_bytes = 1500;
    TimeUs start = 0;
    // Unset: runs until the end of the scenario.
    std::optional<TimeUs> stop;
    // Always backlogged; the model is ignored.
    bool saturated = false;

    // key_prefix is used in ValidationError keys, e.g. "flow[2]".
    void validate(std::string_view key_prefix = "flow") const;
};

struct Arrival {
    TimeUs time = 0;
    Msdu msdu;
};

// Random stream id reserved for the channel model; flows use flow_id + 1.
inline constexpr std::uint64_t kChannelStream = 0xC4A2'0000'0000'0001ULL;

Rng flow_rng(std::uint64_t seed, const FlowSpec& flow);

// Next arrival time strictly after `last` (the flow start for the first call),
// or nothing once the flow has ended (next time >= stop).
std::optional<TimeUs> next_arrival_time(const FlowSpec& flow, Rng& rng, TimeUs last, TimeUs stop);

// Arrival carrying an MSDU stamped with the flow's AC, payload and creation time.
std::optional<Arrival> next_arrival(const FlowSpec& flow, Rng& rng, TimeUs last, TimeUs stop);

// All non-saturated arrivals of the given flows up to `horizon`, merged by
// (time, flow order) with MSDU ids numbered from 1 in that order.
std::vector<Arrival> generate_arrivals(std::span<const FlowSpec> flows, std::uint64_t seed, TimeUs horizon);

}  // namespace bisched
