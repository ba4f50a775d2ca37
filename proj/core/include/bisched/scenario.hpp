#pragma once

// Scenario description and its text format.
//
//   # comment            ; comment
//   [general]            name, duration_ms | duration_us, seed, retry_limit, drain_grace_us
//   [phy]                data_rate_mbps, basic_rate_mbps, preamble_us, sifs_us, difs_us,
//                        ber, single_checksum
//   [scheduler]          policy, q1_timer_us, q23_timer_us, q1_target_bytes,
//                        q2_target_mpdus, amsdu_max, queue_capacity
//   [flow]  (repeated)   id, ac, model = cbr|poisson|onoff, payload, period_us, rate,
//                        on_us, off_us, start_us, stop_us, saturated
//
// One `key = value` per line. Unknown sections or keys are parse errors.

#include "bisched/phy.hpp"
#include "bisched/scheduler.hpp"
#include "bisched/traffic.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bisched {

struct Scenario {
    std::string name = "scenario";
    TimeUs duration = 1'000'000;
    std::uint64_t seed = 1;
    std::uint32_t retry_limit = 7;
    TimeUs drain_grace = 10'000;
    PhyProfile phy;
    SchedulerConfig scheduler;
    std::vector<FlowSpec> flows;

    // Checks every component invariant; with require_flows, also that at least
    // one flow is declared.
    void validate(bool require_flows = true) const;
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

// Canonical text form; parse_scenario(format_scenario(s)) reproduces s.
std::string format_scenario(const Scenario& scenario);

// Built-in "unsaturated-mixed" workload: Voice CBR 160 B / 20 ms, Video on/off
// 1300 B every 2 ms while on, Best Effort Poisson 1500 B at 500 frames/s.
Scenario unsaturated_mixed_scenario();

}  // namespace bisched
