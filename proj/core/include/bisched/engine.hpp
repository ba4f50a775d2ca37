#pragma once

#include "bisched/block_ack.hpp"
#include "bisched/scenario.hpp"
#include "bisched/scheduler.hpp"
#include "bisched/traffic.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bisched {

enum class EventKind : std::uint8_t { Arrival, Q1Expiry, Q23Expiry, TxComplete, BaReceived, SimEnd };

// Lower value runs first among events at the same instant.
constexpr int event_priority(EventKind kind) {
    switch (kind) {
        case EventKind::TxComplete: return 0;
        case EventKind::BaReceived: return 1;
        case EventKind::Q1Expiry:
        case EventKind::Q23Expiry: return 2;
        case EventKind::Arrival: return 3;
        case EventKind::SimEnd: return 4;
    }
    return 5;
}

struct Event {
    TimeUs time = 0;
    std::uint64_t tie_seq = 0;
    EventKind kind = EventKind::SimEnd;
    std::size_t index = 0;  // arrival index, or flow index for saturation kicks

    // Strict weak order: (time, kind priority, insertion order).
    friend bool operator<(const Event& a, const Event& b) {
        if (a.time != b.time) return a.time < b.time;
        if (event_priority(a.kind) != event_priority(b.kind)) return event_priority(a.kind) < event_priority(b.kind);
        return a.tie_seq < b.tie_seq;
    }
};

struct AcMetrics {
    std::uint64_t generated = 0;
    std::uint64_t delivered_msdus = 0;
    std::uint64_t delivered_payload_bytes = 0;
    double goodput_mbps = 0.0;  // payload confirmed within [0, duration], over duration
    double latency_mean_us = 0.0;
    double latency_p95_us = 0.0;
    double latency_max_us = 0.0;
    double jitter_us = 0.0;
    std::uint64_t retransmitted_mpdus = 0;
    std::uint64_t dropped_overflow = 0;
    std::uint64_t dropped_retry = 0;
    std::uint64_t residual = 0;

    std::uint64_t dropped() const { return dropped_overflow + dropped_retry; }
};

struct MetricsReport {
    std::array<AcMetrics, 4> per_ac{};  // indexed by static_cast<int>(AccessCategory)
    double airtime_busy = 0.0;
    double aggregation_efficiency = 0.0;
    std::map<std::size_t, std::uint64_t> aggregate_size_histogram;  // MSDUs per transmission -> count
    std::uint64_t transmissions = 0;
    TimeUs duration = 0;
    std::string rng_algorithm;

    static constexpr std::string_view kLatencyDefinition = "creation to block-ack confirmation";

    AcMetrics& at(AccessCategory ac) { return per_ac[static_cast<std::size_t>(ac)]; }
    const AcMetrics& at(AccessCategory ac) const { return per_ac[static_cast<std::size_t>(ac)]; }
};

struct TxRecord {
    TimeUs decided_at = 0;  // channel grant; data starts after DIFS
    TimeUs completed_at = 0;  // block ack received
    FrameKind kind = FrameKind::PlainMsdu;
    SourceQueue source = SourceQueue::Fifo;
    std::size_t mpdus = 0;
    std::size_t msdus = 0;
    std::uint32_t psdu_bytes = 0;
    std::size_t corrupted = 0;
};

struct RunOptions {
    bool record_transmissions = false;
    bool record_scheduler_log = false;
    // Individual latency samples per AC, in delivery order.
    bool record_latencies = false;
};

struct RunResult {
    MetricsReport report;
    std::vector<TxRecord> transmissions;
    std::vector<LogEntry> scheduler_log;
    std::array<std::vector<TimeUs>, 4> latencies;
};

// Replays a fixed arrival trace (ids are reassigned in enqueue order).
// Throws ValidationError for an invalid scenario and Error(InvariantViolation)
// if an internal consistency check fails.
RunResult run_trace(const Scenario& scenario, std::span<const Arrival> arrivals, const RunOptions& options = {});

// Generates the scenario's arrivals from `seed` and runs them.
MetricsReport run(const Scenario& scenario, std::uint64_t seed);
RunResult run_detailed(const Scenario& scenario, std::uint64_t seed, const RunOptions& options);

}  // namespace bisched
