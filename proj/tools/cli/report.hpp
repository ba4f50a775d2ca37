#pragma once

#include "bisched/engine.hpp"
#include "bisched/scenario.hpp"

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace bisched::cli {

struct PolicyRun {
    SchedulerPolicy policy = SchedulerPolicy::Bi;
    std::uint64_t seed = 0;
    MetricsReport report;
};

inline constexpr std::string_view kCsvHeader =
    "policy,seed,ac,delivered,goodput_mbps,lat_mean_us,lat_p95_us,lat_max_us,jitter_us,retx,dropped,agg_efficiency";

// Mean and sample standard deviation of one metric column across seeds.
struct Summary {
    double mean = 0.0;
    double stddev = 0.0;
};

Summary summarize(std::span<const double> values);

// One row per (policy, AC), in the order the runs are given and Voice, Video,
// Best Effort, Background within a run.
void write_csv(std::ostream& out, std::span<const PolicyRun> runs, bool with_header = true);

// Per (policy, AC) mean and stddev rows; the seed column holds "mean" or "stddev".
void write_csv_summary(std::ostream& out, std::span<const PolicyRun> runs);

nlohmann::ordered_json scenario_json(const Scenario& scenario);
nlohmann::ordered_json report_json(const PolicyRun& run);
nlohmann::ordered_json document_json(const Scenario& scenario, std::span<const PolicyRun> runs, bool with_summary);

}  // namespace bisched::cli
