#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <utility>

namespace bisched::cli {

namespace {

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

struct Row {
    std::string delivered;
    std::string goodput;
    std::string lat_mean;
    std::string lat_p95;
    std::string lat_max;
    std::string jitter;
    std::string retx;
    std::string dropped;
    std::string efficiency;
};

void emit(std::ostream& out, std::string_view policy, std::string_view seed, AccessCategory ac, const Row& r) {
    out << policy << ',' << seed << ',' << to_string(ac) << ',' << r.delivered << ',' << r.goodput << ','
        << r.lat_mean << ',' << r.lat_p95 << ',' << r.lat_max << ',' << r.jitter << ',' << r.retx << ','
        << r.dropped << ',' << r.efficiency << '\n';
}

// Column values of one (run, AC) pair, in CSV order after the key columns.
std::array<double, 9> columns(const MetricsReport& report, AccessCategory ac) {
    const auto& m = report.at(ac);
    return {static_cast<double>(m.delivered_msdus), m.goodput_mbps, m.latency_mean_us, m.latency_p95_us,
            m.latency_max_us, m.jitter_us, static_cast<double>(m.retransmitted_mpdus),
            static_cast<double>(m.dropped()), report.aggregation_efficiency};
}

}  // namespace

Summary summarize(std::span<const double> values) {
    Summary s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    return s;
}

void write_csv(std::ostream& out, std::span<const PolicyRun> runs, bool with_header) {
    if (with_header) out << kCsvHeader << '\n';
    for (const auto& run : runs) {
        const std::string seed = std::to_string(run.seed);
        for (auto ac : kAllAccessCategories) {
            const auto& m = run.report.at(ac);
            emit(out, to_string(run.policy), seed, ac,
                 Row{std::to_string(m.delivered_msdus), fixed3(m.goodput_mbps), fixed3(m.latency_mean_us),
                     fixed3(m.latency_p95_us), fixed3(m.latency_max_us), fixed3(m.jitter_us),
                     std::to_string(m.retransmitted_mpdus), std::to_string(m.dropped()),
                     fixed3(run.report.aggregation_efficiency)});
        }
    }
}

void write_csv_summary(std::ostream& out, std::span<const PolicyRun> runs) {
    // Policies in first-seen order.
    std::vector<SchedulerPolicy> order;
    for (const auto& r : runs) {
        if (std::find(order.begin(), order.end(), r.policy) == order.end()) order.push_back(r.policy);
    }
    for (auto policy : order) {
        for (auto ac : kAllAccessCategories) {
            std::array<std::vector<double>, 9> cols;
            for (const auto& r : runs) {
                if (r.policy != policy) continue;
                const auto c = columns(r.report, ac);
                for (std::size_t i = 0; i < c.size(); ++i) cols[i].push_back(c[i]);
            }
            std::array<Summary, 9> s;
            for (std::size_t i = 0; i < s.size(); ++i) s[i] = summarize(cols[i]);
            for (bool mean : {true, false}) {
                auto pick = [&](std::size_t i) { return fixed3(mean ? s[i].mean : s[i].stddev); };
                emit(out, to_string(policy), mean ? "mean" : "stddev", ac,
                     Row{pick(0), pick(1), pick(2), pick(3), pick(4), pick(5), pick(6), pick(7), pick(8)});
            }
        }
    }
}

nlohmann::ordered_json scenario_json(const Scenario& sc) {
    nlohmann::ordered_json j;
    j["name"] = sc.name;
    j["duration_us"] = sc.duration;
    j["seed"] = sc.seed;
    j["retry_limit"] = sc.retry_limit;
    j["drain_grace_us"] = sc.drain_grace;
    j["phy"] = {{"data_rate_mbps", sc.phy.data_rate_mbps},
                {"basic_rate_mbps", sc.phy.basic_rate_mbps},
                {"preamble_us", sc.phy.preamble},
                {"sifs_us", sc.phy.sifs},
                {"difs_us", sc.phy.difs},
                {"ber", sc.phy.ber},
                {"single_checksum", sc.phy.single_checksum}};
    const auto& s = sc.scheduler;
    j["scheduler"] = {{"policy", to_string(s.policy)},
                      {"q1_timer_us", s.q1_timer},
                      {"q23_timer_us", s.q23_timer},
                      {"q1_target_bytes", s.effective_q1_target()},
                      {"q2_target_mpdus", s.q2_target_mpdus},
                      {"amsdu_max", s.limits.amsdu_max},
                      {"ampdu_max_bytes", s.limits.ampdu_max_bytes},
                      {"ampdu_max_mpdus", s.limits.ampdu_max_mpdus},
                      {"queue_capacity", s.queue_capacity}};
    auto flows = nlohmann::ordered_json::array();
    for (const auto& f : sc.flows) {
        nlohmann::ordered_json fj;
        fj["id"] = f.flow_id;
        fj["ac"] = to_string(f.ac);
        fj["model"] = model_name(f.model);
        if (const auto* m = std::get_if<CbrModel>(&f.model)) {
            fj["period_us"] = m->period;
        } else if (const auto* m = std::get_if<PoissonModel>(&f.model)) {
            fj["rate"] = m->rate_per_s;
        } else if (const auto* m = std::get_if<OnOffModel>(&f.model)) {
            fj["period_us"] = m->period;
            fj["on_us"] = m->on;
            fj["off_us"] = m->off;
        }
        fj["payload"] = f.payload_bytes;
        fj["start_us"] = f.start;
        fj["stop_us"] = f.stop ? nlohmann::ordered_json(*f.stop) : nlohmann::ordered_json(nullptr);
        fj["saturated"] = f.saturated;
        flows.push_back(std::move(fj));
    }
    j["flows"] = std::move(flows);
    return j;
}

nlohmann::ordered_json report_json(const PolicyRun& run) {
    nlohmann::ordered_json j;
    j["policy"] = to_string(run.policy);
    j["seed"] = run.seed;
    const auto& r = run.report;
    nlohmann::ordered_json per_ac;
    for (auto ac : kAllAccessCategories) {
        const auto& m = r.at(ac);
        per_ac[std::string(to_string(ac))] = {{"generated", m.generated},
                                              {"delivered_msdus", m.delivered_msdus},
                                              {"delivered_payload_bytes", m.delivered_payload_bytes},
                                              {"goodput_mbps", m.goodput_mbps},
                                              {"latency_mean_us", m.latency_mean_us},
                                              {"latency_p95_us", m.latency_p95_us},
                                              {"latency_max_us", m.latency_max_us},
                                              {"jitter_us", m.jitter_us},
                                              {"retransmitted_mpdus", m.retransmitted_mpdus},
                                              {"dropped_overflow", m.dropped_overflow},
                                              {"dropped_retry", m.dropped_retry},
                                              {"residual", m.residual}};
    }
    j["per_ac"] = std::move(per_ac);
    j["airtime_busy"] = r.airtime_busy;
    j["aggregation_efficiency"] = r.aggregation_efficiency;
    j["transmissions"] = r.transmissions;
    nlohmann::ordered_json hist = nlohmann::ordered_json::object();
    for (const auto& [size, count] : r.aggregate_size_histogram) hist[std::to_string(size)] = count;
    j["aggregate_size_histogram"] = std::move(hist);
    return j;
}

nlohmann::ordered_json document_json(const Scenario& scenario, std::span<const PolicyRun> runs, bool with_summary) {
    nlohmann::ordered_json doc;
    doc["latency_definition"] = MetricsReport::kLatencyDefinition;
    doc["rng_algorithm"] = Rng::kAlgorithm;
    doc["scenario"] = scenario_json(scenario);
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : runs) arr.push_back(report_json(r));
    doc["runs"] = std::move(arr);
    if (with_summary) {
        std::vector<SchedulerPolicy> order;
        for (const auto& r : runs) {
            if (std::find(order.begin(), order.end(), r.policy) == order.end()) order.push_back(r.policy);
        }
        auto summary = nlohmann::ordered_json::array();
        static constexpr std::array<std::string_view, 9> kNames = {
            "delivered_msdus", "goodput_mbps", "latency_mean_us", "latency_p95_us", "latency_max_us",
            "jitter_us",       "retransmitted_mpdus", "dropped",  "aggregation_efficiency"};
        for (auto policy : order) {
            for (auto ac : kAllAccessCategories) {
                std::array<std::vector<double>, 9> cols;
                for (const auto& r : runs) {
                    if (r.policy != policy) continue;
                    const auto c = columns(r.report, ac);
                    for (std::size_t i = 0; i < c.size(); ++i) cols[i].push_back(c[i]);
                }
                nlohmann::ordered_json entry;
                entry["policy"] = to_string(policy);
                entry["ac"] = to_string(ac);
                for (std::size_t i = 0; i < kNames.size(); ++i) {
                    const auto s = summarize(cols[i]);
                    entry[std::string(kNames[i])] = {{"mean", s.mean}, {"stddev", s.stddev}};
                }
                summary.push_back(std::move(entry));
            }
        }
        doc["summary"] = std::move(summary);
    }
    return doc;
}

}  // namespace bisched::cli
