#include "bisched/traffic.hpp"

#include "bisched/error.hpp"
#include "bisched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bisched {

std::string_view model_name(const TrafficModel& model) {
    struct Visitor {
        std::string_view operator()(const CbrModel&) const { return "cbr"; }
        std::string_view operator()(const PoissonModel&) const { return "poisson"; }
        std::string_view operator()(const OnOffModel&) const { return "onoff"; }
    };
    return std::visit(Visitor{}, model);
}

void FlowSpec::validate(std::string_view key_prefix) const {
    const std::string p(key_prefix);
    if (payload_bytes == 0 || payload_bytes > kMaxMsduPayload) {
        throw ValidationError(p + ".payload", "must be in 1..2304");
    }
    if (start < 0) throw ValidationError(p + ".start_us", "must be >= 0");
    if (stop && *stop <= start) throw ValidationError(p + ".stop_us", "must be greater than start_us");
    if (saturated) return;
    if (const auto* cbr = std::get_if<CbrModel>(&model)) {
        if (cbr->period <= 0) throw ValidationError(p + ".period_us", "must be > 0");
    } else if (const auto* poisson = std::get_if<PoissonModel>(&model)) {
        if (!(poisson->rate_per_s > 0.0) || !std::isfinite(poisson->rate_per_s)) {
            throw ValidationError(p + ".rate", "must be > 0");
        }
    } else if (const auto* onoff = std::get_if<OnOffModel>(&model)) {
        if (onoff->period <= 0) throw ValidationError(p + ".period_us", "must be > 0");
        if (onoff->on <= 0) throw ValidationError(p + ".on_us", "must be > 0");
        if (onoff->off < 0) throw ValidationError(p + ".off_us", "must be >= 0");
    }
}

Rng flow_rng(std::uint64_t seed, const FlowSpec& flow) { return Rng(seed, std::uint64_t{flow.flow_id} + 1); }

std::optional<TimeUs> next_arrival_time(const FlowSpec& flow, Rng& rng, TimeUs last, TimeUs stop) {
    struct Visitor {
        const FlowSpec& flow;
        Rng& rng;
        TimeUs last;

        TimeUs operator()(const CbrModel& m) const { return last + m.period; }

        TimeUs operator()(const PoissonModel& m) const {
            const double gap = rng.exponential(m.rate_per_s / 1e6);
            return last + std::max<TimeUs>(1, std::llround(gap));
        }

        TimeUs operator()(const OnOffModel& m) const {
            const TimeUs t = last + m.period;
            const TimeUs cycle = m.on + m.off;
            const TimeUs since = t - flow.start;
            if (since % cycle < m.on) return t;
            return flow.start + (since / cycle + 1) * cycle;
        }
    };
    const TimeUs t = std::visit(Visitor{flow, rng, last}, flow.model);
    if (t >= stop) return std::nullopt;
    return t;
}

std::optional<Arrival> next_arrival(const FlowSpec& flow, Rng& rng, TimeUs last, TimeUs stop) {
    const auto t = next_arrival_time(flow, rng, last, stop);
    if (!t) return std::nullopt;
    Arrival a;
    a.time = *t;
    a.msdu.ac = flow.ac;
    a.msdu.dest_addr = kDefaultReceiver;
    a.msdu.src_addr = kDefaultTransmitter;
    a.msdu.payload_len = flow.payload_bytes;
    a.msdu.created_at = *t;
    a.msdu.flow_id = flow.flow_id;
    return a;
}

std::vector<Arrival> generate_arrivals(std::span<const FlowSpec> flows, std::uint64_t seed, TimeUs horizon) {
    struct Tagged {
        std::size_t flow_index;
        Arrival arrival;
    };
    std::vector<Tagged> all;
    for (std::size_t i = 0; i < flows.size(); ++i) {
        const auto& flow = flows[i];
        if (flow.saturated) continue;
        const TimeUs stop = std::min(flow.stop.value_or(horizon), horizon);
        Rng rng = flow_rng(seed, flow);
        TimeUs last = flow.start;
        while (auto a = next_arrival(flow, rng, last, stop)) {
            last = a->time;
            all.push_back({i, std::move(*a)});
        }
    }
    std::stable_sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
        if (a.arrival.time != b.arrival.time) return a.arrival.time < b.arrival.time;
        return a.flow_index < b.flow_index;
    });
    std::vector<Arrival> out;
    out.reserve(all.size());
    std::uint64_t id = 1;
    for (auto& t : all) {
        t.arrival.msdu.id = id++;
        out.push_back(std::move(t.arrival));
    }
    return out;
}

}  // namespace bisched
