#include "bisched/engine.hpp"

#include "bisched/error.hpp"
#include "bisched/phy.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <unordered_map>

namespace bisched {

namespace {

constexpr std::size_t ac_index(AccessCategory ac) { return static_cast<std::size_t>(ac); }

[[noreturn]] void violation(const std::string& what) { throw Error(ErrorCode::InvariantViolation, what); }

// Backlog a saturated flow keeps queued: enough for a full A-MPDU and for a
// full A-MSDU of its payload size.
std::int64_t saturation_depth(const FlowSpec& flow, const SchedulerConfig& cfg) {
    const std::int64_t per_amsdu =
        static_cast<std::int64_t>(cfg.limits.amsdu_max / (kAmsduSubframeHeaderLen + flow.payload_bytes)) + 2;
    return std::max<std::int64_t>({64, cfg.q2_target_mpdus, per_amsdu});
}

class Engine {
public:
    Engine(const Scenario& scenario, std::span<const Arrival> arrivals, const RunOptions& options)
        : sc_(scenario),
          arrivals_(arrivals),
          options_(options),
          scheduler_(make_scheduler(scenario.scheduler)),
          channel_rng_(scenario.seed, kChannelStream),
          horizon_(scenario.duration + scenario.drain_grace),
          ba_airtime_(block_ack_duration(scenario.phy)) {
        scheduler_->enable_log(options.record_scheduler_log);
        for (std::size_t i = 0; i < sc_.flows.size(); ++i) {
            const auto& f = sc_.flows[i];
            if (!f.saturated) continue;
            saturated_.push_back({i, std::min(f.stop.value_or(sc_.duration), sc_.duration),
                                  saturation_depth(f, sc_.scheduler), 0});
            saturated_by_flow_[f.flow_id] = saturated_.size() - 1;
        }
    }

    RunResult run() {
        push(sc_.duration, EventKind::SimEnd);
        if (!arrivals_.empty()) push(arrivals_.front().time, EventKind::Arrival, 0);
        for (std::size_t i = 0; i < saturated_.size(); ++i) {
            push(sc_.flows[saturated_[i].flow_index].start, EventKind::Arrival, arrivals_.size() + i);
        }

        TimeUs last_time = 0;
        while (!heap_.empty()) {
            const Event ev = heap_.top();
            if (ev.time > horizon_) break;
            heap_.pop();
            if (ev.time < last_time) violation("event time moved backwards");
            last_time = ev.time;

            switch (ev.kind) {
                case EventKind::Arrival: handle_arrival(ev); break;
                case EventKind::TxComplete: handle_tx_complete(ev.time); break;
                case EventKind::BaReceived: handle_ba(ev.time); break;
                case EventKind::SimEnd: arrivals_open_ = false; break;
                case EventKind::Q1Expiry:
                case EventKind::Q23Expiry: break;  // the poll below services due timers
            }
            poll(ev.time);
            sync_timers();
        }
        return finish();
    }

private:
    struct SaturatedFlow {
        std::size_t flow_index;
        TimeUs stop;
        std::int64_t depth;
        std::int64_t outstanding;
    };

    struct InFlight {
        TxDescriptor desc;
        TimeUs decided_at = 0;
        BlockAck ba;
    };

    void push(TimeUs t, EventKind kind, std::size_t index = 0) { heap_.push(Event{t, tie_++, kind, index}); }

    void handle_arrival(const Event& ev) {
        if (ev.index >= arrivals_.size()) return;  // saturation kick; poll tops up
        const auto& a = arrivals_[ev.index];
        if (a.time < sc_.duration) {
            Msdu m = a.msdu;
            m.created_at = a.time;
            enqueue(std::move(m), ev.time);
        }
        if (ev.index + 1 < arrivals_.size()) {
            const TimeUs next = arrivals_[ev.index + 1].time;
            if (next < ev.time) violation("arrival trace is not time-ordered");
            push(next, EventKind::Arrival, ev.index + 1);
        }
    }

    bool enqueue(Msdu msdu, TimeUs now) {
        msdu.id = next_msdu_id_++;
        auto& ac = report_.at(msdu.ac);
        ++ac.generated;
        const auto flow_id = msdu.flow_id;
        const auto result = scheduler_->enqueue(std::move(msdu), now);
        if (result.status == EnqueueStatus::QueueOverflow) {
            ++ac.dropped_overflow;
            return false;
        }
        if (auto it = saturated_by_flow_.find(flow_id); it != saturated_by_flow_.end()) {
            ++saturated_[it->second].outstanding;
        }
        return true;
    }

    void top_up_saturated(TimeUs now) {
        if (!arrivals_open_) return;
        for (auto& s : saturated_) {
            const auto& flow = sc_.flows[s.flow_index];
            if (now < flow.start || now >= s.stop) continue;
            while (s.outstanding < s.depth) {
                Msdu m;
                m.ac = flow.ac;
                m.dest_addr = sc_.scheduler.receiver;
                m.src_addr = sc_.scheduler.transmitter;
                m.payload_len = flow.payload_bytes;
                m.created_at = now;
                m.flow_id = flow.flow_id;
                if (!enqueue(std::move(m), now)) break;
            }
        }
    }

    void resolve_saturated(const Msdu& m) {
        if (auto it = saturated_by_flow_.find(m.flow_id); it != saturated_by_flow_.end()) {
            --saturated_[it->second].outstanding;
        }
    }

    void poll(TimeUs now) {
        if (in_flight_) return;
        top_up_saturated(now);
        auto desc = scheduler_->next_transmission(now, true);
        if (desc) start(std::move(*desc), now);
    }

    void sync_timers() {
        const auto q1 = scheduler_->q1_deadline();
        if (q1 && q1 != scheduled_q1_) push(*q1, EventKind::Q1Expiry);
        scheduled_q1_ = q1;
        const auto q23 = scheduler_->q23_deadline();
        if (q23 && q23 != scheduled_q23_) push(*q23, EventKind::Q23Expiry);
        scheduled_q23_ = q23;
    }

    void check_descriptor(const TxDescriptor& d) const {
        if (d.mpdus.empty()) violation("empty transmission");
        if (d.kind == FrameKind::Ampdu && d.mpdus.size() > sc_.scheduler.limits.ampdu_max_mpdus) {
            violation("A-MPDU exceeds the MPDU limit");
        }
        if (d.kind == FrameKind::Amsdu && d.mpdus.front().body_len > sc_.scheduler.limits.amsdu_max) {
            violation("A-MSDU exceeds amsdu_max");
        }
        if (sc_.scheduler.policy != SchedulerPolicy::Bi) return;
        if (d.source == SourceQueue::Q1 && d.kind == FrameKind::Ampdu) violation("Q1 emitted an A-MPDU");
        bool voice = false;
        bool other = false;
        for (const auto& mpdu : d.mpdus) {
            for (const auto& m : mpdu.msdus) (m.ac == AccessCategory::Voice ? voice : other) = true;
        }
        if (voice && other) violation("descriptor mixes Voice with other access categories");
    }

    void start(TxDescriptor desc, TimeUs now) {
        check_descriptor(desc);
        const TimeUs data_end = now + sc_.phy.difs + tx_duration(desc.total_bytes, sc_.phy);
        push(data_end, EventKind::TxComplete);

        ++report_.transmissions;
        ++report_.aggregate_size_histogram[desc.msdu_count()];
        tx_payload_bytes_ += desc.payload_bytes();
        tx_psdu_bytes_ += desc.total_bytes;
        const TimeUs end = now + exchange_airtime(desc.total_bytes, sc_.phy);
        busy_in_window_ += std::max<TimeUs>(0, std::min(end, sc_.duration) - std::max<TimeUs>(now, 0));

        in_flight_ = InFlight{std::move(desc), now, {}};
    }

    void handle_tx_complete(TimeUs now) {
        if (!in_flight_) violation("transmission completed with nothing in flight");
        const auto& desc = in_flight_->desc;
        const auto corrupted = apply_errors(desc, sc_.phy, channel_rng_);
        std::vector<std::uint16_t> received;
        received.reserve(desc.mpdus.size());
        std::size_t bad = 0;
        for (std::size_t i = 0; i < desc.mpdus.size(); ++i) {
            if (corrupted[i]) {
                ++bad;
            } else {
                received.push_back(desc.mpdus[i].seq_no);
            }
        }
        in_flight_->ba = make_block_ack(received, desc.mpdus.front().seq_no);
        push(now + sc_.phy.sifs + ba_airtime_, EventKind::BaReceived);
        if (options_.record_transmissions) {
            transmissions_.push_back({in_flight_->decided_at, 0, desc.kind, desc.source, desc.mpdus.size(),
                                      desc.msdu_count(), desc.total_bytes, bad});
        }
    }

    void deliver(const Msdu& m, TimeUs now) {
        auto& ac = report_.at(m.ac);
        ++ac.delivered_msdus;
        ac.delivered_payload_bytes += m.payload_len;
        if (now <= sc_.duration) in_window_bytes_[ac_index(m.ac)] += m.payload_len;
        const TimeUs latency = now - m.created_at;
        latencies_[ac_index(m.ac)].push_back(latency);
        if (auto it = last_latency_.find(m.flow_id); it != last_latency_.end()) {
            jitter_sum_[ac_index(m.ac)] += static_cast<double>(std::llabs(latency - it->second));
            ++jitter_n_[ac_index(m.ac)];
            it->second = latency;
        } else {
            last_latency_.emplace(m.flow_id, latency);
        }
        resolve_saturated(m);
    }

    void handle_ba(TimeUs now) {
        if (!in_flight_) violation("block ack with nothing in flight");
        InFlight flight = std::move(*in_flight_);
        in_flight_.reset();
        auto& desc = flight.desc;

        if (now - flight.decided_at != exchange_airtime(desc.total_bytes, sc_.phy)) {
            violation("exchange airtime differs from DIFS + data + SIFS + BA");
        }
        if (options_.record_transmissions) transmissions_.back().completed_at = now;

        std::vector<std::uint16_t> sent;
        sent.reserve(desc.mpdus.size());
        for (const auto& m : desc.mpdus) sent.push_back(m.seq_no);
        std::vector<bool> missing(desc.mpdus.size(), false);
        const auto start = desc.mpdus.front().seq_no;
        for (auto seq : missing_seqs(flight.ba, sent)) missing[seq_distance(start, seq)] = true;

        std::vector<Mpdu> retry;
        for (std::size_t i = 0; i < desc.mpdus.size(); ++i) {
            auto& mpdu = desc.mpdus[i];
            if (!missing[i]) {
                for (const auto& m : mpdu.msdus) deliver(m, now);
            } else if (mpdu.retries >= sc_.retry_limit) {
                for (const auto& m : mpdu.msdus) {
                    ++report_.at(m.ac).dropped_retry;
                    resolve_saturated(m);
                }
            } else {
                ++mpdu.retries;
                ++report_.at(mpdu.ac).retransmitted_mpdus;
                retry.push_back(std::move(mpdu));
            }
        }
        if (!retry.empty()) scheduler_->requeue(std::move(retry), now);
    }

    RunResult finish() {
        RunResult result;
        const auto queued = scheduler_->queued_by_ac();
        std::array<std::size_t, 4> in_flight{};
        if (in_flight_) {
            for (const auto& mpdu : in_flight_->desc.mpdus) {
                for (const auto& m : mpdu.msdus) ++in_flight[ac_index(m.ac)];
            }
        }

        const double duration = static_cast<double>(sc_.duration);
        for (auto ac_id : kAllAccessCategories) {
            const auto idx = ac_index(ac_id);
            auto& ac = report_.at(ac_id);
            ac.residual = queued[idx] + in_flight[idx];
            if (ac.generated != ac.delivered_msdus + ac.dropped() + ac.residual) {
                violation("conservation broken for " + std::string(to_string(ac_id)));
            }
            ac.goodput_mbps = duration > 0 ? 8.0 * static_cast<double>(in_window_bytes_[idx]) / duration : 0.0;

            auto& lat = latencies_[idx];
            if (!lat.empty()) {
                if (options_.record_latencies) result.latencies[idx] = lat;
                double sum = 0.0;
                for (auto l : lat) sum += static_cast<double>(l);
                ac.latency_mean_us = sum / static_cast<double>(lat.size());
                std::sort(lat.begin(), lat.end());
                const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(lat.size())));
                ac.latency_p95_us = static_cast<double>(lat[std::max<std::size_t>(rank, 1) - 1]);
                ac.latency_max_us = static_cast<double>(lat.back());
            }
            if (jitter_n_[idx] > 0) ac.jitter_us = jitter_sum_[idx] / static_cast<double>(jitter_n_[idx]);
        }
        report_.airtime_busy = duration > 0 ? static_cast<double>(busy_in_window_) / duration : 0.0;
        report_.aggregation_efficiency =
            tx_psdu_bytes_ > 0 ? static_cast<double>(tx_payload_bytes_) / static_cast<double>(tx_psdu_bytes_) : 0.0;
        report_.duration = sc_.duration;
        report_.rng_algorithm = std::string(Rng::kAlgorithm);

        result.report = std::move(report_);
        result.transmissions = std::move(transmissions_);
        result.scheduler_log = scheduler_->log();
        return result;
    }

    const Scenario& sc_;
    std::span<const Arrival> arrivals_;
    RunOptions options_;
    std::unique_ptr<Scheduler> scheduler_;
    Rng channel_rng_;
    TimeUs horizon_;
    TimeUs ba_airtime_;

    struct Later {
        bool operator()(const Event& a, const Event& b) const { return b < a; }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t tie_ = 0;
    bool arrivals_open_ = true;
    std::optional<InFlight> in_flight_;
    std::optional<TimeUs> scheduled_q1_;
    std::optional<TimeUs> scheduled_q23_;
    std::uint64_t next_msdu_id_ = 1;

    std::vector<SaturatedFlow> saturated_;
    std::unordered_map<std::uint32_t, std::size_t> saturated_by_flow_;

    MetricsReport report_;
    std::array<std::vector<TimeUs>, 4> latencies_;
    std::unordered_map<std::uint32_t, TimeUs> last_latency_;
    // Payload confirmed by the end of the measured window; goodput uses only these.
    std::array<std::uint64_t, 4> in_window_bytes_{};
    std::array<double, 4> jitter_sum_{};
    std::array<std::uint64_t, 4> jitter_n_{};
    std::uint64_t tx_payload_bytes_ = 0;
    std::uint64_t tx_psdu_bytes_ = 0;
    TimeUs busy_in_window_ = 0;
    std::vector<TxRecord> transmissions_;
};

}  // namespace

RunResult run_trace(const Scenario& scenario, std::span<const Arrival> arrivals, const RunOptions& options) {
    scenario.validate(false);
    Engine engine(scenario, arrivals, options);
    return engine.run();
}

RunResult run_detailed(const Scenario& scenario, std::uint64_t seed, const RunOptions& options) {
    Scenario seeded = scenario;
    seeded.seed = seed;
    seeded.validate(false);
    const auto arrivals = generate_arrivals(seeded.flows, seed, seeded.duration);
    return run_trace(seeded, arrivals, options);
}

MetricsReport run(const Scenario& scenario, std::uint64_t seed) {
    return run_detailed(scenario, seed, {}).report;
}

}  // namespace bisched
