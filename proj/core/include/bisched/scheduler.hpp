#pragma once

// Transmit-side schedulers.
//
// BiScheduler: an outer stage routes Voice MSDUs to Q1 (timer-bounded A-MSDU
// or plain MSDU) and hands everything else to an inner stage that splits Video
// (Q2) from Best Effort / Background (Q3). Q2 is sent as an A-MPDU as soon as
// it reaches the target size; otherwise the shared Q2/Q3 timer sends whatever
// Video is queued, topped up from Q3. Q1 always wins when several triggers are
// due together.
//
// BaselineScheduler: single-FIFO comparison policies (no aggregation, or
// count-triggered A-MPDU without any timer).

#include "bisched/codec.hpp"
#include "bisched/frame_model.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace bisched {

enum class SchedulerPolicy : std::uint8_t { Bi, FifoNoAgg, GreedyAmpdu };

std::string_view to_string(SchedulerPolicy policy);
// "bi", "fifo", "ampdu-greedy"; throws Error(ValidationError) otherwise.
SchedulerPolicy parse_policy(std::string_view name);

enum class Route : std::uint8_t { Q1, Q2, Q3 };

Route classify(const Msdu& msdu);

enum class SourceQueue : std::uint8_t { Q1, Q2, Q3, Q2Q3, Fifo };

std::string_view to_string(SourceQueue source);

struct TxDescriptor {
    FrameKind kind = FrameKind::PlainMsdu;
    std::vector<Mpdu> mpdus;
    SourceQueue source = SourceQueue::Fifo;
    // PSDU length on air: delimiters and padding included for an A-MPDU.
    std::uint32_t total_bytes = 0;

    std::size_t msdu_count() const;
    std::uint64_t payload_bytes() const;
};

inline constexpr MacAddress kDefaultReceiver{0x02'00'00'00'00'01ULL};
inline constexpr MacAddress kDefaultTransmitter{0x02'00'00'00'00'02ULL};

struct SchedulerConfig {
    TimeUs q1_timer = 500;
    TimeUs q23_timer = 2000;
    // Unset means limits.amsdu_max. Zero disables Voice aggregation entirely.
    std::optional<std::uint32_t> q1_target_bytes;
    std::uint32_t q2_target_mpdus = 16;
    AggregateLimits limits;
    SchedulerPolicy policy = SchedulerPolicy::Bi;
    std::size_t queue_capacity = 1024;
    MacAddress receiver = kDefaultReceiver;
    MacAddress transmitter = kDefaultTransmitter;

    std::uint32_t effective_q1_target() const { return q1_target_bytes.value_or(limits.amsdu_max); }
    // Throws ValidationError naming the offending scheduler.* key.
    void validate() const;
};

enum class TimerId : std::uint8_t { Q1, Q23 };

struct TimerArm {
    TimerId timer = TimerId::Q1;
    TimeUs deadline = 0;
    friend bool operator==(const TimerArm&, const TimerArm&) = default;
};

enum class EnqueueStatus : std::uint8_t { Accepted, QueueOverflow };

struct EnqueueResult {
    EnqueueStatus status = EnqueueStatus::Accepted;
    std::optional<TimerArm> armed;
};

enum class LogAction : std::uint8_t {
    Q1TimerArmed,
    Q1TimerCleared,
    Q1TimerRearmed,
    Q23TimerArmed,
    Q23TimerCleared,
    Q23TimerRearmed,
    EmitQ1,
    EmitQ1Retry,
    EmitQ2,
    EmitQ23,
    EmitBaseline,
    Overflow,
};

std::string_view to_string(LogAction action);

struct LogEntry {
    TimeUs time = 0;
    LogAction action = LogAction::Overflow;
    std::size_t units = 0;
};

class Scheduler {
public:
    explicit Scheduler(SchedulerConfig config);
    virtual ~Scheduler() = default;

    Scheduler(const Scheduler&) = delete;
    Scheduler& operator=(const Scheduler&) = delete;

    virtual EnqueueResult enqueue(Msdu msdu, TimeUs now) = 0;

    // Next descriptor to put on air, or nothing when the channel is busy or
    // no trigger is due. Triggers due while busy stay pending.
    virtual std::optional<TxDescriptor> next_transmission(TimeUs now, bool channel_idle) = 0;

    // Unacknowledged MPDUs of one transmission, transmit order, retry counts
    // already incremented. They go back to the head of their source queue.
    virtual void requeue(std::vector<Mpdu> mpdus, TimeUs now) = 0;

    virtual std::optional<TimeUs> q1_deadline() const { return std::nullopt; }
    virtual std::optional<TimeUs> q23_deadline() const { return std::nullopt; }
    // MSDUs still held (fresh or awaiting retransmission), by access category.
    virtual std::array<std::size_t, 4> queued_by_ac() const = 0;
    std::size_t queued_msdus() const;

    const SchedulerConfig& config() const { return config_; }
    std::uint16_t next_seq() const { return next_seq_; }

    void enable_log(bool on) { logging_ = on; }
    const std::vector<LogEntry>& log() const { return log_; }

protected:
    void record(TimeUs now, LogAction action, std::size_t units = 0);
    void assign_seq(Mpdu& mpdu);
    Mpdu wrap(Msdu msdu) const;
    // Number of head-of-queue MPDUs that fit the A-MPDU limits, capped at max_units.
    std::size_t ampdu_fit(const std::deque<Mpdu>& queue, std::size_t max_units,
                          std::uint32_t used_bytes = 0, std::size_t used_units = 0) const;
    TxDescriptor make_ampdu(std::vector<Mpdu> mpdus, SourceQueue source);
    TxDescriptor make_single(Mpdu mpdu, SourceQueue source);

    SchedulerConfig config_;

private:
    std::uint16_t next_seq_ = 0;
    bool logging_ = false;
    std::vector<LogEntry> log_;
};

class BiScheduler final : public Scheduler {
public:
    explicit BiScheduler(SchedulerConfig config);

    EnqueueResult enqueue(Msdu msdu, TimeUs now) override;
    std::optional<TxDescriptor> next_transmission(TimeUs now, bool channel_idle) override;
    void requeue(std::vector<Mpdu> mpdus, TimeUs now) override;

    // Individual triggers. Each returns nothing when its precondition does not hold.
    std::optional<TxDescriptor> on_q1_expiry(TimeUs now);
    std::optional<TxDescriptor> on_q2_ready(TimeUs now);
    std::optional<TxDescriptor> on_q23_expiry(TimeUs now);

    // Q1 holds more than one A-MSDU's worth (or aggregation is disabled).
    bool q1_full() const;
    // Q2 holds the target MPDU count, or more than fits in one A-MPDU.
    bool q2_ready() const;

    std::optional<TimeUs> q1_deadline() const override { return q1_deadline_; }
    std::optional<TimeUs> q23_deadline() const override { return q23_deadline_; }
    std::array<std::size_t, 4> queued_by_ac() const override;

    const std::deque<Msdu>& q1() const { return q1_; }
    const std::deque<Mpdu>& q1_retry() const { return q1_retry_; }
    const std::deque<Mpdu>& q2() const { return q2_; }
    const std::deque<Mpdu>& q3() const { return q3_; }

private:
    std::size_t q1_prefix() const;
    TxDescriptor service_q1(TimeUs now);
    TxDescriptor service_q23(TimeUs now);
    void reset_q1_timer(TimeUs now);
    void reset_q23_timer(TimeUs now);
    bool q23_retry_pending() const;

    std::deque<Msdu> q1_;
    std::deque<Mpdu> q1_retry_;
    std::deque<Mpdu> q2_;
    std::deque<Mpdu> q3_;
    std::optional<TimeUs> q1_deadline_;
    std::optional<TimeUs> q23_deadline_;
};

class BaselineScheduler final : public Scheduler {
public:
    explicit BaselineScheduler(SchedulerConfig config);

    EnqueueResult enqueue(Msdu msdu, TimeUs now) override;
    std::optional<TxDescriptor> next_transmission(TimeUs now, bool channel_idle) override;
    void requeue(std::vector<Mpdu> mpdus, TimeUs now) override;

    // One policy step regardless of channel state.
    std::optional<TxDescriptor> baseline_step(TimeUs now);

    std::array<std::size_t, 4> queued_by_ac() const override;
    const std::deque<Mpdu>& fifo() const { return fifo_; }

private:
    std::deque<Mpdu> fifo_;
};

std::unique_ptr<Scheduler> make_scheduler(const SchedulerConfig& config);

}  // namespace bisched
