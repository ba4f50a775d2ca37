#include "bisched/scheduler.hpp"

#include "bisched/error.hpp"

#include <algorithm>
#include <string>

namespace bisched {

namespace {

constexpr std::uint32_t align4(std::uint32_t n) { return n + (4u - n % 4u) % 4u; }

template <typename T>
std::vector<T> take_front(std::deque<T>& q, std::size_t n) {
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(std::move(q.front()));
        q.pop_front();
    }
    return out;
}

}  // namespace

std::string_view to_string(SchedulerPolicy policy) {
    switch (policy) {
        case SchedulerPolicy::Bi: return "bi";
        case SchedulerPolicy::FifoNoAgg: return "fifo";
        case SchedulerPolicy::GreedyAmpdu: return "ampdu-greedy";
    }
    return "?";
}

SchedulerPolicy parse_policy(std::string_view name) {
    for (auto p : {SchedulerPolicy::Bi, SchedulerPolicy::FifoNoAgg, SchedulerPolicy::GreedyAmpdu}) {
        if (name == to_string(p)) return p;
    }
    throw ValidationError("scheduler.policy", "unknown policy '" + std::string(name) + "'");
}

std::string_view to_string(SourceQueue source) {
    switch (source) {
        case SourceQueue::Q1: return "Q1";
        case SourceQueue::Q2: return "Q2";
        case SourceQueue::Q3: return "Q3";
        case SourceQueue::Q2Q3: return "Q2+Q3";
        case SourceQueue::Fifo: return "FIFO";
    }
    return "?";
}

std::string_view to_string(LogAction action) {
    switch (action) {
        case LogAction::Q1TimerArmed: return "q1-timer-armed";
        case LogAction::Q1TimerCleared: return "q1-timer-cleared";
        case LogAction::Q1TimerRearmed: return "q1-timer-rearmed";
        case LogAction::Q23TimerArmed: return "q23-timer-armed";
        case LogAction::Q23TimerCleared: return "q23-timer-cleared";
        case LogAction::Q23TimerRearmed: return "q23-timer-rearmed";
        case LogAction::EmitQ1: return "emit-q1";
        case LogAction::EmitQ1Retry: return "emit-q1-retry";
        case LogAction::EmitQ2: return "emit-q2";
        case LogAction::EmitQ23: return "emit-q23";
        case LogAction::EmitBaseline: return "emit-baseline";
        case LogAction::Overflow: return "overflow";
    }
    return "?";
}

Route classify(const Msdu& msdu) {
    switch (msdu.ac) {
        case AccessCategory::Voice: return Route::Q1;
        case AccessCategory::Video: return Route::Q2;
        case AccessCategory::BestEffort:
        case AccessCategory::Background: return Route::Q3;
    }
    return Route::Q3;
}

std::size_t TxDescriptor::msdu_count() const {
    std::size_t n = 0;
    for (const auto& m : mpdus) n += m.msdus.size();
    return n;
}

std::uint64_t TxDescriptor::payload_bytes() const {
    std::uint64_t n = 0;
    for (const auto& m : mpdus) n += m.payload_bytes();
    return n;
}

void SchedulerConfig::validate() const {
    if (q1_timer <= 0) throw ValidationError("scheduler.q1_timer_us", "must be > 0");
    if (q23_timer <= 0) throw ValidationError("scheduler.q23_timer_us", "must be > 0");
    if (q2_target_mpdus < 1 || q2_target_mpdus > 64) {
        throw ValidationError("scheduler.q2_target_mpdus", "must be in 1..64");
    }
    try {
        limits.validate();
    } catch (const Error& e) {
        throw ValidationError("scheduler.amsdu_max", e.what());
    }
    if (effective_q1_target() > limits.amsdu_max) {
        throw ValidationError("scheduler.q1_target_bytes", "must not exceed amsdu_max");
    }
    if (queue_capacity == 0) throw ValidationError("scheduler.queue_capacity", "must be > 0");
}

// ---------------------------------------------------------------------------
// Scheduler

Scheduler::Scheduler(SchedulerConfig config) : config_(std::move(config)) { config_.validate(); }

std::size_t Scheduler::queued_msdus() const {
    std::size_t n = 0;
    for (auto c : queued_by_ac()) n += c;
    return n;
}

void Scheduler::record(TimeUs now, LogAction action, std::size_t units) {
    if (logging_) log_.push_back({now, action, units});
}

void Scheduler::assign_seq(Mpdu& mpdu) {
    mpdu.seq_no = next_seq_;
    next_seq_ = seq_add(next_seq_, 1);
}

Mpdu Scheduler::wrap(Msdu msdu) const {
    Mpdu m;
    m.receiver_addr = config_.receiver;
    m.transmitter_addr = config_.transmitter;
    m.ac = msdu.ac;
    m.body_len = msdu.payload_len;
    m.msdus.push_back(std::move(msdu));
    return m;
}

std::size_t Scheduler::ampdu_fit(const std::deque<Mpdu>& queue, std::size_t max_units, std::uint32_t used_bytes,
                                 std::size_t used_units) const {
    const auto& lim = config_.limits;
    std::size_t n = 0;
    std::uint32_t len = used_bytes;
    while (n < queue.size() && n < max_units && used_units + n < lim.ampdu_max_mpdus) {
        const std::uint32_t grown = (len == 0 ? 0 : align4(len)) + static_cast<std::uint32_t>(kDelimiterLen) +
                                    queue[n].total_len();
        if (grown > lim.ampdu_max_bytes) break;
        len = grown;
        ++n;
    }
    return n;
}

TxDescriptor Scheduler::make_ampdu(std::vector<Mpdu> mpdus, SourceQueue source) {
    TxDescriptor d;
    d.kind = FrameKind::Ampdu;
    d.source = source;
    std::vector<std::uint32_t> lens;
    lens.reserve(mpdus.size());
    for (auto& m : mpdus) {
        assign_seq(m);
        lens.push_back(m.total_len());
    }
    d.total_bytes = ampdu_total_len(lens);
    d.mpdus = std::move(mpdus);
    return d;
}

TxDescriptor Scheduler::make_single(Mpdu mpdu, SourceQueue source) {
    TxDescriptor d;
    d.kind = mpdu.amsdu_present ? FrameKind::Amsdu : FrameKind::PlainMsdu;
    d.source = source;
    assign_seq(mpdu);
    d.total_bytes = mpdu.total_len();
    d.mpdus.push_back(std::move(mpdu));
    return d;
}

// ---------------------------------------------------------------------------
// BiScheduler

BiScheduler::BiScheduler(SchedulerConfig config) : Scheduler(std::move(config)) {}

EnqueueResult BiScheduler::enqueue(Msdu msdu, TimeUs now) {
    validate_msdu(msdu);
    EnqueueResult result;
    if (classify(msdu) == Route::Q1) {
        if (q1_.size() >= config_.queue_capacity) {
            record(now, LogAction::Overflow, 1);
            result.status = EnqueueStatus::QueueOverflow;
            return result;
        }
        q1_.push_back(std::move(msdu));
        if (!q1_deadline_) {
            q1_deadline_ = now + config_.q1_timer;
            record(now, LogAction::Q1TimerArmed);
            result.armed = TimerArm{TimerId::Q1, *q1_deadline_};
        }
        return result;
    }

    // Classification happens on arrival; there is no staging delay.
    auto& target = classify(msdu) == Route::Q2 ? q2_ : q3_;
    if (target.size() >= config_.queue_capacity) {
        record(now, LogAction::Overflow, 1);
        result.status = EnqueueStatus::QueueOverflow;
        return result;
    }
    target.push_back(wrap(std::move(msdu)));
    if (!q23_deadline_) {
        q23_deadline_ = now + config_.q23_timer;
        record(now, LogAction::Q23TimerArmed);
        result.armed = TimerArm{TimerId::Q23, *q23_deadline_};
    }
    return result;
}

std::size_t BiScheduler::q1_prefix() const {
    if (q1_.empty()) return 0;
    const std::uint32_t budget = std::min(config_.effective_q1_target(), config_.limits.amsdu_max);
    std::uint32_t len = static_cast<std::uint32_t>(kAmsduSubframeHeaderLen) + q1_.front().payload_len;
    std::size_t k = 1;
    if (len > budget) return k;
    while (k < q1_.size() && fits_in_amsdu_budget(len, q1_[k].payload_len, budget)) {
        len = align4(len) + static_cast<std::uint32_t>(kAmsduSubframeHeaderLen) + q1_[k].payload_len;
        ++k;
    }
    return k;
}

bool BiScheduler::q1_full() const {
    if (q1_.empty()) return false;
    const std::uint32_t budget = std::min(config_.effective_q1_target(), config_.limits.amsdu_max);
    if (kAmsduSubframeHeaderLen + q1_.front().payload_len > budget) return true;
    return q1_prefix() < q1_.size();
}

bool BiScheduler::q2_ready() const {
    if (q2_.empty()) return false;
    if (q2_.size() >= config_.q2_target_mpdus) return true;
    return ampdu_fit(q2_, config_.q2_target_mpdus) < q2_.size();
}

bool BiScheduler::q23_retry_pending() const {
    return (!q2_.empty() && q2_.front().retries > 0) || (!q3_.empty() && q3_.front().retries > 0);
}

void BiScheduler::reset_q1_timer(TimeUs now) {
    if (q1_.empty()) {
        q1_deadline_.reset();
        record(now, LogAction::Q1TimerCleared);
    } else {
        q1_deadline_ = now + config_.q1_timer;
        record(now, LogAction::Q1TimerRearmed);
    }
}

void BiScheduler::reset_q23_timer(TimeUs now) {
    if (q2_.empty() && q3_.empty()) {
        q23_deadline_.reset();
        record(now, LogAction::Q23TimerCleared);
    } else {
        q23_deadline_ = now + config_.q23_timer;
        record(now, LogAction::Q23TimerRearmed);
    }
}

TxDescriptor BiScheduler::service_q1(TimeUs now) {
    const std::size_t k = q1_prefix();
    auto msdus = take_front(q1_, k);

    Mpdu mpdu;
    mpdu.receiver_addr = config_.receiver;
    mpdu.transmitter_addr = config_.transmitter;
    mpdu.ac = AccessCategory::Voice;
    if (k == 1) {
        mpdu.body_len = msdus.front().payload_len;
    } else {
        std::vector<std::uint32_t> lens;
        lens.reserve(k);
        for (const auto& m : msdus) lens.push_back(m.payload_len);
        mpdu.body_len = amsdu_total_len(lens);
        mpdu.amsdu_present = true;
    }
    mpdu.msdus = std::move(msdus);

    record(now, LogAction::EmitQ1, k);
    reset_q1_timer(now);
    return make_single(std::move(mpdu), SourceQueue::Q1);
}

TxDescriptor BiScheduler::service_q23(TimeUs now) {
    const std::uint32_t target = config_.q2_target_mpdus;
    std::vector<Mpdu> units;
    SourceQueue source = SourceQueue::Q3;
    if (!q2_.empty()) {
        const std::size_t video = ampdu_fit(q2_, target);
        units = take_front(q2_, video);
        std::uint32_t used = 0;
        for (const auto& m : units) {
            used = (used == 0 ? 0 : align4(used)) + static_cast<std::uint32_t>(kDelimiterLen) + m.total_len();
        }
        const std::size_t backfill = ampdu_fit(q3_, target - video, used, units.size());
        for (auto& m : take_front(q3_, backfill)) units.push_back(std::move(m));
        source = backfill > 0 ? SourceQueue::Q2Q3 : SourceQueue::Q2;
    } else {
        units = take_front(q3_, ampdu_fit(q3_, target));
    }
    record(now, LogAction::EmitQ23, units.size());
    reset_q23_timer(now);
    return make_ampdu(std::move(units), source);
}

std::optional<TxDescriptor> BiScheduler::on_q1_expiry(TimeUs now) {
    if (q1_.empty() || !q1_deadline_ || *q1_deadline_ > now) return std::nullopt;
    return service_q1(now);
}

std::optional<TxDescriptor> BiScheduler::on_q2_ready(TimeUs now) {
    if (!q2_ready()) return std::nullopt;
    auto units = take_front(q2_, ampdu_fit(q2_, config_.q2_target_mpdus));
    record(now, LogAction::EmitQ2, units.size());
    reset_q23_timer(now);
    return make_ampdu(std::move(units), SourceQueue::Q2);
}

std::optional<TxDescriptor> BiScheduler::on_q23_expiry(TimeUs now) {
    if ((q2_.empty() && q3_.empty()) || !q23_deadline_ || *q23_deadline_ > now) return std::nullopt;
    return service_q23(now);
}

std::optional<TxDescriptor> BiScheduler::next_transmission(TimeUs now, bool channel_idle) {
    if (!channel_idle) return std::nullopt;

    if (!q1_retry_.empty()) {
        auto m = std::move(q1_retry_.front());
        q1_retry_.pop_front();
        record(now, LogAction::EmitQ1Retry, m.msdus.size());
        return make_single(std::move(m), SourceQueue::Q1);
    }
    if (!q1_.empty() && ((q1_deadline_ && *q1_deadline_ <= now) || q1_full())) return service_q1(now);
    if (q2_ready()) return on_q2_ready(now);
    if ((!q2_.empty() || !q3_.empty()) && ((q23_deadline_ && *q23_deadline_ <= now) || q23_retry_pending())) {
        return service_q23(now);
    }
    return std::nullopt;
}

void BiScheduler::requeue(std::vector<Mpdu> mpdus, TimeUs now) {
    for (auto it = mpdus.rbegin(); it != mpdus.rend(); ++it) {
        switch (it->ac) {
            case AccessCategory::Voice: q1_retry_.push_front(std::move(*it)); break;
            case AccessCategory::Video: q2_.push_front(std::move(*it)); break;
            default: q3_.push_front(std::move(*it)); break;
        }
    }
    if (!q23_deadline_ && (!q2_.empty() || !q3_.empty())) {
        q23_deadline_ = now + config_.q23_timer;
        record(now, LogAction::Q23TimerArmed);
    }
}

std::array<std::size_t, 4> BiScheduler::queued_by_ac() const {
    std::array<std::size_t, 4> n{};
    for (const auto& m : q1_) ++n[static_cast<std::size_t>(m.ac)];
    for (const auto* q : {&q1_retry_, &q2_, &q3_}) {
        for (const auto& mpdu : *q) {
            for (const auto& m : mpdu.msdus) ++n[static_cast<std::size_t>(m.ac)];
        }
    }
    return n;
}

// ---------------------------------------------------------------------------
// BaselineScheduler

BaselineScheduler::BaselineScheduler(SchedulerConfig config) : Scheduler(std::move(config)) {
    if (config_.policy == SchedulerPolicy::Bi) {
        throw Error(ErrorCode::PreconditionFailed, "baseline scheduler needs fifo or ampdu-greedy policy");
    }
}

EnqueueResult BaselineScheduler::enqueue(Msdu msdu, TimeUs now) {
    validate_msdu(msdu);
    if (fifo_.size() >= config_.queue_capacity) {
        record(now, LogAction::Overflow, 1);
        return {EnqueueStatus::QueueOverflow, std::nullopt};
    }
    fifo_.push_back(wrap(std::move(msdu)));
    return {};
}

std::optional<TxDescriptor> BaselineScheduler::baseline_step(TimeUs now) {
    if (fifo_.empty()) return std::nullopt;
    if (config_.policy == SchedulerPolicy::FifoNoAgg) {
        auto m = std::move(fifo_.front());
        fifo_.pop_front();
        record(now, LogAction::EmitBaseline, 1);
        return make_single(std::move(m), SourceQueue::Fifo);
    }
    const std::size_t fit = ampdu_fit(fifo_, config_.q2_target_mpdus);
    const bool ready = fifo_.size() >= config_.q2_target_mpdus || fit < fifo_.size() || fifo_.front().retries > 0;
    if (!ready) return std::nullopt;
    auto units = take_front(fifo_, fit);
    record(now, LogAction::EmitBaseline, units.size());
    return make_ampdu(std::move(units), SourceQueue::Fifo);
}

std::optional<TxDescriptor> BaselineScheduler::next_transmission(TimeUs now, bool channel_idle) {
    if (!channel_idle) return std::nullopt;
    return baseline_step(now);
}

std::array<std::size_t, 4> BaselineScheduler::queued_by_ac() const {
    std::array<std::size_t, 4> n{};
    for (const auto& mpdu : fifo_) {
        for (const auto& m : mpdu.msdus) ++n[static_cast<std::size_t>(m.ac)];
    }
    return n;
}

void BaselineScheduler::requeue(std::vector<Mpdu> mpdus, TimeUs /*now*/) {
    for (auto it = mpdus.rbegin(); it != mpdus.rend(); ++it) fifo_.push_front(std::move(*it));
}

std::unique_ptr<Scheduler> make_scheduler(const SchedulerConfig& config) {
    if (config.policy == SchedulerPolicy::Bi) return std::make_unique<BiScheduler>(config);
    return std::make_unique<BaselineScheduler>(config);
}

}  // namespace bisched
