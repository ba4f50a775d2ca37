#include "bisched/scenario.hpp"

#include "bisched/error.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <system_error>

namespace bisched {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view value, std::size_t line, std::string_view key) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError(line, "invalid number '" + std::string(value) + "' for " + std::string(key));
    }
    return out;
}

bool parse_bool(std::string_view value, std::size_t line, std::string_view key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ParseError(line, "invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

struct FlowFields {
    std::size_t line = 0;
    std::optional<std::uint32_t> id;
    std::optional<AccessCategory> ac;
    std::string model = "cbr";
    std::optional<std::uint32_t> payload;
    std::optional<TimeUs> period;
    std::optional<double> rate;
    std::optional<TimeUs> on;
    std::optional<TimeUs> off;
    std::optional<TimeUs> start;
    std::optional<TimeUs> stop;
    bool saturated = false;
    std::size_t period_line = 0, rate_line = 0, on_line = 0, off_line = 0;
};

FlowSpec build_flow(const FlowFields& f, std::size_t index) {
    FlowSpec spec;
    spec.flow_id = f.id.value_or(static_cast<std::uint32_t>(index + 1));
    if (!f.ac) throw ParseError(f.line, "[flow] block without 'ac'");
    spec.ac = *f.ac;
    spec.payload_bytes = f.payload.value_or(spec.payload_bytes);
    spec.start = f.start.value_or(0);
    spec.stop = f.stop;
    spec.saturated = f.saturated;

    auto reject = [&](bool present, std::size_t line, const char* key) {
        if (present) throw ParseError(line, std::string("'") + key + "' does not apply to model " + f.model);
    };
    if (f.model == "cbr") {
        reject(f.rate.has_value(), f.rate_line, "rate");
        reject(f.on.has_value(), f.on_line, "on_us");
        reject(f.off.has_value(), f.off_line, "off_us");
        spec.model = CbrModel{f.period.value_or(CbrModel{}.period)};
    } else if (f.model == "poisson") {
        reject(f.period.has_value(), f.period_line, "period_us");
        reject(f.on.has_value(), f.on_line, "on_us");
        reject(f.off.has_value(), f.off_line, "off_us");
        spec.model = PoissonModel{f.rate.value_or(PoissonModel{}.rate_per_s)};
    } else {
        reject(f.rate.has_value(), f.rate_line, "rate");
        OnOffModel m;
        spec.model = OnOffModel{f.on.value_or(m.on), f.off.value_or(m.off), f.period.value_or(m.period)};
    }
    return spec;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

void Scenario::validate(bool require_flows) const {
    if (duration <= 0) throw ValidationError("general.duration_us", "must be > 0");
    if (drain_grace < 0) throw ValidationError("general.drain_grace_us", "must be >= 0");
    phy.validate();
    scheduler.validate();
    std::set<std::uint32_t> ids;
    for (std::size_t i = 0; i < flows.size(); ++i) {
        const std::string prefix = "flow[" + std::to_string(i) + "]";
        flows[i].validate(prefix);
        if (!ids.insert(flows[i].flow_id).second) throw ValidationError(prefix + ".id", "duplicate flow id");
    }
    if (require_flows && flows.empty()) {
        throw ValidationError("flow", "at least one flow or saturated source is required");
    }
}

Scenario parse_scenario(std::string_view text) {
    Scenario sc;
    std::vector<FlowFields> flows;
    std::string section;
    std::size_t line_no = 0;

    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section == "flow") {
                flows.emplace_back();
                flows.back().line = line_no;
            } else if (section != "general" && section != "phy" && section != "scheduler") {
                throw ParseError(line_no, "unknown section [" + section + "]");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (value.empty()) throw ParseError(line_no, "empty value for " + std::string(key));
        if (section.empty()) throw ParseError(line_no, "key outside of any section");

        auto unknown = [&]() -> ParseError {
            return ParseError(line_no, "unknown key '" + std::string(key) + "' in [" + section + "]");
        };
        auto num_i64 = [&] { return parse_number<std::int64_t>(value, line_no, key); };
        auto num_u32 = [&] { return parse_number<std::uint32_t>(value, line_no, key); };
        auto num_f64 = [&] { return parse_number<double>(value, line_no, key); };

        try {
            if (section == "general") {
                if (key == "name") sc.name = std::string(value);
                else if (key == "duration_ms") sc.duration = num_i64() * 1000;
                else if (key == "duration_us") sc.duration = num_i64();
                else if (key == "seed") sc.seed = parse_number<std::uint64_t>(value, line_no, key);
                else if (key == "retry_limit") sc.retry_limit = num_u32();
                else if (key == "drain_grace_us") sc.drain_grace = num_i64();
                else throw unknown();
            } else if (section == "phy") {
                if (key == "data_rate_mbps") sc.phy.data_rate_mbps = num_f64();
                else if (key == "basic_rate_mbps") sc.phy.basic_rate_mbps = num_f64();
                else if (key == "preamble_us") sc.phy.preamble = num_i64();
                else if (key == "sifs_us") sc.phy.sifs = num_i64();
                else if (key == "difs_us") sc.phy.difs = num_i64();
                else if (key == "ber") sc.phy.ber = num_f64();
                else if (key == "single_checksum") sc.phy.single_checksum = parse_bool(value, line_no, key);
                else throw unknown();
            } else if (section == "scheduler") {
                if (key == "policy") sc.scheduler.policy = parse_policy(value);
                else if (key == "q1_timer_us") sc.scheduler.q1_timer = num_i64();
                else if (key == "q23_timer_us") sc.scheduler.q23_timer = num_i64();
                else if (key == "q1_target_bytes") sc.scheduler.q1_target_bytes = num_u32();
                else if (key == "q2_target_mpdus") sc.scheduler.q2_target_mpdus = num_u32();
                else if (key == "amsdu_max") sc.scheduler.limits.amsdu_max = num_u32();
                else if (key == "queue_capacity") sc.scheduler.queue_capacity = parse_number<std::size_t>(value, line_no, key);
                else throw unknown();
            } else {
                auto& f = flows.back();
                if (key == "id") f.id = num_u32();
                else if (key == "ac") f.ac = parse_access_category(value);
                else if (key == "model") {
                    if (value != "cbr" && value != "poisson" && value != "onoff") {
                        throw ParseError(line_no, "unknown model '" + std::string(value) + "'");
                    }
                    f.model = std::string(value);
                } else if (key == "payload") f.payload = num_u32();
                else if (key == "period_us") { f.period = num_i64(); f.period_line = line_no; }
                else if (key == "rate") { f.rate = num_f64(); f.rate_line = line_no; }
                else if (key == "on_us") { f.on = num_i64(); f.on_line = line_no; }
                else if (key == "off_us") { f.off = num_i64(); f.off_line = line_no; }
                else if (key == "start_us") f.start = num_i64();
                else if (key == "stop_us") f.stop = num_i64();
                else if (key == "saturated") f.saturated = parse_bool(value, line_no, key);
                else throw unknown();
            }
        } catch (const ParseError&) {
            throw;
        } catch (const ValidationError& e) {
            throw ValidationError(section + "." + std::string(key), e.reason());
        } catch (const Error& e) {
            // Enum parsers report unknown names this way.
            throw ValidationError(section + "." + std::string(key), e.what());
        }
    }

    for (std::size_t i = 0; i < flows.size(); ++i) sc.flows.push_back(build_flow(flows[i], i));
    sc.validate(true);
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string format_scenario(const Scenario& sc) {
    std::ostringstream out;
    out << "[general]\n"
        << "name = " << sc.name << '\n'
        << "duration_us = " << sc.duration << '\n'
        << "seed = " << sc.seed << '\n'
        << "retry_limit = " << sc.retry_limit << '\n'
        << "drain_grace_us = " << sc.drain_grace << "\n\n";

    out << "[phy]\n"
        << "data_rate_mbps = " << format_double(sc.phy.data_rate_mbps) << '\n'
        << "basic_rate_mbps = " << format_double(sc.phy.basic_rate_mbps) << '\n'
        << "preamble_us = " << sc.phy.preamble << '\n'
        << "sifs_us = " << sc.phy.sifs << '\n'
        << "difs_us = " << sc.phy.difs << '\n'
        << "ber = " << format_double(sc.phy.ber) << '\n'
        << "single_checksum = " << (sc.phy.single_checksum ? "true" : "false") << "\n\n";

    const auto& s = sc.scheduler;
    out << "[scheduler]\n"
        << "policy = " << to_string(s.policy) << '\n'
        << "q1_timer_us = " << s.q1_timer << '\n'
        << "q23_timer_us = " << s.q23_timer << '\n';
    if (s.q1_target_bytes) out << "q1_target_bytes = " << *s.q1_target_bytes << '\n';
    out << "q2_target_mpdus = " << s.q2_target_mpdus << '\n'
        << "amsdu_max = " << s.limits.amsdu_max << '\n'
        << "queue_capacity = " << s.queue_capacity << '\n';

    for (const auto& f : sc.flows) {
        out << "\n[flow]\n"
            << "id = " << f.flow_id << '\n'
            << "ac = " << to_string(f.ac) << '\n'
            << "model = " << model_name(f.model) << '\n';
        if (const auto* m = std::get_if<CbrModel>(&f.model)) {
            out << "period_us = " << m->period << '\n';
        } else if (const auto* m = std::get_if<PoissonModel>(&f.model)) {
            out << "rate = " << format_double(m->rate_per_s) << '\n';
        } else if (const auto* m = std::get_if<OnOffModel>(&f.model)) {
            out << "period_us = " << m->period << '\n' << "on_us = " << m->on << '\n' << "off_us = " << m->off << '\n';
        }
        out << "payload = " << f.payload_bytes << '\n' << "start_us = " << f.start << '\n';
        if (f.stop) out << "stop_us = " << *f.stop << '\n';
        out << "saturated = " << (f.saturated ? "true" : "false") << '\n';
    }
    return out.str();
}

Scenario unsaturated_mixed_scenario() {
    Scenario sc;
    sc.name = "unsaturated-mixed";
    sc.duration = 2'000'000;

    FlowSpec voice;
    voice.flow_id = 1;
    voice.ac = AccessCategory::Voice;
    voice.model = CbrModel{20'000};
    voice.payload_bytes = 160;

    FlowSpec video;
    video.flow_id = 2;
    video.ac = AccessCategory::Video;
    video.model = OnOffModel{100'000, 100'000, 2'000};
    video.payload_bytes = 1300;

    FlowSpec best_effort;
    best_effort.flow_id = 3;
    best_effort.ac = AccessCategory::BestEffort;
    best_effort.model = PoissonModel{500.0};
    best_effort.payload_bytes = 1500;

    sc.flows = {voice, video, best_effort};
    return sc;
}

}  // namespace bisched
