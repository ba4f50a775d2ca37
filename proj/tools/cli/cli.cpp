#include "cli.hpp"

#include "golden.hpp"
#include "report.hpp"

#include "bisched/error.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

namespace bisched::cli {

namespace {

struct RunFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scheduler;
    std::optional<std::int64_t> duration_ms;
    std::string format = "csv";
    std::optional<std::string> out;
    bool compare = false;
    std::optional<std::string> sweep;
    unsigned jobs = 0;
};

std::uint64_t parse_u64(std::string_view s, std::string_view spec) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::ConfigInvalid, "malformed sweep '" + std::string(spec) + "'");
    }
    return v;
}

// All runs for one seed: one arrival trace replayed under each policy.
std::vector<PolicyRun> run_seed(const Scenario& base, std::uint64_t seed, std::span<const SchedulerPolicy> policies) {
    Scenario sc = base;
    sc.seed = seed;
    const auto arrivals = generate_arrivals(sc.flows, seed, sc.duration);
    std::vector<PolicyRun> runs;
    for (auto policy : policies) {
        sc.scheduler.policy = policy;
        runs.push_back({policy, seed, run_trace(sc, arrivals).report});
    }
    return runs;
}

std::vector<PolicyRun> run_all(const Scenario& base, std::uint64_t first, std::uint64_t last,
                               std::span<const SchedulerPolicy> policies, unsigned jobs) {
    const std::size_t count = static_cast<std::size_t>(last - first) + 1;
    std::vector<std::vector<PolicyRun>> slots(count);
    std::vector<std::exception_ptr> errors(count);

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));

    auto work = [&](std::size_t worker) {
        for (std::size_t i = worker; i < count; i += jobs) {
            try {
                slots[i] = run_seed(base, first + i, policies);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (jobs <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<PolicyRun> runs;
    for (auto& s : slots) std::move(s.begin(), s.end(), std::back_inserter(runs));
    return runs;
}

int do_run(const RunFlags& flags, std::ostream& out, std::ostream& err) {
    Scenario sc = load_scenario(flags.config);
    if (flags.seed) sc.seed = *flags.seed;
    if (flags.scheduler) {
        try {
            sc.scheduler.policy = parse_policy(*flags.scheduler);
        } catch (const Error&) {
            throw ValidationError("--scheduler", "unknown policy '" + *flags.scheduler + "'");
        }
    }
    if (flags.duration_ms) {
        if (*flags.duration_ms <= 0) throw ValidationError("--duration-ms", "must be > 0");
        sc.duration = *flags.duration_ms * 1000;
    }
    sc.validate(true);

    std::uint64_t first = sc.seed;
    std::uint64_t last = sc.seed;
    if (flags.sweep) std::tie(first, last) = parse_sweep(*flags.sweep);

    std::vector<SchedulerPolicy> policies;
    if (flags.compare) {
        policies = {SchedulerPolicy::Bi, SchedulerPolicy::FifoNoAgg, SchedulerPolicy::GreedyAmpdu};
    } else {
        policies = {sc.scheduler.policy};
    }

    const auto runs = run_all(sc, first, last, policies, flags.jobs);

    std::ostringstream body;
    if (flags.format == "json") {
        body << document_json(sc, runs, flags.sweep.has_value()).dump(2) << '\n';
    } else {
        write_csv(body, runs);
        if (flags.sweep) write_csv_summary(body, runs);
    }

    if (flags.out) {
        std::ofstream file(*flags.out, std::ios::binary);
        if (!file) {
            err << "error: cannot write '" << *flags.out << "'\n";
            return kExitConfig;
        }
        file << body.str();
    } else {
        out << body.str();
    }
    return kExitOk;
}

}  // namespace

std::pair<std::uint64_t, std::uint64_t> parse_sweep(std::string_view spec) {
    constexpr std::string_view prefix = "seed=";
    if (spec.substr(0, prefix.size()) != prefix) {
        throw Error(ErrorCode::ConfigInvalid, "sweep must look like seed=a..b");
    }
    const auto range = spec.substr(prefix.size());
    const auto dots = range.find("..");
    if (dots == std::string_view::npos) throw Error(ErrorCode::ConfigInvalid, "sweep must look like seed=a..b");
    const auto a = parse_u64(range.substr(0, dots), spec);
    const auto b = parse_u64(range.substr(dots + 2), spec);
    if (b < a) throw Error(ErrorCode::ConfigInvalid, "sweep range is empty");
    if (b - a >= 100000) throw Error(ErrorCode::ConfigInvalid, "sweep covers more than 100000 seeds");
    return {a, b};
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete-event simulator of an 802.11n link with two-level frame aggregation", "bisched"};
    app.require_subcommand(1);

    RunFlags flags;
    auto* run = app.add_subcommand("run", "Run a scenario and emit a report");
    run->add_option("--config", flags.config, "Scenario file")->required();
    run->add_option("--seed", flags.seed, "Master seed (overrides the file)");
    run->add_option("--scheduler", flags.scheduler, "bi | fifo | ampdu-greedy (overrides the file)");
    run->add_option("--duration-ms", flags.duration_ms, "Simulated duration in milliseconds");
    run->add_option("--format", flags.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--out", flags.out, "Output file (default: standard output)");
    run->add_flag("--compare", flags.compare, "Run all three policies on one arrival trace");
    run->add_option("--sweep", flags.sweep, "Seed range seed=a..b, run in parallel and summarized");
    run->add_option("--jobs", flags.jobs, "Worker threads for sweeps (0 = one per core)");

    std::string golden_dir;
    auto* golden = app.add_subcommand("golden", "Write the wire-format golden corpus");
    golden->add_option("--out-dir", golden_dir, "Target directory")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (golden->parsed()) {
            write_golden(golden_dir);
            return kExitOk;
        }
        return do_run(flags, out, err);
    } catch (const ParseError& e) {
        err << "error: " << flags.config << ": " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::InvariantViolation ? kExitRuntime
               : (e.code() == ErrorCode::ConfigInvalid || e.code() == ErrorCode::ValidationError) ? kExitConfig
                                                                                                   : kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace bisched::cli
