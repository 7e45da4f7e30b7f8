#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "flowsim/engine.hpp"
#include "flowsim/errors.hpp"
#include "flowsim/experiment.hpp"
#include "flowsim/metrics.hpp"
#include "flowsim/traffic.hpp"

namespace fs = std::filesystem;
using namespace flowsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

void print_metrics(const MetricsReport& m) {
    auto field = [](const std::optional<double>& v) {
        return v ? format_value(*v) : std::string("-");
    };
    std::cout << "flows regular=" << m.counts.regular << " deadline=" << m.counts.deadline
              << " soft=" << m.counts.soft_deadline << " missed=" << m.counts.missed << '\n';
    std::cout << "afct=" << field(m.afct) << " mfct=" << field(m.mfct)
              << " tfct=" << field(m.tfct) << '\n';
    std::cout << "dmr=" << field(m.dmr) << " avg_lateness=" << field(m.avg_lateness) << '\n';
}

void write_completion_dump(const std::string& path,
                           const std::vector<CompletionRecord>& records) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    char buf[160];
    for (const CompletionRecord& r : records) {
        std::snprintf(buf, sizeof buf, "%llu %.17g %.17g %s %.17g\n",
                      static_cast<unsigned long long>(r.id), r.arrival, r.volume,
                      r.is_deadline() ? "deadline" : "regular", r.completion);
        out << buf;
    }
}

int run_simulate(const std::string& policy, double lambda, const std::string& dist,
                 double regular_fraction, std::size_t flows, double delta,
                 std::uint64_t seed, double capacity, double mean_size, double pareto_min,
                 double slack_low, double slack_high, double soft_multiplier,
                 const std::string& out_path, bool verbose) {
    WorkloadConfig wc;
    wc.arrival_rate = lambda;
    wc.flow_count = flows;
    wc.size_dist.kind = parse_distribution(dist);
    wc.size_dist.mean = mean_size;
    wc.size_dist.minimum = pareto_min;
    wc.regular_fraction = regular_fraction;
    wc.deadline_slack = {slack_low, slack_high};
    wc.soft_threshold_multiplier = soft_multiplier;
    wc.seed = seed;
    if (regular_fraction < 0.0 || regular_fraction > 1.0)
        throw ConfigError("--regular-fraction must lie in [0, 1]");

    auto workload = generate_workload(wc, capacity);
    if (verbose)
        std::cout << "workload flows=" << workload.size() << " hash=" << std::hex
                  << workload_hash(workload) << std::dec << '\n';

    SimConfig sc{capacity, delta, parse_policy(policy)};
    const auto records = run(std::move(workload), sc);
    print_metrics(compute_metrics(records));
    if (!out_path.empty()) write_completion_dump(out_path, records);
    return kExitOk;
}

int run_sweep(const std::string& config_path, const std::string& out_dir, bool verbose,
              unsigned threads) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const ExperimentConfig config = experiment_config_from_json(buffer.str());

    fs::create_directories(out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    auto results = run_experiment(config, threads, [&](std::size_t done, std::size_t total) {
        if (verbose && (done % 10 == 0 || done == total))
            std::cerr << "\runits " << done << "/" << total << std::flush;
    });
    if (verbose) std::cerr << '\n';
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);

    if (verbose) {
        for (const GridCellResult& cell : results) {
            for (std::size_t rep = 0; rep < cell.replications.size(); ++rep) {
                const MetricsReport& m = cell.replications[rep];
                auto field = [](const std::optional<double>& v) {
                    return v ? format_value(*v) : std::string("-");
                };
                std::cout << policy_name(cell.policy) << ' '
                          << distribution_name(cell.distribution) << " rate="
                          << format_value(cell.arrival_rate) << " fraction="
                          << format_value(cell.regular_fraction) << " rep=" << rep
                          << " workload=" << std::hex << cell.workload_hashes[rep] << std::dec
                          << " afct=" << field(m.afct) << " mfct=" << field(m.mfct)
                          << " tfct=" << field(m.tfct) << " dmr=" << field(m.dmr)
                          << " lateness=" << field(m.avg_lateness) << '\n';
            }
        }
    }

    // One CSV per (distribution, arrival rate) pair, like the four columns of
    // the summary figure.
    for (SizeDistribution::Kind dist : config.distributions) {
        for (double rate : config.arrival_rates) {
            std::vector<GridCellResult> slice;
            for (const GridCellResult& cell : results)
                if (cell.distribution == dist && cell.arrival_rate == rate)
                    slice.push_back(cell);
            const std::string name = std::string(distribution_name(dist)) + "_" +
                                     format_value(rate) + ".csv";
            const fs::path path = fs::path(out_dir) / name;
            std::ofstream out(path);
            if (!out) throw ConfigError("cannot open output file '" + path.string() + "'");
            out << emit_csv(slice);
            std::cout << "wrote " << path.string() << '\n';
        }
    }
    std::cout << "sweep finished in " << format_value(elapsed.count()) << " s\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-link flow scheduling simulator: deadline and regular "
                 "traffic under seven policies"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run one simulation and print metrics");
    std::string policy = "fcfs";
    double lambda = 1.0;
    std::string dist = "exp";
    double regular_fraction = 0.5;
    std::size_t flows = 10000;
    double delta = 0.1;
    std::uint64_t seed = 1;
    double capacity = 1.0;
    double mean_size = 1.0;
    double pareto_min = 0.1;
    double slack_low = 10.0;
    double slack_high = 30.0;
    double soft_multiplier = 2.0;
    std::string out_path;
    bool verbose = false;
    simulate->add_option("--policy", policy,
                         "fcfs|srpt|fair|edf-fcfs-df|edf-srpt-df|edf-fcfs-dl|edf-srpt-dl");
    simulate->add_option("--lambda", lambda, "Poisson arrival rate (flows per time unit)");
    simulate->add_option("--dist", dist, "Flow size distribution: exp|pareto");
    simulate->add_option("--regular-fraction", regular_fraction,
                         "Target fraction of regular traffic");
    simulate->add_option("--flows", flows, "Number of flow arrivals");
    simulate->add_option("--delta", delta, "Timeslot length");
    simulate->add_option("--seed", seed, "Workload RNG seed");
    simulate->add_option("--capacity", capacity, "Link capacity");
    simulate->add_option("--mean-size", mean_size, "Mean flow size");
    simulate->add_option("--pareto-min", pareto_min, "Pareto minimum size");
    simulate->add_option("--slack-low", slack_low, "Deadline slack lower bound (>= 1)");
    simulate->add_option("--slack-high", slack_high, "Deadline slack upper bound");
    simulate->add_option("--soft-multiplier", soft_multiplier,
                         "Soft-deadline size threshold, in multiples of the mean");
    simulate->add_option("--out", out_path, "Write per-flow completions to this file");
    simulate->add_flag("--verbose", verbose, "Print workload hash");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run an experiment grid from a JSON config");
    std::string config_path;
    std::string out_dir = ".";
    bool sweep_verbose = false;
    unsigned threads = 0;
    sweep->add_option("--config", config_path, "JSON experiment config")->required();
    sweep->add_option("--out", out_dir, "Output directory for CSV files");
    sweep->add_flag("--verbose", sweep_verbose, "Print per-replication rows");
    sweep->add_option("--threads", threads, "Worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
        if (simulate->parsed())
            return run_simulate(policy, lambda, dist, regular_fraction, flows, delta, seed,
                                capacity, mean_size, pareto_min, slack_low, slack_high,
                                soft_multiplier, out_path, verbose);
        if (sweep->parsed()) return run_sweep(config_path, out_dir, sweep_verbose, threads);
        return kExitConfig;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvariantError& e) {
        std::cerr << "internal invariant violation: " << e.what() << '\n';
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInternal;
    }
}
