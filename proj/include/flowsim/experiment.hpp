#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flowsim/metrics.hpp"
#include "flowsim/policy.hpp"
#include "flowsim/traffic.hpp"

namespace flowsim {

// Parameterization of a full experiment grid:
// policies x regular fractions x size distributions x arrival rates,
// each cell repeated `repetitions` times. Replication r draws its workload
// with seed base_seed + r, so every policy inside a cell replays the exact
// same traffic (paired comparison).
struct ExperimentConfig {
    std::vector<PolicyKind> policies{kAllPolicies, kAllPolicies + 7};
    std::vector<double> regular_fractions{0.1, 0.2, 0.3, 0.4, 0.5,
                                          0.6, 0.7, 0.8, 0.9};
    std::vector<SizeDistribution::Kind> distributions{
        SizeDistribution::Kind::Exponential, SizeDistribution::Kind::Pareto};
    std::vector<double> arrival_rates{0.1, 1.0};
    std::size_t flow_count = 10000;
    std::size_t repetitions = 20;
    std::uint64_t base_seed = 1;
    double delta = 0.1;
    double capacity = 1.0;
    double mean_size = 1.0;
    double pareto_min = 0.1;
    SlackRange slack{};
    double soft_multiplier = 2.0;
    double tail_percentile = 0.99;
};

// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

// Parse from a JSON document whose keys mirror the field names above
// (lower_snake_case; "slack" is {"low": .., "high": ..}). Unknown keys are
// rejected. Missing keys keep their defaults.
ExperimentConfig experiment_config_from_json(const std::string& json_text);
std::string experiment_config_to_json(const ExperimentConfig& config);

// Across-replication arithmetic means; a metric absent from every
// replication stays absent.
struct AggregateMetrics {
    std::optional<double> afct;
    std::optional<double> mfct;
    std::optional<double> tfct;
    std::optional<double> dmr;
    std::optional<double> avg_lateness;
};

AggregateMetrics aggregate(const std::vector<MetricsReport>& replications);

struct GridCellResult {
    SizeDistribution::Kind distribution{};
    double arrival_rate = 0.0;
    double regular_fraction = 0.0;
    PolicyKind policy{};
    std::vector<MetricsReport> replications;
    std::vector<std::uint64_t> workload_hashes;  // one per replication
    AggregateMetrics mean;
};

// Runs every cell. Independent (distribution, rate, fraction, replication)
// units may execute on `threads` workers (0 = hardware concurrency); the
// result is identical to serial execution. `progress`, when set, is called
// once per finished unit from worker threads.
std::vector<GridCellResult> run_experiment(
    const ExperimentConfig& config, unsigned threads = 0,
    const std::function<void(std::size_t done, std::size_t total)>& progress = {});

// CSV with one row per cell, sorted by (distribution, rate, fraction,
// policy). Missing metrics serialize as empty fields. The *_norm columns
// divide by the minimum across policies within each
// (distribution, rate, fraction) group. Values use 6 significant digits.
std::string emit_csv(const std::vector<GridCellResult>& results);

// Short file-name token: "exp" or "pareto".
std::string_view distribution_name(SizeDistribution::Kind kind);
SizeDistribution::Kind parse_distribution(std::string_view name);

// Compact number format used in CSV cells and file names (6 significant
// digits, no trailing zeros).
std::string format_value(double v);

}  // namespace flowsim
