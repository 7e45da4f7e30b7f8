#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "flowsim/types.hpp"

namespace flowsim {

// Completion-time statistics over regular flows.
struct FctStats {
    double afct = 0.0;  // mean
    double mfct = 0.0;  // median (mean of the two middle order statistics)
    double tfct = 0.0;  // tail percentile, nearest-rank
};

// Returns nullopt when no regular flow is present ("no regular flows" is an
// explicit marker, never silently zero). tail_percentile is nearest-rank:
// index ceil(p * n) in the ascending FCT list, 1-based.
std::optional<FctStats> fct_stats(std::span<const CompletionRecord> records,
                                  double tail_percentile = 0.99);

// Fraction of deadline flows finishing strictly after their deadline
// (completion == deadline counts as met). nullopt when no deadline flows.
std::optional<double> deadline_miss_rate(std::span<const CompletionRecord> records);

// Mean of max(0, completion - deadline) over all soft-deadline flows (flows
// that met their deadline contribute zero). nullopt when no soft-deadline
// flows.
std::optional<double> average_lateness(std::span<const CompletionRecord> records);

struct MetricsReport {
    std::optional<double> afct;
    std::optional<double> mfct;
    std::optional<double> tfct;
    std::optional<double> dmr;
    std::optional<double> avg_lateness;
    struct Counts {
        std::size_t regular = 0;
        std::size_t deadline = 0;
        std::size_t soft_deadline = 0;
        std::size_t missed = 0;
    } counts;
};

MetricsReport compute_metrics(std::span<const CompletionRecord> records,
                              double tail_percentile = 0.99);

// Divide each value by the minimum of the set (Figure-1 style normalization).
// Throws ConfigError when a value is not strictly positive.
std::vector<double> normalize_by_minimum(std::span<const double> values);

}  // namespace flowsim
