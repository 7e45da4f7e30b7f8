#include "flowsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "flowsim/errors.hpp"

namespace flowsim {

std::optional<FctStats> fct_stats(std::span<const CompletionRecord> records,
                                  double tail_percentile) {
    if (!(tail_percentile > 0.0) || tail_percentile > 1.0)
        throw ConfigError("tail_percentile must lie in (0, 1]");

    std::vector<double> fcts;
    fcts.reserve(records.size());
    for (const CompletionRecord& r : records)
        if (!r.is_deadline()) fcts.push_back(r.fct());
    if (fcts.empty()) return std::nullopt;

    std::sort(fcts.begin(), fcts.end());
    const std::size_t n = fcts.size();

    FctStats stats;
    double sum = 0.0;
    for (double v : fcts) sum += v;
    stats.afct = sum / static_cast<double>(n);
    stats.mfct = n % 2 == 1 ? fcts[n / 2] : 0.5 * (fcts[n / 2 - 1] + fcts[n / 2]);

    // Nearest-rank percentile: 1-based index ceil(p * n).
    auto rank = static_cast<std::size_t>(
        std::ceil(tail_percentile * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    stats.tfct = fcts[rank - 1];
    return stats;
}

std::optional<double> deadline_miss_rate(std::span<const CompletionRecord> records) {
    std::size_t total = 0;
    std::size_t missed = 0;
    for (const CompletionRecord& r : records) {
        if (!r.is_deadline()) continue;
        ++total;
        if (r.completion > r.deadline->deadline) ++missed;
    }
    if (total == 0) return std::nullopt;
    return static_cast<double>(missed) / static_cast<double>(total);
}

std::optional<double> average_lateness(std::span<const CompletionRecord> records) {
    std::size_t total = 0;
    double sum = 0.0;
    for (const CompletionRecord& r : records) {
        if (!r.is_deadline() || r.deadline->softness != Softness::Soft) continue;
        ++total;
        sum += std::max(0.0, r.completion - r.deadline->deadline);
    }
    if (total == 0) return std::nullopt;
    return sum / static_cast<double>(total);
}

MetricsReport compute_metrics(std::span<const CompletionRecord> records,
                              double tail_percentile) {
    MetricsReport report;
    if (auto stats = fct_stats(records, tail_percentile)) {
        report.afct = stats->afct;
        report.mfct = stats->mfct;
        report.tfct = stats->tfct;
    }
    report.dmr = deadline_miss_rate(records);
    report.avg_lateness = average_lateness(records);
    for (const CompletionRecord& r : records) {
        if (!r.is_deadline()) {
            ++report.counts.regular;
            continue;
        }
        ++report.counts.deadline;
        if (r.deadline->softness == Softness::Soft) ++report.counts.soft_deadline;
        if (r.completion > r.deadline->deadline) ++report.counts.missed;
    }
    return report;
}

std::vector<double> normalize_by_minimum(std::span<const double> values) {
    if (values.empty()) return {};
    double min = values.front();
    for (double v : values) {
        if (!(v > 0.0))
            throw ConfigError("normalize_by_minimum requires strictly positive values");
        min = std::min(min, v);
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(v / min);
    return out;
}

}  // namespace flowsim
