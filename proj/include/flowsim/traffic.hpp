#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flowsim/rng.hpp"
#include "flowsim/types.hpp"

namespace flowsim {

// Flow size distribution. Exponential uses only `mean`; Pareto uses
// (mean, minimum) and derives the shape so both distributions match in mean.
struct SizeDistribution {
    enum class Kind { Exponential, Pareto };

    Kind kind = Kind::Exponential;
    double mean = 1.0;
    double minimum = 0.1;  // Pareto only

    static SizeDistribution exponential(double mean) {
        return {Kind::Exponential, mean, 0.0};
    }
    static SizeDistribution pareto(double mean, double minimum) {
        return {Kind::Pareto, mean, minimum};
    }
};

// Pareto shape forced by matching the mean: alpha * minimum / (alpha - 1) = mean.
// Throws ConfigError unless mean > minimum > 0.
double pareto_shape(double mean, double minimum);

// Quantile transforms, exposed so sampling is testable at fixed u.
double exponential_quantile(double mean, double u);
double pareto_quantile(double minimum, double shape, double u);

// One size sample from `dist`. Always > 0; Pareto samples are >= dist.minimum.
double sample_size(const SizeDistribution& dist, Rng& rng);

// `count` strictly increasing Poisson arrival times (i.i.d. exponential gaps
// with mean 1/rate), starting from time 0.
std::vector<double> gen_arrivals(double rate, std::size_t count, Rng& rng);

// True iff the flow is regular; drawn Bernoulli(regular_fraction).
bool assign_class_regular(Rng& rng, double regular_fraction);

// Uniform slack multiplier range applied to a flow's ideal transfer time.
struct SlackRange {
    double low = 10.0;
    double high = 30.0;
};

// deadline = arrival + s * volume / capacity with s uniform in [low, high].
// slack.low >= 1 keeps every deadline feasible on an idle link.
double assign_deadline(double arrival, double volume, double capacity,
                       SlackRange slack, Rng& rng);

// Soft iff volume is strictly greater than multiplier * mean_size.
Softness classify_softness(double volume, double mean_size, double multiplier);

struct WorkloadConfig {
    double arrival_rate = 1.0;  // flows per time unit
    std::size_t flow_count = 10000;
    SizeDistribution size_dist;
    double regular_fraction = 0.5;  // target fraction of traffic that is regular
    SlackRange deadline_slack;
    double soft_threshold_multiplier = 2.0;
    std::uint64_t seed = 1;
};

// Full synthetic workload: arrivals, sizes, classes, deadlines, softness.
// Deterministic in (config, capacity). Flows are id-ordered by arrival.
std::vector<FlowSpec> generate_workload(const WorkloadConfig& config,
                                        double capacity = 1.0);

// Line-delimited text form, one flow per line:
//   id arrival volume regular
//   id arrival volume deadline <deadline> <soft|hard>
std::string dump_workload(std::span<const FlowSpec> flows);
std::vector<FlowSpec> load_workload(std::istream& in);
std::vector<FlowSpec> load_workload_text(const std::string& text);

// FNV-1a over the binary content of the workload; used to audit that paired
// replications really see identical traffic.
std::uint64_t workload_hash(std::span<const FlowSpec> flows);

}  // namespace flowsim
