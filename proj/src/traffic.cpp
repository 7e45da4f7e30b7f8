#include "flowsim/traffic.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "flowsim/errors.hpp"

namespace flowsim {

double pareto_shape(double mean, double minimum) {
    if (!(minimum > 0.0))
        throw ConfigError("pareto minimum must be positive");
    if (!(mean > minimum))
        throw ConfigError("pareto mean must exceed the minimum for a finite-mean shape");
    // alpha * minimum / (alpha - 1) = mean  =>  alpha = mean / (mean - minimum)
    return mean / (mean - minimum);
}

double exponential_quantile(double mean, double u) {
    return -mean * std::log1p(-u);
}

double pareto_quantile(double minimum, double shape, double u) {
    return minimum * std::pow(1.0 - u, -1.0 / shape);
}

double sample_size(const SizeDistribution& dist, Rng& rng) {
    if (!(dist.mean > 0.0)) throw ConfigError("size distribution mean must be positive");
    switch (dist.kind) {
        case SizeDistribution::Kind::Exponential:
            return rng.exponential(dist.mean);
        case SizeDistribution::Kind::Pareto: {
            const double alpha = pareto_shape(dist.mean, dist.minimum);
            return pareto_quantile(dist.minimum, alpha, rng.uniform01());
        }
    }
    throw ConfigError("unknown size distribution");
}

std::vector<double> gen_arrivals(double rate, std::size_t count, Rng& rng) {
    if (!(rate > 0.0)) throw ConfigError("arrival rate must be positive");
    std::vector<double> times;
    times.reserve(count);
    double t = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        t += rng.exponential(1.0 / rate);
        times.push_back(t);
    }
    return times;
}

bool assign_class_regular(Rng& rng, double regular_fraction) {
    if (regular_fraction < 0.0 || regular_fraction > 1.0)
        throw ConfigError("regular_fraction must lie in [0, 1]");
    return rng.uniform01() < regular_fraction;
}

double assign_deadline(double arrival, double volume, double capacity,
                       SlackRange slack, Rng& rng) {
    if (!(slack.low >= 1.0))
        throw ConfigError("slack.low must be >= 1 (deadline infeasible even on an idle link)");
    if (!(slack.high >= slack.low))
        throw ConfigError("slack.high must be >= slack.low");
    const double s = rng.uniform(slack.low, slack.high);
    return arrival + s * (volume / capacity);
}

Softness classify_softness(double volume, double mean_size, double multiplier) {
    return volume > multiplier * mean_size ? Softness::Soft : Softness::Hard;
}

std::vector<FlowSpec> generate_workload(const WorkloadConfig& config, double capacity) {
    if (config.flow_count == 0) return {};
    if (!(capacity > 0.0)) throw ConfigError("capacity must be positive");

    Rng rng(config.seed);
    std::vector<double> arrivals = gen_arrivals(config.arrival_rate, config.flow_count, rng);

    std::vector<FlowSpec> flows;
    flows.reserve(config.flow_count);
    // Draw order per flow is fixed (size, class, slack) so a seed pins the
    // workload bit-exactly.
    for (std::size_t i = 0; i < config.flow_count; ++i) {
        FlowSpec flow;
        flow.id = i;
        flow.arrival = arrivals[i];
        flow.volume = sample_size(config.size_dist, rng);
        if (!assign_class_regular(rng, config.regular_fraction)) {
            DeadlineInfo info;
            info.deadline = assign_deadline(flow.arrival, flow.volume, capacity,
                                            config.deadline_slack, rng);
            info.softness = classify_softness(flow.volume, config.size_dist.mean,
                                              config.soft_threshold_multiplier);
            flow.deadline = info;
        }
        flows.push_back(flow);
    }
    return flows;
}

namespace {

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

std::string dump_workload(std::span<const FlowSpec> flows) {
    std::string out;
    out.reserve(flows.size() * 64);
    for (const FlowSpec& f : flows) {
        out += std::to_string(f.id);
        out += ' ';
        append_double(out, f.arrival);
        out += ' ';
        append_double(out, f.volume);
        if (f.deadline) {
            out += " deadline ";
            append_double(out, f.deadline->deadline);
            out += f.deadline->softness == Softness::Soft ? " soft" : " hard";
        } else {
            out += " regular";
        }
        out += '\n';
    }
    return out;
}

std::vector<FlowSpec> load_workload(std::istream& in) {
    std::vector<FlowSpec> flows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        FlowSpec f;
        std::string cls;
        if (!(ls >> f.id >> f.arrival >> f.volume >> cls))
            throw ConfigError("workload line " + std::to_string(lineno) + ": malformed record");
        if (cls == "deadline") {
            DeadlineInfo info;
            std::string softness;
            if (!(ls >> info.deadline >> softness))
                throw ConfigError("workload line " + std::to_string(lineno) +
                                  ": deadline flow needs deadline and softness");
            if (softness == "soft")
                info.softness = Softness::Soft;
            else if (softness == "hard")
                info.softness = Softness::Hard;
            else
                throw ConfigError("workload line " + std::to_string(lineno) +
                                  ": softness must be soft or hard");
            f.deadline = info;
        } else if (cls != "regular") {
            throw ConfigError("workload line " + std::to_string(lineno) +
                              ": class must be regular or deadline");
        }
        if (!(f.volume > 0.0))
            throw ConfigError("workload line " + std::to_string(lineno) + ": volume must be positive");
        flows.push_back(f);
    }
    return flows;
}

std::vector<FlowSpec> load_workload_text(const std::string& text) {
    std::istringstream in(text);
    return load_workload(in);
}

std::uint64_t workload_hash(std::span<const FlowSpec> flows) {
    constexpr std::uint64_t kOffset = 1469598103934665603ULL;
    constexpr std::uint64_t kPrime = 1099511628211ULL;
    std::uint64_t h = kOffset;
    auto mix = [&h](std::uint64_t bits) {
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffULL;
            h *= kPrime;
        }
    };
    auto mix_double = [&](double v) {
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof v);
        std::memcpy(&bits, &v, sizeof bits);
        mix(bits);
    };
    for (const FlowSpec& f : flows) {
        mix(f.id);
        mix_double(f.arrival);
        mix_double(f.volume);
        if (f.deadline) {
            mix(2 + static_cast<std::uint64_t>(f.deadline->softness == Softness::Soft));
            mix_double(f.deadline->deadline);
        } else {
            mix(1);
        }
    }
    return h;
}

}  // namespace flowsim
