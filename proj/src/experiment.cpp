#include "flowsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "flowsim/engine.hpp"
#include "flowsim/errors.hpp"

namespace flowsim {

using nlohmann::json;

std::string_view distribution_name(SizeDistribution::Kind kind) {
    return kind == SizeDistribution::Kind::Exponential ? "exp" : "pareto";
}

SizeDistribution::Kind parse_distribution(std::string_view name) {
    if (name == "exp" || name == "exponential") return SizeDistribution::Kind::Exponential;
    if (name == "pareto") return SizeDistribution::Kind::Pareto;
    throw ConfigError("unknown distribution '" + std::string(name) + "': expected exp or pareto");
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void validate(const ExperimentConfig& c) {
    if (c.policies.empty()) throw ConfigError("policies: list must be non-empty");
    if (c.regular_fractions.empty())
        throw ConfigError("regular_fractions: list must be non-empty");
    for (double f : c.regular_fractions)
        if (!(f > 0.0) || !(f < 1.0))
            throw ConfigError("regular_fractions: values must lie strictly inside (0, 1)");
    if (c.distributions.empty()) throw ConfigError("distributions: list must be non-empty");
    if (c.arrival_rates.empty()) throw ConfigError("arrival_rates: list must be non-empty");
    for (double r : c.arrival_rates)
        if (!(r > 0.0)) throw ConfigError("arrival_rates: values must be positive");
    if (c.flow_count == 0) throw ConfigError("flow_count: must be positive");
    if (c.repetitions == 0) throw ConfigError("repetitions: must be >= 1");
    if (!(c.delta > 0.0)) throw ConfigError("delta: must be positive");
    if (!(c.capacity > 0.0)) throw ConfigError("capacity: must be positive");
    if (!(c.mean_size > 0.0)) throw ConfigError("mean_size: must be positive");
    for (SizeDistribution::Kind d : c.distributions)
        if (d == SizeDistribution::Kind::Pareto && !(c.mean_size > c.pareto_min))
            throw ConfigError("pareto_min: must be smaller than mean_size");
    if (!(c.pareto_min > 0.0)) throw ConfigError("pareto_min: must be positive");
    if (!(c.slack.low >= 1.0)) throw ConfigError("slack.low: must be >= 1");
    if (!(c.slack.high >= c.slack.low)) throw ConfigError("slack.high: must be >= slack.low");
    if (!(c.soft_multiplier > 0.0)) throw ConfigError("soft_multiplier: must be positive");
    if (!(c.tail_percentile > 0.0) || c.tail_percentile > 1.0)
        throw ConfigError("tail_percentile: must lie in (0, 1]");
}

ExperimentConfig experiment_config_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

    static const char* known[] = {
        "policies",     "regular_fractions", "distributions", "arrival_rates",
        "flow_count",   "repetitions",       "base_seed",     "delta",
        "capacity",     "mean_size",         "pareto_min",    "slack",
        "soft_multiplier", "tail_percentile"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
                return it.key() == k;
            }) == std::end(known))
            throw ConfigError("unknown config field '" + it.key() + "'");
    }

    ExperimentConfig config;
    try {
        if (doc.contains("policies")) {
            config.policies.clear();
            for (const auto& p : doc["policies"])
                config.policies.push_back(parse_policy(p.get<std::string>()));
        }
        if (doc.contains("regular_fractions"))
            config.regular_fractions = doc["regular_fractions"].get<std::vector<double>>();
        if (doc.contains("distributions")) {
            config.distributions.clear();
            for (const auto& d : doc["distributions"])
                config.distributions.push_back(parse_distribution(d.get<std::string>()));
        }
        if (doc.contains("arrival_rates"))
            config.arrival_rates = doc["arrival_rates"].get<std::vector<double>>();
        if (doc.contains("flow_count")) config.flow_count = doc["flow_count"].get<std::size_t>();
        if (doc.contains("repetitions")) config.repetitions = doc["repetitions"].get<std::size_t>();
        if (doc.contains("base_seed")) config.base_seed = doc["base_seed"].get<std::uint64_t>();
        if (doc.contains("delta")) config.delta = doc["delta"].get<double>();
        if (doc.contains("capacity")) config.capacity = doc["capacity"].get<double>();
        if (doc.contains("mean_size")) config.mean_size = doc["mean_size"].get<double>();
        if (doc.contains("pareto_min")) config.pareto_min = doc["pareto_min"].get<double>();
        if (doc.contains("slack")) {
            const auto& s = doc["slack"];
            if (!s.is_object() || !s.contains("low") || !s.contains("high"))
                throw ConfigError("slack: expected an object {\"low\": .., \"high\": ..}");
            config.slack.low = s["low"].get<double>();
            config.slack.high = s["high"].get<double>();
        }
        if (doc.contains("soft_multiplier"))
            config.soft_multiplier = doc["soft_multiplier"].get<double>();
        if (doc.contains("tail_percentile"))
            config.tail_percentile = doc["tail_percentile"].get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config value: ") + e.what());
    }
    validate(config);
    return config;
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
    json doc;
    for (PolicyKind p : c.policies) doc["policies"].push_back(std::string(policy_name(p)));
    doc["regular_fractions"] = c.regular_fractions;
    for (SizeDistribution::Kind d : c.distributions)
        doc["distributions"].push_back(std::string(distribution_name(d)));
    doc["arrival_rates"] = c.arrival_rates;
    doc["flow_count"] = c.flow_count;
    doc["repetitions"] = c.repetitions;
    doc["base_seed"] = c.base_seed;
    doc["delta"] = c.delta;
    doc["capacity"] = c.capacity;
    doc["mean_size"] = c.mean_size;
    doc["pareto_min"] = c.pareto_min;
    doc["slack"] = {{"low", c.slack.low}, {"high", c.slack.high}};
    doc["soft_multiplier"] = c.soft_multiplier;
    doc["tail_percentile"] = c.tail_percentile;
    return doc.dump(2);
}

AggregateMetrics aggregate(const std::vector<MetricsReport>& replications) {
    AggregateMetrics agg;
    auto mean_of = [&](auto field) -> std::optional<double> {
        double sum = 0.0;
        std::size_t n = 0;
        for (const MetricsReport& r : replications) {
            if (const auto& v = r.*field) {
                sum += *v;
                ++n;
            }
        }
        if (n == 0) return std::nullopt;
        return sum / static_cast<double>(n);
    };
    agg.afct = mean_of(&MetricsReport::afct);
    agg.mfct = mean_of(&MetricsReport::mfct);
    agg.tfct = mean_of(&MetricsReport::tfct);
    agg.dmr = mean_of(&MetricsReport::dmr);
    agg.avg_lateness = mean_of(&MetricsReport::avg_lateness);
    return agg;
}

std::vector<GridCellResult> run_experiment(
    const ExperimentConfig& config, unsigned threads,
    const std::function<void(std::size_t, std::size_t)>& progress) {
    validate(config);

    struct Unit {
        std::size_t dist, rate, fraction, rep;
    };
    std::vector<Unit> units;
    for (std::size_t d = 0; d < config.distributions.size(); ++d)
        for (std::size_t r = 0; r < config.arrival_rates.size(); ++r)
            for (std::size_t f = 0; f < config.regular_fractions.size(); ++f)
                for (std::size_t rep = 0; rep < config.repetitions; ++rep)
                    units.push_back({d, r, f, rep});

    const std::size_t policies = config.policies.size();
    const std::size_t cells_per_unit_group = config.regular_fractions.size() * policies;
    auto cell_index = [&](std::size_t d, std::size_t r, std::size_t f, std::size_t p) {
        return ((d * config.arrival_rates.size() + r) * config.regular_fractions.size() + f) *
                   policies + p;
    };

    std::vector<GridCellResult> results(config.distributions.size() *
                                        config.arrival_rates.size() * cells_per_unit_group);
    for (std::size_t d = 0; d < config.distributions.size(); ++d)
        for (std::size_t r = 0; r < config.arrival_rates.size(); ++r)
            for (std::size_t f = 0; f < config.regular_fractions.size(); ++f)
                for (std::size_t p = 0; p < policies; ++p) {
                    GridCellResult& cell = results[cell_index(d, r, f, p)];
                    cell.distribution = config.distributions[d];
                    cell.arrival_rate = config.arrival_rates[r];
                    cell.regular_fraction = config.regular_fractions[f];
                    cell.policy = config.policies[p];
                    cell.replications.resize(config.repetitions);
                    cell.workload_hashes.resize(config.repetitions);
                }

    // Every policy of a cell replays the identical workload of its
    // replication (seed = base_seed + rep): paired comparison by design.
    auto run_unit = [&](const Unit& u) {
        WorkloadConfig wc;
        wc.arrival_rate = config.arrival_rates[u.rate];
        wc.flow_count = config.flow_count;
        wc.size_dist.kind = config.distributions[u.dist];
        wc.size_dist.mean = config.mean_size;
        wc.size_dist.minimum = config.pareto_min;
        wc.regular_fraction = config.regular_fractions[u.fraction];
        wc.deadline_slack = config.slack;
        wc.soft_threshold_multiplier = config.soft_multiplier;
        wc.seed = config.base_seed + u.rep;
        const std::vector<FlowSpec> workload = generate_workload(wc, config.capacity);
        const std::uint64_t hash = workload_hash(workload);

        for (std::size_t p = 0; p < policies; ++p) {
            SimConfig sc{config.capacity, config.delta, config.policies[p]};
            const auto records = run(workload, sc);
            GridCellResult& cell = results[cell_index(u.dist, u.rate, u.fraction, p)];
            cell.replications[u.rep] = compute_metrics(records, config.tail_percentile);
            cell.workload_hashes[u.rep] = hash;
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, units.size()));

    if (threads <= 1) {
        for (std::size_t i = 0; i < units.size(); ++i) {
            run_unit(units[i]);
            if (progress) progress(i + 1, units.size());
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<std::size_t> done{0};
        std::mutex error_mutex;
        std::exception_ptr error;
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= units.size()) return;
                    try {
                        run_unit(units[i]);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        return;
                    }
                    const std::size_t d = done.fetch_add(1) + 1;
                    if (progress) progress(d, units.size());
                }
            });
        }
        for (std::thread& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }

    for (GridCellResult& cell : results) cell.mean = aggregate(cell.replications);
    return results;
}

namespace {

std::string csv_field(const std::optional<double>& v) {
    return v ? format_value(*v) : std::string();
}

}  // namespace

std::string emit_csv(const std::vector<GridCellResult>& results) {
    if (results.empty()) throw ConfigError("emit_csv: no results");

    std::vector<const GridCellResult*> rows;
    rows.reserve(results.size());
    for (const GridCellResult& r : results) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(), [](const GridCellResult* a, const GridCellResult* b) {
        if (a->distribution != b->distribution) return a->distribution < b->distribution;
        if (a->arrival_rate != b->arrival_rate) return a->arrival_rate < b->arrival_rate;
        if (a->regular_fraction != b->regular_fraction)
            return a->regular_fraction < b->regular_fraction;
        return a->policy < b->policy;
    });

    std::string out =
        "policy,distribution,arrival_rate,regular_fraction,"
        "afct,mfct,tfct,dmr,avg_lateness,afct_norm,mfct_norm,tfct_norm\n";

    auto same_group = [](const GridCellResult* a, const GridCellResult* b) {
        return a->distribution == b->distribution && a->arrival_rate == b->arrival_rate &&
               a->regular_fraction == b->regular_fraction;
    };

    for (std::size_t i = 0; i < rows.size();) {
        std::size_t j = i;
        while (j < rows.size() && same_group(rows[i], rows[j])) ++j;

        // Figure-1 normalization: divide by the group's minimum per metric.
        auto group_min = [&](auto field) -> std::optional<double> {
            std::optional<double> min;
            for (std::size_t k = i; k < j; ++k)
                if (const auto& v = rows[k]->mean.*field)
                    if (!min || *v < *min) min = *v;
            return min;
        };
        const auto min_afct = group_min(&AggregateMetrics::afct);
        const auto min_mfct = group_min(&AggregateMetrics::mfct);
        const auto min_tfct = group_min(&AggregateMetrics::tfct);

        auto norm = [](const std::optional<double>& v,
                       const std::optional<double>& min) -> std::optional<double> {
            if (!v || !min || !(*min > 0.0)) return std::nullopt;
            return *v / *min;
        };

        for (std::size_t k = i; k < j; ++k) {
            const GridCellResult& r = *rows[k];
            out += std::string(policy_name(r.policy)) + ',';
            out += std::string(distribution_name(r.distribution)) + ',';
            out += format_value(r.arrival_rate) + ',';
            out += format_value(r.regular_fraction) + ',';
            out += csv_field(r.mean.afct) + ',';
            out += csv_field(r.mean.mfct) + ',';
            out += csv_field(r.mean.tfct) + ',';
            out += csv_field(r.mean.dmr) + ',';
            out += csv_field(r.mean.avg_lateness) + ',';
            out += csv_field(norm(r.mean.afct, min_afct)) + ',';
            out += csv_field(norm(r.mean.mfct, min_mfct)) + ',';
            out += csv_field(norm(r.mean.tfct, min_tfct));
            out += '\n';
        }
        i = j;
    }
    return out;
}

}  // namespace flowsim
