#pragma once

// Randomized instance generators shared by the unit and acceptance suites.
// Test-only; independent of the engine internals they are used to check.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "flowsim/policy.hpp"
#include "flowsim/rng.hpp"
#include "flowsim/traffic.hpp"
#include "flowsim/types.hpp"

namespace flowsim::testsupport {

// Small transient workload: bursty enough to force queueing and preemption.
inline std::vector<FlowSpec> random_workload(Rng& rng, std::size_t max_flows,
                                             bool heavy_tailed,
                                             double deadline_fraction) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() *
                                                       static_cast<double>(max_flows));
    std::vector<FlowSpec> flows;
    flows.reserve(n);
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t += rng.exponential(0.5);
        FlowSpec f;
        f.id = i;
        f.arrival = t;
        f.volume = heavy_tailed ? pareto_quantile(0.1, 10.0 / 9.0, rng.uniform01())
                                : rng.exponential(1.0);
        if (rng.uniform01() < deadline_fraction) {
            DeadlineInfo info;
            info.deadline = f.arrival + rng.uniform(1.0, 4.0) * f.volume;
            info.softness = classify_softness(f.volume, 1.0, 2.0);
            f.deadline = info;
        }
        flows.push_back(f);
    }
    return flows;
}

// Arbitrary active set for allocator properties: duplicate arrivals, tail-end
// remainders below capacity * slot_length, flows already past their deadline.
inline std::vector<ActiveFlow> random_active_set(Rng& rng, std::size_t max_flows,
                                                 double capacity, double slot_length) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() *
                                                       static_cast<double>(max_flows));
    std::vector<ActiveFlow> active;
    active.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ActiveFlow f;
        f.id = i;
        f.arrival = rng.uniform01() < 0.2 ? 1.0 : rng.uniform(0.0, 10.0);
        const double u = rng.uniform01();
        if (u < 0.3)
            f.remaining = rng.uniform(0.0, capacity * slot_length) + 1e-9;
        else if (u < 0.8)
            f.remaining = rng.exponential(1.0);
        else
            f.remaining = pareto_quantile(0.1, 10.0 / 9.0, rng.uniform01());
        if (rng.uniform01() < 0.5) {
            DeadlineInfo info;
            info.deadline = rng.uniform(0.0, 20.0);  // may already be in the past
            info.softness = rng.uniform01() < 0.3 ? Softness::Soft : Softness::Hard;
            f.deadline = info;
        }
        active.push_back(f);
    }
    return active;
}

inline double demand_of(const ActiveFlow& f, double slot_length) {
    return f.remaining / slot_length;
}

inline double total_demand(const std::vector<ActiveFlow>& active, double slot_length) {
    double sum = 0.0;
    for (const ActiveFlow& f : active) sum += demand_of(f, slot_length);
    return sum;
}

}  // namespace flowsim::testsupport
