#include "flowsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

#include "flowsim/errors.hpp"

namespace flowsim {

namespace {

constexpr double kZeroRemaining = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct LiveFlow {
    ActiveFlow flow;
    double volume = 0.0;
    double rate = 0.0;
};

// Rate assignment between events. Serial policies hand the whole link to the
// highest-priority flow; FairSharing is egalitarian processor sharing.
void assign_rates(PolicyKind policy, std::vector<LiveFlow>& live, double capacity) {
    for (LiveFlow& f : live) f.rate = 0.0;
    if (live.empty()) return;

    if (policy == PolicyKind::FairSharing) {
        const double share = capacity / static_cast<double>(live.size());
        for (LiveFlow& f : live) f.rate = share;
        return;
    }

    auto head_of = [&](auto&& better, bool want_deadline,
                       bool filter) -> LiveFlow* {
        LiveFlow* best = nullptr;
        for (LiveFlow& f : live) {
            if (filter && f.flow.is_deadline() != want_deadline) continue;
            if (!best || better(f.flow, best->flow)) best = &f;
        }
        return best;
    };

    LiveFlow* head = nullptr;
    switch (policy) {
        case PolicyKind::Fcfs:
            head = head_of(fcfs_before, false, false);
            break;
        case PolicyKind::Srpt:
            head = head_of(srpt_before, false, false);
            break;
        case PolicyKind::EdfFcfsDf:
            head = head_of(edf_before, true, true);
            if (!head) head = head_of(fcfs_before, false, true);
            break;
        case PolicyKind::EdfSrptDf:
            head = head_of(edf_before, true, true);
            if (!head) head = head_of(srpt_before, false, true);
            break;
        case PolicyKind::EdfFcfsDl:
            head = head_of(fcfs_before, false, true);
            if (!head) head = head_of(edf_before, true, true);
            break;
        case PolicyKind::EdfSrptDl:
            head = head_of(srpt_before, false, true);
            if (!head) head = head_of(edf_before, true, true);
            break;
        default:
            throw InvariantError("assign_rates: unhandled policy");
    }
    head->rate = capacity;
}

std::vector<CompletionRecord> event_loop(
    std::span<const FlowSpec> workload,
    const std::function<void(std::vector<LiveFlow>&)>& assign) {
    std::vector<LiveFlow> live;
    std::vector<CompletionRecord> records;
    records.reserve(workload.size());
    std::size_t next = 0;
    double t = workload.empty() ? 0.0 : workload.front().arrival;

    while (next < workload.size() || !live.empty()) {
        if (live.empty()) {
            t = std::max(t, workload[next].arrival);
            while (next < workload.size() && workload[next].arrival <= t) {
                const FlowSpec& f = workload[next++];
                live.push_back({ActiveFlow{f.id, f.arrival, f.volume, f.deadline}, f.volume, 0.0});
            }
        }

        assign(live);

        // Earliest completion under the current constant rates.
        double dt_complete = kInf;
        for (const LiveFlow& f : live)
            if (f.rate > 0.0) dt_complete = std::min(dt_complete, f.flow.remaining / f.rate);

        const double next_arrival = next < workload.size() ? workload[next].arrival : kInf;
        const double dt_arrival = next_arrival - t;
        const double dt = std::min(dt_complete, dt_arrival);
        if (!(dt >= 0.0) || dt == kInf)
            throw InvariantError("oracle: no progress event (corrupt instance?)");

        for (LiveFlow& f : live)
            if (f.rate > 0.0) f.flow.remaining -= f.rate * dt;
        t += dt;

        for (std::size_t i = 0; i < live.size();) {
            if (live[i].flow.remaining <= kZeroRemaining) {
                records.push_back(CompletionRecord{live[i].flow.id, live[i].flow.arrival,
                                                   live[i].volume, live[i].flow.deadline, t});
                live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
            } else {
                ++i;
            }
        }
        while (next < workload.size() && workload[next].arrival <= t) {
            const FlowSpec& f = workload[next++];
            live.push_back({ActiveFlow{f.id, f.arrival, f.volume, f.deadline}, f.volume, 0.0});
        }
    }

    std::sort(records.begin(), records.end(),
              [](const CompletionRecord& a, const CompletionRecord& b) { return a.id < b.id; });
    return records;
}

}  // namespace

std::vector<CompletionRecord> simulate_exact(std::span<const FlowSpec> workload,
                                             PolicyKind policy, double capacity) {
    if (!(capacity > 0.0)) throw ConfigError("capacity must be positive");
    return event_loop(workload, [policy, capacity](std::vector<LiveFlow>& live) {
        assign_rates(policy, live, capacity);
    });
}

std::vector<CompletionRecord> simulate_priority_list(
    std::span<const FlowSpec> workload, double capacity,
    std::span<const std::uint64_t> priority) {
    if (!(capacity > 0.0)) throw ConfigError("capacity must be positive");
    std::unordered_map<std::uint64_t, std::size_t> rank;
    rank.reserve(priority.size());
    for (std::size_t i = 0; i < priority.size(); ++i) rank.emplace(priority[i], i);
    for (const FlowSpec& f : workload)
        if (!rank.count(f.id))
            throw ConfigError("priority list is missing flow " + std::to_string(f.id));

    return event_loop(workload, [&rank, capacity](std::vector<LiveFlow>& live) {
        for (LiveFlow& f : live) f.rate = 0.0;
        if (live.empty()) return;
        LiveFlow* best = nullptr;
        for (LiveFlow& f : live)
            if (!best || rank.at(f.flow.id) < rank.at(best->flow.id)) best = &f;
        best->rate = capacity;
    });
}

}  // namespace flowsim
