#include "flowsim/policy.hpp"

#include <algorithm>
#include <string>

#include "flowsim/errors.hpp"

namespace flowsim {

std::string_view policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Fcfs: return "fcfs";
        case PolicyKind::Srpt: return "srpt";
        case PolicyKind::FairSharing: return "fair";
        case PolicyKind::EdfFcfsDf: return "edf-fcfs-df";
        case PolicyKind::EdfSrptDf: return "edf-srpt-df";
        case PolicyKind::EdfFcfsDl: return "edf-fcfs-dl";
        case PolicyKind::EdfSrptDl: return "edf-srpt-dl";
    }
    throw InvariantError("unreachable policy kind");
}

PolicyKind parse_policy(std::string_view name) {
    for (PolicyKind kind : kAllPolicies)
        if (name == policy_name(kind)) return kind;
    throw ConfigError("unknown policy '" + std::string(name) +
                      "': expected one of fcfs, srpt, fair, edf-fcfs-df, "
                      "edf-srpt-df, edf-fcfs-dl, edf-srpt-dl");
}

double allocation_total(const Allocation& alloc) {
    double total = 0.0;
    for (const auto& [id, rate] : alloc) total += rate;
    return total;
}

bool fcfs_before(const ActiveFlow& a, const ActiveFlow& b) {
    if (a.arrival != b.arrival) return a.arrival < b.arrival;
    return a.id < b.id;
}

bool srpt_before(const ActiveFlow& a, const ActiveFlow& b) {
    if (a.remaining != b.remaining) return a.remaining < b.remaining;
    return fcfs_before(a, b);
}

bool edf_before(const ActiveFlow& a, const ActiveFlow& b) {
    if (a.deadline->deadline != b.deadline->deadline)
        return a.deadline->deadline < b.deadline->deadline;
    return fcfs_before(a, b);
}

std::vector<ActiveFlow> order_fcfs(std::span<const ActiveFlow> active) {
    std::vector<ActiveFlow> out(active.begin(), active.end());
    std::sort(out.begin(), out.end(), fcfs_before);
    return out;
}

std::vector<ActiveFlow> order_srpt(std::span<const ActiveFlow> active) {
    std::vector<ActiveFlow> out(active.begin(), active.end());
    std::sort(out.begin(), out.end(), srpt_before);
    return out;
}

std::vector<ActiveFlow> order_edf(std::span<const ActiveFlow> active) {
    for (const ActiveFlow& f : active)
        if (!f.is_deadline())
            throw InvariantError("order_edf received a regular flow; caller must partition");
    std::vector<ActiveFlow> out(active.begin(), active.end());
    std::sort(out.begin(), out.end(), edf_before);
    return out;
}

Allocation allocate_by_priority(std::span<const ActiveFlow> ordered,
                                double capacity, double slot_length) {
    Allocation alloc;
    double residual = capacity;
    for (const ActiveFlow& f : ordered) {
        double rate = 0.0;
        if (residual > 0.0) {
            const double demand = f.remaining / slot_length;
            rate = std::min(residual, demand);
            residual -= rate;
        }
        alloc.emplace(f.id, rate);
    }
    return alloc;
}

Allocation allocate_fair(std::span<const ActiveFlow> active, double capacity,
                         double slot_length) {
    const std::size_t n = active.size();
    std::vector<std::uint32_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        return srpt_before(active[a], active[b]);
    });

    Allocation alloc;
    double residual = capacity;
    std::size_t left = n;
    for (std::size_t i = 0; i < n; ++i) {
        const ActiveFlow& f = active[idx[i]];
        const double share = residual / static_cast<double>(left);
        const double demand = f.remaining / slot_length;
        if (demand <= share) {
            // Below its fair share: satisfied in full, excess flows down.
            alloc.emplace(f.id, demand);
            residual -= demand;
            --left;
        } else {
            // Everyone still unsatisfied has demand >= share; equal split.
            for (std::size_t j = i; j < n; ++j)
                alloc.emplace(active[idx[j]].id, share);
            return alloc;
        }
    }
    return alloc;
}

namespace {

void check_positive_remaining(std::span<const ActiveFlow> active) {
    for (const ActiveFlow& f : active)
        if (!(f.remaining > 0.0))
            throw InvariantError("active flow " + std::to_string(f.id) +
                                 " has non-positive remaining volume");
}

}  // namespace

Allocation allocate_edf_combo(std::span<const ActiveFlow> active,
                              double capacity, double slot_length,
                              RegularPolicy regular_policy,
                              DeadlinePriority priority) {
    std::vector<ActiveFlow> deadline_part;
    std::vector<ActiveFlow> regular_part;
    for (const ActiveFlow& f : active)
        (f.is_deadline() ? deadline_part : regular_part).push_back(f);

    std::sort(deadline_part.begin(), deadline_part.end(), edf_before);
    std::sort(regular_part.begin(), regular_part.end(),
              regular_policy == RegularPolicy::Fcfs ? fcfs_before : srpt_before);

    std::vector<ActiveFlow> ordered;
    ordered.reserve(active.size());
    if (priority == DeadlinePriority::DeadlineFirst) {
        ordered.insert(ordered.end(), deadline_part.begin(), deadline_part.end());
        ordered.insert(ordered.end(), regular_part.begin(), regular_part.end());
    } else {
        ordered.insert(ordered.end(), regular_part.begin(), regular_part.end());
        ordered.insert(ordered.end(), deadline_part.begin(), deadline_part.end());
    }
    return allocate_by_priority(ordered, capacity, slot_length);
}

Allocation allocate(PolicyKind policy, std::span<const ActiveFlow> active,
                    double capacity, double slot_length) {
    if (!(capacity > 0.0)) throw ConfigError("capacity must be positive");
    if (!(slot_length > 0.0)) throw ConfigError("slot_length must be positive");
    check_positive_remaining(active);

    switch (policy) {
        case PolicyKind::Fcfs:
            return allocate_by_priority(order_fcfs(active), capacity, slot_length);
        case PolicyKind::Srpt:
            return allocate_by_priority(order_srpt(active), capacity, slot_length);
        case PolicyKind::FairSharing:
            return allocate_fair(active, capacity, slot_length);
        case PolicyKind::EdfFcfsDf:
            return allocate_edf_combo(active, capacity, slot_length,
                                      RegularPolicy::Fcfs, DeadlinePriority::DeadlineFirst);
        case PolicyKind::EdfSrptDf:
            return allocate_edf_combo(active, capacity, slot_length,
                                      RegularPolicy::Srpt, DeadlinePriority::DeadlineFirst);
        case PolicyKind::EdfFcfsDl:
            return allocate_edf_combo(active, capacity, slot_length,
                                      RegularPolicy::Fcfs, DeadlinePriority::DeadlineLast);
        case PolicyKind::EdfSrptDl:
            return allocate_edf_combo(active, capacity, slot_length,
                                      RegularPolicy::Srpt, DeadlinePriority::DeadlineLast);
    }
    throw ConfigError("unknown policy kind");
}

}  // namespace flowsim
