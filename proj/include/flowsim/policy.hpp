#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowsim/types.hpp"

namespace flowsim {

// The seven scheduling policies under comparison. The EDF combinations split
// traffic into a deadline partition (ordered by EDF) and a regular partition
// (ordered by the named companion policy); DF gives the deadline partition
// strict priority, DL the regular partition.
enum class PolicyKind {
    Fcfs,
    Srpt,
    FairSharing,
    EdfFcfsDf,
    EdfSrptDf,
    EdfFcfsDl,
    EdfSrptDl,
};

inline constexpr PolicyKind kAllPolicies[] = {
    PolicyKind::Fcfs,        PolicyKind::Srpt,      PolicyKind::FairSharing,
    PolicyKind::EdfFcfsDf,   PolicyKind::EdfSrptDf, PolicyKind::EdfFcfsDl,
    PolicyKind::EdfSrptDl,
};

// Canonical names: fcfs, srpt, fair, edf-fcfs-df, edf-srpt-df, edf-fcfs-dl,
// edf-srpt-dl. parse_policy throws ConfigError on anything else.
std::string_view policy_name(PolicyKind kind);
PolicyKind parse_policy(std::string_view name);

// A flow visible to the allocator: arrived, not yet finished.
struct ActiveFlow {
    std::uint64_t id = 0;
    double arrival = 0.0;
    double remaining = 0.0;  // > 0
    std::optional<DeadlineInfo> deadline;

    bool is_deadline() const { return deadline.has_value(); }
};

// Per-slot rate assignment, flow id -> rate. Every active flow appears,
// including those assigned rate 0.
using Allocation = std::map<std::uint64_t, double>;

double allocation_total(const Allocation& alloc);

// Strict total orders used by both the slotted engine and the exact oracle.
// Ties fall through to arrival time, then id.
bool fcfs_before(const ActiveFlow& a, const ActiveFlow& b);
bool srpt_before(const ActiveFlow& a, const ActiveFlow& b);
bool edf_before(const ActiveFlow& a, const ActiveFlow& b);

// Priority lists (highest priority first).
std::vector<ActiveFlow> order_fcfs(std::span<const ActiveFlow> active);
std::vector<ActiveFlow> order_srpt(std::span<const ActiveFlow> active);
// Input must be deadline flows only; throws InvariantError otherwise.
std::vector<ActiveFlow> order_edf(std::span<const ActiveFlow> active);

// Serial allocation: walk the priority list, give each flow
// min(residual capacity, remaining / slot_length), stop when the link is full.
Allocation allocate_by_priority(std::span<const ActiveFlow> ordered,
                                double capacity, double slot_length);

// Max-min fairness over demand rates (water-filling).
Allocation allocate_fair(std::span<const ActiveFlow> active, double capacity,
                         double slot_length);

enum class RegularPolicy { Fcfs, Srpt };
enum class DeadlinePriority { DeadlineFirst, DeadlineLast };

// Two-partition allocation used by the four EDF combinations.
Allocation allocate_edf_combo(std::span<const ActiveFlow> active,
                              double capacity, double slot_length,
                              RegularPolicy regular_policy,
                              DeadlinePriority priority);

// Policy dispatch. Work-conserving: the allocated total equals
// min(capacity, sum of demand rates).
Allocation allocate(PolicyKind policy, std::span<const ActiveFlow> active,
                    double capacity, double slot_length);

}  // namespace flowsim
