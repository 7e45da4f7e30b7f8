#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flowsim/policy.hpp"
#include "flowsim/types.hpp"

namespace flowsim {

// Exact continuous-time reference scheduler, for testing the slotted engine.
// Between consecutive events (an arrival or a completion) rates are constant:
// serial policies give the whole link to the highest-priority active flow,
// FairSharing splits it equally. Completion instants are computed in closed
// form, so results are exact up to float rounding. Shares the ordering
// comparators of the policy module; only time advancement differs.
//
// Not built for speed; intended for small instances.
std::vector<CompletionRecord> simulate_exact(std::span<const FlowSpec> workload,
                                             PolicyKind policy, double capacity);

// Preemptive fixed-priority schedule: at any instant the live flow that
// appears earliest in `priority` (a permutation of all flow ids) holds the
// link. Used to brute-force deadline feasibility over orderings.
std::vector<CompletionRecord> simulate_priority_list(
    std::span<const FlowSpec> workload, double capacity,
    std::span<const std::uint64_t> priority);

}  // namespace flowsim
