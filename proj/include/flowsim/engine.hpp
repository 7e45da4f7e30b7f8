#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "flowsim/policy.hpp"
#include "flowsim/types.hpp"

namespace flowsim {

struct SimConfig {
    double capacity = 1.0;
    double slot_length = 0.1;
    PolicyKind policy = PolicyKind::Fcfs;
};

// Slotted single-link simulator. Time advances in slots of fixed length; at
// each slot boundary newly arrived flows become visible, the policy assigns
// one rate per active flow, and rates stay constant for the whole slot.
// Arrivals inside a slot wait for the next boundary. A flow whose remaining
// volume reaches zero completes at the exact instant slot_start + rem / rate;
// capacity it frees stays idle until the next boundary.
//
// Remaining volume below 1e-12 counts as zero (guards accumulated float
// error from creating zombie flows).
class Simulator {
public:
    // Workload must be sorted by (arrival, id) with unique ids and positive
    // volumes; config.capacity and config.slot_length must be positive.
    // Throws ConfigError otherwise.
    Simulator(std::vector<FlowSpec> workload, SimConfig config);

    struct StepResult {
        Allocation allocation;  // rates applied during this slot
        std::vector<CompletionRecord> completions;
    };

    // Advance exactly one slot.
    StepResult step();

    // Run until every flow completes. Completion records are chronological;
    // use completions() or the free function run() afterwards.
    void run_to_completion();

    bool finished() const { return completed_.size() == flows_.size(); }
    double now() const { return static_cast<double>(slot_) * config_.slot_length; }
    std::size_t pending_count() const { return flows_.size() - next_arrival_; }
    std::size_t active_count() const { return live_count_; }
    const std::vector<CompletionRecord>& completions() const { return completed_; }

    // Snapshot of the active set (true remaining volumes), ascending by id.
    std::vector<ActiveFlow> active_flows() const;

private:
    struct Entry {
        ActiveFlow flow;  // under FairSharing, .remaining stores rem + offset baked at insert
        double volume = 0.0;
        bool live = false;
    };

    static constexpr std::uint32_t kNone = static_cast<std::uint32_t>(-1);
    static constexpr double kZeroRemaining = 1e-12;

    void activate_arrivals();
    void advance_slot(Allocation* capture, std::vector<CompletionRecord>* slot_completions);
    void skip_idle_gap();

    void insert_flow(std::uint32_t h);
    std::uint32_t pop_next_priority();
    void reinsert_served(std::uint32_t h);
    void complete_flow(std::uint32_t h, double completion_time);

    double true_remaining(const Entry& e) const;

    // heap helpers over arena indices
    bool heap_less(std::uint32_t a, std::uint32_t b, bool edf_key) const;
    void heap_push(std::vector<std::uint32_t>& heap, std::uint32_t h, bool edf_key);
    std::uint32_t heap_pop(std::vector<std::uint32_t>& heap, bool edf_key);

    std::vector<FlowSpec> flows_;  // sorted by (arrival, id)
    SimConfig config_;

    std::size_t next_arrival_ = 0;
    std::int64_t slot_ = 0;

    std::vector<Entry> arena_;
    std::vector<std::uint32_t> free_slots_;
    std::size_t live_count_ = 0;

    // Policy queues; which ones are used depends on config_.policy.
    std::deque<std::uint32_t> fifo_;        // FCFS order (insertion == arrival order)
    std::vector<std::uint32_t> heap_;       // SRPT or FairSharing key
    std::vector<std::uint32_t> dl_heap_;    // EDF key, deadline partition of combos
    double fair_offset_ = 0.0;              // cumulative equal share under FairSharing

    std::vector<std::pair<std::uint32_t, double>> served_;  // scratch
    std::vector<CompletionRecord> completed_;
};

// Convenience wrapper: simulate the whole workload, return one record per
// flow sorted by id.
std::vector<CompletionRecord> run(std::vector<FlowSpec> workload,
                                  const SimConfig& config);

}  // namespace flowsim
