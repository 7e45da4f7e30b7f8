#include "flowsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "flowsim/errors.hpp"

namespace flowsim {

namespace {

bool uses_fifo_for_regular(PolicyKind p) {
    return p == PolicyKind::Fcfs || p == PolicyKind::EdfFcfsDf ||
           p == PolicyKind::EdfFcfsDl;
}

bool is_edf_combo(PolicyKind p) {
    return p == PolicyKind::EdfFcfsDf || p == PolicyKind::EdfSrptDf ||
           p == PolicyKind::EdfFcfsDl || p == PolicyKind::EdfSrptDl;
}

bool deadline_first(PolicyKind p) {
    return p == PolicyKind::EdfFcfsDf || p == PolicyKind::EdfSrptDf;
}

}  // namespace

Simulator::Simulator(std::vector<FlowSpec> workload, SimConfig config)
    : flows_(std::move(workload)), config_(config) {
    if (!(config_.capacity > 0.0)) throw ConfigError("capacity must be positive");
    if (!(config_.slot_length > 0.0)) throw ConfigError("slot_length must be positive");

    std::unordered_set<std::uint64_t> ids;
    ids.reserve(flows_.size());
    for (std::size_t i = 0; i < flows_.size(); ++i) {
        const FlowSpec& f = flows_[i];
        if (!(f.volume > 0.0))
            throw ConfigError("flow " + std::to_string(f.id) + ": volume must be positive");
        if (f.arrival < 0.0)
            throw ConfigError("flow " + std::to_string(f.id) + ": arrival must be >= 0");
        if (f.deadline && !(f.deadline->deadline > f.arrival))
            throw ConfigError("flow " + std::to_string(f.id) + ": deadline must exceed arrival");
        if (!ids.insert(f.id).second)
            throw ConfigError("duplicate flow id " + std::to_string(f.id));
        if (i > 0) {
            const FlowSpec& prev = flows_[i - 1];
            const bool ordered = prev.arrival < f.arrival ||
                                 (prev.arrival == f.arrival && prev.id < f.id);
            if (!ordered)
                throw ConfigError("workload must be sorted by (arrival, id)");
        }
    }
    arena_.reserve(256);
    served_.reserve(64);
    completed_.reserve(flows_.size());
}

double Simulator::true_remaining(const Entry& e) const {
    if (config_.policy == PolicyKind::FairSharing)
        return e.flow.remaining - fair_offset_;
    return e.flow.remaining;
}

bool Simulator::heap_less(std::uint32_t a, std::uint32_t b, bool edf_key) const {
    const ActiveFlow& fa = arena_[a].flow;
    const ActiveFlow& fb = arena_[b].flow;
    return edf_key ? edf_before(fa, fb) : srpt_before(fa, fb);
}

void Simulator::heap_push(std::vector<std::uint32_t>& heap, std::uint32_t h, bool edf_key) {
    heap.push_back(h);
    std::push_heap(heap.begin(), heap.end(), [this, edf_key](std::uint32_t a, std::uint32_t b) {
        return heap_less(b, a, edf_key);  // min-heap
    });
}

std::uint32_t Simulator::heap_pop(std::vector<std::uint32_t>& heap, bool edf_key) {
    std::pop_heap(heap.begin(), heap.end(), [this, edf_key](std::uint32_t a, std::uint32_t b) {
        return heap_less(b, a, edf_key);
    });
    const std::uint32_t h = heap.back();
    heap.pop_back();
    return h;
}

void Simulator::insert_flow(std::uint32_t h) {
    const PolicyKind p = config_.policy;
    if (p == PolicyKind::Fcfs) {
        fifo_.push_back(h);
    } else if (p == PolicyKind::Srpt || p == PolicyKind::FairSharing) {
        heap_push(heap_, h, false);
    } else if (arena_[h].flow.is_deadline()) {
        heap_push(dl_heap_, h, true);
    } else if (uses_fifo_for_regular(p)) {
        fifo_.push_back(h);
    } else {
        heap_push(heap_, h, false);
    }
}

std::uint32_t Simulator::pop_next_priority() {
    const PolicyKind p = config_.policy;
    auto pop_fifo = [this]() -> std::uint32_t {
        if (fifo_.empty()) return kNone;
        const std::uint32_t h = fifo_.front();
        fifo_.pop_front();
        return h;
    };
    auto pop_regular = [&]() -> std::uint32_t {
        if (uses_fifo_for_regular(p)) return pop_fifo();
        return heap_.empty() ? kNone : heap_pop(heap_, false);
    };
    auto pop_deadline = [&]() -> std::uint32_t {
        return dl_heap_.empty() ? kNone : heap_pop(dl_heap_, true);
    };

    if (p == PolicyKind::Fcfs) return pop_fifo();
    if (p == PolicyKind::Srpt) return heap_.empty() ? kNone : heap_pop(heap_, false);
    if (is_edf_combo(p)) {
        if (deadline_first(p)) {
            const std::uint32_t h = pop_deadline();
            return h != kNone ? h : pop_regular();
        }
        const std::uint32_t h = pop_regular();
        return h != kNone ? h : pop_deadline();
    }
    throw InvariantError("pop_next_priority called for FairSharing");
}

void Simulator::reinsert_served(std::uint32_t h) {
    const PolicyKind p = config_.policy;
    // A partially served survivor was popped from the head of its queue and,
    // for FIFO order, still precedes everything left in it.
    if (p == PolicyKind::Fcfs || (is_edf_combo(p) && uses_fifo_for_regular(p) &&
                                  !arena_[h].flow.is_deadline())) {
        fifo_.push_front(h);
        return;
    }
    if (is_edf_combo(p) && arena_[h].flow.is_deadline()) {
        heap_push(dl_heap_, h, true);
        return;
    }
    heap_push(heap_, h, false);
}

void Simulator::complete_flow(std::uint32_t h, double completion_time) {
    Entry& e = arena_[h];
    completed_.push_back(CompletionRecord{e.flow.id, e.flow.arrival, e.volume,
                                          e.flow.deadline, completion_time});
    e.live = false;
    free_slots_.push_back(h);
    --live_count_;
}

void Simulator::activate_arrivals() {
    const double slot_start = now();
    while (next_arrival_ < flows_.size() && flows_[next_arrival_].arrival <= slot_start) {
        const FlowSpec& f = flows_[next_arrival_];
        std::uint32_t h;
        if (!free_slots_.empty()) {
            h = free_slots_.back();
            free_slots_.pop_back();
        } else {
            h = static_cast<std::uint32_t>(arena_.size());
            arena_.emplace_back();
        }
        Entry& e = arena_[h];
        e.flow.id = f.id;
        e.flow.arrival = f.arrival;
        e.flow.remaining = f.volume;
        if (config_.policy == PolicyKind::FairSharing)
            e.flow.remaining += fair_offset_;  // bake the current offset
        e.flow.deadline = f.deadline;
        e.volume = f.volume;
        e.live = true;
        ++live_count_;
        ++next_arrival_;
        insert_flow(h);
    }
}

void Simulator::advance_slot(Allocation* capture,
                             std::vector<CompletionRecord>* slot_completions) {
    activate_arrivals();
    const std::size_t completed_before = completed_.size();
    const double dt = config_.slot_length;
    const double slot_start = now();

    if (capture) {
        capture->clear();
        for (const Entry& e : arena_)
            if (e.live) capture->emplace(e.flow.id, 0.0);
    }

    if (config_.policy == PolicyKind::FairSharing) {
        // Max-min water-filling with all survivors sharing one equal rate.
        // Flows whose whole remaining volume fits below the equal share are
        // satisfied in full and finish this slot; their excess cascades.
        double residual = config_.capacity;
        std::size_t k = heap_.size();
        while (k > 0) {
            const std::uint32_t h = heap_.front();
            const double rem = arena_[h].flow.remaining - fair_offset_;
            const double share = residual / static_cast<double>(k);
            const double demand = rem / dt;
            if (demand <= share) {
                heap_pop(heap_, false);
                residual -= demand;
                if (capture) (*capture)[arena_[h].flow.id] = demand;
                complete_flow(h, slot_start + rem / demand);
                --k;
            } else {
                break;
            }
        }
        if (k > 0) {
            const double share = residual / static_cast<double>(k);
            fair_offset_ += share * dt;
            if (capture)
                for (std::uint32_t h : heap_) (*capture)[arena_[h].flow.id] = share;
            while (!heap_.empty()) {
                const std::uint32_t h = heap_.front();
                const double rem_after = arena_[h].flow.remaining - fair_offset_;
                if (rem_after <= kZeroRemaining) {
                    heap_pop(heap_, false);
                    complete_flow(h, slot_start + (rem_after + share * dt) / share);
                } else {
                    break;
                }
            }
        }
    } else if (live_count_ > 0) {
        double residual = config_.capacity;
        served_.clear();
        while (residual > 0.0) {
            const std::uint32_t h = pop_next_priority();
            if (h == kNone) break;
            const double demand = arena_[h].flow.remaining / dt;
            const double rate = std::min(residual, demand);
            residual -= rate;
            served_.emplace_back(h, rate);
        }
        for (const auto& [h, rate] : served_) {
            Entry& e = arena_[h];
            if (capture) (*capture)[e.flow.id] = rate;
            const double rem = e.flow.remaining;
            if (rem - rate * dt <= kZeroRemaining) {
                complete_flow(h, slot_start + rem / rate);
            } else {
                e.flow.remaining = rem - rate * dt;
                reinsert_served(h);
            }
        }
    }

    if (slot_completions)
        slot_completions->assign(completed_.begin() + completed_before, completed_.end());
    ++slot_;
}

void Simulator::skip_idle_gap() {
    if (next_arrival_ >= flows_.size()) return;
    const double dt = config_.slot_length;
    const double a = flows_[next_arrival_].arrival;
    if (a <= now()) return;
    // First slot index k with k*dt >= a, using the same arithmetic as now()
    // so the skip is indistinguishable from stepping slot by slot.
    auto k = static_cast<std::int64_t>(std::ceil(a / dt));
    while (k > slot_ && static_cast<double>(k - 1) * dt >= a) --k;
    while (static_cast<double>(k) * dt < a) ++k;
    if (k > slot_) slot_ = k;
}

Simulator::StepResult Simulator::step() {
    StepResult result;
    advance_slot(&result.allocation, &result.completions);
    return result;
}

void Simulator::run_to_completion() {
    while (!finished()) {
        if (live_count_ == 0) skip_idle_gap();
        advance_slot(nullptr, nullptr);
    }
}

std::vector<ActiveFlow> Simulator::active_flows() const {
    std::vector<ActiveFlow> out;
    out.reserve(live_count_);
    for (const Entry& e : arena_) {
        if (!e.live) continue;
        ActiveFlow f = e.flow;
        f.remaining = true_remaining(e);
        out.push_back(f);
    }
    std::sort(out.begin(), out.end(),
              [](const ActiveFlow& a, const ActiveFlow& b) { return a.id < b.id; });
    return out;
}

std::vector<CompletionRecord> run(std::vector<FlowSpec> workload, const SimConfig& config) {
    Simulator sim(std::move(workload), config);
    sim.run_to_completion();
    std::vector<CompletionRecord> records = sim.completions();
    std::sort(records.begin(), records.end(),
              [](const CompletionRecord& a, const CompletionRecord& b) { return a.id < b.id; });
    return records;
}

}  // namespace flowsim
