#pragma once

#include <cstdint>
#include <optional>

namespace flowsim {

enum class Softness { Hard, Soft };

// Deadline attributes of a deadline-class flow. `deadline` is an absolute
// point in time, strictly greater than the flow's arrival.
struct DeadlineInfo {
    double deadline = 0.0;
    Softness softness = Softness::Hard;
};

// Immutable description of one flow. A flow without `deadline` is regular
// traffic; a flow with it is deadline traffic.
struct FlowSpec {
    std::uint64_t id = 0;
    double arrival = 0.0;                 // time units
    double volume = 0.0;                  // traffic units, > 0
    std::optional<DeadlineInfo> deadline; // nullopt = regular

    bool is_deadline() const { return deadline.has_value(); }
};

// Outcome of one flow after simulation.
struct CompletionRecord {
    std::uint64_t id = 0;
    double arrival = 0.0;
    double volume = 0.0;
    std::optional<DeadlineInfo> deadline;
    double completion = 0.0;

    bool is_deadline() const { return deadline.has_value(); }
    double fct() const { return completion - arrival; }
};

}  // namespace flowsim
