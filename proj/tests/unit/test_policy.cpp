#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "flowsim/errors.hpp"
#include "flowsim/policy.hpp"
#include "support/random_instances.hpp"

using namespace flowsim;
namespace ts = flowsim::testsupport;

namespace {

ActiveFlow regular(std::uint64_t id, double arrival, double remaining) {
    return ActiveFlow{id, arrival, remaining, std::nullopt};
}

ActiveFlow with_deadline(std::uint64_t id, double arrival, double remaining, double deadline) {
    return ActiveFlow{id, arrival, remaining, DeadlineInfo{deadline, Softness::Hard}};
}

std::vector<std::uint64_t> ids_of(const std::vector<ActiveFlow>& flows) {
    std::vector<std::uint64_t> ids;
    for (const ActiveFlow& f : flows) ids.push_back(f.id);
    return ids;
}

}  // namespace

TEST_CASE("policy names parse exactly") {
    for (PolicyKind kind : kAllPolicies) CHECK(parse_policy(policy_name(kind)) == kind);
    CHECK(parse_policy("fair") == PolicyKind::FairSharing);
    CHECK_THROWS_AS(parse_policy("sjf"), ConfigError);
    CHECK_THROWS_AS(parse_policy("FCFS"), ConfigError);
}

TEST_CASE("fcfs orders by arrival, then id") {
    CHECK(ids_of(order_fcfs(std::vector<ActiveFlow>{regular(1, 0, 1), regular(2, 1, 1)})) ==
          std::vector<std::uint64_t>{1, 2});
    CHECK(ids_of(order_fcfs(std::vector<ActiveFlow>{regular(2, 3, 1), regular(1, 3, 1)})) ==
          std::vector<std::uint64_t>{1, 2});
    CHECK(ids_of(order_fcfs(std::vector<ActiveFlow>{regular(3, 2, 1), regular(1, 5, 1),
                                                    regular(2, 0, 1)})) ==
          std::vector<std::uint64_t>{2, 3, 1});
}

TEST_CASE("srpt orders by remaining, then arrival, then id") {
    CHECK(ids_of(order_srpt(std::vector<ActiveFlow>{regular(1, 0, 3), regular(2, 1, 1)})) ==
          std::vector<std::uint64_t>{2, 1});
    CHECK(ids_of(order_srpt(std::vector<ActiveFlow>{regular(1, 0, 2), regular(2, 1, 2)})) ==
          std::vector<std::uint64_t>{1, 2});
}

TEST_CASE("srpt head is stable across service absent new arrivals") {
    std::vector<ActiveFlow> active{regular(1, 0, 2.0), regular(2, 1, 2.5)};
    auto head = order_srpt(active).front().id;
    CHECK(head == 1);
    // serve the head for one slot; it can only shrink, so it stays first
    active[0].remaining -= 0.1;
    CHECK(order_srpt(active).front().id == 1);
}

TEST_CASE("edf orders by deadline, then arrival, then id") {
    CHECK(ids_of(order_edf(std::vector<ActiveFlow>{with_deadline(1, 0, 1, 10),
                                                   with_deadline(2, 0, 1, 2)})) ==
          std::vector<std::uint64_t>{2, 1});
    CHECK(ids_of(order_edf(std::vector<ActiveFlow>{with_deadline(1, 1, 1, 5),
                                                   with_deadline(2, 0, 1, 5)})) ==
          std::vector<std::uint64_t>{2, 1});
    CHECK(order_edf({}).empty());
    CHECK_THROWS_AS(order_edf(std::vector<ActiveFlow>{regular(1, 0, 1)}), InvariantError);
}

TEST_CASE("serial priority allocation walks the list with demand caps") {
    SUBCASE("finished head frees capacity within the same slot") {
        const std::vector<ActiveFlow> ordered{regular(1, 0, 0.05), regular(2, 0, 1.0)};
        const Allocation alloc = allocate_by_priority(ordered, 1.0, 0.1);
        CHECK(alloc.at(1) == doctest::Approx(0.5));
        CHECK(alloc.at(2) == doctest::Approx(0.5));
    }
    SUBCASE("saturated head starves the rest") {
        const std::vector<ActiveFlow> ordered{regular(1, 0, 1.0), regular(2, 0, 1.0)};
        const Allocation alloc = allocate_by_priority(ordered, 1.0, 0.1);
        CHECK(alloc.at(1) == doctest::Approx(1.0));
        CHECK(alloc.at(2) == 0.0);
    }
    SUBCASE("empty list") {
        CHECK(allocate_by_priority({}, 1.0, 0.1).empty());
    }
}

TEST_CASE("max-min fair allocation") {
    SUBCASE("equal split when saturated") {
        const std::vector<ActiveFlow> active{regular(1, 0, 1.0), regular(2, 0, 1.0)};
        const Allocation alloc = allocate_fair(active, 1.0, 0.1);
        CHECK(alloc.at(1) == doctest::Approx(0.5));
        CHECK(alloc.at(2) == doctest::Approx(0.5));
    }
    SUBCASE("small demand is capped, excess is redistributed") {
        // demands 0.2, 0.9, 0.9
        const std::vector<ActiveFlow> active{regular(1, 0, 0.02), regular(2, 0, 0.09),
                                             regular(3, 0, 0.09)};
        const Allocation alloc = allocate_fair(active, 1.0, 0.1);
        CHECK(alloc.at(1) == doctest::Approx(0.2));
        CHECK(alloc.at(2) == doctest::Approx(0.4));
        CHECK(alloc.at(3) == doctest::Approx(0.4));
    }
    SUBCASE("under-demanded link satisfies everyone") {
        const std::vector<ActiveFlow> active{regular(1, 0, 0.01), regular(2, 0, 0.02)};
        const Allocation alloc = allocate_fair(active, 1.0, 0.1);
        CHECK(alloc.at(1) == doctest::Approx(0.1));
        CHECK(alloc.at(2) == doctest::Approx(0.2));
    }
}

TEST_CASE("edf combos respect partition priority") {
    const std::vector<ActiveFlow> mixed{regular(1, 0, 1.0), with_deadline(2, 0, 1.0, 3.0)};

    SUBCASE("deadline first") {
        const Allocation alloc = allocate(PolicyKind::EdfFcfsDf, mixed, 1.0, 0.1);
        CHECK(alloc.at(2) == doctest::Approx(1.0));
        CHECK(alloc.at(1) == 0.0);
    }
    SUBCASE("deadline last") {
        const Allocation alloc = allocate(PolicyKind::EdfFcfsDl, mixed, 1.0, 0.1);
        CHECK(alloc.at(1) == doctest::Approx(1.0));
        CHECK(alloc.at(2) == 0.0);
    }
    SUBCASE("pure edf on an all-deadline set") {
        const std::vector<ActiveFlow> deadlines{with_deadline(1, 0, 1.0, 9.0),
                                                with_deadline(2, 0, 1.0, 1.0)};
        const Allocation alloc = allocate(PolicyKind::EdfSrptDf, deadlines, 1.0, 0.1);
        CHECK(alloc.at(2) == doctest::Approx(1.0));
        CHECK(alloc.at(1) == 0.0);
    }
}

TEST_CASE("allocate dispatch basics") {
    CHECK(allocate(PolicyKind::Srpt, {}, 1.0, 0.1).empty());

    const std::vector<ActiveFlow> one{regular(7, 0, 0.05)};
    CHECK(allocate(PolicyKind::Srpt, one, 1.0, 0.1).at(7) == doctest::Approx(0.5));

    const std::vector<ActiveFlow> two{regular(1, 0, 5.0), regular(2, 1, 5.0)};
    const Allocation alloc = allocate(PolicyKind::Fcfs, two, 1.0, 0.1);
    CHECK(alloc.at(1) == doctest::Approx(1.0));
    CHECK(alloc.at(2) == 0.0);

    CHECK_THROWS_AS(allocate(PolicyKind::Fcfs, two, 0.0, 0.1), ConfigError);
    const std::vector<ActiveFlow> dead{regular(1, 0, 0.0)};
    CHECK_THROWS_AS(allocate(PolicyKind::Fcfs, dead, 1.0, 0.1), InvariantError);
}

TEST_CASE("allocate is a pure function of its inputs") {
    Rng rng(57);
    const auto active = ts::random_active_set(rng, 20, 1.0, 0.1);
    for (PolicyKind kind : kAllPolicies) {
        const Allocation a = allocate(kind, active, 1.0, 0.1);
        const Allocation b = allocate(kind, active, 1.0, 0.1);
        CHECK(a == b);
    }
}

TEST_CASE("allocation invariants hold on randomized active sets") {
    Rng rng(91);
    const double capacity = 1.0;
    const double slot = 0.1;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto active = ts::random_active_set(rng, 30, capacity, slot);
        const PolicyKind kind = kAllPolicies[trial % 7];
        const Allocation alloc = allocate(kind, active, capacity, slot);

        REQUIRE(alloc.size() == active.size());
        double total = 0.0;
        for (const ActiveFlow& f : active) {
            const double rate = alloc.at(f.id);
            REQUIRE(rate >= 0.0);
            REQUIRE(rate <= ts::demand_of(f, slot) + 1e-9);
            total += rate;
        }
        REQUIRE(total <= capacity + 1e-9);
        // work conservation
        const double expected = std::min(capacity, ts::total_demand(active, slot));
        REQUIRE(total == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("serial policies are strict: a flow is served only after its betters") {
    Rng rng(123);
    const double capacity = 1.0;
    const double slot = 0.1;
    for (int trial = 0; trial < 500; ++trial) {
        const auto active = ts::random_active_set(rng, 12, capacity, slot);
        for (PolicyKind kind :
             {PolicyKind::Fcfs, PolicyKind::Srpt, PolicyKind::EdfFcfsDf, PolicyKind::EdfSrptDf,
              PolicyKind::EdfFcfsDl, PolicyKind::EdfSrptDl}) {
            const Allocation alloc = allocate(kind, active, capacity, slot);

            // Reconstruct the priority list through the public ordering ops.
            std::vector<ActiveFlow> deadline_part, regular_part, ordered;
            for (const ActiveFlow& f : active)
                (f.is_deadline() ? deadline_part : regular_part).push_back(f);
            switch (kind) {
                case PolicyKind::Fcfs: ordered = order_fcfs(active); break;
                case PolicyKind::Srpt: ordered = order_srpt(active); break;
                default: {
                    auto dl = order_edf(deadline_part);
                    auto reg = (kind == PolicyKind::EdfFcfsDf || kind == PolicyKind::EdfFcfsDl)
                                   ? order_fcfs(regular_part)
                                   : order_srpt(regular_part);
                    const bool df =
                        kind == PolicyKind::EdfFcfsDf || kind == PolicyKind::EdfSrptDf;
                    ordered = df ? dl : reg;
                    const auto& second = df ? reg : dl;
                    ordered.insert(ordered.end(), second.begin(), second.end());
                }
            }

            // If anyone below gets rate, everyone above is demand-satisfied.
            for (std::size_t i = 0; i < ordered.size(); ++i) {
                const bool later_served = std::any_of(
                    ordered.begin() + static_cast<std::ptrdiff_t>(i) + 1, ordered.end(),
                    [&](const ActiveFlow& f) { return alloc.at(f.id) > 1e-12; });
                if (later_served) {
                    REQUIRE(alloc.at(ordered[i].id) ==
                            doctest::Approx(ts::demand_of(ordered[i], slot)).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("fair allocation is max-min: no one can gain except from richer flows") {
    Rng rng(321);
    const double capacity = 1.0;
    const double slot = 0.1;
    for (int trial = 0; trial < 2000; ++trial) {
        const auto active = ts::random_active_set(rng, 5, capacity, slot);
        const Allocation alloc = allocate_fair(active, capacity, slot);
        for (const ActiveFlow& fi : active) {
            if (alloc.at(fi.id) >= ts::demand_of(fi, slot) - 1e-12) continue;
            // fi wants more; any donor must already be no better off
            for (const ActiveFlow& fj : active) {
                if (fj.id == fi.id || alloc.at(fj.id) <= 1e-12) continue;
                REQUIRE(alloc.at(fj.id) <= alloc.at(fi.id) + 1e-9);
            }
        }
    }
}
