#include <doctest.h>

#include <cmath>
#include <sstream>

#include "flowsim/errors.hpp"
#include "flowsim/traffic.hpp"

using namespace flowsim;

TEST_CASE("pareto shape is forced by mean and minimum") {
    CHECK(pareto_shape(1.0, 0.1) == doctest::Approx(10.0 / 9.0).epsilon(1e-12));
    CHECK(pareto_shape(1.0, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(pareto_shape(1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(pareto_shape(1.0, 2.0), ConfigError);
    CHECK_THROWS_AS(pareto_shape(1.0, 0.0), ConfigError);
}

TEST_CASE("pareto quantile hits the support minimum at u = 0") {
    CHECK(pareto_quantile(0.1, 10.0 / 9.0, 0.0) == 0.1);
}

TEST_CASE("exponential sizes match the configured mean") {
    Rng rng(7);
    SizeDistribution dist = SizeDistribution::exponential(1.0);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double v = sample_size(dist, rng);
        REQUIRE(v > 0.0);
        sum += v;
    }
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("pareto sizes respect the minimum and approach the mean") {
    Rng rng(11);
    SizeDistribution dist = SizeDistribution::pareto(1.0, 0.1);
    double sum = 0.0;
    const int n = 2000000;  // heavy tail (alpha = 10/9): the mean converges slowly
    for (int i = 0; i < n; ++i) {
        const double v = sample_size(dist, rng);
        REQUIRE(v >= 0.1);
        sum += v;
    }
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("poisson arrivals: count, monotonicity, gap mean") {
    Rng rng(3);
    CHECK(gen_arrivals(0.1, 0, rng).empty());

    auto check_rate = [](double rate, std::uint64_t seed) {
        Rng r(seed);
        const auto times = gen_arrivals(rate, 10000, r);
        REQUIRE(times.size() == 10000);
        double prev = 0.0;
        double gap_sum = 0.0;
        for (double t : times) {
            REQUIRE(t > prev);
            gap_sum += t - prev;
            prev = t;
        }
        CHECK(gap_sum / 10000.0 == doctest::Approx(1.0 / rate).epsilon(0.03));
    };
    check_rate(0.1, 5);
    check_rate(1.0, 6);

    CHECK_THROWS_AS(gen_arrivals(0.0, 10, rng), ConfigError);
    CHECK_THROWS_AS(gen_arrivals(-1.0, 10, rng), ConfigError);
}

TEST_CASE("class assignment boundaries") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        CHECK(!assign_class_regular(rng, 0.0));
        CHECK(assign_class_regular(rng, 1.0));
    }
}

TEST_CASE("realized regular volume fraction tracks the target") {
    WorkloadConfig config;
    config.arrival_rate = 1.0;
    config.flow_count = 10000;
    config.regular_fraction = 0.3;
    config.seed = 23;
    const auto flows = generate_workload(config);
    double regular = 0.0;
    double total = 0.0;
    for (const FlowSpec& f : flows) {
        total += f.volume;
        if (!f.is_deadline()) regular += f.volume;
    }
    CHECK(regular / total == doctest::Approx(0.3).epsilon(0.1));
    CHECK(std::abs(regular / total - 0.3) < 0.03);
}

TEST_CASE("deadline assignment") {
    Rng rng(29);
    CHECK(assign_deadline(0.0, 2.0, 1.0, {1.0, 1.0}, rng) == doctest::Approx(2.0));
    CHECK(assign_deadline(5.0, 1.0, 1.0, {2.0, 2.0}, rng) == doctest::Approx(7.0));
    CHECK_THROWS_AS(assign_deadline(0.0, 1.0, 1.0, {0.5, 2.0}, rng), ConfigError);

    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double d = assign_deadline(0.0, 1.0, 1.0, {1.0, 4.0}, rng);
        REQUIRE(d >= 1.0);
        REQUIRE(d < 4.0 + 1e-12);
        sum += d;
    }
    CHECK(sum / n == doctest::Approx(2.5).epsilon(0.03));
}

TEST_CASE("softness uses a strict threshold") {
    CHECK(classify_softness(2.5, 1.0, 2.0) == Softness::Soft);
    CHECK(classify_softness(1.5, 1.0, 2.0) == Softness::Hard);
    CHECK(classify_softness(2.0, 1.0, 2.0) == Softness::Hard);
}

TEST_CASE("workload generation is deterministic in the seed") {
    WorkloadConfig config;
    config.flow_count = 500;
    config.seed = 99;
    const auto a = generate_workload(config);
    const auto b = generate_workload(config);
    CHECK(dump_workload(a) == dump_workload(b));
    CHECK(workload_hash(a) == workload_hash(b));

    config.seed = 100;
    const auto c = generate_workload(config);
    CHECK(dump_workload(a) != dump_workload(c));
}

TEST_CASE("generated workloads satisfy their invariants") {
    WorkloadConfig config;
    config.flow_count = 2000;
    config.size_dist = SizeDistribution::pareto(1.0, 0.1);
    config.regular_fraction = 0.4;
    config.deadline_slack = {1.0, 4.0};
    config.seed = 31;
    const double capacity = 2.0;
    const auto flows = generate_workload(config, capacity);
    REQUIRE(flows.size() == 2000);
    double prev_arrival = -1.0;
    for (const FlowSpec& f : flows) {
        CHECK(f.volume >= 0.1);
        CHECK(f.arrival > prev_arrival);
        prev_arrival = f.arrival;
        if (f.deadline) {
            // feasible on an idle link
            CHECK(f.deadline->deadline >= f.arrival + f.volume / capacity - 1e-9);
            const bool soft = f.deadline->softness == Softness::Soft;
            CHECK(soft == (f.volume > 2.0));
        }
    }
}

TEST_CASE("workload dump/load round-trip") {
    WorkloadConfig config;
    config.flow_count = 300;
    config.regular_fraction = 0.5;
    config.seed = 41;
    const auto flows = generate_workload(config);
    const std::string text = dump_workload(flows);
    const auto reloaded = load_workload_text(text);
    REQUIRE(reloaded.size() == flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) {
        CHECK(reloaded[i].id == flows[i].id);
        CHECK(reloaded[i].arrival == flows[i].arrival);
        CHECK(reloaded[i].volume == flows[i].volume);
        REQUIRE(reloaded[i].is_deadline() == flows[i].is_deadline());
        if (flows[i].deadline) {
            CHECK(reloaded[i].deadline->deadline == flows[i].deadline->deadline);
            CHECK(reloaded[i].deadline->softness == flows[i].deadline->softness);
        }
    }
}

TEST_CASE("workload loader rejects malformed lines") {
    std::istringstream bad1("0 0.5 1.0 bogus\n");
    CHECK_THROWS_AS(load_workload(bad1), ConfigError);
    std::istringstream bad2("0 0.5 1.0 deadline 2.0 rigid\n");
    CHECK_THROWS_AS(load_workload(bad2), ConfigError);
    std::istringstream bad3("0 0.5 -1.0 regular\n");
    CHECK_THROWS_AS(load_workload(bad3), ConfigError);
}
