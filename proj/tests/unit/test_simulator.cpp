/*
 * Copyright 2026 The printsvm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "doctest.h"
#include "printsvm/circuitgen.hpp"
#include "printsvm/error.hpp"
#include "printsvm/simulator.hpp"
#include "test_support.hpp"

using namespace printsvm;

namespace {

QuantizedSvm crafted(int m, std::vector<std::vector<std::int64_t>> w, std::vector<std::int64_t> b) {
    QuantizedSvm q;
    q.m = m;
    q.n = static_cast<int>(w.size());
    q.input_format = {false, 0, 4};
    q.weight_format = {true, 3, 2};
    q.bias_format = {true, 3, 6};
    q.accumulator_width = accumulator_width(m, q.input_format, q.weight_format, q.bias_format);
    q.weights = std::move(w);
    q.biases = std::move(b);
    q.validate();
    return q;
}

}  // namespace

TEST_CASE("two-class toy model") {
    const auto q = crafted(1, {{1}, {2}}, {0, 0});
    const auto nl = build_sequential(q);
    const auto r = simulate(nl, std::vector<std::int64_t>{5}, 8);
    CHECK(r.class_index == 1);
    CHECK(measured_latency_cycles(r.trace) == 2);
}

TEST_CASE("per-cycle scores 5, 7, 7 select class 1") {
    const auto q = crafted(1, {{0}, {0}, {0}}, {5, 7, 7});
    const auto nl = build_sequential(q);
    const auto r = simulate(nl, std::vector<std::int64_t>{3}, 8);
    REQUIRE(r.trace.rows.size() == 3);
    CHECK(r.trace.rows[0].accumulator == 5);
    CHECK(r.trace.rows[1].accumulator == 7);
    CHECK(r.trace.rows[2].accumulator == 7);
    CHECK(r.class_index == 1);
}

TEST_CASE("property: latency is n, counters count and accumulators match the oracle for n in 2..16") {
    Lcg64 rng(100);
    for (int n = 2; n <= 16; ++n)
        for (int rep = 0; rep < 3; ++rep) {
            const auto q = testing::random_quantized(rng, 1 + static_cast<int>(rng.uniform(6)), n, 4, 1 + static_cast<int>(rng.uniform(2)), 3);
            const auto nl = build_sequential(q);
            const CompiledNetlist compiled(nl);
            for (int s = 0; s < 10; ++s) {
                const auto x = testing::random_inputs(rng, q);
                const auto r = simulate(compiled, x, 4 * n + 8);
                CHECK(r.trace.completed);
                CHECK(measured_latency_cycles(r.trace) == n);
                const auto golden = testing::golden_scores(q, x);
                REQUIRE(r.trace.rows.size() == static_cast<std::size_t>(n));
                for (int k = 0; k < n; ++k) {
                    const auto& row = r.trace.rows[static_cast<std::size_t>(k)];
                    CHECK(row.cycle == k);
                    CHECK(row.counter == static_cast<std::uint64_t>(k));
                    CHECK(testing::BigInt(row.accumulator) == golden[static_cast<std::size_t>(k)]);
                    CHECK(row.row_bits == storage_spec(q).rows[static_cast<std::size_t>(k)]);
                    CHECK(!row.done);
                }
                CHECK(r.class_index == testing::golden_class(q, x));
            }
        }
}

TEST_CASE("property: 1000 crafted voter ties resolve to the smallest index") {
    Lcg64 rng(200);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform(7));
        // Zero weights, biases drawn from a tiny set so ties are frequent;
        // the maximum is forced to appear at least twice.
        std::vector<std::int64_t> biases;
        for (int k = 0; k < n; ++k) biases.push_back(static_cast<std::int64_t>(rng.uniform(4)) * 64 - 128);
        const auto top = *std::max_element(biases.begin(), biases.end());
        const int dup = static_cast<int>(rng.uniform(static_cast<std::uint32_t>(n)));
        biases[static_cast<std::size_t>(dup)] = top;
        int first = 0;
        while (biases[static_cast<std::size_t>(first)] != top) ++first;
        for (int k = first + 1; k < n; ++k)
            if (biases[static_cast<std::size_t>(k)] != top && rng.uniform(2) == 0) biases[static_cast<std::size_t>(k)] = top;
        int ties = 0;
        for (auto v : biases) ties += v == top ? 1 : 0;
        if (ties < 2) biases[static_cast<std::size_t>(first == n - 1 ? 0 : n - 1)] = top;
        first = 0;
        while (biases[static_cast<std::size_t>(first)] != top) ++first;
        const auto q = crafted(1, std::vector<std::vector<std::int64_t>>(static_cast<std::size_t>(n), {0}), biases);
        const auto r = simulate(build_sequential(q), std::vector<std::int64_t>{static_cast<std::int64_t>(rng.uniform(16))}, 4 * n);
        CHECK(r.class_index == first);
        CHECK(predict_quantized(q, std::vector<std::int64_t>{0}) == first);
    }
}

TEST_CASE("fuzz: 1000 random inputs on a 4-class, 5-feature, 4-bit model") {
    Lcg64 rng(300);
    const auto q = testing::random_quantized(rng, 5, 4, 4, 1, 2);
    const auto nl = build_sequential(q);
    std::vector<std::vector<std::int64_t>> inputs;
    for (int s = 0; s < 1000; ++s) inputs.push_back(testing::random_inputs(rng, q));
    const auto report = equivalence_check(q, nl, inputs);
    CHECK(report.samples == 1000);
    CHECK(report.class_mismatches == 0);
    CHECK(report.cycles_checked == 4000);
    CHECK(report.cycle_agreement_rate() == 1.0);
    CHECK(report.passed());
    CHECK(!report.counterexample);
}

TEST_CASE("fault injection: one inverted storage bit is caught") {
    Lcg64 rng(400);
    const auto q = testing::random_quantized(rng, 5, 4, 4, 1, 2);
    Netlist nl = build_sequential(q);
    const auto row = *nl.bus("row");
    NetId victim = kNoNet;
    for (NetId bit : row)
        if (nl.net(bit).driver == DriverKind::Gate) {
            victim = bit;
            break;
        }
    REQUIRE(victim != kNoNet);
    const NetId flipped = nl.add_gate(GateType::Not, nl.block_id("storage"), victim);
    const auto engine = nl.block_id("engine");
    for (std::uint32_t g = 0; g < nl.gates().size(); ++g) {
        const Gate gate = nl.gates()[g];
        if (gate.block != engine) continue;
        for (int s = 0; s < gate_arity(gate.type); ++s)
            if (gate.in[static_cast<std::size_t>(s)] == victim) nl.connect(g, s, flipped);
    }
    nl.validate();
    std::vector<std::vector<std::int64_t>> inputs;
    for (int s = 0; s < 200; ++s) inputs.push_back(testing::random_inputs(rng, q));
    const auto report = equivalence_check(q, nl, inputs);
    CHECK(!report.passed());
    CHECK(report.cycles_agreeing < report.cycles_checked);
    REQUIRE(report.counterexample.has_value());
    CHECK(report.counterexample->expected_bits != report.counterexample->observed_bits);
    CHECK(report.counterexample->sample < inputs.size());
}

TEST_CASE("a corrupted table is caught as a class mismatch with a counterexample") {
    Lcg64 rng(401);
    const auto q = crafted(2, {{4, 0}, {0, 4}}, {0, 0});
    auto bad = q;
    bad.weights[1][1] = -4;
    const auto nl = build_sequential(bad);
    std::vector<std::vector<std::int64_t>> inputs{{1, 9}, {9, 1}};
    const auto report = equivalence_check(q, nl, inputs);
    CHECK(report.class_mismatches == 1);
    REQUIRE(report.counterexample.has_value());
    CHECK(report.counterexample->sample == 0);
    CHECK(report.counterexample->cycle == 1);
}

TEST_CASE("simulation is deterministic") {
    Lcg64 rng(500);
    const auto q = testing::random_quantized(rng, 3, 5, 4, 2, 2);
    const auto nl = build_sequential(q);
    const auto x = testing::random_inputs(rng, q);
    CHECK(simulate(nl, x, 30).trace == simulate(nl, x, 30).trace);
}

TEST_CASE("done held low is a simulation error") {
    Lcg64 rng(600);
    const auto q = testing::random_quantized(rng, 2, 6, 4, 2, 2);
    const auto nl = build_sequential(q);
    const CompiledNetlist compiled(nl);
    CHECK_THROWS_AS(simulate(compiled, testing::random_inputs(rng, q), 3), SimulationError);
}

TEST_CASE("outputs stay stable after done") {
    Lcg64 rng(700);
    const auto q = testing::random_quantized(rng, 3, 3, 4, 2, 2);
    const auto nl = build_sequential(q);
    const CompiledNetlist compiled(nl);
    Simulator sim(compiled);
    const auto x = testing::random_inputs(rng, q);
    sim.set_input("x", pack_inputs(x, q.input_format.width()));
    sim.set_input("rst", std::uint64_t{1});
    sim.settle();
    sim.clock();
    sim.set_input("rst", std::uint64_t{0});
    for (int c = 0; c < 3; ++c) {
        sim.settle();
        sim.clock();
    }
    sim.settle();
    const auto id = sim.read_unsigned(nl.find_output("class_id")->bits);
    CHECK(sim.read_unsigned(nl.find_output("done")->bits) == 1);
    CHECK(static_cast<int>(id) == testing::golden_class(q, x));
    for (int c = 0; c < 10; ++c) {
        sim.clock();
        sim.settle();
        CHECK(sim.read_unsigned(nl.find_output("done")->bits) == 1);
        CHECK(sim.read_unsigned(nl.find_output("class_id")->bits) == id);
    }
}

TEST_CASE("trace csv") {
    const auto q = crafted(1, {{0}, {0}}, {3, -2});
    const auto r = simulate(build_sequential(q), std::vector<std::int64_t>{0}, 8);
    CHECK(trace_csv(r.trace) == "cycle,counter,score_raw,id,done\n0,0,3,0,0\n1,1,-2,0,0\n");
}

TEST_CASE("dataset equivalence over normalized blobs") {
    Lcg64 rng(800);
    const auto data = testing::blobs(rng, 6, 5, 40);
    const auto q = testing::random_quantized(rng, 6, 5, 4, 2, 3);
    const auto report = equivalence_check(q, build_sequential(q), data);
    CHECK(report.samples == data.size());
    CHECK(report.passed());
}

TEST_CASE("input packing") {
    CHECK(pack_inputs(std::vector<std::int64_t>{1, 2}, 2) == std::vector<std::uint8_t>{1, 0, 0, 1});
}
