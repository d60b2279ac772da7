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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "printsvm/dataset.hpp"
#include "printsvm/netlist.hpp"
#include "printsvm/quantizer.hpp"

namespace printsvm {

/// Netlist prepared for fast repeated evaluation. Immutable after
/// construction; any number of simulations may share one instance.
class CompiledNetlist {
public:
    explicit CompiledNetlist(const Netlist& nl);

    const Netlist& netlist() const { return *nl_; }
    const std::vector<std::uint32_t>& order() const { return order_; }
    const std::vector<std::uint32_t>& registers() const { return registers_; }

private:
    const Netlist* nl_;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> registers_;
};

/// Two-phase synchronous evaluator: settle() propagates combinational
/// logic in topological order, clock() latches every DFF at once.
class Simulator {
public:
    explicit Simulator(const CompiledNetlist& compiled);

    void set_input(std::string_view port, std::span<const std::uint8_t> bits);
    void set_input(std::string_view port, std::uint64_t value);
    void settle();
    void clock();

    std::uint8_t value(NetId net) const { return values_[net]; }
    std::uint64_t read_unsigned(std::span<const NetId> bits) const;
    std::int64_t read_signed(std::span<const NetId> bits) const;
    std::vector<std::uint8_t> read_bits(std::span<const NetId> bits) const;

private:
    const CompiledNetlist& compiled_;
    std::vector<std::uint8_t> values_;
    std::vector<std::uint8_t> next_;
};

/// Observation for one compute cycle (counter == cycle).
struct TraceRow {
    int cycle = 0;
    std::uint64_t counter = 0;
    std::vector<std::uint8_t> row_bits;
    std::int64_t accumulator = 0;
    std::int64_t best_score = 0;
    std::uint64_t best_id = 0;
    bool done = false;

    bool operator==(const TraceRow&) const = default;
};

struct SimTrace {
    std::vector<TraceRow> rows;
    bool completed = false;

    bool operator==(const SimTrace&) const = default;
};

struct SimResult {
    int class_index = 0;
    SimTrace trace;
};

/// Raw input codes to the x port bit vector (feature i at bits i*w..).
std::vector<std::uint8_t> pack_inputs(std::span<const std::int64_t> x_raw, int input_width);

/// Reset, release, then clock until done; returns the voter id register.
/// Throws SimulationError if done stays low for max_cycles cycles.
SimResult simulate(const CompiledNetlist& design, std::span<const std::int64_t> x_raw, int max_cycles,
                   bool record_rows = true);
SimResult simulate(const Netlist& design, std::span<const std::int64_t> x_raw, int max_cycles);

/// Settles a combinational design (e.g. a parallel baseline) and reads class_id.
int evaluate_combinational(const CompiledNetlist& design, std::span<const std::int64_t> x_raw);

/// Clock cycles from reset release until done was observed.
int measured_latency_cycles(const SimTrace& trace);

/// CSV with columns cycle,counter,score_raw,id,done.
std::string trace_csv(const SimTrace& trace);

struct Counterexample {
    std::size_t sample = 0;
    int cycle = -1;  // -1: class output mismatch
    std::string expected_bits;
    std::string observed_bits;
};

struct EquivalenceReport {
    std::size_t samples = 0;
    std::size_t class_mismatches = 0;
    std::size_t cycles_checked = 0;
    std::size_t cycles_agreeing = 0;
    std::optional<Counterexample> counterexample;

    double cycle_agreement_rate() const {
        return cycles_checked == 0 ? 1.0 : static_cast<double>(cycles_agreeing) / static_cast<double>(cycles_checked);
    }
    bool passed() const { return class_mismatches == 0 && cycles_agreeing == cycles_checked; }
};

/// Differential check of a sequential design against quantized_scores:
/// class outputs and every per-cycle accumulator must agree exactly.
EquivalenceReport equivalence_check(const QuantizedSvm& q, const Netlist& nl,
                                    const std::vector<std::vector<std::int64_t>>& inputs);
/// Dataset form: features are quantized with the model's input format.
EquivalenceReport equivalence_check(const QuantizedSvm& q, const Netlist& nl, const Dataset& data);

void to_json(nlohmann::json& j, const EquivalenceReport& r);

/// Parse the structural Verilog subset produced by emit_hdl.
Netlist read_hdl(std::string_view text);

}  // namespace printsvm
