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
#include <string>
#include <vector>

#include "printsvm/netlist.hpp"
#include "printsvm/quantizer.hpp"

namespace printsvm {

/// Bit patterns hardwired into the MUX storage: one row per OvR
/// classifier holding (w_k1 .. w_km, b_k) as two's-complement fields,
/// LSB first.
struct StorageSpec {
    std::vector<std::vector<std::uint8_t>> rows;

    std::size_t row_width() const { return rows.empty() ? 0 : rows.front().size(); }
    int select_bits() const;
};

StorageSpec storage_spec(const QuantizedSvm& q);

/// Boolean function of the select lines for every storage output bit,
/// shared as a DAG. Node 0 is constant 0 and node 1 constant 1.
struct FoldedStorage {
    enum class Kind : std::uint8_t { Const0, Const1, Select, NotSelect, Mux };
    struct Node {
        Kind kind = Kind::Const0;
        int select = -1;  // select line for Select/NotSelect/Mux
        int lo = -1;      // Mux: chosen when the select line is 0
        int hi = -1;      // Mux: chosen when the select line is 1
    };

    int select_bits = 0;
    std::vector<Node> nodes;
    std::vector<int> outputs;

    int mux_count() const;
    /// Distinct inverted select lines (one NOT gate each).
    int inverter_count() const;
    int gate_count() const { return mux_count() + inverter_count(); }
    std::vector<std::uint8_t> evaluate(std::uint64_t select) const;
};

/// Fold a MUX tree with constant leaves bottom-up with
///   mux(s,0,0)=0, mux(s,1,1)=1, mux(s,0,1)=s, mux(s,1,0)=!s,
/// mux(s,a,a)=a, hash-consing of identical subtrees, and rows beyond the
/// last classifier treated as don't-care.
FoldedStorage fold_mux_constants(const StorageSpec& spec);

/// Gate count of the unsimplified tree: (2^select_bits - 1) MUX2 per bit.
std::int64_t naive_mux_gate_count(const StorageSpec& spec);

/// Output of the unsimplified MUX tree (leaves past the last row read 0).
std::vector<std::uint8_t> naive_mux_evaluate(const StorageSpec& spec, std::uint64_t select);

/// Sequential OvR design: counter control, folded MUX storage, a compute
/// engine of m multipliers and a balanced adder tree, and a voter holding
/// the best score and its classifier id.
///
/// Ports: clk, rst, x[m * input_width] (feature i at bits
/// i*input_width .. (i+1)*input_width-1), class_id[ceil(log2 n)], done.
Netlist build_sequential(const QuantizedSvm& q);

enum class BaselineShape { OneVsRest, OneVsOne };

/// Fully parallel combinational baseline with one hardwired weighted-sum
/// block per classifier (n for OvR, n(n-1)/2 for the OvO shape) and a
/// comparator chain argmax. OvO blocks reuse the OvR row of their first
/// class as placeholder coefficients; the design is meant for resource
/// comparisons, not for classification.
Netlist build_parallel_baseline(const QuantizedSvm& q, BaselineShape shape);

/// Stand-alone engine for (m, widths); identical to the engine block of
/// any sequential design sharing those parameters.
Netlist build_engine(int m, int input_width, int weight_width, int bias_width, int accumulator_width);

/// Stand-alone datapath cells built exactly as inside the generated
/// designs: a width-bit ripple-carry adder (a + b -> sum, carry dropped),
/// an unsigned x signed array multiplier (x * w -> p, input+weight bits)
/// and a signed comparator (gt = a > b).
Netlist build_ripple_adder(int width);
Netlist build_multiplier(int input_width, int weight_width);
Netlist build_comparator(int width);

/// Structural Verilog-2001 text: gate primitives, `assign` MUX2s and
/// always-block DFFs with synchronous reset. Pragmas in comments carry
/// blocks, buses, components and attributes for read_hdl.
std::string emit_hdl(const Netlist& nl);

/// SHA-256 of the canonical JSON form of the raw tables and formats.
std::string model_hash(const QuantizedSvm& q);

}  // namespace printsvm
