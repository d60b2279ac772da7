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

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace printsvm {

enum class GateType : std::uint8_t { And2, Or2, Nand2, Nor2, Not, Xor2, Mux2, Dff };

inline constexpr std::array<GateType, 8> kAllGateTypes = {GateType::And2, GateType::Or2,  GateType::Nand2,
                                                          GateType::Nor2, GateType::Not,  GateType::Xor2,
                                                          GateType::Mux2, GateType::Dff};

std::string_view gate_name(GateType type);
GateType gate_from_name(std::string_view name);
int gate_arity(GateType type);

using NetId = std::uint32_t;
inline constexpr NetId kConst0 = 0;
inline constexpr NetId kConst1 = 1;
inline constexpr NetId kNoNet = 0xFFFFFFFFu;

enum class DriverKind : std::uint8_t { Constant, Input, Gate, None };

struct Net {
    std::string name;
    DriverKind driver = DriverKind::None;
    std::uint32_t gate = 0;  // valid when driver == Gate
    bool operator==(const Net&) const = default;
};

/// One primitive cell. Input order: AND2/OR2/NAND2/NOR2/XOR2 (a, b);
/// NOT (a); MUX2 (sel, in0, in1) with out = sel ? in1 : in0; DFF (d),
/// clocked by the design clock with synchronous reset to `init`.
struct Gate {
    GateType type = GateType::And2;
    std::array<NetId, 3> in{kNoNet, kNoNet, kNoNet};
    NetId out = kNoNet;
    std::uint16_t block = 0;
    bool init = false;

    bool operator==(const Gate&) const = default;
};

struct Port {
    std::string name;
    std::vector<NetId> bits;  // LSB first

    bool operator==(const Port&) const = default;
};

/// Datapath-level bookkeeping (multipliers, adders, comparators, registers)
/// recorded by the generators; used for architecture accounting only.
struct Component {
    std::string kind;
    std::uint16_t block = 0;
    int width = 0;

    bool operator==(const Component&) const = default;
};

/// Flat gate-level netlist with named hierarchical blocks.
///
/// Nets 0 and 1 are the constant drivers. Input ports must be declared
/// before any gate is added so that net numbering follows declaration
/// order; emit_hdl/read_hdl rely on this to round-trip exactly.
class Netlist {
public:
    explicit Netlist(std::string module_name = "design");

    const std::string& module_name() const { return module_name_; }

    std::uint16_t add_block(const std::string& name);
    std::uint16_t block_id(std::string_view name) const;
    const std::vector<std::string>& blocks() const { return blocks_; }

    const Port& add_input(const std::string& name, int width);
    void add_output(const std::string& name, std::vector<NetId> bits);
    const Port* find_input(std::string_view name) const;
    const Port* find_output(std::string_view name) const;
    const std::vector<Port>& inputs() const { return inputs_; }
    const std::vector<Port>& outputs() const { return outputs_; }

    /// Adds a gate and a fresh output net named "<block>_n<id>".
    NetId add_gate(GateType type, std::uint16_t block, NetId a, NetId b = kNoNet, NetId c = kNoNet,
                   bool init = false);
    /// Adds a gate driving an already-declared, undriven net.
    void add_gate_driving(NetId out, GateType type, std::uint16_t block, std::array<NetId, 3> in, bool init);
    /// Rewires input `slot` of an existing gate; closes register feedback loops.
    void connect(std::uint32_t gate, int slot, NetId net);
    /// Declares an undriven net (used by the HDL reader).
    NetId declare_net(const std::string& name);

    const std::vector<Net>& nets() const { return nets_; }
    const std::vector<Gate>& gates() const { return gates_; }
    const Net& net(NetId id) const { return nets_.at(id); }
    NetId find_net(std::string_view name) const;

    void add_component(const std::string& kind, std::uint16_t block, int width);
    const std::vector<Component>& components() const { return components_; }
    int component_count(std::string_view kind, std::string_view block = {}) const;

    /// Named observation points (counter, score, ...), LSB first.
    void set_bus(const std::string& name, std::vector<NetId> bits);
    const std::vector<NetId>* bus(std::string_view name) const;
    const std::map<std::string, std::vector<NetId>>& buses() const { return buses_; }

    void set_attribute(const std::string& key, const std::string& value);
    std::string attribute(const std::string& key, const std::string& fallback = {}) const;
    const std::map<std::string, std::string>& attributes() const { return attributes_; }

    bool is_sequential() const;

    /// Structural checks: every net used or exported has exactly one
    /// driver, the combinational graph is acyclic, gate arities match
    /// and every gate belongs to a declared block. Throws ValidationError.
    void validate() const;

    /// Combinational gates (everything except DFFs) in topological order.
    std::vector<std::uint32_t> combinational_order() const;

    bool operator==(const Netlist&) const = default;

private:
    NetId new_net(std::string name, DriverKind driver);

    std::string module_name_;
    std::vector<std::string> blocks_;
    std::vector<Net> nets_;
    std::vector<Gate> gates_;
    std::vector<Port> inputs_;
    std::vector<Port> outputs_;
    std::vector<Component> components_;
    std::map<std::string, std::vector<NetId>> buses_;
    std::map<std::string, std::string> attributes_;
    std::map<std::string, NetId, std::less<>> net_index_;
};

/// Per-type gate counts for one block or the whole design.
struct GateCensus {
    std::map<GateType, std::int64_t> counts;
    std::map<std::string, std::map<GateType, std::int64_t>> per_block;

    std::int64_t count(GateType t) const;
    std::int64_t dff_count() const { return count(GateType::Dff); }
    /// All cells including DFFs.
    std::int64_t total() const;
    std::int64_t block_total(const std::string& block) const;
    bool empty() const { return total() == 0; }

    GateCensus& operator+=(const GateCensus& other);
    bool operator==(const GateCensus&) const = default;
};

GateCensus gate_census(const Netlist& nl);

void to_json(nlohmann::json& j, const GateCensus& c);
void from_json(const nlohmann::json& j, GateCensus& c);

}  // namespace printsvm
