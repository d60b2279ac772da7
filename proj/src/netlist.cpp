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

#include "printsvm/netlist.hpp"

#include <algorithm>
#include <queue>

#include "printsvm/error.hpp"

namespace printsvm {

std::string_view gate_name(GateType type) {
    switch (type) {
    case GateType::And2: return "AND2";
    case GateType::Or2: return "OR2";
    case GateType::Nand2: return "NAND2";
    case GateType::Nor2: return "NOR2";
    case GateType::Not: return "NOT";
    case GateType::Xor2: return "XOR2";
    case GateType::Mux2: return "MUX2";
    case GateType::Dff: return "DFF";
    }
    return "?";
}

GateType gate_from_name(std::string_view name) {
    for (GateType t : kAllGateTypes)
        if (gate_name(t) == name) return t;
    throw ParseError("unknown gate type '" + std::string(name) + "'");
}

int gate_arity(GateType type) {
    switch (type) {
    case GateType::Not:
    case GateType::Dff: return 1;
    case GateType::Mux2: return 3;
    default: return 2;
    }
}

Netlist::Netlist(std::string module_name) : module_name_(std::move(module_name)) {
    new_net("1'b0", DriverKind::Constant);
    new_net("1'b1", DriverKind::Constant);
}

NetId Netlist::new_net(std::string name, DriverKind driver) {
    const auto id = static_cast<NetId>(nets_.size());
    if (!net_index_.emplace(name, id).second) throw ValidationError("duplicate net name '" + name + "'");
    nets_.push_back({std::move(name), driver, 0});
    return id;
}

std::uint16_t Netlist::add_block(const std::string& name) {
    auto it = std::find(blocks_.begin(), blocks_.end(), name);
    if (it != blocks_.end()) return static_cast<std::uint16_t>(it - blocks_.begin());
    blocks_.push_back(name);
    return static_cast<std::uint16_t>(blocks_.size() - 1);
}

std::uint16_t Netlist::block_id(std::string_view name) const {
    auto it = std::find(blocks_.begin(), blocks_.end(), name);
    if (it == blocks_.end()) throw ValidationError("unknown block '" + std::string(name) + "'");
    return static_cast<std::uint16_t>(it - blocks_.begin());
}

const Port& Netlist::add_input(const std::string& name, int width) {
    if (!gates_.empty()) throw ValidationError("input ports must be declared before gates");
    Port port{name, {}};
    for (int i = 0; i < width; ++i)
        port.bits.push_back(new_net(width == 1 && (name == "clk" || name == "rst") ? name
                                                                                   : name + "[" + std::to_string(i) + "]",
                                    DriverKind::Input));
    inputs_.push_back(std::move(port));
    return inputs_.back();
}

void Netlist::add_output(const std::string& name, std::vector<NetId> bits) {
    outputs_.push_back({name, std::move(bits)});
}

const Port* Netlist::find_input(std::string_view name) const {
    for (const auto& p : inputs_)
        if (p.name == name) return &p;
    return nullptr;
}

const Port* Netlist::find_output(std::string_view name) const {
    for (const auto& p : outputs_)
        if (p.name == name) return &p;
    return nullptr;
}

NetId Netlist::add_gate(GateType type, std::uint16_t block, NetId a, NetId b, NetId c, bool init) {
    if (block >= blocks_.size()) throw ValidationError("gate references an undeclared block");
    const NetId out = new_net(blocks_[block] + "_n" + std::to_string(nets_.size()), DriverKind::Gate);
    nets_[out].gate = static_cast<std::uint32_t>(gates_.size());
    gates_.push_back({type, {a, b, c}, out, block, init});
    return out;
}

void Netlist::add_gate_driving(NetId out, GateType type, std::uint16_t block, std::array<NetId, 3> in, bool init) {
    Net& net = nets_.at(out);
    if (net.driver != DriverKind::None) throw ValidationError("net '" + net.name + "' has more than one driver");
    net.driver = DriverKind::Gate;
    net.gate = static_cast<std::uint32_t>(gates_.size());
    gates_.push_back({type, in, out, block, init});
}

void Netlist::connect(std::uint32_t gate, int slot, NetId net) {
    if (gate >= gates_.size() || slot < 0 || slot >= gate_arity(gates_[gate].type))
        throw ValidationError("connect: no such gate input");
    if (net >= nets_.size()) throw ValidationError("connect: unknown net");
    gates_[gate].in[static_cast<std::size_t>(slot)] = net;
}

NetId Netlist::declare_net(const std::string& name) { return new_net(name, DriverKind::None); }

NetId Netlist::find_net(std::string_view name) const {
    auto it = net_index_.find(name);
    return it == net_index_.end() ? kNoNet : it->second;
}

void Netlist::add_component(const std::string& kind, std::uint16_t block, int width) {
    components_.push_back({kind, block, width});
}

int Netlist::component_count(std::string_view kind, std::string_view block) const {
    int count = 0;
    for (const auto& c : components_)
        if (c.kind == kind && (block.empty() || blocks_[c.block] == block)) ++count;
    return count;
}

void Netlist::set_bus(const std::string& name, std::vector<NetId> bits) { buses_[name] = std::move(bits); }

const std::vector<NetId>* Netlist::bus(std::string_view name) const {
    auto it = buses_.find(std::string(name));
    return it == buses_.end() ? nullptr : &it->second;
}

void Netlist::set_attribute(const std::string& key, const std::string& value) { attributes_[key] = value; }

std::string Netlist::attribute(const std::string& key, const std::string& fallback) const {
    auto it = attributes_.find(key);
    return it == attributes_.end() ? fallback : it->second;
}

bool Netlist::is_sequential() const {
    return std::any_of(gates_.begin(), gates_.end(), [](const Gate& g) { return g.type == GateType::Dff; });
}

std::vector<std::uint32_t> Netlist::combinational_order() const {
    // Kahn's algorithm over gate -> gate edges, cut at DFF outputs.
    std::vector<std::vector<std::uint32_t>> fanout(gates_.size());
    std::vector<int> pending(gates_.size(), 0);
    for (std::uint32_t g = 0; g < gates_.size(); ++g) {
        const Gate& gate = gates_[g];
        if (gate.type == GateType::Dff) continue;
        for (int i = 0; i < gate_arity(gate.type); ++i) {
            const Net& src = nets_[gate.in[static_cast<std::size_t>(i)]];
            if (src.driver == DriverKind::Gate && gates_[src.gate].type != GateType::Dff) {
                fanout[src.gate].push_back(g);
                ++pending[g];
            }
        }
    }
    std::vector<std::uint32_t> order;
    std::queue<std::uint32_t> ready;
    std::size_t comb = 0;
    for (std::uint32_t g = 0; g < gates_.size(); ++g) {
        if (gates_[g].type == GateType::Dff) continue;
        ++comb;
        if (pending[g] == 0) ready.push(g);
    }
    while (!ready.empty()) {
        const auto g = ready.front();
        ready.pop();
        order.push_back(g);
        for (auto succ : fanout[g])
            if (--pending[succ] == 0) ready.push(succ);
    }
    if (order.size() != comb) throw ValidationError("combinational loop detected");
    return order;
}

void Netlist::validate() const {
    for (std::uint32_t g = 0; g < gates_.size(); ++g) {
        const Gate& gate = gates_[g];
        if (gate.block >= blocks_.size()) throw ValidationError("gate outside every block");
        if (gate.out >= nets_.size() || nets_[gate.out].driver != DriverKind::Gate || nets_[gate.out].gate != g)
            throw ValidationError("gate output net is not uniquely driven by its gate");
        const int arity = gate_arity(gate.type);
        for (int i = 0; i < 3; ++i) {
            const NetId in = gate.in[static_cast<std::size_t>(i)];
            if (i < arity) {
                if (in >= nets_.size()) throw ValidationError("gate input references an unknown net");
                if (nets_[in].driver == DriverKind::None)
                    throw ValidationError("net '" + nets_[in].name + "' has no driver");
            } else if (in != kNoNet) {
                throw ValidationError("gate has too many inputs for its type");
            }
        }
    }
    for (const auto& port : outputs_)
        for (NetId bit : port.bits)
            if (bit >= nets_.size() || nets_[bit].driver == DriverKind::None)
                throw ValidationError("output '" + port.name + "' has an undriven bit");
    for (const auto& [name, bits] : buses_)
        for (NetId bit : bits)
            if (bit >= nets_.size()) throw ValidationError("bus '" + name + "' references an unknown net");
    if (is_sequential() && (!find_input("clk") || !find_input("rst")))
        throw ValidationError("sequential design lacks clk/rst ports");
    combinational_order();
}

std::int64_t GateCensus::count(GateType t) const {
    auto it = counts.find(t);
    return it == counts.end() ? 0 : it->second;
}

std::int64_t GateCensus::total() const {
    std::int64_t sum = 0;
    for (const auto& [t, c] : counts) sum += c;
    return sum;
}

std::int64_t GateCensus::block_total(const std::string& block) const {
    auto it = per_block.find(block);
    if (it == per_block.end()) return 0;
    std::int64_t sum = 0;
    for (const auto& [t, c] : it->second) sum += c;
    return sum;
}

GateCensus& GateCensus::operator+=(const GateCensus& other) {
    for (const auto& [t, c] : other.counts) counts[t] += c;
    for (const auto& [b, m] : other.per_block)
        for (const auto& [t, c] : m) per_block[b][t] += c;
    return *this;
}

GateCensus gate_census(const Netlist& nl) {
    GateCensus census;
    for (const Gate& g : nl.gates()) {
        ++census.counts[g.type];
        ++census.per_block[nl.blocks()[g.block]][g.type];
    }
    return census;
}

void to_json(nlohmann::json& j, const GateCensus& c) {
    nlohmann::json counts = nlohmann::json::object();
    for (GateType t : kAllGateTypes) counts[std::string(gate_name(t))] = c.count(t);
    nlohmann::json blocks = nlohmann::json::object();
    for (const auto& [b, m] : c.per_block) {
        nlohmann::json entry = nlohmann::json::object();
        for (const auto& [t, n] : m) entry[std::string(gate_name(t))] = n;
        blocks[b] = entry;
    }
    j = {{"counts", counts}, {"dff", c.dff_count()}, {"total", c.total()}, {"blocks", blocks}};
}

void from_json(const nlohmann::json& j, GateCensus& c) {
    c = {};
    for (const auto& [name, n] : j.at("counts").items())
        if (n.get<std::int64_t>() > 0) c.counts[gate_from_name(name)] = n.get<std::int64_t>();
    if (j.contains("blocks"))
        for (const auto& [b, m] : j.at("blocks").items())
            for (const auto& [name, n] : m.items()) c.per_block[b][gate_from_name(name)] = n.get<std::int64_t>();
}

}  // namespace printsvm
