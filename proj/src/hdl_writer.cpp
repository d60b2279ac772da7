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

#include <sstream>

#include "printsvm/circuitgen.hpp"

namespace printsvm {

namespace {

std::string_view primitive(GateType t) {
    switch (t) {
    case GateType::And2: return "and";
    case GateType::Or2: return "or";
    case GateType::Nand2: return "nand";
    case GateType::Nor2: return "nor";
    case GateType::Not: return "not";
    case GateType::Xor2: return "xor";
    default: return "";
    }
}

}  // namespace

std::string emit_hdl(const Netlist& nl) {
    std::ostringstream out;
    const auto& nets = nl.nets();
    auto name = [&](NetId id) -> const std::string& { return nets[id].name; };

    out << "// printsvm structural netlist (Verilog-2001 subset)\n";
    out << "// design " << nl.attribute("design", "custom") << ": n=" << nl.attribute("n", "?")
        << " m=" << nl.attribute("m", "?") << " input " << nl.attribute("input_format", "?") << " weight "
        << nl.attribute("weight_format", "?") << " bias " << nl.attribute("bias_format", "?") << " accumulator "
        << nl.attribute("accumulator_width", "?") << "b\n";
    out << "// model sha256 " << nl.attribute("model_hash", "-") << "\n";
    for (const auto& [key, value] : nl.attributes()) out << "// @attr " << key << ' ' << value << '\n';
    for (const auto& block : nl.blocks()) out << "// @block " << block << '\n';
    for (const auto& c : nl.components())
        out << "// @component " << nl.blocks()[c.block] << ' ' << c.kind << ' ' << c.width << '\n';
    for (const auto& [bus, bits] : nl.buses()) {
        out << "// @bus " << bus;
        for (NetId b : bits) out << ' ' << name(b);
        out << '\n';
    }

    out << "module " << nl.module_name() << " (";
    bool first = true;
    for (const auto& p : nl.inputs()) {
        out << (first ? "" : ", ") << p.name;
        first = false;
    }
    for (const auto& p : nl.outputs()) {
        out << (first ? "" : ", ") << p.name;
        first = false;
    }
    out << ");\n";
    for (const auto& p : nl.inputs()) {
        if (p.name == "clk" || p.name == "rst") out << "  input " << p.name << ";\n";
        else out << "  input [" << p.bits.size() - 1 << ":0] " << p.name << ";\n";
    }
    for (const auto& p : nl.outputs()) out << "  output [" << p.bits.size() - 1 << ":0] " << p.name << ";\n";

    for (NetId id = 0; id < nets.size(); ++id) {
        const Net& net = nets[id];
        if (net.driver != DriverKind::Gate) continue;
        out << (nl.gates()[net.gate].type == GateType::Dff ? "  reg " : "  wire ") << net.name << ";\n";
    }

    const auto& gates = nl.gates();
    for (std::size_t g = 0; g < gates.size(); ++g) {
        const Gate& gate = gates[g];
        switch (gate.type) {
        case GateType::Mux2:
            out << "  assign " << name(gate.out) << " = " << name(gate.in[0]) << " ? " << name(gate.in[2]) << " : "
                << name(gate.in[1]) << ";\n";
            break;
        case GateType::Dff:
            out << "  always @(posedge clk) if (rst) " << name(gate.out) << " <= 1'b" << (gate.init ? 1 : 0)
                << "; else " << name(gate.out) << " <= " << name(gate.in[0]) << ";\n";
            break;
        default:
            out << "  " << primitive(gate.type) << ' ' << nl.blocks()[gate.block] << "_g" << g << " ("
                << name(gate.out);
            for (int i = 0; i < gate_arity(gate.type); ++i) out << ", " << name(gate.in[static_cast<std::size_t>(i)]);
            out << ");\n";
        }
    }
    for (const auto& p : nl.outputs())
        for (std::size_t i = 0; i < p.bits.size(); ++i)
            out << "  assign " << p.name << '[' << i << "] = " << name(p.bits[i]) << ";\n";
    out << "endmodule\n";
    return out.str();
}

}  // namespace printsvm
