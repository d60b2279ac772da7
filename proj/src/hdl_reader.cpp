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

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "printsvm/error.hpp"
#include "printsvm/simulator.hpp"

namespace printsvm {

namespace {

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) tokens.push_back(std::move(cur));
        cur.clear();
    };
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '(' || c == ')' || c == ';') {
            flush();
            if (c == '(' || c == ')') tokens.emplace_back(1, c);
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return tokens;
}

std::string strip_suffix_id(const std::string& s, std::string_view marker) {
    const auto pos = s.rfind(marker);
    if (pos == std::string::npos) throw ParseError("cannot derive a block from '" + s + "'");
    return s.substr(0, pos);
}

int range_width(const std::string& token) {
    // "[hi:0]"
    const auto colon = token.find(':');
    if (token.size() < 5 || token.front() != '[' || colon == std::string::npos)
        throw ParseError("bad range '" + token + "'");
    return std::stoi(token.substr(1, colon - 1)) + 1;
}

GateType primitive_type(const std::string& word) {
    if (word == "and") return GateType::And2;
    if (word == "or") return GateType::Or2;
    if (word == "nand") return GateType::Nand2;
    if (word == "nor") return GateType::Nor2;
    if (word == "not") return GateType::Not;
    if (word == "xor") return GateType::Xor2;
    throw ParseError("unsupported primitive '" + word + "'");
}

}  // namespace

Netlist read_hdl(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;

    std::string module_name;
    std::vector<std::string> blocks;
    std::vector<std::tuple<std::string, std::string, int>> components;
    std::vector<std::pair<std::string, std::vector<std::string>>> buses;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<std::pair<std::string, std::vector<std::string>>> outputs_pending;
    std::map<std::string, int> output_widths;
    std::vector<std::string> output_order;

    std::optional<Netlist> nl;
    auto require_module = [&] {
        if (!nl) throw ParseError("line " + std::to_string(line_no) + ": statement outside a module");
        return &*nl;
    };
    auto net_of = [&](const std::string& token) {
        const NetId id = nl->find_net(token);
        if (id == kNoNet) throw ParseError("line " + std::to_string(line_no) + ": unknown net '" + token + "'");
        return id;
    };
    auto block_of = [&](const std::string& base) { return nl->add_block(base); };

    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        std::string_view body(line);
        body.remove_prefix(first);
        if (body.starts_with("//")) {
            auto tokens = tokenize(body.substr(2));
            if (tokens.empty()) continue;
            if (tokens[0] == "@block" && tokens.size() == 2) blocks.push_back(tokens[1]);
            else if (tokens[0] == "@component" && tokens.size() == 4)
                components.emplace_back(tokens[1], tokens[2], std::stoi(tokens[3]));
            else if (tokens[0] == "@bus" && tokens.size() >= 2)
                buses.emplace_back(tokens[1], std::vector<std::string>(tokens.begin() + 2, tokens.end()));
            else if (tokens[0] == "@attr" && tokens.size() >= 2) {
                const std::string_view rest = body.substr(body.find(tokens[1]) + tokens[1].size());
                const auto vstart = rest.find_first_not_of(' ');
                attributes.emplace_back(tokens[1], vstart == std::string_view::npos ? "" : std::string(rest.substr(vstart)));
            }
            continue;
        }
        auto tokens = tokenize(body);
        const std::string& kw = tokens[0];
        if (kw == "module") {
            if (tokens.size() < 2) throw ParseError("line " + std::to_string(line_no) + ": module without a name");
            module_name = tokens[1];
            nl.emplace(module_name);
            for (const auto& b : blocks) nl->add_block(b);
        } else if (kw == "endmodule") {
            break;
        } else if (kw == "input") {
            require_module();
            if (tokens.size() == 2) nl->add_input(tokens[1], 1);
            else if (tokens.size() == 3) nl->add_input(tokens[2], range_width(tokens[1]));
            else throw ParseError("line " + std::to_string(line_no) + ": bad input declaration");
        } else if (kw == "output") {
            require_module();
            if (tokens.size() == 2) output_widths[tokens[1]] = 1, output_order.push_back(tokens[1]);
            else if (tokens.size() == 3) output_widths[tokens[2]] = range_width(tokens[1]), output_order.push_back(tokens[2]);
            else throw ParseError("line " + std::to_string(line_no) + ": bad output declaration");
        } else if (kw == "wire" || kw == "reg") {
            require_module();
            if (tokens.size() != 2) throw ParseError("line " + std::to_string(line_no) + ": bad net declaration");
            nl->declare_net(tokens[1]);
        } else if (kw == "assign") {
            require_module();
            // assign y = s ? b : a   |   assign port[i] = net
            if (tokens.size() == 8 && tokens[2] == "=" && tokens[4] == "?" && tokens[6] == ":") {
                const NetId out = net_of(tokens[1]);
                nl->add_gate_driving(out, GateType::Mux2, block_of(strip_suffix_id(tokens[1], "_n")),
                                     {net_of(tokens[3]), net_of(tokens[7]), net_of(tokens[5])}, false);
            } else if (tokens.size() == 4 && tokens[2] == "=") {
                const auto bracket = tokens[1].find('[');
                const std::string port = tokens[1].substr(0, bracket);
                const int bit = bracket == std::string::npos ? 0 : std::stoi(tokens[1].substr(bracket + 1));
                if (!output_widths.count(port))
                    throw ParseError("line " + std::to_string(line_no) + ": assignment to undeclared output '" + port + "'");
                auto it = std::find_if(outputs_pending.begin(), outputs_pending.end(),
                                       [&](const auto& p) { return p.first == port; });
                if (it == outputs_pending.end()) {
                    outputs_pending.emplace_back(port, std::vector<std::string>(static_cast<std::size_t>(output_widths[port])));
                    it = outputs_pending.end() - 1;
                }
                if (bit < 0 || bit >= output_widths[port])
                    throw ParseError("line " + std::to_string(line_no) + ": output bit out of range");
                it->second[static_cast<std::size_t>(bit)] = tokens[3];
            } else {
                throw ParseError("line " + std::to_string(line_no) + ": unsupported assign form");
            }
        } else if (kw == "always") {
            require_module();
            // always @(posedge clk) if (rst) q <= 1'bV; else q <= d;
            std::vector<std::string> t;
            for (const auto& tok : tokens)
                if (tok != "(" && tok != ")") t.push_back(tok);
            if (t.size() != 13 || t[1] != "@" || t[2] != "posedge" || t[3] != "clk" || t[4] != "if" || t[5] != "rst" ||
                t[7] != "<=" || t[9] != "else" || t[10] != t[6] || t[11] != "<=")
                throw ParseError("line " + std::to_string(line_no) + ": unsupported always block");
            if (t[8] != "1'b0" && t[8] != "1'b1") throw ParseError("line " + std::to_string(line_no) + ": bad reset value");
            nl->add_gate_driving(net_of(t[6]), GateType::Dff, block_of(strip_suffix_id(t[6], "_n")),
                                 {net_of(t[12]), kNoNet, kNoNet}, t[8] == "1'b1");
        } else {
            require_module();
            const GateType type = primitive_type(kw);
            const int arity = gate_arity(type);
            if (tokens.size() != static_cast<std::size_t>(arity) + 5 || tokens[2] != "(" || tokens.back() != ")")
                throw ParseError("line " + std::to_string(line_no) + ": bad " + kw + " instance");
            std::array<NetId, 3> ins{kNoNet, kNoNet, kNoNet};
            for (int i = 0; i < arity; ++i) ins[static_cast<std::size_t>(i)] = net_of(tokens[static_cast<std::size_t>(4 + i)]);
            nl->add_gate_driving(net_of(tokens[3]), type, block_of(strip_suffix_id(tokens[1], "_g")), ins, false);
        }
    }
    if (!nl) throw ParseError("no module found");

    for (const auto& port : output_order) {
        auto it = std::find_if(outputs_pending.begin(), outputs_pending.end(), [&](const auto& p) { return p.first == port; });
        if (it == outputs_pending.end()) throw ParseError("output '" + port + "' is never assigned");
        std::vector<NetId> bits;
        for (const auto& b : it->second) {
            if (b.empty()) throw ParseError("output '" + port + "' has an unassigned bit");
            bits.push_back(net_of(b));
        }
        nl->add_output(port, std::move(bits));
    }
    for (const auto& [block, kind, width] : components) nl->add_component(kind, nl->block_id(block), width);
    for (const auto& [bus, names] : buses) {
        std::vector<NetId> bits;
        for (const auto& n : names) bits.push_back(net_of(n));
        nl->set_bus(bus, std::move(bits));
    }
    for (const auto& [k, v] : attributes) nl->set_attribute(k, v);
    nl->validate();
    return std::move(*nl);
}

}  // namespace printsvm
