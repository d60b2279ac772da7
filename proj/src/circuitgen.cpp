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

#include "printsvm/circuitgen.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "printsvm/error.hpp"
#include "printsvm/hash.hpp"

namespace printsvm {

namespace {

using Bits = std::vector<NetId>;

std::vector<std::uint8_t> to_bits(std::int64_t value, int width) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(width));
    const auto u = static_cast<std::uint64_t>(value);
    for (int i = 0; i < width; ++i) bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((u >> i) & 1U);
    return bits;
}

Bits sign_extend(Bits bits, std::size_t width) {
    const NetId msb = bits.back();
    while (bits.size() < width) bits.push_back(msb);
    bits.resize(width);
    return bits;
}

Bits slice(const Bits& bits, std::size_t offset, std::size_t count) {
    return Bits(bits.begin() + static_cast<std::ptrdiff_t>(offset),
                bits.begin() + static_cast<std::ptrdiff_t>(offset + count));
}

// Gate emission helpers bound to one block.
struct BlockBuilder {
    Netlist& nl;
    std::uint16_t block;

    NetId inv(NetId a) { return nl.add_gate(GateType::Not, block, a); }
    NetId and2(NetId a, NetId b) { return nl.add_gate(GateType::And2, block, a, b); }
    NetId or2(NetId a, NetId b) { return nl.add_gate(GateType::Or2, block, a, b); }
    NetId xor2(NetId a, NetId b) { return nl.add_gate(GateType::Xor2, block, a, b); }
    NetId mux(NetId sel, NetId in0, NetId in1) { return nl.add_gate(GateType::Mux2, block, sel, in0, in1); }
    NetId dff(NetId d, bool init) { return nl.add_gate(GateType::Dff, block, d, kNoNet, kNoNet, init); }

    // sum = a ^ b ^ c, carry = (a & b) | (c & (a ^ b)): XOR2 x2, AND2 x2, OR2 x1.
    std::pair<NetId, NetId> full_add(NetId a, NetId b, NetId c) {
        const NetId p = xor2(a, b);
        const NetId s = xor2(p, c);
        const NetId g = and2(a, b);
        const NetId t = and2(c, p);
        return {s, or2(g, t)};
    }

    // k-bit ripple-carry adder of k full adders; the final carry is dropped.
    Bits ripple_add(const Bits& a, const Bits& b, NetId carry_in) {
        Bits sum;
        sum.reserve(a.size());
        NetId carry = carry_in;
        for (std::size_t i = 0; i < a.size(); ++i) {
            auto [s, c] = full_add(a[i], b[i], carry);
            sum.push_back(s);
            carry = c;
        }
        nl.add_component("adder", block, static_cast<int>(a.size()));
        return sum;
    }

    // Unsigned x (a bits) times two's-complement w (b bits) -> a+b bits.
    // Row i = x_i & w, sign-extended and shifted by i, accumulated by
    // ripple adders over bit positions i .. a+b-1.
    Bits multiply(const Bits& x, const Bits& w) {
        const std::size_t width = x.size() + w.size();
        auto row = [&](std::size_t i) {
            Bits r;
            for (std::size_t j = 0; j < w.size(); ++j) r.push_back(and2(x[i], w[j]));
            return sign_extend(r, width - i);
        };
        Bits acc = row(0);
        for (std::size_t i = 1; i < x.size(); ++i) {
            const Bits partial = row(i);
            const Bits upper = ripple_add(slice(acc, i, width - i), partial, kConst0);
            std::copy(upper.begin(), upper.end(), acc.begin() + static_cast<std::ptrdiff_t>(i));
        }
        nl.add_component("multiplier", block, static_cast<int>(width));
        return acc;
    }

    // Balanced pairwise tree of ripple adders. Each node is one bit wider
    // than its wider operand, capped at the accumulator width.
    Bits multi_operand_add(std::vector<Bits> operands, std::size_t acc_width) {
        while (operands.size() > 1) {
            std::vector<Bits> next;
            for (std::size_t i = 0; i + 1 < operands.size(); i += 2) {
                const std::size_t w = std::min(acc_width, std::max(operands[i].size(), operands[i + 1].size()) + 1);
                next.push_back(ripple_add(sign_extend(operands[i], w), sign_extend(operands[i + 1], w), kConst0));
            }
            if (operands.size() % 2 == 1) next.push_back(operands.back());
            operands = std::move(next);
        }
        return sign_extend(operands.front(), acc_width);
    }

    // Signed a > b as the sign of (b - a) over width+1 bits.
    NetId greater_than(const Bits& a, const Bits& b) {
        const std::size_t width = a.size() + 1;
        Bits not_a;
        for (NetId bit : a) not_a.push_back(inv(bit));
        const Bits diff = ripple_add(sign_extend(b, width), sign_extend(not_a, width), kConst1);
        nl.add_component("comparator", block, static_cast<int>(a.size()));
        return diff.back();
    }

    Bits registers(const Bits& d, const std::vector<bool>& init, const std::string& name) {
        Bits q;
        for (std::size_t i = 0; i < d.size(); ++i) q.push_back(dff(d[i], init[i]));
        nl.add_component("register:" + name, block, static_cast<int>(d.size()));
        return q;
    }
};

void drive_register(Netlist& nl, NetId q, NetId d) { nl.connect(nl.net(q).gate, 0, d); }

// Materialize a folded storage DAG as gates driven by the select lines.
Bits materialize_storage(Netlist& nl, std::uint16_t block, const FoldedStorage& folded, const Bits& select) {
    BlockBuilder b{nl, block};
    std::vector<NetId> node_net(folded.nodes.size(), kNoNet);
    std::map<int, NetId> inverted;
    for (std::size_t i = 0; i < folded.nodes.size(); ++i) {
        const auto& node = folded.nodes[i];
        switch (node.kind) {
        case FoldedStorage::Kind::Const0: node_net[i] = kConst0; break;
        case FoldedStorage::Kind::Const1: node_net[i] = kConst1; break;
        case FoldedStorage::Kind::Select: node_net[i] = select[static_cast<std::size_t>(node.select)]; break;
        case FoldedStorage::Kind::NotSelect: {
            auto it = inverted.find(node.select);
            if (it == inverted.end())
                it = inverted.emplace(node.select, b.inv(select[static_cast<std::size_t>(node.select)])).first;
            node_net[i] = it->second;
            break;
        }
        case FoldedStorage::Kind::Mux:
            node_net[i] = b.mux(select[static_cast<std::size_t>(node.select)],
                                node_net[static_cast<std::size_t>(node.lo)],
                                node_net[static_cast<std::size_t>(node.hi)]);
            break;
        }
    }
    Bits out;
    for (int idx : folded.outputs) out.push_back(node_net[static_cast<std::size_t>(idx)]);
    return out;
}

Bits emit_engine(Netlist& nl, std::uint16_t block, const Bits& x, const Bits& row, int m, int input_width,
                 int weight_width, int bias_width, int acc_width) {
    BlockBuilder b{nl, block};
    const auto iw = static_cast<std::size_t>(input_width);
    const auto ww = static_cast<std::size_t>(weight_width);
    std::vector<Bits> operands;
    for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i)
        operands.push_back(b.multiply(slice(x, i * iw, iw), slice(row, i * ww, ww)));
    operands.push_back(slice(row, static_cast<std::size_t>(m) * ww, static_cast<std::size_t>(bias_width)));
    return b.multi_operand_add(std::move(operands), static_cast<std::size_t>(acc_width));
}

void describe(Netlist& nl, const QuantizedSvm& q, const std::string& kind) {
    nl.set_attribute("design", kind);
    nl.set_attribute("m", std::to_string(q.m));
    nl.set_attribute("n", std::to_string(q.n));
    nl.set_attribute("input_width", std::to_string(q.input_format.width()));
    nl.set_attribute("weight_width", std::to_string(q.weight_format.width()));
    nl.set_attribute("bias_width", std::to_string(q.bias_format.width()));
    nl.set_attribute("accumulator_width", std::to_string(q.accumulator_width));
    nl.set_attribute("input_format", "u" + std::to_string(q.input_format.integer_bits) + "." +
                                         std::to_string(q.input_format.fraction_bits));
    nl.set_attribute("weight_format", "s" + std::to_string(q.weight_format.integer_bits) + "." +
                                          std::to_string(q.weight_format.fraction_bits));
    nl.set_attribute("bias_format", "s" + std::to_string(q.bias_format.integer_bits) + "." +
                                        std::to_string(q.bias_format.fraction_bits));
    nl.set_attribute("model_hash", model_hash(q));
}

}  // namespace

int StorageSpec::select_bits() const { return ceil_log2(rows.size()); }

StorageSpec storage_spec(const QuantizedSvm& q) {
    q.validate();
    StorageSpec spec;
    for (int k = 0; k < q.n; ++k) {
        std::vector<std::uint8_t> row;
        for (auto w : q.weights[static_cast<std::size_t>(k)]) {
            auto bits = to_bits(w, q.weight_format.width());
            row.insert(row.end(), bits.begin(), bits.end());
        }
        auto bias = to_bits(q.biases[static_cast<std::size_t>(k)], q.bias_format.width());
        row.insert(row.end(), bias.begin(), bias.end());
        spec.rows.push_back(std::move(row));
    }
    return spec;
}

int FoldedStorage::mux_count() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.kind == Kind::Mux; }));
}

int FoldedStorage::inverter_count() const {
    std::vector<int> lines;
    for (const auto& n : nodes)
        if (n.kind == Kind::NotSelect) lines.push_back(n.select);
    std::sort(lines.begin(), lines.end());
    return static_cast<int>(std::unique(lines.begin(), lines.end()) - lines.begin());
}

std::vector<std::uint8_t> FoldedStorage::evaluate(std::uint64_t select) const {
    std::vector<std::uint8_t> value(nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& n = nodes[i];
        const auto s = static_cast<std::uint8_t>((select >> (n.select < 0 ? 0 : n.select)) & 1U);
        switch (n.kind) {
        case Kind::Const0: value[i] = 0; break;
        case Kind::Const1: value[i] = 1; break;
        case Kind::Select: value[i] = s; break;
        case Kind::NotSelect: value[i] = s ^ 1U; break;
        case Kind::Mux: value[i] = s ? value[static_cast<std::size_t>(n.hi)] : value[static_cast<std::size_t>(n.lo)]; break;
        }
    }
    std::vector<std::uint8_t> out;
    out.reserve(outputs.size());
    for (int o : outputs) out.push_back(value[static_cast<std::size_t>(o)]);
    return out;
}

FoldedStorage fold_mux_constants(const StorageSpec& spec) {
    if (spec.rows.empty()) throw ValidationError("storage needs at least one row");
    for (const auto& r : spec.rows)
        if (r.size() != spec.row_width()) throw ValidationError("storage rows differ in width");

    using Kind = FoldedStorage::Kind;
    FoldedStorage folded;
    folded.select_bits = spec.select_bits();
    folded.nodes.push_back({Kind::Const0, -1, -1, -1});
    folded.nodes.push_back({Kind::Const1, -1, -1, -1});
    std::map<std::tuple<Kind, int, int, int>, int> unique;

    auto intern = [&](Kind kind, int select, int lo, int hi) {
        const auto key = std::make_tuple(kind, select, lo, hi);
        auto it = unique.find(key);
        if (it != unique.end()) return it->second;
        folded.nodes.push_back({kind, select, lo, hi});
        const int id = static_cast<int>(folded.nodes.size() - 1);
        unique.emplace(key, id);
        return id;
    };

    constexpr int kDontCare = -1;
    const std::size_t leaves = std::size_t{1} << folded.select_bits;
    for (std::size_t bit = 0; bit < spec.row_width(); ++bit) {
        std::vector<int> level(leaves, kDontCare);
        for (std::size_t r = 0; r < spec.rows.size(); ++r) level[r] = spec.rows[r][bit] ? 1 : 0;
        for (int s = 0; s < folded.select_bits; ++s) {
            std::vector<int> up(level.size() / 2);
            for (std::size_t j = 0; j < up.size(); ++j) {
                const int lo = level[2 * j];
                const int hi = level[2 * j + 1];
                if (lo == kDontCare) up[j] = hi;
                else if (hi == kDontCare || lo == hi) up[j] = lo;
                else if (lo == 0 && hi == 1) up[j] = intern(Kind::Select, s, -1, -1);
                else if (lo == 1 && hi == 0) up[j] = intern(Kind::NotSelect, s, -1, -1);
                else up[j] = intern(Kind::Mux, s, lo, hi);
            }
            level = std::move(up);
        }
        folded.outputs.push_back(level.front() == kDontCare ? 0 : level.front());
    }
    return folded;
}

std::int64_t naive_mux_gate_count(const StorageSpec& spec) {
    return static_cast<std::int64_t>(spec.row_width()) * ((std::int64_t{1} << spec.select_bits()) - 1);
}

std::vector<std::uint8_t> naive_mux_evaluate(const StorageSpec& spec, std::uint64_t select) {
    const std::size_t leaves = std::size_t{1} << spec.select_bits();
    std::vector<std::uint8_t> out;
    for (std::size_t bit = 0; bit < spec.row_width(); ++bit) {
        std::vector<std::uint8_t> level(leaves, 0);
        for (std::size_t r = 0; r < spec.rows.size(); ++r) level[r] = spec.rows[r][bit];
        for (int s = 0; s < spec.select_bits(); ++s) {
            std::vector<std::uint8_t> up(level.size() / 2);
            for (std::size_t j = 0; j < up.size(); ++j) up[j] = ((select >> s) & 1U) ? level[2 * j + 1] : level[2 * j];
            level = std::move(up);
        }
        out.push_back(level.front());
    }
    return out;
}

Netlist build_sequential(const QuantizedSvm& q) {
    q.validate();
    const int iw = q.input_format.width();
    const int ww = q.weight_format.width();
    const int bw = q.bias_format.width();
    const int aw = q.accumulator_width;
    const int cw = ceil_log2(static_cast<std::uint64_t>(q.n));

    Netlist nl("svm_sequential");
    const auto control = nl.add_block("control");
    const auto storage = nl.add_block("storage");
    const auto engine = nl.add_block("engine");
    const auto voter = nl.add_block("voter");
    nl.add_input("clk", 1);
    nl.add_input("rst", 1);
    const Bits x = nl.add_input("x", q.m * iw).bits;

    // Control: cw-bit counter and a sticky done flag. Registers are created
    // with a constant D input and rewired once their next-state logic exists.
    BlockBuilder ctl{nl, control};
    const Bits count_q = ctl.registers(Bits(static_cast<std::size_t>(cw), kConst0),
                                       std::vector<bool>(static_cast<std::size_t>(cw), false), "counter");
    const NetId done_q = ctl.registers({kConst0}, {false}, "done").front();
    const NetId enable = ctl.inv(done_q);

    // count + 1 by a half-adder chain, held once done.
    Bits incremented;
    NetId carry = count_q[0];
    incremented.push_back(ctl.inv(count_q[0]));
    for (std::size_t i = 1; i < count_q.size(); ++i) {
        incremented.push_back(ctl.xor2(count_q[i], carry));
        if (i + 1 < count_q.size()) carry = ctl.and2(count_q[i], carry);
    }
    nl.add_component("counter", control, cw);
    for (std::size_t i = 0; i < count_q.size(); ++i)
        drive_register(nl, count_q[i], ctl.mux(enable, count_q[i], incremented[i]));

    // terminal count: counter == n - 1
    NetId terminal = kNoNet;
    for (std::size_t i = 0; i < count_q.size(); ++i) {
        const bool one = (((q.n - 1) >> i) & 1) != 0;
        const NetId literal = one ? count_q[i] : ctl.inv(count_q[i]);
        terminal = terminal == kNoNet ? literal : ctl.and2(terminal, literal);
    }
    drive_register(nl, done_q, ctl.or2(done_q, terminal));

    // Storage: hardwired rows selected by the counter.
    const StorageSpec spec = storage_spec(q);
    const FoldedStorage folded = fold_mux_constants(spec);
    const Bits row = materialize_storage(nl, storage, folded, count_q);
    nl.add_component("mux_storage", storage, static_cast<int>(spec.row_width()));

    // Engine: one weighted sum per cycle.
    const Bits score = emit_engine(nl, engine, x, row, q.m, iw, ww, bw, aw);

    // Voter: strict-greater update of (best score, best id). The score
    // register resets to the most negative value, so the first classifier
    // always wins its cycle and ties keep the smaller id.
    BlockBuilder vb{nl, voter};
    std::vector<bool> most_negative(static_cast<std::size_t>(aw), false);
    most_negative.back() = true;
    const Bits best_score = vb.registers(Bits(static_cast<std::size_t>(aw), kConst0), most_negative, "score");
    const Bits best_id = vb.registers(Bits(static_cast<std::size_t>(cw), kConst0),
                                      std::vector<bool>(static_cast<std::size_t>(cw), false), "id");
    const NetId better = vb.greater_than(score, best_score);
    const NetId update = vb.and2(better, enable);
    for (std::size_t i = 0; i < best_score.size(); ++i)
        drive_register(nl, best_score[i], vb.mux(update, best_score[i], score[i]));
    for (std::size_t i = 0; i < best_id.size(); ++i)
        drive_register(nl, best_id[i], vb.mux(update, best_id[i], count_q[i]));

    nl.add_output("class_id", best_id);
    nl.add_output("done", {done_q});
    nl.set_bus("counter", count_q);
    nl.set_bus("row", row);
    nl.set_bus("score", score);
    nl.set_bus("best_score", best_score);
    nl.set_bus("best_id", best_id);
    nl.set_bus("done", {done_q});
    describe(nl, q, "sequential");
    nl.validate();
    return nl;
}

Netlist build_engine(int m, int input_width, int weight_width, int bias_width, int accumulator_width) {
    Netlist nl("svm_engine");
    const auto engine = nl.add_block("engine");
    const Bits x = nl.add_input("x", m * input_width).bits;
    const Bits row = nl.add_input("row", m * weight_width + bias_width).bits;
    const Bits score = emit_engine(nl, engine, x, row, m, input_width, weight_width, bias_width, accumulator_width);
    nl.add_output("score", score);
    nl.set_bus("score", score);
    nl.validate();
    return nl;
}

Netlist build_ripple_adder(int width) {
    if (width < 1) throw ValidationError("adder width must be >= 1");
    Netlist nl("ripple_adder");
    BlockBuilder b{nl, nl.add_block("adder")};
    const Bits a = nl.add_input("a", width).bits;
    const Bits c = nl.add_input("b", width).bits;
    nl.add_output("sum", b.ripple_add(a, c, kConst0));
    nl.validate();
    return nl;
}

Netlist build_multiplier(int input_width, int weight_width) {
    if (input_width < 1 || weight_width < 1) throw ValidationError("multiplier widths must be >= 1");
    Netlist nl("multiplier");
    BlockBuilder b{nl, nl.add_block("multiplier")};
    const Bits x = nl.add_input("x", input_width).bits;
    const Bits w = nl.add_input("w", weight_width).bits;
    nl.add_output("p", b.multiply(x, w));
    nl.validate();
    return nl;
}

Netlist build_comparator(int width) {
    if (width < 1) throw ValidationError("comparator width must be >= 1");
    Netlist nl("comparator");
    BlockBuilder b{nl, nl.add_block("comparator")};
    const Bits a = nl.add_input("a", width).bits;
    const Bits c = nl.add_input("b", width).bits;
    nl.add_output("gt", {b.greater_than(a, c)});
    nl.validate();
    return nl;
}

Netlist build_parallel_baseline(const QuantizedSvm& q, BaselineShape shape) {
    q.validate();
    const int iw = q.input_format.width();
    const int ww = q.weight_format.width();
    const int bw = q.bias_format.width();
    const int aw = q.accumulator_width;
    const StorageSpec spec = storage_spec(q);

    std::vector<int> row_of_block;
    if (shape == BaselineShape::OneVsRest) {
        for (int k = 0; k < q.n; ++k) row_of_block.push_back(k);
    } else {
        for (int i = 0; i < q.n; ++i)
            for (int j = i + 1; j < q.n; ++j) row_of_block.push_back(i);
    }
    const int blocks = static_cast<int>(row_of_block.size());
    const int id_width = std::max(1, ceil_log2(static_cast<std::uint64_t>(blocks)));

    Netlist nl(shape == BaselineShape::OneVsRest ? "svm_parallel_ovr" : "svm_parallel_ovo");
    std::vector<std::uint16_t> block_ids;
    for (int k = 0; k < blocks; ++k) block_ids.push_back(nl.add_block("classifier_" + std::to_string(k)));
    const auto argmax = nl.add_block("argmax");
    const Bits x = nl.add_input("x", q.m * iw).bits;

    std::vector<Bits> scores;
    for (int k = 0; k < blocks; ++k) {
        Bits row;
        for (auto bit : spec.rows[static_cast<std::size_t>(row_of_block[static_cast<std::size_t>(k)])])
            row.push_back(bit ? kConst1 : kConst0);
        scores.push_back(emit_engine(nl, block_ids[static_cast<std::size_t>(k)], x, row, q.m, iw, ww, bw, aw));
    }

    // Comparator chain: strictly greater replaces, so ties keep the smaller index.
    BlockBuilder ab{nl, argmax};
    Bits best = scores.front();
    Bits best_id(static_cast<std::size_t>(id_width), kConst0);
    for (int k = 1; k < blocks; ++k) {
        const NetId better = ab.greater_than(scores[static_cast<std::size_t>(k)], best);
        Bits next;
        for (std::size_t i = 0; i < best.size(); ++i) next.push_back(ab.mux(better, best[i], scores[static_cast<std::size_t>(k)][i]));
        best = std::move(next);
        Bits next_id;
        for (int i = 0; i < id_width; ++i)
            next_id.push_back(ab.mux(better, best_id[static_cast<std::size_t>(i)], ((k >> i) & 1) ? kConst1 : kConst0));
        best_id = std::move(next_id);
    }
    nl.add_output("class_id", best_id);
    nl.set_bus("best_score", best);
    describe(nl, q, shape == BaselineShape::OneVsRest ? "parallel_ovr" : "parallel_ovo");
    nl.set_attribute("classifier_blocks", std::to_string(blocks));
    nl.validate();
    return nl;
}

std::string model_hash(const QuantizedSvm& q) {
    const nlohmann::json j = {{"input_format", q.input_format}, {"weight_format", q.weight_format},
                              {"bias_format", q.bias_format},   {"accumulator_width", q.accumulator_width},
                              {"weights", q.weights},           {"biases", q.biases}};
    return sha256_hex(j.dump());
}

}  // namespace printsvm
