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

#include "printsvm/simulator.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include "printsvm/error.hpp"

namespace printsvm {

CompiledNetlist::CompiledNetlist(const Netlist& nl) : nl_(&nl), order_(nl.combinational_order()) {
    for (std::uint32_t g = 0; g < nl.gates().size(); ++g)
        if (nl.gates()[g].type == GateType::Dff) registers_.push_back(g);
}

Simulator::Simulator(const CompiledNetlist& compiled)
    : compiled_(compiled), values_(compiled.netlist().nets().size(), 0), next_(compiled.registers().size(), 0) {
    values_[kConst1] = 1;
}

void Simulator::set_input(std::string_view port, std::span<const std::uint8_t> bits) {
    const Port* p = compiled_.netlist().find_input(port);
    if (!p) throw SimulationError("design has no input port '" + std::string(port) + "'");
    if (bits.size() != p->bits.size())
        throw SimulationError("port '" + std::string(port) + "' expects " + std::to_string(p->bits.size()) +
                              " bits, got " + std::to_string(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i) values_[p->bits[i]] = bits[i] & 1U;
}

void Simulator::set_input(std::string_view port, std::uint64_t value) {
    const Port* p = compiled_.netlist().find_input(port);
    if (!p) throw SimulationError("design has no input port '" + std::string(port) + "'");
    for (std::size_t i = 0; i < p->bits.size(); ++i)
        values_[p->bits[i]] = i < 64 ? static_cast<std::uint8_t>((value >> i) & 1U) : 0;
}

void Simulator::settle() {
    const auto& gates = compiled_.netlist().gates();
    auto* v = values_.data();
    for (std::uint32_t idx : compiled_.order()) {
        const Gate& g = gates[idx];
        const std::uint8_t a = v[g.in[0]];
        switch (g.type) {
        case GateType::And2: v[g.out] = a & v[g.in[1]]; break;
        case GateType::Or2: v[g.out] = a | v[g.in[1]]; break;
        case GateType::Nand2: v[g.out] = (a & v[g.in[1]]) ^ 1U; break;
        case GateType::Nor2: v[g.out] = (a | v[g.in[1]]) ^ 1U; break;
        case GateType::Not: v[g.out] = a ^ 1U; break;
        case GateType::Xor2: v[g.out] = a ^ v[g.in[1]]; break;
        case GateType::Mux2: v[g.out] = a ? v[g.in[2]] : v[g.in[1]]; break;
        case GateType::Dff: break;
        }
    }
}

void Simulator::clock() {
    const auto& gates = compiled_.netlist().gates();
    const Port* rst = compiled_.netlist().find_input("rst");
    const bool reset = rst && values_[rst->bits.front()] != 0;
    const auto& regs = compiled_.registers();
    for (std::size_t i = 0; i < regs.size(); ++i) {
        const Gate& g = gates[regs[i]];
        next_[i] = reset ? static_cast<std::uint8_t>(g.init) : values_[g.in[0]];
    }
    for (std::size_t i = 0; i < regs.size(); ++i) values_[gates[regs[i]].out] = next_[i];
}

std::uint64_t Simulator::read_unsigned(std::span<const NetId> bits) const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bits.size() && i < 64; ++i) v |= static_cast<std::uint64_t>(values_[bits[i]]) << i;
    return v;
}

std::int64_t Simulator::read_signed(std::span<const NetId> bits) const {
    if (bits.empty()) return 0;
    std::uint64_t v = read_unsigned(bits);
    if (bits.size() < 64 && values_[bits.back()]) v |= ~std::uint64_t{0} << bits.size();
    return static_cast<std::int64_t>(v);
}

std::vector<std::uint8_t> Simulator::read_bits(std::span<const NetId> bits) const {
    std::vector<std::uint8_t> out;
    out.reserve(bits.size());
    for (NetId b : bits) out.push_back(values_[b]);
    return out;
}

std::vector<std::uint8_t> pack_inputs(std::span<const std::int64_t> x_raw, int input_width) {
    std::vector<std::uint8_t> bits;
    bits.reserve(x_raw.size() * static_cast<std::size_t>(input_width));
    for (auto x : x_raw)
        for (int i = 0; i < input_width; ++i)
            bits.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(x) >> i) & 1U));
    return bits;
}

namespace {

int input_width_of(const Netlist& nl, std::size_t features) {
    const std::string attr = nl.attribute("input_width");
    if (!attr.empty()) return std::stoi(attr);
    const Port* x = nl.find_input("x");
    if (!x || features == 0) throw SimulationError("cannot infer the input width");
    return static_cast<int>(x->bits.size() / features);
}

std::span<const NetId> bus_or_empty(const Netlist& nl, std::string_view name) {
    const auto* b = nl.bus(name);
    return b ? std::span<const NetId>(*b) : std::span<const NetId>();
}

std::string bit_string(std::int64_t value, std::size_t width) {
    std::string s(width, '0');
    for (std::size_t i = 0; i < width; ++i)
        if ((static_cast<std::uint64_t>(value) >> i) & 1U) s[width - 1 - i] = '1';
    return s;
}

}  // namespace

SimResult simulate(const CompiledNetlist& design, std::span<const std::int64_t> x_raw, int max_cycles,
                   bool record_rows) {
    const Netlist& nl = design.netlist();
    const Port* done_port = nl.find_output("done");
    const Port* id_port = nl.find_output("class_id");
    if (!done_port || !id_port) throw SimulationError("design lacks done/class_id outputs");

    Simulator sim(design);
    sim.set_input("x", pack_inputs(x_raw, input_width_of(nl, x_raw.size())));
    sim.set_input("rst", std::uint64_t{1});
    sim.settle();
    sim.clock();
    sim.set_input("rst", std::uint64_t{0});

    const auto counter = bus_or_empty(nl, "counter");
    const auto row = bus_or_empty(nl, "row");
    const auto score = bus_or_empty(nl, "score");
    const auto best_score = bus_or_empty(nl, "best_score");
    const auto best_id = bus_or_empty(nl, "best_id");

    SimResult result;
    for (int cycle = 0; cycle <= max_cycles; ++cycle) {
        sim.settle();
        if (sim.value(done_port->bits.front())) {
            result.trace.completed = true;
            result.class_index = static_cast<int>(sim.read_unsigned(id_port->bits));
            return result;
        }
        if (cycle == max_cycles) break;
        TraceRow r;
        r.cycle = cycle;
        r.counter = sim.read_unsigned(counter);
        if (record_rows) r.row_bits = sim.read_bits(row);
        r.accumulator = sim.read_signed(score);
        r.best_score = sim.read_signed(best_score);
        r.best_id = sim.read_unsigned(best_id);
        r.done = false;
        result.trace.rows.push_back(std::move(r));
        sim.clock();
    }
    throw SimulationError("done not asserted within " + std::to_string(max_cycles) + " cycles");
}

SimResult simulate(const Netlist& design, std::span<const std::int64_t> x_raw, int max_cycles) {
    const CompiledNetlist compiled(design);
    return simulate(compiled, x_raw, max_cycles);
}

int evaluate_combinational(const CompiledNetlist& design, std::span<const std::int64_t> x_raw) {
    const Netlist& nl = design.netlist();
    const Port* id_port = nl.find_output("class_id");
    if (!id_port) throw SimulationError("design lacks a class_id output");
    Simulator sim(design);
    sim.set_input("x", pack_inputs(x_raw, input_width_of(nl, x_raw.size())));
    sim.settle();
    return static_cast<int>(sim.read_unsigned(id_port->bits));
}

int measured_latency_cycles(const SimTrace& trace) {
    if (!trace.completed) throw SimulationError("trace did not reach done");
    return static_cast<int>(trace.rows.size());
}

std::string trace_csv(const SimTrace& trace) {
    std::ostringstream out;
    out << "cycle,counter,score_raw,id,done\n";
    for (const auto& r : trace.rows)
        out << r.cycle << ',' << r.counter << ',' << r.accumulator << ',' << r.best_id << ',' << (r.done ? 1 : 0) << '\n';
    return out.str();
}

EquivalenceReport equivalence_check(const QuantizedSvm& q, const Netlist& nl,
                                    const std::vector<std::vector<std::int64_t>>& inputs) {
    const CompiledNetlist compiled(nl);
    const auto* score_bus = nl.bus("score");
    const std::size_t acc_bits = score_bus ? score_bus->size() : static_cast<std::size_t>(q.accumulator_width);
    const int max_cycles = 4 * q.n + 8;

    struct Partial {
        EquivalenceReport report;
    };
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), (inputs.size() + 63) / 64));
    std::vector<Partial> partials(workers);

    auto work = [&](std::size_t w) {
        EquivalenceReport& rep = partials[w].report;
        for (std::size_t s = w; s < inputs.size(); s += workers) {
            ++rep.samples;
            const auto golden = quantized_scores(q, inputs[s]);
            const int expected_class = predict_quantized(q, inputs[s]);
            auto note = [&](int cycle, std::int64_t expected, std::int64_t observed, std::size_t width) {
                if (!rep.counterexample || rep.counterexample->sample > s)
                    rep.counterexample = Counterexample{s, cycle, bit_string(expected, width), bit_string(observed, width)};
            };
            SimResult sim;
            try {
                sim = simulate(compiled, inputs[s], max_cycles, false);
            } catch (const SimulationError&) {
                ++rep.class_mismatches;
                rep.cycles_checked += static_cast<std::size_t>(q.n);
                note(max_cycles, q.n, 0, 8);
                continue;
            }
            for (int k = 0; k < q.n; ++k) {
                ++rep.cycles_checked;
                const auto idx = static_cast<std::size_t>(k);
                const bool present = idx < sim.trace.rows.size();
                const std::int64_t observed = present ? sim.trace.rows[idx].accumulator : 0;
                if (present && sim.trace.rows[idx].counter == idx && observed == golden[idx])
                    ++rep.cycles_agreeing;
                else
                    note(k, golden[idx], observed, acc_bits);
            }
            if (sim.trace.rows.size() != static_cast<std::size_t>(q.n)) ++rep.class_mismatches;
            else if (sim.class_index != expected_class) {
                ++rep.class_mismatches;
                note(-1, expected_class, sim.class_index, 8);
            }
        }
    };

    std::vector<std::thread> threads;
    for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(work, w);
    work(0);
    for (auto& t : threads) t.join();

    EquivalenceReport total;
    for (const auto& p : partials) {
        total.samples += p.report.samples;
        total.class_mismatches += p.report.class_mismatches;
        total.cycles_checked += p.report.cycles_checked;
        total.cycles_agreeing += p.report.cycles_agreeing;
        if (p.report.counterexample &&
            (!total.counterexample || p.report.counterexample->sample < total.counterexample->sample))
            total.counterexample = p.report.counterexample;
    }
    return total;
}

EquivalenceReport equivalence_check(const QuantizedSvm& q, const Netlist& nl, const Dataset& data) {
    std::vector<std::vector<std::int64_t>> inputs;
    inputs.reserve(data.size());
    for (const Sample& s : data.samples()) inputs.push_back(quantize_inputs(s.features, q.input_format));
    return equivalence_check(q, nl, inputs);
}

void to_json(nlohmann::json& j, const EquivalenceReport& r) {
    j = {{"samples", r.samples},
         {"class_mismatches", r.class_mismatches},
         {"cycles_checked", r.cycles_checked},
         {"cycles_agreeing", r.cycles_agreeing},
         {"cycle_agreement_rate", r.cycle_agreement_rate()},
         {"passed", r.passed()}};
    if (r.counterexample) {
        j["counterexample"] = {{"sample", r.counterexample->sample},
                               {"cycle", r.counterexample->cycle},
                               {"expected_bits", r.counterexample->expected_bits},
                               {"observed_bits", r.counterexample->observed_bits}};
    }
}

}  // namespace printsvm
