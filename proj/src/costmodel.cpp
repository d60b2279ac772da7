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

#include "printsvm/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "printsvm/error.hpp"

namespace printsvm {

void TechFile::validate() const {
    for (GateType t : kAllGateTypes) {
        auto it = gates.find(t);
        if (it == gates.end()) throw ConfigError("tech file '" + name + "' lacks " + std::string(gate_name(t)));
        const GateCost& c = it->second;
        if (!(c.area_cm2 > 0.0 && c.power_mw > 0.0 && c.delay_ms > 0.0))
            throw ConfigError("tech file '" + name + "': " + std::string(gate_name(t)) + " entries must be positive");
    }
}

const GateCost& TechFile::cost(GateType t) const {
    auto it = gates.find(t);
    if (it == gates.end()) throw ConfigError("tech file has no entry for " + std::string(gate_name(t)));
    return it->second;
}

TechFile TechFile::scaled(double area, double power, double delay) const {
    TechFile out = *this;
    for (auto& [t, c] : out.gates) {
        c.area_cm2 *= area;
        c.power_mw *= power;
        c.delay_ms *= delay;
    }
    return out;
}

TechFile TechFile::printed_defaults() {
    TechFile t;
    t.name = "egfet-default";
    t.provenance = "EGFET-inspired defaults, uncalibrated";
    t.gates = {
        {GateType::Not, {0.0012, 0.0012, 0.12}},   {GateType::Nand2, {0.0020, 0.0020, 0.18}},
        {GateType::Nor2, {0.0020, 0.0020, 0.20}},  {GateType::And2, {0.0026, 0.0026, 0.25}},
        {GateType::Or2, {0.0026, 0.0026, 0.27}},   {GateType::Xor2, {0.0046, 0.0048, 0.35}},
        {GateType::Mux2, {0.0050, 0.0050, 0.32}},  {GateType::Dff, {0.0120, 0.0110, 0.60}},
    };
    return t;
}

void to_json(nlohmann::json& j, const TechFile& t) {
    j = nlohmann::json::object();
    j["name"] = t.name;
    j["provenance"] = t.provenance;
    nlohmann::json gates = nlohmann::json::object();
    for (const auto& [type, c] : t.gates)
        gates[std::string(gate_name(type))] = {{"area_cm2", c.area_cm2}, {"power_mw", c.power_mw}, {"delay_ms", c.delay_ms}};
    j["gates"] = gates;
}

void from_json(const nlohmann::json& j, TechFile& t) {
    t = {};
    t.name = j.value("name", "unnamed");
    t.provenance = j.value("provenance", "");
    const auto& gates = j.contains("gates") ? j.at("gates") : j;
    for (const auto& [key, entry] : gates.items()) {
        if (!entry.is_object()) continue;
        t.gates[gate_from_name(key)] = {entry.at("area_cm2").get<double>(), entry.at("power_mw").get<double>(),
                                        entry.at("delay_ms").get<double>()};
    }
    t.validate();
}

TechFile load_tech_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tech file " + path.string());
    try {
        return nlohmann::json::parse(in).get<TechFile>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("tech file " + path.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ConfigError("tech file " + path.string() + ": " + e.what());
    }
}

void to_json(nlohmann::json& j, const CostReport& r) {
    j = {{"area_cm2", r.area_cm2},     {"power_mw", r.power_mw}, {"critical_path_ms", r.critical_path_ms},
         {"f_max_hz", r.f_max_hz},     {"f_hz", r.f_hz},         {"latency_ms", r.latency_ms},
         {"energy_mj", r.energy_mj},   {"cycles", r.cycles},     {"battery_ok", r.battery_ok},
         {"warnings", r.warnings}};
}

void from_json(const nlohmann::json& j, CostReport& r) {
    r.area_cm2 = j.at("area_cm2").get<double>();
    r.power_mw = j.at("power_mw").get<double>();
    r.critical_path_ms = j.value("critical_path_ms", 0.0);
    r.f_max_hz = j.at("f_max_hz").get<double>();
    r.f_hz = j.at("f_hz").get<double>();
    r.latency_ms = j.at("latency_ms").get<double>();
    r.energy_mj = j.at("energy_mj").get<double>();
    r.cycles = j.at("cycles").get<int>();
    r.battery_ok = j.at("battery_ok").get<bool>();
    r.warnings = j.value("warnings", std::vector<std::string>{});
}

double critical_path_ms(const Netlist& nl, const TechFile& tech) {
    const auto& gates = nl.gates();
    std::vector<double> arrival(nl.nets().size(), 0.0);
    const double dff_delay = tech.cost(GateType::Dff).delay_ms;
    for (const Gate& g : gates)
        if (g.type == GateType::Dff) arrival[g.out] = dff_delay;
    double worst = nl.is_sequential() ? dff_delay : 0.0;
    for (std::uint32_t idx : nl.combinational_order()) {
        const Gate& g = gates[idx];
        double in = 0.0;
        for (int i = 0; i < gate_arity(g.type); ++i) in = std::max(in, arrival[g.in[static_cast<std::size_t>(i)]]);
        arrival[g.out] = in + tech.cost(g.type).delay_ms;
        worst = std::max(worst, arrival[g.out]);
    }
    return worst;
}

CostReport estimate(const GateCensus& census, double critical_path, int cycles, const TechFile& tech,
                    std::optional<double> target_f_hz) {
    if (census.empty()) throw ValidationError("cannot cost an empty design");
    if (cycles < 1) throw ValidationError("cycles must be >= 1");
    if (!(critical_path > 0.0)) throw ValidationError("critical path must be positive");
    CostReport r;
    for (const auto& [type, count] : census.counts) {
        const GateCost& c = tech.cost(type);
        r.area_cm2 += static_cast<double>(count) * c.area_cm2;
        r.power_mw += static_cast<double>(count) * c.power_mw;
    }
    r.critical_path_ms = critical_path;
    r.f_max_hz = 1000.0 / critical_path;
    r.f_hz = r.f_max_hz;
    if (target_f_hz) {
        if (!(*target_f_hz > 0.0)) throw ValidationError("target frequency must be positive");
        if (*target_f_hz > r.f_max_hz)
            r.warnings.push_back("target " + std::to_string(*target_f_hz) + " Hz exceeds f_max " +
                                 std::to_string(r.f_max_hz) + " Hz; clamped");
        else
            r.f_hz = *target_f_hz;
    }
    r.cycles = cycles;
    r.latency_ms = static_cast<double>(cycles) / r.f_hz * 1000.0;
    r.energy_mj = r.power_mw * r.latency_ms / 1000.0;
    r.battery_ok = battery_check(r.power_mw);
    return r;
}

CostReport estimate(const Netlist& nl, int cycles, const TechFile& tech, std::optional<double> target_f_hz) {
    return estimate(gate_census(nl), critical_path_ms(nl, tech), cycles, tech, target_f_hz);
}

bool battery_check(double power_mw, double budget_mw) { return power_mw <= budget_mw; }

bool battery_check(const CostReport& report, double budget_mw) { return battery_check(report.power_mw, budget_mw); }

DesignRatios compare_designs(const CostReport& a, const CostReport& b) {
    auto ratio = [](double num, double den, const char* what) {
        if (den == 0.0) throw ValidationError(std::string("cannot compare designs: zero ") + what);
        return num / den;
    };
    return {ratio(b.area_cm2, a.area_cm2, "area"), ratio(b.power_mw, a.power_mw, "power"),
            ratio(b.latency_ms, a.latency_ms, "latency"), ratio(b.energy_mj, a.energy_mj, "energy")};
}

double geometric_mean(std::span<const double> values) {
    if (values.empty()) throw ValidationError("geometric mean of nothing");
    double log_sum = 0.0;
    for (double v : values) {
        if (!(v > 0.0)) throw ValidationError("geometric mean needs positive values");
        log_sum += std::log(v);
    }
    return std::exp(log_sum / static_cast<double>(values.size()));
}

double arithmetic_mean(std::span<const double> values) {
    if (values.empty()) throw ValidationError("mean of nothing");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double ratio_of_means(std::span<const double> baseline, std::span<const double> ours) {
    const double denominator = arithmetic_mean(ours);
    if (denominator == 0.0) throw ValidationError("ratio of means: zero denominator");
    return arithmetic_mean(baseline) / denominator;
}

Calibration calibrate(std::span<const CalibrationTarget> targets) {
    if (targets.empty()) throw ValidationError("calibration needs at least one target");
    // Fit y ~ s * x per quantity: s = sum(xy) / sum(x^2). Delay is fitted
    // in the period domain (1 / f).
    double axy = 0, axx = 0, pxy = 0, pxx = 0, dxy = 0, dxx = 0;
    for (const auto& t : targets) {
        axy += t.uncalibrated.area_cm2 * t.area_cm2;
        axx += t.uncalibrated.area_cm2 * t.uncalibrated.area_cm2;
        pxy += t.uncalibrated.power_mw * t.power_mw;
        pxx += t.uncalibrated.power_mw * t.uncalibrated.power_mw;
        const double period = 1000.0 / t.f_hz;
        dxy += t.uncalibrated.critical_path_ms * period;
        dxx += t.uncalibrated.critical_path_ms * t.uncalibrated.critical_path_ms;
    }
    if (axx == 0 || pxx == 0 || dxx == 0) throw ValidationError("calibration inputs are degenerate");
    return {axy / axx, pxy / pxx, dxy / dxx};
}

std::vector<ReferenceRow> load_reference_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open reference table " + path.string());
    const auto j = nlohmann::json::parse(in);
    std::vector<ReferenceRow> rows;
    for (const auto& r : j.at("rows")) {
        ReferenceRow row;
        row.dataset = r.at("dataset").get<std::string>();
        row.model = r.at("model").get<std::string>();
        row.ours = r.value("ours", false);
        row.approximate = r.value("approximate", false);
        row.accuracy_pct = r.at("accuracy_pct").get<double>();
        row.area_cm2 = r.at("area_cm2").get<double>();
        row.power_mw = r.at("power_mw").get<double>();
        row.f_hz = r.at("f_hz").get<double>();
        row.latency_ms = r.at("latency_ms").get<double>();
        row.energy_mj = r.at("energy_mj").get<double>();
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace printsvm
