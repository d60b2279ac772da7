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

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "printsvm/netlist.hpp"

namespace printsvm {

struct GateCost {
    double area_cm2 = 0.0;
    double power_mw = 0.0;
    double delay_ms = 0.0;
};

/// Parametric printed-technology cell library. DFF delay is the
/// clock-to-output plus setup overhead charged once per register stage.
struct TechFile {
    std::string name;
    std::string provenance;
    std::map<GateType, GateCost> gates;

    /// Every primitive present with strictly positive entries.
    void validate() const;
    const GateCost& cost(GateType t) const;
    TechFile scaled(double area, double power, double delay) const;

    /// Uncalibrated EGFET-inspired defaults shipped with the tool.
    static TechFile printed_defaults();
};

TechFile load_tech_file(const std::filesystem::path& path);
void to_json(nlohmann::json& j, const TechFile& t);
void from_json(const nlohmann::json& j, TechFile& t);

inline constexpr double kPrintedBatteryBudgetMw = 30.0;

struct CostReport {
    double area_cm2 = 0.0;
    double power_mw = 0.0;  // static-proxy power
    double critical_path_ms = 0.0;
    double f_max_hz = 0.0;
    double f_hz = 0.0;
    double latency_ms = 0.0;
    double energy_mj = 0.0;
    int cycles = 0;
    bool battery_ok = false;
    std::vector<std::string> warnings;
};

void to_json(nlohmann::json& j, const CostReport& r);
void from_json(const nlohmann::json& j, CostReport& r);

/// Longest register-to-register (or port-to-port) path in ms: DFF outputs
/// start at the DFF delay, primary inputs and constants at 0, and every
/// combinational gate adds its own delay.
double critical_path_ms(const Netlist& nl, const TechFile& tech);

/// area = sum count*area, power = sum count*power, f_max = 1000/critical path,
/// f = min(f_max, target), latency = cycles/f, energy = power*latency.
CostReport estimate(const GateCensus& census, double critical_path_ms, int cycles, const TechFile& tech,
                    std::optional<double> target_f_hz = std::nullopt);
CostReport estimate(const Netlist& nl, int cycles, const TechFile& tech,
                    std::optional<double> target_f_hz = std::nullopt);

/// power <= budget (inclusive).
bool battery_check(const CostReport& report, double budget_mw = kPrintedBatteryBudgetMw);
bool battery_check(double power_mw, double budget_mw = kPrintedBatteryBudgetMw);

/// Element-wise b / a.
struct DesignRatios {
    double area = 1.0;
    double power = 1.0;
    double latency = 1.0;
    double energy = 1.0;
};

DesignRatios compare_designs(const CostReport& a, const CostReport& b);

double geometric_mean(std::span<const double> values);
double arithmetic_mean(std::span<const double> values);
/// mean(baseline) / mean(ours): the aggregate behind "average energy
/// improvement" style figures.
double ratio_of_means(std::span<const double> baseline, std::span<const double> ours);

/// Least-squares scale factors for (area, power, delay) that fit
/// uncalibrated reports to measured targets.
struct CalibrationTarget {
    CostReport uncalibrated;
    double area_cm2 = 0.0;
    double power_mw = 0.0;
    double f_hz = 0.0;
};

struct Calibration {
    double area_scale = 1.0;
    double power_scale = 1.0;
    double delay_scale = 1.0;
};

Calibration calibrate(std::span<const CalibrationTarget> targets);

/// One published comparison row (dataset, model, and its six metrics).
struct ReferenceRow {
    std::string dataset;
    std::string model;
    bool ours = false;
    bool approximate = false;
    double accuracy_pct = 0.0;
    double area_cm2 = 0.0;
    double power_mw = 0.0;
    double f_hz = 0.0;
    double latency_ms = 0.0;
    double energy_mj = 0.0;
};

std::vector<ReferenceRow> load_reference_table(const std::filesystem::path& path);

}  // namespace printsvm
