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
#include <span>
#include <vector>

#include "json.hpp"
#include "printsvm/dataset.hpp"
#include "printsvm/trainer.hpp"

namespace printsvm {

/// Two's-complement (or unsigned) fixed-point format: value = raw / 2^f.
struct FixedFormat {
    bool is_signed = true;
    int integer_bits = 0;
    int fraction_bits = 0;

    int width() const { return (is_signed ? 1 : 0) + integer_bits + fraction_bits; }
    std::int64_t min_raw() const;
    std::int64_t max_raw() const;
    bool contains(std::int64_t raw) const { return raw >= min_raw() && raw <= max_raw(); }
    /// Throws ValidationError on negative field widths or zero total width.
    void validate() const;

    bool operator==(const FixedFormat&) const = default;
};

/// Running count of values clipped by quantize_value.
struct SaturationCounter {
    std::int64_t count = 0;
};

/// Round half away from zero of v * 2^f, then saturate to the format range.
std::int64_t quantize_value(double v, const FixedFormat& fmt, SaturationCounter* saturations = nullptr);

/// raw / 2^f; raw must lie within the format range.
double dequantize_value(std::int64_t raw, const FixedFormat& fmt);

/// Signed accumulator width that holds the sum of m input*weight products
/// plus the bias without overflow:
///   max(input.width + weight.width, bias.width) + ceil(log2(m + 1)).
int accumulator_width(int m, const FixedFormat& input, const FixedFormat& weight, const FixedFormat& bias);

int ceil_log2(std::uint64_t v);

struct QuantPolicy {
    double max_accuracy_drop = 0.01;
    int min_fraction_bits = 2;
    int max_fraction_bits = 12;
    int input_fraction_bits = 4;
    int input_integer_bits = 0;
    /// Evaluate the candidate fraction widths concurrently.
    bool parallel = true;

    FixedFormat input_format() const { return {false, input_integer_bits, input_fraction_bits}; }
    void validate() const;
};

/// Fixed-point OvR SVM: the exact content hardwired into MUX storage.
///
/// Biases are stored pre-aligned to the product scale
/// 2^(input.f + weight.f) so the engine adds them without shifting.
struct QuantizedSvm {
    int m = 0;
    int n = 0;
    FixedFormat input_format{false, 0, 4};
    FixedFormat weight_format;
    FixedFormat bias_format;
    int accumulator_width = 0;
    std::vector<std::vector<std::int64_t>> weights;  // n x m raw
    std::vector<std::int64_t> biases;                // n raw, product scale

    double float_accuracy = 0.0;
    double quantized_accuracy = 0.0;
    bool gate_met = true;
    std::int64_t saturation_count = 0;

    void validate() const;
    bool operator==(const QuantizedSvm&) const = default;
};

/// Map each feature to its raw input code.
std::vector<std::int64_t> quantize_inputs(std::span<const double> x, const FixedFormat& input_format,
                                          SaturationCounter* saturations = nullptr);

/// Round every feature onto the input grid (values stay real). Used to
/// train and evaluate with the same low-precision inputs the circuit sees.
Dataset snap_to_input_grid(const Dataset& data, const FixedFormat& input_format);

/// Quantize with a fixed number of weight fraction bits.
QuantizedSvm quantize_with_fraction_bits(const SvmModel& model, int fraction_bits, const QuantPolicy& policy);

/// Searches weight fraction bits from policy.max down to policy.min and keeps
/// the smallest width whose accuracy on val stays within max_accuracy_drop of
/// the float model. When no candidate passes, the most accurate one is
/// returned with gate_met = false.
QuantizedSvm quantize_model(const SvmModel& model, const Dataset& val, const QuantPolicy& policy = {});

/// Exact integer scores y_k = sum_i w_ki x_i + b_k at scale 2^(input.f + weight.f).
std::vector<std::int64_t> quantized_scores(const QuantizedSvm& q, std::span<const std::int64_t> x_raw);

/// Smallest-index argmax of quantized_scores; matches the hardware voter.
int predict_quantized(const QuantizedSvm& q, std::span<const std::int64_t> x_raw);

double quantized_accuracy(const QuantizedSvm& q, const Dataset& data);

void to_json(nlohmann::json& j, const FixedFormat& fmt);
void from_json(const nlohmann::json& j, FixedFormat& fmt);
void to_json(nlohmann::json& j, const QuantizedSvm& q);
void from_json(const nlohmann::json& j, QuantizedSvm& q);

}  // namespace printsvm
