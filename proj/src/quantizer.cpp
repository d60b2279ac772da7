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

#include "printsvm/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "printsvm/error.hpp"

namespace printsvm {

std::int64_t FixedFormat::min_raw() const {
    return is_signed ? -(std::int64_t{1} << (integer_bits + fraction_bits)) : 0;
}

std::int64_t FixedFormat::max_raw() const {
    return (std::int64_t{1} << (integer_bits + fraction_bits)) - 1;
}

void FixedFormat::validate() const {
    if (integer_bits < 0 || fraction_bits < 0) throw ValidationError("negative fixed-point field width");
    if (width() < 1) throw ValidationError("fixed-point format has zero width");
    if (width() > 62) throw ValidationError("fixed-point format wider than 62 bits");
}

std::int64_t quantize_value(double v, const FixedFormat& fmt, SaturationCounter* saturations) {
    const double scaled = std::round(std::ldexp(v, fmt.fraction_bits));
    const auto lo = static_cast<double>(fmt.min_raw());
    const auto hi = static_cast<double>(fmt.max_raw());
    if (scaled < lo || scaled > hi || std::isnan(scaled)) {
        if (saturations) ++saturations->count;
        return scaled < lo || std::isnan(scaled) ? fmt.min_raw() : fmt.max_raw();
    }
    return static_cast<std::int64_t>(scaled);
}

double dequantize_value(std::int64_t raw, const FixedFormat& fmt) {
    if (!fmt.contains(raw))
        throw ValidationError("raw value " + std::to_string(raw) + " outside the format range");
    return std::ldexp(static_cast<double>(raw), -fmt.fraction_bits);
}

int ceil_log2(std::uint64_t v) {
    int bits = 0;
    while ((std::uint64_t{1} << bits) < v) ++bits;
    return bits;
}

int accumulator_width(int m, const FixedFormat& input, const FixedFormat& weight, const FixedFormat& bias) {
    if (m < 1) throw ValidationError("accumulator_width needs m >= 1");
    const int product = input.width() + weight.width();
    return std::max(product, bias.width()) + ceil_log2(static_cast<std::uint64_t>(m) + 1);
}

void QuantPolicy::validate() const {
    if (!(max_accuracy_drop >= 0.0)) throw ValidationError("max_accuracy_drop must be >= 0");
    if (min_fraction_bits < 0 || max_fraction_bits < min_fraction_bits)
        throw ValidationError("invalid weight fraction-bit range");
    input_format().validate();
}

void QuantizedSvm::validate() const {
    if (n < 2 || m < 1) throw ValidationError("quantized model needs n >= 2 and m >= 1");
    input_format.validate();
    weight_format.validate();
    bias_format.validate();
    if (input_format.is_signed) throw ValidationError("input format must be unsigned");
    if (!weight_format.is_signed || !bias_format.is_signed)
        throw ValidationError("weight and bias formats must be signed");
    if (bias_format.fraction_bits != input_format.fraction_bits + weight_format.fraction_bits)
        throw ValidationError("bias is not aligned to the product scale");
    if (accumulator_width < printsvm::accumulator_width(m, input_format, weight_format, bias_format))
        throw ValidationError("accumulator narrower than the overflow-free width");
    if (static_cast<int>(weights.size()) != n || static_cast<int>(biases.size()) != n)
        throw ValidationError("weight/bias tables do not have n rows");
    for (const auto& row : weights) {
        if (static_cast<int>(row.size()) != m) throw ValidationError("weight row does not have m entries");
        for (auto w : row)
            if (!weight_format.contains(w)) throw ValidationError("raw weight outside its format");
    }
    for (auto b : biases)
        if (!bias_format.contains(b)) throw ValidationError("raw bias outside its format");
}

std::vector<std::int64_t> quantize_inputs(std::span<const double> x, const FixedFormat& input_format,
                                          SaturationCounter* saturations) {
    std::vector<std::int64_t> raw;
    raw.reserve(x.size());
    for (double v : x) raw.push_back(quantize_value(v, input_format, saturations));
    return raw;
}

Dataset snap_to_input_grid(const Dataset& data, const FixedFormat& input_format) {
    std::vector<Sample> out = data.samples();
    for (Sample& s : out)
        for (double& v : s.features) v = dequantize_value(quantize_value(v, input_format), input_format);
    return data.with_samples(std::move(out));
}

namespace {

// Smallest i >= 0 such that 2^i > v.
int integer_bits_covering(double v) {
    int bits = 0;
    while (std::ldexp(1.0, bits) <= v) ++bits;
    return bits;
}

}  // namespace

QuantizedSvm quantize_with_fraction_bits(const SvmModel& model, int fraction_bits, const QuantPolicy& policy) {
    model.validate();
    double max_w = 0.0;
    double max_b = 0.0;
    for (const auto& c : model.classifiers) {
        for (double w : c.weights) max_w = std::max(max_w, std::abs(w));
        max_b = std::max(max_b, std::abs(c.bias));
    }

    QuantizedSvm q;
    q.m = model.m;
    q.n = model.n;
    q.input_format = policy.input_format();
    q.weight_format = {true, integer_bits_covering(max_w), fraction_bits};
    q.bias_format = {true, std::max(q.weight_format.integer_bits, integer_bits_covering(max_b)),
                     q.input_format.fraction_bits + fraction_bits};
    q.accumulator_width = accumulator_width(q.m, q.input_format, q.weight_format, q.bias_format);

    SaturationCounter sat;
    for (const auto& c : model.classifiers) {
        std::vector<std::int64_t> row;
        row.reserve(c.weights.size());
        for (double w : c.weights) row.push_back(quantize_value(w, q.weight_format, &sat));
        q.weights.push_back(std::move(row));
        q.biases.push_back(quantize_value(c.bias, q.bias_format, &sat));
    }
    q.saturation_count = sat.count;
    return q;
}

QuantizedSvm quantize_model(const SvmModel& model, const Dataset& val, const QuantPolicy& policy) {
    policy.validate();
    model.validate();
    if (val.feature_count() != model.m) throw ValidationError("validation data does not match model width");
    const double float_acc = accuracy(model, val);

    std::vector<int> candidates;
    for (int f = policy.max_fraction_bits; f >= policy.min_fraction_bits; --f) candidates.push_back(f);

    auto evaluate = [&](int f) {
        QuantizedSvm q = quantize_with_fraction_bits(model, f, policy);
        q.float_accuracy = float_acc;
        q.quantized_accuracy = quantized_accuracy(q, val);
        return q;
    };

    std::vector<QuantizedSvm> results;
    results.reserve(candidates.size());
    if (policy.parallel) {
        std::vector<std::future<QuantizedSvm>> futures;
        for (int f : candidates) futures.push_back(std::async(std::launch::async, evaluate, f));
        for (auto& fut : futures) results.push_back(fut.get());
    } else {
        for (int f : candidates) results.push_back(evaluate(f));
    }

    constexpr double kEps = 1e-12;
    const QuantizedSvm* accepted = nullptr;
    for (const auto& q : results)  // descending f: the last passing one is the smallest
        if (q.quantized_accuracy + kEps >= float_acc - policy.max_accuracy_drop) accepted = &q;
    if (accepted) {
        QuantizedSvm out = *accepted;
        out.gate_met = true;
        return out;
    }
    const QuantizedSvm* best = &results.front();
    for (const auto& q : results)
        if (q.quantized_accuracy >= best->quantized_accuracy) best = &q;
    QuantizedSvm out = *best;
    out.gate_met = false;
    return out;
}

std::vector<std::int64_t> quantized_scores(const QuantizedSvm& q, std::span<const std::int64_t> x_raw) {
    if (static_cast<int>(x_raw.size()) != q.m)
        throw ValidationError("input has " + std::to_string(x_raw.size()) + " entries, model expects " +
                              std::to_string(q.m));
    for (auto x : x_raw)
        if (!q.input_format.contains(x)) throw ValidationError("raw input outside the input format");
    std::vector<std::int64_t> scores;
    scores.reserve(static_cast<std::size_t>(q.n));
    for (int k = 0; k < q.n; ++k) {
        const auto& row = q.weights[static_cast<std::size_t>(k)];
        std::int64_t acc = q.biases[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < x_raw.size(); ++i) acc += row[i] * x_raw[i];
        scores.push_back(acc);
    }
    return scores;
}

int predict_quantized(const QuantizedSvm& q, std::span<const std::int64_t> x_raw) {
    const auto scores = quantized_scores(q, x_raw);
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return static_cast<int>(best);
}

double quantized_accuracy(const QuantizedSvm& q, const Dataset& data) {
    if (data.empty()) throw ValidationError("accuracy of an empty dataset");
    std::size_t correct = 0;
    for (const Sample& s : data.samples()) {
        const auto raw = quantize_inputs(s.features, q.input_format);
        if (predict_quantized(q, raw) == s.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

void to_json(nlohmann::json& j, const FixedFormat& fmt) {
    j = {{"signed", fmt.is_signed}, {"integer_bits", fmt.integer_bits}, {"fraction_bits", fmt.fraction_bits}};
}

void from_json(const nlohmann::json& j, FixedFormat& fmt) {
    fmt.is_signed = j.at("signed").get<bool>();
    fmt.integer_bits = j.at("integer_bits").get<int>();
    fmt.fraction_bits = j.at("fraction_bits").get<int>();
}

void to_json(nlohmann::json& j, const QuantizedSvm& q) {
    j = {{"m", q.m},
         {"n", q.n},
         {"input_format", q.input_format},
         {"weight_format", q.weight_format},
         {"bias_format", q.bias_format},
         {"accumulator_width", q.accumulator_width},
         {"weights", q.weights},
         {"biases", q.biases},
         {"float_accuracy", q.float_accuracy},
         {"quantized_accuracy", q.quantized_accuracy},
         {"gate_met", q.gate_met},
         {"saturation_count", q.saturation_count}};
}

void from_json(const nlohmann::json& j, QuantizedSvm& q) {
    q.m = j.at("m").get<int>();
    q.n = j.at("n").get<int>();
    q.input_format = j.at("input_format").get<FixedFormat>();
    q.weight_format = j.at("weight_format").get<FixedFormat>();
    q.bias_format = j.at("bias_format").get<FixedFormat>();
    q.accumulator_width = j.at("accumulator_width").get<int>();
    q.weights = j.at("weights").get<std::vector<std::vector<std::int64_t>>>();
    q.biases = j.at("biases").get<std::vector<std::int64_t>>();
    q.float_accuracy = j.value("float_accuracy", 0.0);
    q.quantized_accuracy = j.value("quantized_accuracy", 0.0);
    q.gate_met = j.value("gate_met", true);
    q.saturation_count = j.value("saturation_count", std::int64_t{0});
    q.validate();
}

}  // namespace printsvm
