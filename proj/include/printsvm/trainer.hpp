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
#include <string>
#include <vector>

#include "json.hpp"

#include "printsvm/dataset.hpp"

namespace printsvm {

enum class Strategy { OneVsOne, OneVsRest };

/// Binary classifiers needed for n classes: n(n-1)/2 for OvO, n for OvR.
int classifier_count(Strategy strategy, int n);

struct LinearClassifier {
    std::vector<double> weights;
    double bias = 0.0;

    bool operator==(const LinearClassifier&) const = default;
};

/// n one-vs-rest linear classifiers over m features.
struct SvmModel {
    int m = 0;
    int n = 0;
    std::vector<LinearClassifier> classifiers;

    /// Throws ValidationError unless n >= 2 and the tables are n x m.
    void validate() const;
    bool operator==(const SvmModel&) const = default;
};

struct TrainConfig {
    double lambda = 1e-3;
    int epochs = 200;
    std::uint64_t seed = 42;
    /// "pegasos": step 1/(lambda t) on the last iterate.
    /// "pegasos-avg": same steps, returns the mean of the second-half iterates.
    std::string schedule = "pegasos-avg";
    /// Train the n binary problems on separate threads.
    bool parallel = true;
};

/// L2-regularized hinge loss, one binary problem per class (class c = +1,
/// all others = -1), solved by seeded stochastic subgradient descent.
/// The bias is trained as the weight of a constant-1 feature.
SvmModel train_ovr(const Dataset& train, const TrainConfig& cfg = {});

/// y_k = w_k . x + b_k for every classifier k.
std::vector<double> decision_values(const SvmModel& model, std::span<const double> x);

/// Index of the largest value; ties go to the smallest index.
int argmax_first(std::span<const double> values);

int predict(const SvmModel& model, std::span<const double> x);

/// Fraction of samples whose prediction equals the label.
double accuracy(const SvmModel& model, const Dataset& data);

void to_json(nlohmann::json& j, const SvmModel& model);
void from_json(const nlohmann::json& j, SvmModel& model);

}  // namespace printsvm
