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

#include "printsvm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "printsvm/error.hpp"
#include "printsvm/rng.hpp"

namespace printsvm {

int classifier_count(Strategy strategy, int n) {
    if (n < 2) throw ValidationError("classifier_count needs n >= 2, got " + std::to_string(n));
    return strategy == Strategy::OneVsOne ? n * (n - 1) / 2 : n;
}

void SvmModel::validate() const {
    if (n < 2) throw ValidationError("model needs at least two classes");
    if (m < 1) throw ValidationError("model needs at least one feature");
    if (static_cast<int>(classifiers.size()) != n)
        throw ValidationError("model has " + std::to_string(classifiers.size()) + " classifiers, expected " +
                              std::to_string(n));
    for (const auto& c : classifiers)
        if (static_cast<int>(c.weights.size()) != m) throw ValidationError("classifier weight count != m");
}

namespace {

// Augmented weight vector: [w_0 .. w_{m-1}, b], paired with x = [x, 1].
LinearClassifier train_binary(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                              const TrainConfig& cfg, std::uint64_t seed) {
    const std::size_t count = xs.size();
    const std::size_t dim = xs.front().size() + 1;
    const bool averaged = cfg.schedule == "pegasos-avg";
    const double radius = 1.0 / std::sqrt(cfg.lambda);

    std::vector<double> w(dim, 0.0);
    std::vector<double> sum(dim, 0.0);
    std::size_t summed = 0;
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Lcg64 rng(seed);
    std::uint64_t t = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rng.uniform(static_cast<std::uint32_t>(i))]);
        for (std::size_t idx : order) {
            ++t;
            const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
            const auto& x = xs[idx];
            double score = w[dim - 1];
            for (std::size_t j = 0; j + 1 < dim; ++j) score += w[j] * x[j];
            const double shrink = 1.0 - eta * cfg.lambda;
            for (double& v : w) v *= shrink;
            if (ys[idx] * score < 1.0) {
                const double step = eta * ys[idx];
                for (std::size_t j = 0; j + 1 < dim; ++j) w[j] += step * x[j];
                w[dim - 1] += step;
            }
            double norm2 = 0.0;
            for (double v : w) norm2 += v * v;
            if (norm2 > radius * radius) {
                const double scale = radius / std::sqrt(norm2);
                for (double& v : w) v *= scale;
            }
            if (averaged && epoch >= cfg.epochs / 2) {
                for (std::size_t j = 0; j < dim; ++j) sum[j] += w[j];
                ++summed;
            }
        }
    }
    if (averaged && summed > 0)
        for (std::size_t j = 0; j < dim; ++j) w[j] = sum[j] / static_cast<double>(summed);

    LinearClassifier out;
    out.weights.assign(w.begin(), w.end() - 1);
    out.bias = w.back();
    return out;
}

}  // namespace

SvmModel train_ovr(const Dataset& train, const TrainConfig& cfg) {
    if (!(cfg.lambda > 0.0)) throw ValidationError("lambda must be positive");
    if (cfg.epochs < 1) throw ValidationError("epochs must be >= 1");
    if (cfg.schedule != "pegasos" && cfg.schedule != "pegasos-avg")
        throw ValidationError("unknown learning-rate schedule '" + cfg.schedule + "'");
    if (train.empty()) throw ValidationError("empty training set");
    std::vector<bool> seen(static_cast<std::size_t>(train.class_count()), false);
    for (const Sample& s : train.samples()) seen[static_cast<std::size_t>(s.label)] = true;
    if (std::count(seen.begin(), seen.end(), true) < 2)
        throw ValidationError("training data contains a single class");

    std::vector<std::vector<double>> xs;
    xs.reserve(train.size());
    for (const Sample& s : train.samples()) xs.push_back(s.features);

    const int n = train.class_count();
    SvmModel model;
    model.m = train.feature_count();
    model.n = n;
    model.classifiers.resize(static_cast<std::size_t>(n));

    auto job = [&](int c) {
        std::vector<double> ys(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) ys[i] = train[i].label == c ? 1.0 : -1.0;
        return train_binary(xs, ys, cfg, derive_seed(cfg.seed, static_cast<std::uint64_t>(c)));
    };

    if (cfg.parallel) {
        std::vector<std::future<LinearClassifier>> futures;
        for (int c = 0; c < n; ++c) futures.push_back(std::async(std::launch::async, job, c));
        for (int c = 0; c < n; ++c) model.classifiers[static_cast<std::size_t>(c)] = futures[static_cast<std::size_t>(c)].get();
    } else {
        for (int c = 0; c < n; ++c) model.classifiers[static_cast<std::size_t>(c)] = job(c);
    }
    return model;
}

std::vector<double> decision_values(const SvmModel& model, std::span<const double> x) {
    if (static_cast<int>(x.size()) != model.m)
        throw ValidationError("input has " + std::to_string(x.size()) + " features, model expects " +
                              std::to_string(model.m));
    std::vector<double> y;
    y.reserve(model.classifiers.size());
    for (const auto& c : model.classifiers) {
        double acc = c.bias;
        for (std::size_t i = 0; i < x.size(); ++i) acc += c.weights[i] * x[i];
        y.push_back(acc);
    }
    return y;
}

int argmax_first(std::span<const double> values) {
    if (values.empty()) throw ValidationError("argmax of an empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return static_cast<int>(best);
}

int predict(const SvmModel& model, std::span<const double> x) {
    const auto y = decision_values(model, x);
    return argmax_first(y);
}

double accuracy(const SvmModel& model, const Dataset& data) {
    if (data.empty()) throw ValidationError("accuracy of an empty dataset");
    std::size_t correct = 0;
    for (const Sample& s : data.samples())
        if (predict(model, s.features) == s.label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

void to_json(nlohmann::json& j, const SvmModel& model) {
    j = nlohmann::json{{"m", model.m}, {"n", model.n}, {"classifiers", nlohmann::json::array()}};
    for (const auto& c : model.classifiers)
        j["classifiers"].push_back({{"weights", c.weights}, {"bias", c.bias}});
}

void from_json(const nlohmann::json& j, SvmModel& model) {
    model.m = j.at("m").get<int>();
    model.n = j.at("n").get<int>();
    model.classifiers.clear();
    for (const auto& c : j.at("classifiers"))
        model.classifiers.push_back({c.at("weights").get<std::vector<double>>(), c.at("bias").get<double>()});
    model.validate();
}

}  // namespace printsvm
