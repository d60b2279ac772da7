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

#include "printsvm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string_view>

#include "printsvm/error.hpp"
#include "printsvm/rng.hpp"

namespace printsvm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
        s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::vector<std::string_view> split_line(std::string_view line, char delim) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

}  // namespace

Dataset::Dataset(std::string name, int m, int n, std::vector<Sample> samples,
                 std::vector<std::string> class_names)
    : name_(std::move(name)), m_(m), n_(n), samples_(std::move(samples)),
      class_names_(std::move(class_names)) {
    if (m_ < 1) throw ValidationError("dataset needs at least one feature");
    if (n_ < 2) throw ValidationError("dataset needs at least two classes, got " + std::to_string(n_));
    if (!class_names_.empty() && static_cast<int>(class_names_.size()) != n_)
        throw ValidationError("class name table does not match class count");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const Sample& s = samples_[i];
        if (static_cast<int>(s.features.size()) != m_)
            throw ValidationError("sample " + std::to_string(i) + " has " +
                                  std::to_string(s.features.size()) + " features, expected " +
                                  std::to_string(m_));
        if (s.label < 0 || s.label >= n_)
            throw ValidationError("sample " + std::to_string(i) + " has label " +
                                  std::to_string(s.label) + " outside [0, " + std::to_string(n_) + ")");
    }
}

Dataset Dataset::with_samples(std::vector<Sample> samples) const {
    return Dataset(name_, m_, n_, std::move(samples), class_names_);
}

Dataset parse_csv(const std::string& text, const CsvOptions& options) {
    std::istringstream in(text);
    std::string line;
    std::size_t row_number = 0;
    bool header_pending = options.header;

    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::size_t arity = 0;
    std::size_t label_index = 0;
    auto is_dropped = [&](std::size_t c) {
        return std::find(options.drop_columns.begin(), options.drop_columns.end(), static_cast<int>(c)) !=
               options.drop_columns.end();
    };

    while (std::getline(in, line)) {
        ++row_number;
        if (trim(line).empty()) continue;
        auto cells = split_line(line, options.delimiter);
        if (header_pending) {
            header_pending = false;
            continue;
        }
        if (arity == 0) {
            arity = cells.size();
            const int cols = static_cast<int>(arity);
            const int label = options.label_column < 0 ? cols + options.label_column : options.label_column;
            if (label < 0 || label >= cols)
                throw ParseError("row " + std::to_string(row_number) + ": label column " +
                                 std::to_string(options.label_column) + " out of range");
            label_index = static_cast<std::size_t>(label);
        }
        if (cells.size() != arity)
            throw ParseError("row " + std::to_string(row_number) + ": expected " + std::to_string(arity) +
                             " columns, found " + std::to_string(cells.size()));

        if (!options.missing_token.empty()) {
            bool missing = false;
            for (std::size_t c = 0; c < cells.size(); ++c)
                if (!is_dropped(c) && trim(cells[c]) == options.missing_token) missing = true;
            if (missing) continue;
        }

        std::vector<double> features;
        features.reserve(arity);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_index) continue;
            if (is_dropped(c)) continue;
            double v = 0.0;
            if (!parse_double(cells[c], v))
                throw ParseError("row " + std::to_string(row_number) + ", column " + std::to_string(c + 1) +
                                 ": non-numeric cell '" + std::string(trim(cells[c])) + "'");
            features.push_back(v);
        }
        rows.push_back(std::move(features));
        labels.emplace_back(trim(cells[label_index]));
    }
    if (rows.empty()) throw ParseError("no data rows");

    std::vector<std::string> distinct = labels;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const bool numeric = std::all_of(distinct.begin(), distinct.end(), [](const std::string& s) {
        double v;
        return parse_double(s, v);
    });
    if (numeric) {
        std::stable_sort(distinct.begin(), distinct.end(), [](const std::string& a, const std::string& b) {
            double x = 0, y = 0;
            parse_double(a, x);
            parse_double(b, y);
            return x < y;
        });
    }
    if (distinct.size() < 2)
        throw ValidationError("need at least two distinct labels, found " + std::to_string(distinct.size()));

    std::map<std::string, int> index;
    for (std::size_t i = 0; i < distinct.size(); ++i) index[distinct[i]] = static_cast<int>(i);

    std::vector<Sample> samples(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        samples[i].features = std::move(rows[i]);
        samples[i].label = index.at(labels[i]);
    }
    const int m = static_cast<int>(samples.front().features.size());
    return Dataset(options.name, m, static_cast<int>(distinct.size()), std::move(samples), distinct);
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    CsvOptions opts = options;
    if (opts.name.empty()) opts.name = path.stem().string();
    try {
        return parse_csv(buf.str(), opts);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

NormalizationParams fit_normalizer(const Dataset& train) {
    if (train.empty()) throw ValidationError("cannot fit a normalizer on an empty dataset");
    NormalizationParams params;
    params.ranges.resize(static_cast<std::size_t>(train.feature_count()));
    const auto& first = train[0].features;
    for (std::size_t j = 0; j < first.size(); ++j) params.ranges[j] = {first[j], first[j]};
    for (const Sample& s : train.samples()) {
        for (std::size_t j = 0; j < s.features.size(); ++j) {
            params.ranges[j].min = std::min(params.ranges[j].min, s.features[j]);
            params.ranges[j].max = std::max(params.ranges[j].max, s.features[j]);
        }
    }
    return params;
}

Dataset apply_normalizer(const NormalizationParams& params, const Dataset& data) {
    if (params.feature_count() != data.feature_count())
        throw ValidationError("normalizer has " + std::to_string(params.feature_count()) +
                              " features, dataset has " + std::to_string(data.feature_count()));
    std::vector<Sample> out = data.samples();
    for (Sample& s : out) {
        for (std::size_t j = 0; j < s.features.size(); ++j) {
            const FeatureRange& r = params.ranges[j];
            if (r.max <= r.min) {
                s.features[j] = 0.0;
                continue;
            }
            const double v = (s.features[j] - r.min) / (r.max - r.min);
            s.features[j] = std::clamp(v, 0.0, 1.0);
        }
    }
    return data.with_samples(std::move(out));
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t count,
                                                                            const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw ValidationError("train_fraction must lie in (0, 1)");
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Lcg64 rng(spec.seed);
    for (std::size_t i = count; i > 1; --i) {
        const std::size_t j = rng.uniform(static_cast<std::uint32_t>(i));
        std::swap(order[i - 1], order[j]);
    }
    const auto train_count =
        static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(count)));
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(train_count), order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

TrainTestSplit split(const Dataset& data, const SplitSpec& spec) {
    if (data.size() < static_cast<std::size_t>(data.class_count()))
        throw ValidationError("dataset has fewer samples than classes");
    auto [train_idx, test_idx] = split_indices(data.size(), spec);
    std::vector<Sample> train, test;
    train.reserve(train_idx.size());
    test.reserve(test_idx.size());
    for (std::size_t i : train_idx) train.push_back(data[i]);
    for (std::size_t i : test_idx) test.push_back(data[i]);
    return {data.with_samples(std::move(train)), data.with_samples(std::move(test))};
}

}  // namespace printsvm
