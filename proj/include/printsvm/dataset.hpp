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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace printsvm {

struct Sample {
    std::vector<double> features;
    int label = 0;
};

/// Labelled tabular classification data.
///
/// Invariants (checked on construction): n >= 2, m >= 1, every feature
/// vector has length m and every label lies in [0, n).
class Dataset {
public:
    Dataset(std::string name, int m, int n, std::vector<Sample> samples,
            std::vector<std::string> class_names = {});

    const std::string& name() const { return name_; }
    int feature_count() const { return m_; }
    int class_count() const { return n_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const std::vector<Sample>& samples() const { return samples_; }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }
    /// Original label text for each class index (may be empty).
    const std::vector<std::string>& class_names() const { return class_names_; }

    /// Same metadata, different rows.
    Dataset with_samples(std::vector<Sample> samples) const;

private:
    std::string name_;
    int m_;
    int n_;
    std::vector<Sample> samples_;
    std::vector<std::string> class_names_;
};

/// Column-selection options used to ingest a (pre-cleaned) UCI file.
struct CsvOptions {
    /// Label column; negative values count from the end (-1 = last).
    int label_column = -1;
    bool header = false;
    char delimiter = ',';
    /// Columns ignored entirely (ids, free text), before label resolution.
    std::vector<int> drop_columns;
    /// Rows containing this token in any kept cell are skipped, when set.
    std::string missing_token;
    std::string name;
};

/// Parse a CSV file. Labels are mapped to 0-based indices in sorted order of
/// the distinct label strings (numerically when all labels are numbers).
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(const std::string& text, const CsvOptions& options = {});

struct FeatureRange {
    double min = 0.0;
    double max = 0.0;
};

struct NormalizationParams {
    std::vector<FeatureRange> ranges;
    int feature_count() const { return static_cast<int>(ranges.size()); }
};

/// Per-feature min/max over the (training) samples.
NormalizationParams fit_normalizer(const Dataset& train);

/// v -> (v - min) / (max - min) clamped to [0, 1]; constant features map to 0.
Dataset apply_normalizer(const NormalizationParams& params, const Dataset& data);

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
};

struct TrainTestSplit {
    Dataset train;
    Dataset test;
};

/// Seeded unstratified split. The permutation is a Fisher-Yates shuffle
/// driven by Lcg64(seed); |train| = round(train_fraction * |data|). Both
/// halves keep the original sample order.
TrainTestSplit split(const Dataset& data, const SplitSpec& spec);

/// Index form of split(), for callers that need to know which rows went where.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t count, const SplitSpec& spec);

}  // namespace printsvm
