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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "printsvm/costmodel.hpp"
#include "printsvm/dataset.hpp"
#include "printsvm/error.hpp"
#include "printsvm/quantizer.hpp"
#include "printsvm/trainer.hpp"

namespace printsvm {

enum class Stage { Config, Data, Training, Generation, Equivalence, Cost };

const char* stage_name(Stage stage);

/// Process exit status for a failure in the given stage (0 is success,
/// 1 is reserved for unexpected errors).
int exit_code(Stage stage);

class StageError : public Error {
public:
    StageError(Stage stage, const std::string& what);
    Stage stage() const { return stage_; }

private:
    Stage stage_;
};

struct DatasetSource {
    std::string path;
    CsvOptions csv;
};

/// Everything a run depends on. The split uses `seed` directly and training
/// uses derive_seed(seed, 1); nothing else draws random numbers.
struct PipelineConfig {
    std::string name;
    DatasetSource dataset;
    std::uint64_t seed = 42;
    double train_fraction = 0.8;
    TrainConfig train;
    QuantPolicy quant;
    std::string tech_file;  // empty: built-in defaults
    std::optional<double> target_f_hz;
    std::string output_dir;
    /// Directory that relative paths are resolved against. Not serialized.
    std::filesystem::path base_dir;

    void validate() const;
    SplitSpec split_spec() const { return {train_fraction, seed}; }
    TrainConfig train_config() const;
    std::filesystem::path resolve(const std::string& path) const;
};

void to_json(nlohmann::json& j, const PipelineConfig& cfg);
void from_json(const nlohmann::json& j, PipelineConfig& cfg);

/// Parse a JSON config; relative paths resolve against its directory.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Apply "key=value" overrides (dotted keys, JSON or bare-string values).
PipelineConfig apply_overrides(const PipelineConfig& cfg, const std::vector<std::string>& overrides);

/// Output directory for a config: output_dir (default: name) below
/// $PRINTSVM_OUT_ROOT (default: ./out) unless already absolute.
std::filesystem::path output_directory(const PipelineConfig& cfg);

/// Loaded, split, normalized (fit on train) and grid-snapped data.
struct PreparedData {
    NormalizationParams normalizer;
    Dataset train;
    Dataset test;
    std::string dataset_sha256;
};

PreparedData prepare_data(const PipelineConfig& cfg);

TechFile load_tech(const PipelineConfig& cfg);

/// Run every stage and write model.json, normalizer.json, quantized.json,
/// design.v, census.json, equivalence.json, cost.json and manifest.json
/// into out_dir. Returns the manifest. Throws StageError; an equivalence
/// mismatch is reported as a Stage::Equivalence failure after all
/// artifacts are written.
nlohmann::json run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& out_dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// One row of the comparison table.
struct TableRow {
    std::string dataset;
    std::string model;
    double accuracy_pct = 0.0;
    double area_cm2 = 0.0;
    double power_mw = 0.0;
    double f_hz = 0.0;
    double latency_ms = 0.0;
    double energy_mj = 0.0;
};

inline constexpr const char* kTableColumns[] = {"Dataset", "Model",      "Acc. (%)",    "Area (cm2)",
                                                "Power (mW)", "Freq. (Hz)", "Latency (ms)", "Energy (mJ)"};

TableRow table_row(const nlohmann::json& manifest);
TableRow table_row(const ReferenceRow& ref);

/// Rows for the given manifests, each dataset's reference rows (if any)
/// placed before it. Throws ValidationError on an empty manifest list.
std::vector<TableRow> report_table(const std::vector<nlohmann::json>& manifests,
                                   const std::vector<ReferenceRow>& reference = {});

std::string format_table_text(const std::vector<TableRow>& rows);
std::string format_table_csv(const std::vector<TableRow>& rows);

}  // namespace printsvm
