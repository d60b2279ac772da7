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


#include "printsvm/pipeline.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "printsvm/circuitgen.hpp"
#include "printsvm/hash.hpp"
#include "printsvm/netlist.hpp"
#include "printsvm/rng.hpp"
#include "printsvm/simulator.hpp"

namespace printsvm {

const char* stage_name(Stage stage) {
    switch (stage) {
        case Stage::Config: return "config";
        case Stage::Data: return "data";
        case Stage::Training: return "training";
        case Stage::Generation: return "generation";
        case Stage::Equivalence: return "equivalence";
        case Stage::Cost: return "cost";
    }
    return "unknown";
}

int exit_code(Stage stage) {
    switch (stage) {
        case Stage::Config: return 2;
        case Stage::Data: return 3;
        case Stage::Training: return 4;
        case Stage::Equivalence: return 5;
        case Stage::Cost: return 6;
        case Stage::Generation: return 7;
    }
    return 1;
}

StageError::StageError(Stage stage, const std::string& what)
    : Error(std::string(stage_name(stage)) + ": " + what), stage_(stage) {}

namespace {

template <class F>
auto in_stage(Stage stage, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

nlohmann::json csv_to_json(const CsvOptions& o) {
    return {{"label_column", o.label_column},
            {"header", o.header},
            {"delimiter", std::string(1, o.delimiter)},
            {"drop_columns", o.drop_columns},
            {"missing_token", o.missing_token}};
}

CsvOptions csv_from_json(const nlohmann::json& j) {
    CsvOptions o;
    o.label_column = j.value("label_column", -1);
    o.header = j.value("header", false);
    const auto delim = j.value("delimiter", std::string(","));
    if (delim.size() != 1) throw ConfigError("dataset.delimiter must be one character");
    o.delimiter = delim[0];
    o.drop_columns = j.value("drop_columns", std::vector<int>{});
    o.missing_token = j.value("missing_token", std::string());
    return o;
}

}  // namespace

void PipelineConfig::validate() const {
    if (name.empty()) throw ConfigError("config needs a name");
    if (dataset.path.empty()) throw ConfigError("config needs dataset.path");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
    if (!(train.lambda > 0.0)) throw ConfigError("train.lambda must be positive");
    if (train.epochs < 1) throw ConfigError("train.epochs must be >= 1");
    if (train.schedule != "pegasos" && train.schedule != "pegasos-avg")
        throw ConfigError("unknown train.schedule '" + train.schedule + "'");
    if (target_f_hz && !(*target_f_hz > 0.0)) throw ConfigError("target_f_hz must be positive");
    try {
        quant.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
}

TrainConfig PipelineConfig::train_config() const {
    TrainConfig t = train;
    t.seed = derive_seed(seed, 1);
    return t;
}

std::filesystem::path PipelineConfig::resolve(const std::string& path) const {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

void to_json(nlohmann::json& j, const PipelineConfig& cfg) {
    j = nlohmann::json::object();
    j["name"] = cfg.name;
    j["dataset"] = csv_to_json(cfg.dataset.csv);
    j["dataset"]["path"] = cfg.dataset.path;
    j["seed"] = cfg.seed;
    j["train_fraction"] = cfg.train_fraction;
    j["train"] = {{"lambda", cfg.train.lambda}, {"epochs", cfg.train.epochs}, {"schedule", cfg.train.schedule}};
    j["quant"] = {{"max_accuracy_drop", cfg.quant.max_accuracy_drop},
                  {"min_fraction_bits", cfg.quant.min_fraction_bits},
                  {"max_fraction_bits", cfg.quant.max_fraction_bits},
                  {"input_fraction_bits", cfg.quant.input_fraction_bits},
                  {"input_integer_bits", cfg.quant.input_integer_bits}};
    j["tech_file"] = cfg.tech_file;
    j["target_f_hz"] = cfg.target_f_hz ? nlohmann::json(*cfg.target_f_hz) : nlohmann::json(nullptr);
    j["output_dir"] = cfg.output_dir;
}

void from_json(const nlohmann::json& j, PipelineConfig& cfg) {
    cfg = {};
    cfg.name = j.at("name").get<std::string>();
    const auto& d = j.at("dataset");
    cfg.dataset.path = d.at("path").get<std::string>();
    cfg.dataset.csv = csv_from_json(d);
    cfg.dataset.csv.name = cfg.name;
    cfg.seed = j.value("seed", std::uint64_t{42});
    cfg.train_fraction = j.value("train_fraction", 0.8);
    if (j.contains("train")) {
        const auto& t = j.at("train");
        cfg.train.lambda = t.value("lambda", cfg.train.lambda);
        cfg.train.epochs = t.value("epochs", cfg.train.epochs);
        cfg.train.schedule = t.value("schedule", cfg.train.schedule);
    }
    if (j.contains("quant")) {
        const auto& q = j.at("quant");
        cfg.quant.max_accuracy_drop = q.value("max_accuracy_drop", cfg.quant.max_accuracy_drop);
        cfg.quant.min_fraction_bits = q.value("min_fraction_bits", cfg.quant.min_fraction_bits);
        cfg.quant.max_fraction_bits = q.value("max_fraction_bits", cfg.quant.max_fraction_bits);
        cfg.quant.input_fraction_bits = q.value("input_fraction_bits", cfg.quant.input_fraction_bits);
        cfg.quant.input_integer_bits = q.value("input_integer_bits", cfg.quant.input_integer_bits);
    }
    cfg.tech_file = j.value("tech_file", std::string());
    if (j.contains("target_f_hz") && !j.at("target_f_hz").is_null())
        cfg.target_f_hz = j.at("target_f_hz").get<double>();
    cfg.output_dir = j.value("output_dir", std::string());
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    PipelineConfig cfg;
    try {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config " + path.string());
        cfg = nlohmann::json::parse(in).get<PipelineConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw StageError(Stage::Config, path.string() + ": " + e.what());
    } catch (const Error& e) {
        throw StageError(Stage::Config, e.what());
    }
    cfg.base_dir = path.parent_path();
    in_stage(Stage::Config, [&] { cfg.validate(); });
    return cfg;
}

PipelineConfig apply_overrides(const PipelineConfig& cfg, const std::vector<std::string>& overrides) {
    return in_stage(Stage::Config, [&] {
        nlohmann::json j = cfg;
        for (const auto& item : overrides) {
            const auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + item + "' is not key=value");
            std::string pointer = "/" + item.substr(0, eq);
            for (char& c : pointer)
                if (c == '.') c = '/';
            const std::string text = item.substr(eq + 1);
            nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
            if (value.is_discarded()) value = text;
            const nlohmann::json::json_pointer ptr(pointer);
            if (!j.contains(ptr)) throw ConfigError("unknown config key '" + item.substr(0, eq) + "'");
            j[ptr] = value;
        }
        PipelineConfig out = j.get<PipelineConfig>();
        out.base_dir = cfg.base_dir;
        out.validate();
        return out;
    });
}

std::filesystem::path output_directory(const PipelineConfig& cfg) {
    const std::filesystem::path dir(cfg.output_dir.empty() ? cfg.name : cfg.output_dir);
    if (dir.is_absolute()) return dir;
    const char* root = std::getenv("PRINTSVM_OUT_ROOT");
    return std::filesystem::path(root != nullptr && *root != '\0' ? root : "out") / dir;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

PreparedData prepare_data(const PipelineConfig& cfg) {
    return in_stage(Stage::Data, [&] {
        const auto path = cfg.resolve(cfg.dataset.path);
        if (!std::filesystem::exists(path)) throw Error("dataset file not found: " + path.string());
        const std::string text = read_text_file(path);
        CsvOptions csv = cfg.dataset.csv;
        csv.name = cfg.name;
        const Dataset all = parse_csv(text, csv);
        auto parts = split(all, cfg.split_spec());
        if (parts.train.empty() || parts.test.empty()) throw ValidationError("split leaves an empty partition");
        const auto norm = fit_normalizer(parts.train);
        const auto fmt = cfg.quant.input_format();
        Dataset train = snap_to_input_grid(apply_normalizer(norm, parts.train), fmt);
        Dataset test = snap_to_input_grid(apply_normalizer(norm, parts.test), fmt);
        return PreparedData{norm, std::move(train), std::move(test), sha256_hex(text)};
    });
}

TechFile load_tech(const PipelineConfig& cfg) {
    return in_stage(Stage::Cost, [&] {
        if (cfg.tech_file.empty()) return TechFile::printed_defaults();
        return load_tech_file(cfg.resolve(cfg.tech_file));
    });
}

namespace {

nlohmann::json normalizer_json(const NormalizationParams& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : p.ranges) arr.push_back({{"min", r.min}, {"max", r.max}});
    return {{"ranges", arr}};
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

nlohmann::json run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
    in_stage(Stage::Config, [&] { cfg.validate(); });
    // Resolve the tech file first so a bad path fails before any work.
    const TechFile tech = load_tech(cfg);
    const PreparedData data = prepare_data(cfg);

    const SvmModel model = in_stage(Stage::Training, [&] { return train_ovr(data.train, cfg.train_config()); });
    const QuantizedSvm q = in_stage(Stage::Training, [&] { return quantize_model(model, data.test, cfg.quant); });

    const Netlist design = in_stage(Stage::Generation, [&] {
        Netlist nl = build_sequential(q);
        nl.validate();
        return nl;
    });
    const std::string hdl = in_stage(Stage::Generation, [&] { return emit_hdl(design); });
    const GateCensus census = gate_census(design);

    const EquivalenceReport eq = in_stage(Stage::Equivalence, [&] { return equivalence_check(q, design, data.test); });
    const int cycles = in_stage(Stage::Equivalence, [&] {
        const auto x = quantize_inputs(data.test[0].features, q.input_format);
        return measured_latency_cycles(simulate(design, x, 4 * q.n + 8).trace);
    });
    const CostReport cost = in_stage(Stage::Cost, [&] { return estimate(design, cycles, tech, cfg.target_f_hz); });

    nlohmann::json cfg_json = cfg;
    const std::vector<std::pair<std::string, std::string>> files = {
        {"config.json", dump(cfg_json)},
        {"normalizer.json", dump(normalizer_json(data.normalizer))},
        {"model.json", dump(nlohmann::json(model))},
        {"quantized.json", dump(nlohmann::json(q))},
        {"design.v", hdl},
        {"census.json", dump(nlohmann::json(census))},
        {"equivalence.json", dump(nlohmann::json(eq))},
        {"cost.json", dump(nlohmann::json(cost))},
    };
    nlohmann::json artifacts = nlohmann::json::object();
    in_stage(Stage::Generation, [&] {
        std::filesystem::create_directories(out_dir);
        for (const auto& [file, text] : files) {
            write_text_file(out_dir / file, text);
            artifacts[file] = sha256_hex(text);
        }
    });

    nlohmann::json manifest;
    manifest["name"] = cfg.name;
    manifest["config_sha256"] = sha256_hex(cfg_json.dump());
    manifest["dataset"] = {{"path", cfg.dataset.path},
                           {"sha256", data.dataset_sha256},
                           {"m", data.train.feature_count()},
                           {"n", data.train.class_count()},
                           {"train_samples", data.train.size()},
                           {"test_samples", data.test.size()}};
    manifest["model"] = "sequential-svm";
    manifest["metrics"] = {{"float_accuracy", q.float_accuracy},
                           {"quantized_accuracy", q.quantized_accuracy},
                           {"gate_met", q.gate_met},
                           {"weight_format", nlohmann::json(q.weight_format)},
                           {"bias_format", nlohmann::json(q.bias_format)},
                           {"accumulator_width", q.accumulator_width},
                           {"model_hash", model_hash(q)},
                           {"cycles", cycles},
                           {"gates", census.total()},
                           {"equivalence_mismatches", eq.class_mismatches},
                           {"cycle_agreement_rate", eq.cycle_agreement_rate()}};
    manifest["cost"] = cost;
    manifest["tech"] = {{"name", tech.name}, {"provenance", tech.provenance}};
    manifest["artifacts"] = artifacts;
    in_stage(Stage::Generation, [&] { write_text_file(out_dir / "manifest.json", dump(manifest)); });

    if (!eq.passed())
        throw StageError(Stage::Equivalence, std::to_string(eq.class_mismatches) + " class mismatches, " +
                                                 std::to_string(eq.cycles_checked - eq.cycles_agreeing) +
                                                 " disagreeing cycles");
    return manifest;
}

TableRow table_row(const nlohmann::json& manifest) {
    TableRow r;
    r.dataset = manifest.at("name").get<std::string>();
    r.model = manifest.value("model", std::string("sequential-svm"));
    r.accuracy_pct = 100.0 * manifest.at("metrics").at("quantized_accuracy").get<double>();
    const auto& c = manifest.at("cost");
    r.area_cm2 = c.at("area_cm2").get<double>();
    r.power_mw = c.at("power_mw").get<double>();
    r.f_hz = c.at("f_hz").get<double>();
    r.latency_ms = c.at("latency_ms").get<double>();
    r.energy_mj = c.at("energy_mj").get<double>();
    return r;
}

TableRow table_row(const ReferenceRow& ref) {
    return {ref.dataset,    ref.model + " (reference)", ref.accuracy_pct, ref.area_cm2, ref.power_mw,
            ref.f_hz,       ref.latency_ms,             ref.energy_mj};
}

std::vector<TableRow> report_table(const std::vector<nlohmann::json>& manifests,
                                   const std::vector<ReferenceRow>& reference) {
    if (manifests.empty()) throw ValidationError("report_table needs at least one manifest");
    std::vector<TableRow> rows;
    for (const auto& m : manifests) {
        const TableRow ours = table_row(m);
        for (const auto& ref : reference)
            if (ref.dataset == ours.dataset) rows.push_back(table_row(ref));
        rows.push_back(ours);
    }
    return rows;
}

namespace {

std::vector<std::string> cells(const TableRow& r) {
    auto fmt = [](double v, int digits) {
        std::ostringstream ss;
        ss << std::fixed << std::setprecision(digits) << v;
        return ss.str();
    };
    return {r.dataset, r.model, fmt(r.accuracy_pct, 1), fmt(r.area_cm2, 2), fmt(r.power_mw, 2),
            fmt(r.f_hz, 2), fmt(r.latency_ms, 1), fmt(r.energy_mj, 4)};
}

}  // namespace

std::string format_table_text(const std::vector<TableRow>& rows) {
    std::vector<std::vector<std::string>> grid;
    grid.emplace_back(std::begin(kTableColumns), std::end(kTableColumns));
    for (const auto& r : rows) grid.push_back(cells(r));
    std::vector<std::size_t> width(grid.front().size(), 0);
    for (const auto& line : grid)
        for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    std::ostringstream out;
    for (const auto& line : grid) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i > 0) out << "  ";
            if (i < 2)
                out << std::left << std::setw(static_cast<int>(width[i])) << line[i];
            else
                out << std::right << std::setw(static_cast<int>(width[i])) << line[i];
        }
        out << "\n";
    }
    return out.str();
}

std::string format_table_csv(const std::vector<TableRow>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < std::size(kTableColumns); ++i) out << (i ? "," : "") << kTableColumns[i];
    out << "\n";
    for (const auto& r : rows) {
        const auto c = cells(r);
        for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << c[i];
        out << "\n";
    }
    return out.str();
}

}  // namespace printsvm
