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


#include <cstdio>
#include <exception>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "printsvm/circuitgen.hpp"
#include "printsvm/costmodel.hpp"
#include "printsvm/netlist.hpp"
#include "printsvm/pipeline.hpp"
#include "printsvm/simulator.hpp"

namespace {

using namespace printsvm;
namespace fs = std::filesystem;

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_text_file(p)); }

void write_json(const fs::path& p, const nlohmann::json& j) { write_text_file(p, j.dump(2) + "\n"); }

template <class F>
auto stage(Stage s, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(s, e.what());
    }
}

struct ConfigArgs {
    std::string config;
    std::vector<std::string> overrides;
    std::string out_dir;

    void add_to(CLI::App* app) {
        app->add_option("-c,--config", config, "pipeline config (JSON)")->required();
        app->add_option("--set", overrides, "override a config key, e.g. --set train.epochs=50");
        app->add_option("-o,--out", out_dir, "output directory (default: from config)");
    }
    PipelineConfig load() const { return apply_overrides(load_pipeline_config(config), overrides); }
    fs::path output(const PipelineConfig& cfg) const { return out_dir.empty() ? output_directory(cfg) : fs::path(out_dir); }
};

int cmd_train(const ConfigArgs& args) {
    const auto cfg = args.load();
    const auto data = prepare_data(cfg);
    const auto model = stage(Stage::Training, [&] { return train_ovr(data.train, cfg.train_config()); });
    const auto dir = args.output(cfg);
    nlohmann::json ranges = nlohmann::json::array();
    for (const auto& r : data.normalizer.ranges) ranges.push_back({{"min", r.min}, {"max", r.max}});
    write_json(dir / "model.json", model);
    write_json(dir / "normalizer.json", {{"ranges", ranges}});
    std::printf("%s: float test accuracy %.4f -> %s\n", cfg.name.c_str(), accuracy(model, data.test),
                (dir / "model.json").string().c_str());
    return 0;
}

int cmd_quantize(const ConfigArgs& args, const std::string& model_path) {
    const auto cfg = args.load();
    const auto dir = args.output(cfg);
    const auto data = prepare_data(cfg);
    const auto q = stage(Stage::Training, [&] {
        const auto model = read_json(model_path.empty() ? dir / "model.json" : fs::path(model_path)).get<SvmModel>();
        return quantize_model(model, data.test, cfg.quant);
    });
    write_json(dir / "quantized.json", q);
    std::printf("%s: weights %s, accuracy %.4f (float %.4f)%s\n", cfg.name.c_str(),
                nlohmann::json(q.weight_format).dump().c_str(), q.quantized_accuracy, q.float_accuracy,
                q.gate_met ? "" : " [accuracy gate not met]");
    return 0;
}

QuantizedSvm load_quantized(const std::string& path) {
    return stage(Stage::Config, [&] { return read_json(path).get<QuantizedSvm>(); });
}

int cmd_generate(const std::string& qpath, const std::string& out, const std::string& baseline) {
    const auto q = load_quantized(qpath);
    const auto nl = stage(Stage::Generation, [&] {
        if (baseline.empty()) return build_sequential(q);
        if (baseline == "ovr") return build_parallel_baseline(q, BaselineShape::OneVsRest);
        if (baseline == "ovo") return build_parallel_baseline(q, BaselineShape::OneVsOne);
        throw ConfigError("unknown baseline shape '" + baseline + "'");
    });
    const fs::path hdl_path(out);
    write_text_file(hdl_path, emit_hdl(nl));
    write_json(fs::path(hdl_path).replace_extension(".census.json"), gate_census(nl));
    std::printf("%s: %lld gates (%lld DFF)\n", hdl_path.string().c_str(),
                static_cast<long long>(gate_census(nl).total()), static_cast<long long>(gate_census(nl).dff_count()));
    return 0;
}

std::vector<std::int64_t> parse_codes(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
    return out;
}

int cmd_simulate(const std::string& qpath, const std::string& design_path, const std::string& config,
                 const std::string& input, const std::string& trace_path, const std::string& report_path) {
    const auto q = load_quantized(qpath);
    const Netlist nl = stage(Stage::Generation, [&] { return read_hdl(read_text_file(design_path)); });
    if (!input.empty()) {
        const auto x = stage(Stage::Config, [&] { return parse_codes(input); });
        if (static_cast<int>(x.size()) != q.m) throw StageError(Stage::Config, "--input needs m codes");
        const auto res = stage(Stage::Equivalence, [&] { return simulate(nl, x, 4 * q.n + 8); });
        if (!trace_path.empty()) write_text_file(trace_path, trace_csv(res.trace));
        const int golden = predict_quantized(q, x);
        std::printf("class %d (golden %d) after %d cycles\n", res.class_index, golden,
                    measured_latency_cycles(res.trace));
        return res.class_index == golden ? 0 : exit_code(Stage::Equivalence);
    }
    if (config.empty()) throw StageError(Stage::Config, "simulate needs --input or --config");
    const auto cfg = load_pipeline_config(config);
    const auto data = prepare_data(cfg);
    const auto report = stage(Stage::Equivalence, [&] { return equivalence_check(q, nl, data.test); });
    if (!report_path.empty()) write_json(report_path, report);
    std::printf("%zu samples, %zu class mismatches, cycle agreement %.6f\n", report.samples,
                report.class_mismatches, report.cycle_agreement_rate());
    return report.passed() ? 0 : exit_code(Stage::Equivalence);
}

int cmd_cost(const std::string& design_path, int cycles, const std::string& tech_path, double freq,
             const std::string& out) {
    const Netlist nl = stage(Stage::Generation, [&] { return read_hdl(read_text_file(design_path)); });
    const auto report = stage(Stage::Cost, [&] {
        const TechFile tech = tech_path.empty() ? TechFile::printed_defaults() : load_tech_file(tech_path);
        int c = cycles;
        if (c <= 0) {
            const auto n = nl.attribute("n");
            if (n.empty()) throw ConfigError("design has no 'n' attribute; pass --cycles");
            c = std::stoi(n);
        }
        return estimate(nl, c, tech, freq > 0 ? std::optional<double>(freq) : std::nullopt);
    });
    for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (!out.empty()) write_json(out, report);
    std::printf("area %.3f cm2, power %.3f mW, f %.2f Hz, latency %.1f ms, energy %.4f mJ, battery %s\n",
                report.area_cm2, report.power_mw, report.f_hz, report.latency_ms, report.energy_mj,
                report.battery_ok ? "ok" : "exceeded");
    return 0;
}

int cmd_pipeline(const std::vector<std::string>& configs, const std::vector<std::string>& overrides,
                 const std::string& out_dir) {
    std::vector<PipelineConfig> cfgs;
    std::set<fs::path> dirs;
    std::vector<fs::path> outs;
    for (const auto& path : configs) {
        cfgs.push_back(apply_overrides(load_pipeline_config(path), overrides));
        fs::path dir = output_directory(cfgs.back());
        if (!out_dir.empty()) dir = configs.size() == 1 ? fs::path(out_dir) : fs::path(out_dir) / cfgs.back().name;
        if (!dirs.insert(dir).second) throw StageError(Stage::Config, "two runs share output " + dir.string());
        outs.push_back(dir);
    }
    std::vector<std::future<int>> runs;
    std::mutex print;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        runs.push_back(std::async(std::launch::async, [&, i] {
            int code = 0;
            std::string line;
            try {
                const auto m = run_pipeline(cfgs[i], outs[i]);
                line = cfgs[i].name + ": ok, accuracy " + std::to_string(m["metrics"]["quantized_accuracy"].get<double>()) +
                       ", cycles " + std::to_string(m["metrics"]["cycles"].get<int>()) + " -> " +
                       (outs[i] / "manifest.json").string();
            } catch (const StageError& e) {
                code = exit_code(e.stage());
                line = cfgs[i].name + ": FAILED (" + e.what() + ")";
            } catch (const std::exception& e) {
                code = 1;
                line = cfgs[i].name + ": FAILED (" + e.what() + ")";
            }
            std::lock_guard lock(print);
            std::printf("%s\n", line.c_str());
            return code;
        }));
    }
    int status = 0;
    for (auto& r : runs) {
        const int code = r.get();
        if (status == 0) status = code;
    }
    return status;
}

int cmd_table(const std::vector<std::string>& manifests, const std::string& reference, bool csv,
              const std::string& out) {
    std::vector<nlohmann::json> docs;
    for (const auto& m : manifests) docs.push_back(stage(Stage::Config, [&] { return read_json(m); }));
    const auto refs =
        reference.empty() ? std::vector<ReferenceRow>{} : stage(Stage::Config, [&] { return load_reference_table(reference); });
    const auto rows = stage(Stage::Config, [&] { return report_table(docs, refs); });
    const std::string text = csv ? format_table_csv(rows) : format_table_text(rows);
    if (out.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_text_file(out, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"printsvm: sequential SVM circuit generator for printed electronics"};
    app.require_subcommand(1);

    ConfigArgs train_args, quant_args;
    auto* train = app.add_subcommand("train", "train the OvR SVM on the configured split");
    train_args.add_to(train);

    std::string model_path;
    auto* quant = app.add_subcommand("quantize", "search the weight precision");
    quant_args.add_to(quant);
    quant->add_option("--model", model_path, "model.json (default: <out>/model.json)");

    std::string gen_q, gen_out = "design.v", gen_baseline;
    auto* gen = app.add_subcommand("generate", "emit the gate-level design");
    gen->add_option("-q,--quantized", gen_q, "quantized.json")->required();
    gen->add_option("-o,--out", gen_out, "HDL output path");
    gen->add_option("--baseline", gen_baseline, "emit a parallel baseline instead: ovr or ovo");

    std::string sim_q, sim_design, sim_config, sim_input, sim_trace, sim_report;
    auto* sim = app.add_subcommand("simulate", "cycle-simulate a design");
    sim->add_option("-q,--quantized", sim_q, "quantized.json")->required();
    sim->add_option("-d,--design", sim_design, "design.v")->required();
    sim->add_option("-c,--config", sim_config, "check every test sample of this config");
    sim->add_option("--input", sim_input, "comma-separated raw input codes");
    sim->add_option("--trace", sim_trace, "write a per-cycle trace CSV (with --input)");
    sim->add_option("--report", sim_report, "write the equivalence report (with --config)");

    std::string cost_design, cost_tech, cost_out;
    int cost_cycles = 0;
    double cost_freq = 0.0;
    auto* cost = app.add_subcommand("cost", "area, power, timing and energy estimate");
    cost->add_option("-d,--design", cost_design, "design.v")->required();
    cost->add_option("--cycles", cost_cycles, "cycles per inference (default: the design's n)");
    cost->add_option("--tech", cost_tech, "technology file (default: built-in)");
    cost->add_option("--freq", cost_freq, "target clock in Hz (default: f_max)");
    cost->add_option("-o,--out", cost_out, "write cost.json");

    std::vector<std::string> pipe_configs, pipe_overrides;
    std::string pipe_out;
    auto* pipe = app.add_subcommand("pipeline", "run every stage; several configs run in parallel");
    pipe->add_option("-c,--config", pipe_configs, "pipeline config(s)")->required();
    pipe->add_option("--set", pipe_overrides, "override a config key");
    pipe->add_option("-o,--out", pipe_out, "output directory");

    std::vector<std::string> table_manifests;
    std::string table_ref, table_out;
    bool table_csv = false;
    auto* table = app.add_subcommand("table", "comparison table from run manifests");
    table->add_option("manifests", table_manifests, "manifest.json files")->required();
    table->add_option("--reference", table_ref, "reference rows (JSON)");
    table->add_flag("--csv", table_csv, "CSV instead of aligned text");
    table->add_option("-o,--out", table_out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(Stage::Config);
    }

    try {
        if (*train) return cmd_train(train_args);
        if (*quant) return cmd_quantize(quant_args, model_path);
        if (*gen) return cmd_generate(gen_q, gen_out, gen_baseline);
        if (*sim) return cmd_simulate(sim_q, sim_design, sim_config, sim_input, sim_trace, sim_report);
        if (*cost) return cmd_cost(cost_design, cost_cycles, cost_tech, cost_freq, cost_out);
        if (*pipe) return cmd_pipeline(pipe_configs, pipe_overrides, pipe_out);
        if (*table) return cmd_table(table_manifests, table_ref, table_csv, table_out);
    } catch (const StageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e.stage());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
