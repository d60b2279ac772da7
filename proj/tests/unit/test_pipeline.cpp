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


#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "printsvm/hash.hpp"
#include "printsvm/pipeline.hpp"
#include "test_support.hpp"

using namespace printsvm;
namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("printsvm_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
};

void write_blobs_csv(const fs::path& path, std::uint64_t seed) {
    Lcg64 rng(seed);
    const auto d = testing::blobs(rng, 5, 4, 40, 0.1);
    std::ofstream out(path);
    out << "f1,f2,f3,f4,f5,cls\n";
    for (const auto& s : d.samples()) {
        for (double v : s.features) out << v * 50 << ",";
        out << "c" << s.label << "\n";
    }
}

PipelineConfig blobs_config(const Scratch& scratch) {
    write_blobs_csv(scratch.dir / "blobs.csv", 7);
    PipelineConfig cfg;
    cfg.name = "blobs";
    cfg.dataset.path = "blobs.csv";
    cfg.dataset.csv.header = true;
    cfg.seed = 3;
    cfg.train.epochs = 30;
    cfg.train.lambda = 1e-4;
    cfg.base_dir = scratch.dir;
    return cfg;
}

bool contains_absolute_path(const nlohmann::json& j) {
    if (j.is_string()) return !j.get<std::string>().empty() && j.get<std::string>().front() == '/';
    if (j.is_structured())
        for (const auto& item : j) if (contains_absolute_path(item)) return true;
    return false;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PRINTSVM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config json round trip and validation") {
    Scratch s("cfg");
    auto cfg = blobs_config(s);
    cfg.target_f_hz = 12.5;
    const nlohmann::json j = cfg;
    auto back = j.get<PipelineConfig>();
    back.base_dir = cfg.base_dir;
    CHECK(nlohmann::json(back) == j);
    auto bad = cfg;
    bad.train_fraction = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.train.schedule = "sgd";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("overrides replace dotted keys") {
    Scratch s("ovr");
    const auto cfg = blobs_config(s);
    const auto out = apply_overrides(cfg, {"train.epochs=7", "seed=99", "dataset.delimiter=;", "target_f_hz=20"});
    CHECK(out.train.epochs == 7);
    CHECK(out.seed == 99);
    CHECK(out.dataset.csv.delimiter == ';');
    CHECK(out.target_f_hz == 20.0);
    CHECK(out.base_dir == cfg.base_dir);
    CHECK_THROWS_AS(apply_overrides(cfg, {"train.nope=1"}), StageError);
    CHECK_THROWS_AS(apply_overrides(cfg, {"noequals"}), StageError);
}

TEST_CASE("exit codes are distinct per stage") {
    std::set<int> codes;
    for (Stage st : {Stage::Config, Stage::Data, Stage::Training, Stage::Generation, Stage::Equivalence, Stage::Cost}) {
        CHECK(exit_code(st) > 1);
        codes.insert(exit_code(st));
    }
    CHECK(codes.size() == 6);
}

TEST_CASE("a full run writes every artifact and is deterministic") {
    Scratch s("run");
    const auto cfg = blobs_config(s);
    const auto m1 = run_pipeline(cfg, s.dir / "a");
    const auto m2 = run_pipeline(cfg, s.dir / "b");
    CHECK(m1 == m2);
    CHECK(read_text_file(s.dir / "a" / "manifest.json") == read_text_file(s.dir / "b" / "manifest.json"));
    for (const char* f : {"model.json", "normalizer.json", "quantized.json", "design.v", "census.json",
                          "equivalence.json", "cost.json", "config.json", "manifest.json"})
        CHECK(fs::exists(s.dir / "a" / f));
    for (const auto& [file, hash] : m1.at("artifacts").items())
        CHECK(hash.get<std::string>() == sha256_hex(read_text_file(s.dir / "a" / file)));
    CHECK(m1["metrics"]["cycles"] == 4);
    CHECK(m1["metrics"]["equivalence_mismatches"] == 0);
    CHECK(m1["dataset"]["n"] == 4);
    CHECK(!contains_absolute_path(m1));
    const auto cost = m1.at("cost");
    CHECK(cost["energy_mj"].get<double>() == cost["power_mw"].get<double>() * cost["latency_ms"].get<double>() / 1000.0);
}

TEST_CASE("stage failures carry their stage") {
    Scratch s("fail");
    auto cfg = blobs_config(s);
    cfg.tech_file = "no_such_tech.json";
    try {
        run_pipeline(cfg, s.dir / "out");
        FAIL("expected a cost-stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == Stage::Cost);
        CHECK(exit_code(e.stage()) != exit_code(Stage::Equivalence));
    }
    cfg = blobs_config(s);
    cfg.dataset.path = "missing.csv";
    try {
        run_pipeline(cfg, s.dir / "out");
        FAIL("expected a data-stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == Stage::Data);
    }
    {
        std::ofstream(s.dir / "one_class.csv") << "1,2,a\n3,4,a\n";
    }
    cfg.dataset.path = "one_class.csv";
    cfg.dataset.csv.header = false;
    CHECK_THROWS_AS(run_pipeline(cfg, s.dir / "out"), StageError);
}

TEST_CASE("comparison table") {
    Scratch s("table");
    const auto cfg = blobs_config(s);
    const auto m = run_pipeline(cfg, s.dir / "a");
    const auto rows = report_table({m});
    REQUIRE(rows.size() == 1);
    const auto text = format_table_text(rows);
    CHECK(text.find("Dataset") == 0);
    const auto csv = format_table_csv(rows);
    std::istringstream lines(csv);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(std::count(header.begin(), header.end(), ',') == 7);
    CHECK(std::count(first.begin(), first.end(), ',') == 7);
    CHECK_THROWS_AS(report_table({}), ValidationError);

    std::vector<nlohmann::json> five;
    for (const char* name : {"cardio", "dermatology", "pendigits", "redwine", "whitewine"}) {
        auto copy = m;
        copy["name"] = name;
        five.push_back(copy);
    }
    const auto refs = load_reference_table(fs::path(PRINTSVM_DATA_DIR) / "reference" / "comparison.json");
    const auto ours_only = report_table(five);
    CHECK(ours_only.size() == 5);
    for (const auto& r : ours_only) CHECK(r.energy_mj == r.power_mw * r.latency_ms / 1000.0);
    CHECK(report_table(five, refs).size() == 5 + refs.size());
}

TEST_CASE("bundled PenDigits config runs clean with ten cycles") {
    auto cfg = load_pipeline_config(fs::path(PRINTSVM_CONFIG_DIR) / "pendigits.json");
    Scratch s("pd");
    const auto m = run_pipeline(cfg, s.dir);
    CHECK(m["metrics"]["cycles"] == 10);
    CHECK(m["metrics"]["equivalence_mismatches"] == 0);
    CHECK(m["metrics"]["cycle_agreement_rate"] == 1.0);
}

TEST_CASE("Dermatology config reports six cycles when the data is present") {
    auto cfg = load_pipeline_config(fs::path(PRINTSVM_CONFIG_DIR) / "dermatology.json");
    if (!fs::exists(cfg.resolve(cfg.dataset.path))) {
        MESSAGE("dermatology.data not present; check skipped");
        return;
    }
    Scratch s("derm");
    const auto m = run_pipeline(cfg, s.dir);
    CHECK(m["metrics"]["cycles"] == 6);
    CHECK(m["metrics"]["equivalence_mismatches"] == 0);
}

TEST_CASE("command line exit codes") {
    Scratch s("cli");
    const auto cfg = blobs_config(s);
    const nlohmann::json j = cfg;
    {
        std::ofstream(s.dir / "cfg.json") << j.dump(2);
    }
    const std::string c = (s.dir / "cfg.json").string();
    const std::string out = (s.dir / "out").string();
    CHECK(run_cli("pipeline -c " + c + " -o " + out) == 0);
    CHECK(fs::exists(s.dir / "out" / "manifest.json"));
    CHECK(run_cli("pipeline -c " + c + " -o " + out + " --set tech_file=missing.json") == exit_code(Stage::Cost));
    CHECK(run_cli("pipeline -c " + c + " -o " + out + " --set dataset.path=missing.csv") == exit_code(Stage::Data));
    CHECK(run_cli("pipeline -c " + (s.dir / "nope.json").string()) == exit_code(Stage::Config));
    CHECK(run_cli("table " + (s.dir / "out" / "manifest.json").string()) == 0);
    CHECK(run_cli("generate -q " + (s.dir / "out" / "quantized.json").string() + " -o " + (s.dir / "re.v").string()) == 0);
    CHECK(read_text_file(s.dir / "re.v") == read_text_file(s.dir / "out" / "design.v"));
    CHECK(run_cli("simulate -q " + (s.dir / "out" / "quantized.json").string() + " -d " + (s.dir / "re.v").string() +
                  " -c " + c) == 0);
    CHECK(run_cli("cost -d " + (s.dir / "re.v").string()) == 0);
    CHECK(run_cli("train -c " + c + " -o " + (s.dir / "stages").string()) == 0);
    CHECK(run_cli("quantize -c " + c + " -o " + (s.dir / "stages").string()) == 0);
    CHECK(read_text_file(s.dir / "stages" / "quantized.json") == read_text_file(s.dir / "out" / "quantized.json"));
}
