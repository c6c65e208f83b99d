// Copyright 2026 The qfeedback Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "../support/fixtures.hpp"
#include "qfb/cli.hpp"
#include "qfb/config.hpp"

using namespace qfb;
using namespace qfb::testing;
namespace fs = std::filesystem;

namespace {

const std::string kConfigDir = QFB_CONFIG_DIR;

// Short two-level run: 0.2 time units, 8 trajectories.
const char* kSmall = R"({
  "model": {"n": 2, "h_a": [[1, 0], [0, -1]], "h_b": [[0, 1], [1, 0]], "c": [[1, 0], [0, -1]],
            "mu": 1.0, "eta": 0.5},
  "controller": {"kind": "square_of_sum", "k": 1.0, "ell": 1.0},
  "sim": {"dt": 1e-3, "t_final": 0.2, "seed": 3, "record_stride": 10},
  "ensemble": {"n_trajectories": 8}
})";

class TempDir {
   public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("qfb_unit_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path_ / name) << text;
        return (path_ / name).string();
    }

   private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int run(const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    if (out_text) *out_text = out.str() + err.str();
    return code;
}

}  // namespace

TEST(config, shipped_configs_build) {
    for (const char* name : {"two_level.json", "three_level.json"}) {
        const auto doc = load_config(kConfigDir + "/" + name);
        for (const auto& c : check_document(doc)) EXPECT_TRUE(c.passed) << name << ": " << c.name;
        const auto cfg = build_ensemble_config(doc);
        EXPECT_EQ(cfg.model.dim(), doc.n);
        EXPECT_NO_THROW(cfg.validate());
    }
}

TEST(config, defaults_and_bare_real_entries) {
    const auto doc = parse_config(kSmall);
    EXPECT_EQ(doc.n, 2);
    EXPECT_FALSE(doc.rho_d.has_value());
    EXPECT_FALSE(doc.rho0.has_value());
    EXPECT_EQ(doc.n_trajectories, 8u);
    const auto cfg = build_ensemble_config(doc);
    // Default target is the top eigenvalue of C; default rho0 is I/N.
    EXPECT_NEAR(cfg.target.rho_d().matrix()(0, 0).real(), 1.0, 1e-15);
    EXPECT_TRUE(cfg.rho0.matrix().isApprox(DensityMatrix::maximally_mixed(2).matrix()));
    EXPECT_EQ(cfg.controller.kind, ControlLaw::square_of_sum);
}

TEST(config, malformed_inputs_are_validation_errors) {
    EXPECT_THROW(parse_config("{"), ValidationError);
    EXPECT_THROW(parse_config("{}"), ValidationError);
    std::string bad = kSmall;
    bad.replace(bad.find("square_of_sum"), 13, "bang_bang");
    EXPECT_THROW(parse_config(bad), ValidationError);
    std::string wrong_n = kSmall;
    wrong_n.replace(wrong_n.find("\"n\": 2"), 6, "\"n\": 3");
    EXPECT_THROW(build_model(parse_config(wrong_n)), std::invalid_argument);
    EXPECT_THROW(load_config("/nonexistent/qfb.json"), ValidationError);
}

TEST(config, matrix_json_round_trip) {
    NormalStream g(51, 0);
    const CMatrix m = random_density(2, g).matrix();
    std::string text = kSmall;
    text.insert(text.rfind('}'), ", \"rho0\": " + matrix_to_json(m));
    const auto doc = parse_config(text);
    ASSERT_TRUE(doc.rho0.has_value());
    EXPECT_EQ(*doc.rho0, m);
    EXPECT_TRUE(build_ensemble_config(doc).rho0.matrix().isApprox(m, 1e-15));

    // Shape is checked against n at parse time.
    std::string wrong = kSmall;
    wrong.insert(wrong.rfind('}'), ", \"rho0\": " + matrix_to_json(random_density(3, g).matrix()));
    EXPECT_THROW(parse_config(wrong), ValidationError);
}

TEST(cli, validate_exit_codes) {
    TempDir tmp;
    EXPECT_EQ(run({"validate", "--config", tmp.write("ok.json", kSmall)}), kExitOk);
    std::string bad = kSmall;
    bad.replace(bad.find("\"h_a\": [[1, 0], [0, -1]]"), 24, "\"h_a\": [[0, 1], [1, 0]]");
    std::string text;
    EXPECT_EQ(run({"validate", "--config", tmp.write("bad.json", bad)}, &text), kExitBadInput);
    EXPECT_NE(text.find("FAIL  [H_a, C] = 0"), std::string::npos);
    EXPECT_EQ(run({"validate", "--config", tmp.write("broken.json", "{ nope")}), kExitBadInput);
    EXPECT_EQ(run({"validate", "--config", (tmp.path() / "missing.json").string()}), kExitBadInput);
    EXPECT_EQ(run({"frobnicate"}), kExitBadInput);
    EXPECT_EQ(run({}), kExitBadInput);
    EXPECT_EQ(run({"--help"}), kExitOk);
}

TEST(cli, simulate_writes_trajectory) {
    TempDir tmp;
    const auto cfg = tmp.write("c.json", kSmall);
    std::string text;
    ASSERT_EQ(run({"simulate", "--config", cfg, "--out", tmp.path().string()}, &text), kExitOk) << text;
    const auto csv = slurp(tmp.path() / "trajectory.csv");
    EXPECT_EQ(csv.rfind("t,u,dY,fidelity_target,purity,v1,v2,v_tilde,lv\n", 0), 0u);
    EXPECT_NE(text.find("outcome="), std::string::npos);
    EXPECT_EQ(run({"simulate", "--config", cfg, "--k", "-1"}), kExitBadInput);
    EXPECT_EQ(run({"simulate", "--config", cfg, "--eta", "1.5"}), kExitBadInput);
}

TEST(cli, ensemble_serial_and_parallel_outputs_match) {
    TempDir tmp;
    const auto cfg = tmp.write("c.json", kSmall);
    const auto a = tmp.path() / "par", b = tmp.path() / "ser";
    ASSERT_EQ(run({"ensemble", "--config", cfg, "--out", a.string()}), kExitOk);
    ASSERT_EQ(run({"ensemble", "--config", cfg, "--out", b.string(), "--serial"}), kExitOk);
    EXPECT_EQ(slurp(a / "summary.csv"), slurp(b / "summary.csv"));
    EXPECT_EQ(slurp(a / "mean_curves.csv"), slurp(b / "mean_curves.csv"));
    EXPECT_EQ(slurp(a / "mean_curves.csv").rfind("t,mean_v1,mean_v2,mean_vtilde,mean_purity,mean_fidelity\n", 0), 0u);
    ASSERT_EQ(run({"ensemble", "--config", cfg, "--out", a.string(), "--n", "3", "--seed", "4"}), kExitOk);
    EXPECT_NE(slurp(a / "summary.csv"), slurp(b / "summary.csv"));
}

TEST(cli, levelset_writes_grid) {
    TempDir tmp;
    ASSERT_EQ(run({"levelset", "--k", "2", "--ell", "0.5", "--resolution", "11", "--out", tmp.path().string()}),
              kExitOk);
    std::ifstream f(tmp.path() / "levelset_k2_ell0.5.csv");
    ASSERT_TRUE(f.good());
    std::string line;
    std::getline(f, line);
    EXPECT_EQ(line, "y,z,lv,physical");
    int rows = 0;
    while (std::getline(f, line)) ++rows;
    EXPECT_EQ(rows, 121);
    EXPECT_EQ(run({"levelset", "--k", "0"}), kExitBadInput);
    EXPECT_EQ(run({"levelset", "--resolution", "1", "--out", tmp.path().string()}), kExitBadInput);
}

TEST(cli, rankcheck_report) {
    TempDir tmp;
    std::string text;
    ASSERT_EQ(run({"rankcheck", "--config", kConfigDir + "/three_level.json", "--out", tmp.path().string()}, &text),
              kExitOk);
    EXPECT_EQ(slurp(tmp.path() / "rank_report.txt"), text);
    EXPECT_NE(text.find("achieved_rank: 4"), std::string::npos);
    EXPECT_NE(text.find("required_rank: 4"), std::string::npos);
    EXPECT_NE(text.find("strong_regularity(C): no"), std::string::npos);  // diag(1, 0, -1) has equal gaps
}
