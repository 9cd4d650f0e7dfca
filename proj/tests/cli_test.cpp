// Copyright 2026 The noonsim Authors
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
#include <sstream>

#include "cli.hpp"

namespace noonsim {
namespace {

namespace fs = std::filesystem;

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "noonsim");
    std::vector<const char *> argv;
    for (const auto &a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("noonsim_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string &name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

TEST_F(CliTest, BuildThreePhotonNoon) {
    const Result r = run_cli({"build", "--n", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    const StateVector target = state_from_json(j.at("target"));
    EXPECT_NEAR(std::abs(target.amplitude(Occupation{3, 0})), 0.7071, 1e-4);
    EXPECT_NEAR(std::abs(target.amplitude(Occupation{0, 3})), 0.7071, 1e-4);
    EXPECT_NEAR(j.at("chain").at("fidelity_to_target").get<double>(), 1.0, 1e-12);
    EXPECT_FALSE(j.at("chain").contains("intermediates"));
}

TEST_F(CliTest, BuildWithChainIntermediates) {
    const Result r = run_cli({"build", "--n", "3", "--chain"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_NEAR(j.at("chain").at("fidelity_to_target").get<double>(), 1.0, 1e-12);
    EXPECT_EQ(j.at("chain").at("stage_log").size(), 6u);
    EXPECT_GE(j.at("chain").at("intermediates").size(), 6u);
}

TEST_F(CliTest, BuildErrors) {
    EXPECT_EQ(run_cli({"build", "--n", "7"}).code, cli::kConfigError);
    EXPECT_EQ(run_cli({"build", "--n", "2", "--chain"}).code, cli::kConfigError);
    EXPECT_EQ(run_cli({"build", "--n", "2", "--basis", "elliptic"}).code, cli::kConfigError);
    EXPECT_EQ(run_cli({"build", "--n", "two"}).code, cli::kConfigError);
    EXPECT_EQ(run_cli({}).code, cli::kConfigError);
    EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kConfigError);
    EXPECT_EQ(run_cli({"--config", path("missing.json"), "build"}).code, cli::kConfigError);
    const Result big = run_cli({"build", "--n", "7", "--nmax", "7"});
    EXPECT_EQ(big.code, 0) << big.err;
}

TEST_F(CliTest, BuildCircularBasis) {
    const Result r = run_cli({"build", "--n", "2", "--basis", "circular"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j.at("target").at("modes"), Json::parse(R"(["L", "R"])"));
    EXPECT_FALSE(j.contains("chain"));
}

TEST_F(CliTest, HelpExitsZero) {
    const Result r = run_cli({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("reproduce"), std::string::npos);
}

TEST_F(CliTest, ScanPresetIdealVisibility) {
    const Result r = run_cli({"scan", "--preset", "fig2c", "--fit-out", path("fit.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const FringeData d = fringe_data_from_csv(r.out);
    EXPECT_EQ(d.size(), 60u);
    const Json fit = read_json_file(path("fit.json"));
    EXPECT_EQ(fit.at("k"), 3);
    EXPECT_NEAR(fit.at("visibility").get<double>(), 1.0, 1e-9);
}

TEST_F(CliTest, ScanWithBackgroundLowersVisibility) {
    const Result r = run_cli({"scan", "--preset", "fig2c", "--background", "--fit-out", path("fit.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const double v = read_json_file(path("fit.json")).at("visibility").get<double>();
    EXPECT_LT(v, 0.9);
    EXPECT_GT(v, 0.2);
}

TEST_F(CliTest, ScanSameSeedIsByteIdentical) {
    const std::vector<std::string> args{"--seed", "11", "scan", "--preset", "fig2c", "--background"};
    const Result a = run_cli(args);
    const Result b = run_cli(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    std::vector<std::string> other = args;
    other[1] = "12";
    EXPECT_NE(run_cli(other).out, a.out);
    EXPECT_TRUE(fringe_data_from_csv(a.out).sampled.has_value());
}

TEST_F(CliTest, ScanOptionsAndConfig) {
    write_text_file(path("run.json"), R"({
        "source": "lo", "pattern": [0, 1], "scale": 100,
        "analyzer": {"basis_deg": 45, "detectors": [2, 1]},
        "scan": {"count": 24, "interval_s": 10}
    })");
    const Result r = run_cli({"--config", path("run.json"), "scan", "--out", path("x.csv")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(path("x.csv")));
    const Result s = run_cli({"--config", path("run.json"), "--out", path("lo.csv"), "scan"});
    ASSERT_EQ(s.code, 0) << s.err;
    const FringeData d = fringe_data_from_csv(read_text_file(path("lo.csv")));
    EXPECT_EQ(d.size(), 24u);
    const Result pts = run_cli({"--config", path("run.json"), "scan", "--points", "12", "--pattern", "1,0"});
    ASSERT_EQ(pts.code, 0) << pts.err;
    EXPECT_EQ(fringe_data_from_csv(pts.out).size(), 12u);
    EXPECT_EQ(run_cli({"scan", "--pattern", "2"}).code, cli::kConfigError);
    EXPECT_EQ(run_cli({"scan", "--source", "laser"}).code, cli::kConfigError);
}

TEST_F(CliTest, AliasingIsExitThree) {
    const Result r = run_cli({"scan", "--points", "5"});
    EXPECT_EQ(r.code, cli::kNumericError);
    EXPECT_NE(r.err.find("alias"), std::string::npos);
}

TEST_F(CliTest, FitRoundTrip) {
    ASSERT_EQ(run_cli({"--out", path("d.csv"), "scan", "--scale", "80"}).code, 0);
    const Result r = run_cli({"fit", "--in", path("d.csv"), "--k", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_NEAR(j.at("visibility").get<double>(), 1.0, 1e-9);
    EXPECT_NEAR(j.at("A").get<double>(), 80.0 * 0.5 * 3.0 / 8.0, 1e-9);
    EXPECT_EQ(run_cli({"fit", "--in", path("nope.csv")}).code, cli::kConfigError);
    write_text_file(path("bad.csv"), "x,y\n");
    EXPECT_EQ(run_cli({"fit", "--in", path("bad.csv")}).code, cli::kConfigError);
}

TEST_F(CliTest, BackgroundReportsHarmonics) {
    const Result r = run_cli({"background", "--csv", path("bg.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    const HarmonicDecomposition h = harmonics_from_json(j.at("harmonics"));
    EXPECT_NEAR(h.amplitude(0), 22.0, 1e-6);
    EXPECT_TRUE(j.at("ordering").contains("amp3_lt_amp1"));
    EXPECT_TRUE(j.at("channels").contains("three_lo"));
    EXPECT_EQ(fringe_data_from_csv(read_text_file(path("bg.csv"))).size(), 64u);

    write_text_file(path("rates.json"), to_json(source_rates_from_json(j.at("rates"))).dump());
    const Result again = run_cli({"background", "--rates", path("rates.json")});
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_NEAR(harmonics_from_json(Json::parse(again.out).at("harmonics")).amplitude(0), 22.0, 1e-6);

    const Result cal = run_cli({"background", "--calibrate", "44"});
    ASSERT_EQ(cal.code, 0) << cal.err;
    EXPECT_NEAR(harmonics_from_json(Json::parse(cal.out).at("harmonics")).amplitude(0), 44.0, 1e-6);
    EXPECT_EQ(run_cli({"background", "--points", "8"}).code, cli::kNumericError);
}

TEST_F(CliTest, ReproduceWritesBundle) {
    const Result r = run_cli({"--seed", "7", "--out", path("fig2d"), "reproduce", "fig2d"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("fig2d: k=3"), std::string::npos);
    const Json j = read_json_file(path("fig2d/fig2d.json"));
    EXPECT_EQ(j.at("preset"), "fig2d");
    EXPECT_EQ(j.at("seed"), 7);
    EXPECT_EQ(j.at("files"), Json::parse(R"(["fig2d.csv", "fig2d_background.csv", "fig2d.json"])"));
    EXPECT_EQ(j.at("fit").at("k"), 3);
    const FringeData d = fringe_data_from_csv(read_text_file(path("fig2d/fig2d.csv")));
    EXPECT_EQ(d.size(), 60u);
    EXPECT_TRUE(fs::exists(path("fig2d/fig2d_background.csv")));
}

TEST_F(CliTest, ReproduceFigureThreeUsesLongIntervals) {
    const Result r = run_cli({"--out", dir_.string(), "reproduce", "fig3b"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = read_json_file(path("fig3b.json"));
    EXPECT_EQ(j.at("interval_s"), 300.0);
    EXPECT_EQ(j.at("pattern"), Json::parse("[3, 0]"));
    EXPECT_TRUE(j.at("seed").is_null());
}

TEST_F(CliTest, ReproduceUnknownPreset) {
    const Result r = run_cli({"--out", dir_.string(), "reproduce", "figX"});
    EXPECT_EQ(r.code, cli::kConfigError);
    for (const auto &n : preset_names()) {
        EXPECT_NE(r.err.find(n), std::string::npos) << n;
    }
    EXPECT_EQ(run_cli({"reproduce"}).code, cli::kConfigError);
}

TEST_F(CliTest, UnwritableOutputIsConfigError) {
    write_text_file(path("file"), "x");
    EXPECT_EQ(run_cli({"--out", path("file/sub"), "reproduce", "fig2a"}).code, cli::kConfigError);
    EXPECT_EQ(run_cli({"--out", path("file/sub.json"), "build"}).code, cli::kConfigError);
}

} // namespace
} // namespace noonsim
