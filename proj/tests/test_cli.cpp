#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cascade_kde/cli.hpp"
#include "cascade_kde/csv.hpp"

using namespace cascade_kde;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "cascade-kde");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("cascade_kde_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateCorruptRestoreMetrics) {
    ASSERT_EQ(run({"generate", "--signal", "multi_peak", "--length", "120", "-o", path("clean.csv")}).code, kExitOk);
    ASSERT_EQ(run({"corrupt", "-i", path("clean.csv"), "-o", path("noisy.csv"), "--kind", "mixed", "--seed", "4",
                   "--mask"})
                  .code,
              kExitOk);
    EXPECT_TRUE(read_series_csv(fs::path(path("noisy.csv"))).mask.has_value());
    const auto restored = run({"restore", "--input", path("noisy.csv"), "--output", path("out.csv"), "--trace", "-"});
    ASSERT_EQ(restored.code, kExitOk) << restored.err;
    EXPECT_EQ(line_count(path("out.csv")), line_count(path("noisy.csv")));
    EXPECT_NE(restored.out.find("k,h_t,h_y,sharpness,smoothness,score,selected"), std::string::npos);

    const auto same = run({"metrics", "--truth", path("clean.csv"), "--estimate", path("clean.csv")});
    ASSERT_EQ(same.code, kExitOk);
    EXPECT_EQ(same.out.rfind("rmse=0\n", 0), 0u) << same.out;

    const auto base = run({"restore", "-i", path("noisy.csv"), "-o", "-", "--method", "savitzky_golay", "--window", "9"});
    ASSERT_EQ(base.code, kExitOk) << base.err;
    EXPECT_EQ(base.out.rfind("t,y\n", 0), 0u);
}

TEST_F(Cli, RestoreConfigFileAndOverrides) {
    ASSERT_EQ(run({"generate", "--length", "64", "-o", path("clean.csv")}).code, kExitOk);
    std::ofstream(path("cfg.ini")) << "k_max = 3\nfixed_k = 2\n";
    const auto r = run({"restore", "-i", path("clean.csv"), "-o", path("out.csv"), "--config", path("cfg.ini"),
                        "--fixed-k", "3", "--trace", path("trace.txt")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    std::ifstream trace(path("trace.txt"));
    std::string first;
    std::getline(trace, first);
    EXPECT_EQ(first, "# selected=3 stop=fixed_depth");
}

TEST_F(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    const auto bad_flag = run({"generate", "--bogus", "-o", "-"});
    EXPECT_EQ(bad_flag.code, kExitUsage);
    EXPECT_FALSE(bad_flag.err.empty());
    EXPECT_EQ(run({"restore", "-i", "x.csv"}).code, kExitUsage);
    EXPECT_EQ(run({"generate", "--signal", "sine", "--length", "8", "-o", "-"}).code, kExitData);
    ASSERT_EQ(run({"generate", "--length", "64", "-o", path("clean.csv")}).code, kExitOk);
    EXPECT_EQ(run({"restore", "-i", path("clean.csv"), "-o", "-", "--method", "kalman"}).code, kExitUsage);
    EXPECT_EQ(run({"restore", "-i", path("clean.csv"), "-o", "-", "--k-max", "0"}).code, kExitUsage);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST_F(Cli, DataErrorsExitTwo) {
    EXPECT_EQ(run({"restore", "-i", path("missing.csv"), "-o", "-"}).code, kExitData);
    std::ofstream(path("bad.csv")) << "t,y\n0,1\n1,oops\n2,3\n";
    const auto r = run({"restore", "-i", path("bad.csv"), "-o", "-"});
    EXPECT_EQ(r.code, kExitData);
    EXPECT_NE(r.err.find("oops"), std::string::npos);
    std::ofstream(path("big.csv")) << "t,y\n0,0\n1,5\n2,1\n3,0\n";
    EXPECT_EQ(run({"corrupt", "-i", path("big.csv"), "-o", "-", "--kind", "impulse", "--ratio", "0.5"}).code,
              kExitData);
    EXPECT_EQ(run({"corrupt", "-i", path("big.csv"), "-o", "-", "--kind", "impulse", "--ratio", "0.5",
                   "--normalize"})
                  .code,
              kExitOk);
}

TEST_F(Cli, BenchRowCountMatchesCardinality) {
    std::ofstream(path("plan.cfg")) << "seeds = 1,2,3\n[dataset s]\nsignal = sine\nlength = 48\n"
                                       "[corruption g]\nkind = gaussian\n[method ma]\nmethod = moving_average\n"
                                       "[method gf]\nmethod = gaussian_filter\n";
    const auto r = run({"bench", "--plan", path("plan.cfg"), "--out", path("results.csv"), "--table"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(line_count(path("results.csv")), 1u + 6u);
    EXPECT_EQ(line_count(path("results.aggregate.csv")), 1u + 2u);
    EXPECT_NE(r.out.find("Peak F1"), std::string::npos);
}

TEST_F(Cli, ScalingPrintsTable) {
    const auto r = run({"scaling", "--lengths", "64,128", "--reps", "1"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out.rfind("N,wall_time_ms\n64,", 0), 0u);
    EXPECT_EQ(run({"scaling", "--lengths", "64,abc"}).code, kExitUsage);
}
