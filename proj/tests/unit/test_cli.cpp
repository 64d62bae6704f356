#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/config_file.hpp"

namespace fs = std::filesystem;
using ratiomarket::cli::run;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        root_ = fs::temp_directory_path() / (std::string("ratiomarket_cli_") + info->name());
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    void TearDown() override { fs::remove_all(root_); }

    int call(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run(args, out_, err_);
    }

    std::string dir(const std::string& name) const { return (root_ / name).string(); }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path root_;
    std::ostringstream out_;
    std::ostringstream err_;
};

const std::vector<std::string> kSmallSim{"simulate", "--n_agents", "60", "--m", "6",     "--periods_per_year",
                                         "20",       "--years",    "2",  "--burn_in_years", "1", "--trajectories",
                                         "12",       "--acf_max_lag", "5"};

std::vector<std::string> with(std::vector<std::string> base, std::initializer_list<std::string> extra) {
    base.insert(base.end(), extra);
    return base;
}

}  // namespace

TEST(ConfigFile, ParsesKeyValues) {
    const auto kv = ratiomarket::cli::parse_key_values("# c\n alpha = 4 # seller\n\nbeta=0.3\n", "t");
    ASSERT_EQ(kv.size(), 2u);
    EXPECT_EQ(kv[0].first, "alpha");
    EXPECT_EQ(kv[0].second, "4");
    EXPECT_EQ(kv[1].second, "0.3");
    EXPECT_THROW((void)ratiomarket::cli::parse_key_values("alpha\n", "t"), ratiomarket::cli::ConfigError);
    EXPECT_THROW((void)ratiomarket::cli::parse_key_values("alpha =\n", "t"), ratiomarket::cli::ConfigError);
}

TEST_F(CliTest, MissingRequiredFieldIsConfigError) {
    const int code = call({"two-agent", "--k1", "0.51", "--s1", "5", "--b1", "10", "--k2", "0.79", "--s2", "8", "--b2",
                           "10", "--r", "1.001", "--alpha", "4", "--n_periods", "10", "--out", dir("x")});
    EXPECT_EQ(code, 2);
    EXPECT_NE(err_.str().find("beta"), std::string::npos) << err_.str();
}

TEST_F(CliTest, InvalidValueIsConfigError) {
    EXPECT_EQ(call(with(kSmallSim, {"--scheme", "poisson", "--out", dir("x")})), 2);
    EXPECT_EQ(call(with(kSmallSim, {"--m", "0", "--out", dir("x")})), 2);
    EXPECT_NE(err_.str().find("m"), std::string::npos);
    EXPECT_EQ(call({"simulate", "--config", dir("missing.cfg")}), 2);
}

TEST_F(CliTest, TwoAgentFromConfigFile) {
    std::ofstream(root_ / "fig2.cfg") << "k1 = 0.51\ns1 = 5\nb1 = 10\nk2 = 0.79\ns2 = 8\nb2 = 10\n"
                                         "r = 1.001\nalpha = 4\nbeta = 0.3\nn_periods = 1000\n";
    ASSERT_EQ(call({"two-agent", "--config", (root_ / "fig2.cfg").string(), "--out", dir("fig2")}), 0) << err_.str();
    const std::string csv = slurp(root_ / "fig2" / "two_agent.csv");
    EXPECT_EQ(csv.rfind("period,price,gross_return,rate_stock\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1001);
    EXPECT_TRUE(fs::exists(root_ / "fig2" / "manifest.json"));
}

TEST_F(CliTest, CommandLineOverridesConfig) {
    std::ofstream(root_ / "a.cfg") << "n_periods = 1000\nk1 = 0.51\ns1 = 5\nb1 = 10\nk2 = 0.79\ns2 = 8\nb2 = 10\n"
                                      "r = 1.001\nalpha = 4\nbeta = 0.3\n";
    ASSERT_EQ(call({"two-agent", "--config", (root_ / "a.cfg").string(), "--n_periods", "7", "--out", dir("o")}), 0);
    const std::string csv = slurp(root_ / "o" / "two_agent.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
}

TEST_F(CliTest, SteadyStateHasConstantReturn) {
    ASSERT_EQ(call(with(kSmallSim, {"--epsilon", "0", "--dump-returns", "--out", dir("ss")})), 0) << err_.str();
    std::ifstream in(root_ / "ss" / "returns.csv");
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(line.substr(line.rfind(',') + 1), "1.001");
        ++rows;
    }
    EXPECT_EQ(rows, 12 * 40);
    const std::string summary = slurp(root_ / "ss" / "summary.csv");
    EXPECT_NE(summary.find("fixed,6,1.001,1.001,0,"), std::string::npos) << summary;
}

TEST_F(CliTest, SameSeedIsByteIdenticalAcrossWorkers) {
    ASSERT_EQ(call(with(kSmallSim, {"--seed", "99", "--dump-returns", "--out", dir("w1")})), 0);
    ASSERT_EQ(call(with(kSmallSim, {"--seed", "99", "--dump-returns", "--workers", "3", "--out", dir("w3")})), 0);
    ASSERT_EQ(call(with(kSmallSim, {"--seed", "100", "--dump-returns", "--out", dir("other")})), 0);
    for (const char* f : {"moments.csv", "acf.csv", "hist.csv", "summary.csv", "returns.csv"}) {
        EXPECT_EQ(slurp(root_ / "w1" / f), slurp(root_ / "w3" / f)) << f;
    }
    EXPECT_NE(slurp(root_ / "w1" / "returns.csv"), slurp(root_ / "other" / "returns.csv"));
}

TEST_F(CliTest, ManifestReplaysRun) {
    ASSERT_EQ(call(with(kSmallSim, {"--scheme", "uniform", "--m_low", "2", "--m_high", "9", "--out", dir("first")})),
              0);
    const auto manifest = root_ / "first" / "manifest.json";
    ASSERT_TRUE(fs::exists(manifest));
    EXPECT_FALSE(fs::exists(root_ / "first" / "manifest.json.tmp"));
    ASSERT_EQ(call({"simulate", "--config", manifest.string(), "--out", dir("second")}), 0) << err_.str();
    for (const char* f : {"moments.csv", "acf.csv", "hist.csv", "summary.csv"}) {
        EXPECT_EQ(slurp(root_ / "first" / f), slurp(root_ / "second" / f)) << f;
    }
}

TEST_F(CliTest, ScanNeutralRowAndRefinement) {
    ASSERT_EQ(call({"scan-a", "--alpha", "1,4", "--beta", "1,0.3", "--k_points", "3", "--s_points", "3", "--out",
                    dir("coarse")}),
              0)
        << err_.str();
    ASSERT_EQ(call({"scan-a", "--alpha", "1,4", "--beta", "1,0.3", "--k_points", "3", "--s_points", "3", "--refine",
                    "--out", dir("fine")}),
              0);
    auto rows = [&](const std::string& d) {
        std::ifstream in(root_ / d / "scan_summary.csv");
        std::string line;
        std::getline(in, line);
        std::vector<std::vector<double>> out;
        while (std::getline(in, line)) {
            std::vector<double> v;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
            out.push_back(v);
        }
        return out;
    };
    const auto coarse = rows("coarse");
    const auto fine = rows("fine");
    ASSERT_EQ(coarse.size(), 2u);
    EXPECT_NEAR(coarse[0][5], 1.0, 1e-14);
    EXPECT_NEAR(coarse[0][6], 1.0, 1e-14);
    EXPECT_EQ(fine[1][3], 5.0);
    EXPECT_LE(fine[1][5], coarse[1][5]);
    EXPECT_GE(fine[1][6], coarse[1][6]);
}

TEST_F(CliTest, ScanRejectsUnpairedLists) {
    EXPECT_EQ(call({"scan-a", "--alpha", "1,4", "--beta", "1", "--out", dir("x")}), 2);
}

TEST_F(CliTest, UnwritableOutputIsRuntimeError) {
    std::ofstream(root_ / "file") << "x";
    EXPECT_EQ(call(with(kSmallSim, {"--out", (root_ / "file" / "sub").string()})), 1);
}
