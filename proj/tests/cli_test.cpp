#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using scalazone::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path write_temp(const std::string& name, const std::string& body) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << body;
    return p;
}

std::string usl_csv(double a, double b) {
    std::ostringstream s;
    s << std::setprecision(17) << "n,x\n";
    for (int n = 1; n <= 64; n *= 2) s << n << ',' << 10.0 * n / (1.0 + a * (n - 1) + b * n * (n - 1)) << '\n';
    return s.str();
}

}  // namespace

TEST(Cli, PopulationLists) {
    using scalazone::cli::parse_population_list;
    EXPECT_EQ(parse_population_list("5,1,2"), (std::vector<int>{1, 2, 5}));
    EXPECT_EQ(parse_population_list("1..4"), (std::vector<int>{1, 2, 3, 4}));
    EXPECT_EQ(parse_population_list("1..30:10"), (std::vector<int>{1, 11, 21}));
    EXPECT_THROW(parse_population_list("0,1"), std::invalid_argument);
    EXPECT_THROW(parse_population_list("a"), std::invalid_argument);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"bogus"}).code, 2);
    EXPECT_EQ(invoke({"simulate", "--mode", "nope"}).code, 2);
    EXPECT_EQ(invoke({"fit", "/nonexistent/file.csv"}).code, 2);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(invoke({"--help"}).code, 0); }

TEST(Cli, FitTwoPointsIsValidationError) {
    const auto p = write_temp("scalazone_two.csv", "n,x\n1,1\n2,1.9\n");
    const auto r = invoke({"fit", p.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, FitLinearDatasetIsClassA) {
    const auto p = write_temp("scalazone_linear.csv", "n,x\n1,2\n2,4\n4,8\n8,16\n");
    const auto r = invoke({"fit", p.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("no finite peak"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("A (Ideal concurrency)"), std::string::npos) << r.out;
}

TEST(Cli, FitSyntheticUslIsClassD) {
    const auto p = write_temp("scalazone_usl.csv", usl_csv(0.18169, 0.00047));
    const auto r = invoke({"fit", p.string(), "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string header, values;
    std::getline(in, header);
    std::getline(in, values);
    EXPECT_EQ(header, "model,alpha,beta,scale,r_squared,peak,app_class");
    EXPECT_EQ(values.back(), 'D');
}

TEST(Cli, ZonesReportsTransitionsAndWritesPlot) {
    const auto p = write_temp("scalazone_zones.csv", usl_csv(0.18169, 0.00047));
    const auto out = fs::temp_directory_path() / "scalazone_zones_plot.csv";
    const auto r = invoke({"zones", p.string(), "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("transitions: 0"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("D (Worst case)"), std::string::npos) << r.out;
    std::ifstream plot(out);
    std::string header;
    std::getline(plot, header);
    EXPECT_EQ(header, "n,c_data,c_linear,c_amdahl,c_usl,zone");
}

TEST(Cli, ZonesTransitionAcrossBoundaries) {
    std::ostringstream csv;
    csv << "n,x\n";
    for (int n = 1; n <= 64; n *= 2) {
        const double usl = n / (1.0 + 0.05 * (n - 1) + 0.0005 * n * (n - 1));
        csv << n << ',' << (n == 2 || n == 4 ? 1.1 * usl : usl) << '\n';
    }
    const auto p = write_temp("scalazone_zones_mixed.csv", csv.str());
    const auto r = invoke({"zones", p.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.find("transitions: 0"), std::string::npos) << r.out;
}

TEST(Cli, BatchWithFewerCpusIsValidationError) {
    EXPECT_EQ(invoke({"simulate", "--mode", "batch", "--n", "10", "--cpus", "5"}).code, 2);
}

TEST(Cli, SimulateCsvAndSeedSources) {
    const std::vector<std::string> base{"simulate", "--n", "5", "--horizon", "50", "--format", "csv"};
    auto with = [&](std::vector<std::string> extra) {
        auto args = base;
        args.insert(args.end(), extra.begin(), extra.end());
        return invoke(args);
    };
    const auto seed1 = with({"--seed", "1"});
    const auto seed2 = with({"--seed", "2"});
    ASSERT_EQ(seed1.code, 0) << seed1.err;
    EXPECT_NE(seed1.out, seed2.out);
    EXPECT_EQ(invoke(base).out, seed1.out);

    ::setenv("SCALAZONE_SEED", "2", 1);
    const auto env = invoke(base);
    const auto flag_wins = with({"--seed", "1"});
    ::unsetenv("SCALAZONE_SEED");
    EXPECT_EQ(env.out, seed2.out);
    EXPECT_EQ(flag_wins.out, seed1.out);
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const auto cfg = write_temp("scalazone_sim.conf", "horizon = 50\nseed = 2\nn = 5\n");
    const auto from_file = invoke({"simulate", "--config", cfg.string(), "--format", "csv"});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    const auto explicit_args =
        invoke({"simulate", "--n", "5", "--horizon", "50", "--seed", "2", "--format", "csv"});
    EXPECT_EQ(from_file.out, explicit_args.out);
    const auto overridden = invoke({"simulate", "--config", cfg.string(), "--seed", "1", "--format", "csv"});
    const auto seed1 = invoke({"simulate", "--n", "5", "--horizon", "50", "--seed", "1", "--format", "csv"});
    EXPECT_EQ(overridden.out, seed1.out);
}

TEST(Cli, CurveCsv) {
    const auto r = invoke({"curve", "--alpha", "0.1", "--nmax", "3", "--gustafson", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "n,c_data,c_linear,c_amdahl,c_usl,zone,c_gustafson");
}

TEST(Cli, SweepWithLinearFit) {
    const auto r = invoke({"sweep", "--n", "1,10,20", "--mode", "batch", "--parallel", "fixed:0.9", "--serial",
                           "fixed:0.1", "--metric", "work", "--horizon", "100", "--fit", "linear"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("slope"), std::string::npos);
}
