#include <fracheat/cli.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

using namespace fracheat;
using namespace fracheat::cli;

struct Outcome {
    int code;
    std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "fracheat");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
    std::vector<std::vector<std::string>> r;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        r.push_back(cells);
    }
    return r;
}

std::string temp_file(const std::string& name, const std::string& body) {
    const auto p = std::filesystem::temp_directory_path() / ("fracheat_test_" + name);
    std::ofstream(p) << body;
    return p.string();
}

TEST(ParseConfig, SolveExample) {
    const auto c = parse_config({"solve", "--n", "2", "--alpha", "0.5", "--t", "1", "--grid", "-4:4:81"});
    EXPECT_EQ(c.command, Command::solve);
    EXPECT_EQ(c.n, 2);
    EXPECT_EQ(c.alpha, 0.5);
    ASSERT_TRUE(c.grid);
    EXPECT_EQ(c.grid->points, 81);
    const auto x = c.grid->nodes();
    EXPECT_EQ(x.front(), -4.0);
    EXPECT_EQ(x.back(), 4.0);
    EXPECT_NEAR(x[40], 0.0, 1e-15);
}

TEST(ParseConfig, GridSyntax) {
    EXPECT_THROW(parse_grid("0:1"), UsageError);
    EXPECT_THROW(parse_grid("0:1:1"), UsageError);
    EXPECT_THROW(parse_grid("1:0:5"), UsageError);
    EXPECT_THROW(parse_grid("0:1:2.5"), UsageError);
    EXPECT_THROW(parse_grid("a:1:5"), UsageError);
}

TEST(ParseConfig, FlagsOverrideConfigFile) {
    const auto path = temp_file("override.cfg", "# comment\ncommand = solve\nn = 4\nalpha = 0.3\ngrid = -1:1:3\n");
    const auto c = parse_config({"--config", path, "--alpha", "0.7"});
    EXPECT_EQ(c.command, Command::solve);
    EXPECT_EQ(c.n, 4);
    EXPECT_EQ(c.alpha, 0.7);
    const auto d = parse_config({"solve", "--config", path});
    EXPECT_EQ(d.alpha, 0.3);
}

TEST(ParseConfig, UnknownConfigKeyIsNamed) {
    const auto path = temp_file("unknown.cfg", "command = solve\nbogus = 1\n");
    const auto o = invoke({"--config", path, "--grid", "0:1:2"});
    EXPECT_EQ(o.code, 2);
    EXPECT_NE(o.err.find("bogus"), std::string::npos);
}

TEST(ParseConfig, UsageErrors) {
    EXPECT_EQ(invoke({"solve", "--alpha", "1.5", "--grid", "-1:1:3"}).code, 2);
    EXPECT_EQ(invoke({"solve", "--alpha", "0.5"}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"kernel", "--n", "3", "--odd-sign", "0", "--grid", "0:1:2"}).code, 2);
    EXPECT_EQ(invoke({"moments", "--n", "2"}).code, 2);
    EXPECT_EQ(invoke({"validate", "--tolerance", "foo"}).code, 2);
    EXPECT_EQ(invoke({"sample", "--law", "stable"}).code, 2);
    EXPECT_EQ(invoke({"sample", "--law", "composed", "--alpha", "0.4"}).code, 2);
}

TEST(Run, MomentsExample) {
    const auto o = invoke({"moments", "--n", "4", "--alpha", "0.5", "--r", "4", "--t", "1"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto r = rows(o.out);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0][0], "# fracheat v1");
    EXPECT_EQ(r[1], (std::vector<std::string>{"order", "value"}));
    EXPECT_NEAR(std::stod(r[2][1]), -27.0811, 1e-4);
}

TEST(Run, TimeMomentThroughDelta) {
    const auto o = invoke({"moments", "--alpha", "0.5", "--delta", "2", "--t", "1"});
    ASSERT_EQ(o.code, 0);
    EXPECT_NEAR(std::stod(rows(o.out)[2][1]), 2.0, 1e-8);
}

TEST(Run, TimeDensityExample) {
    const auto o = invoke({"time-density", "--alpha", "0.5", "--t", "1", "--grid", "0:4:5"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto r = rows(o.out);
    ASSERT_EQ(r.size(), 7u);
    EXPECT_EQ(r[1], (std::vector<std::string>{"u", "value", "route"}));
    EXPECT_EQ(std::stod(r[3][0]), 1.0);
    EXPECT_NEAR(std::stod(r[3][1]), 0.4393913, 1e-7);
}

TEST(Run, KernelOddOrderChangesSign) {
    // The cubic kernel is an Airy function whose first zero sits at |x| ≈ 3.37.
    for (const char* sign : {"+1", "-1"}) {
        const auto o = invoke({"kernel", "--n", "3", "--odd-sign", sign, "--t", "1", "--grid", "-6:6:61"});
        ASSERT_EQ(o.code, 0) << o.err;
        const auto r = rows(o.out);
        EXPECT_EQ(r[1], (std::vector<std::string>{"x", "value", "error_estimate"}));
        int negative = 0;
        for (std::size_t i = 2; i < r.size(); ++i) negative += std::stod(r[i][1]) < 0;
        EXPECT_GT(negative, 0) << sign;
    }
}

TEST(Run, SolveWritesGrid) {
    const auto o = invoke({"solve", "--n", "2", "--alpha", "0.5", "--t", "1", "--grid", "-4:4:9"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto r = rows(o.out);
    ASSERT_EQ(r.size(), 11u);
    EXPECT_NEAR(std::stod(r[6][1]), 0.408024470, 1e-8);
}

TEST(Run, OutputFileMatchesStdout) {
    const auto path = (std::filesystem::temp_directory_path() / "fracheat_test_out.csv").string();
    const auto a = invoke({"kernel", "--n", "4", "--grid", "-2:2:5"});
    const auto b = invoke({"kernel", "--n", "4", "--grid", "-2:2:5", "--output", path});
    ASSERT_EQ(b.code, 0);
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    EXPECT_EQ(s.str(), a.out);
    EXPECT_TRUE(b.out.empty());
}

TEST(Run, SamplesAreDeterministic) {
    const std::vector<std::string> args{"sample", "--law", "product", "--m", "3", "--count", "500", "--seed", "99"};
    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "3"});
    const auto a = invoke(args), b = invoke(threaded);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const auto r = rows(a.out);
    ASSERT_EQ(r.size(), 502u);
    EXPECT_EQ(r[1], (std::vector<std::string>{"index", "value"}));
    for (std::size_t i = 2; i < r.size(); ++i) EXPECT_GT(std::stod(r[i][1]), 0.0);
}

TEST(Run, NumbersUseNineSignificantDigits) {
    const auto o = invoke({"moments", "--alpha", "0.5", "--delta", "1", "--t", "1"});
    EXPECT_EQ(rows(o.out)[2][1], "1.12837917");
}

TEST(Run, ThreadsEnvironmentMustBePositive) {
    ::setenv("FRACHEAT_THREADS", "0", 1);
    EXPECT_EQ(invoke({"moments", "--alpha", "0.5", "--delta", "1"}).code, 2);
    ::setenv("FRACHEAT_THREADS", "2", 1);
    EXPECT_EQ(invoke({"moments", "--alpha", "0.5", "--delta", "1"}).code, 0);
    ::unsetenv("FRACHEAT_THREADS");
}

TEST(Run, NumericalFailureExitsThree) {
    // Far beyond the series guard of the Wright route.
    EXPECT_EQ(invoke({"time-density", "--alpha", "0.9", "--route", "wright", "--grid", "0:100:3"}).code, 3);
}

} // namespace
