#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hardy/atoms.hpp"
#include "hardy/config.hpp"

namespace fs = std::filesystem;
using namespace hardy;

namespace {

struct Outcome {
    int code;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    fs::path dir;
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / ("hardy_cli_" + std::string(info->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    Outcome run(const std::string& args, const std::string& out = "") {
        const fs::path o = out.empty() ? dir : dir / out;
        const std::string cmd = std::string(HARDY_CLI_PATH) + " --out " + o.string() + " " + args + " > " +
                                (dir / "stdout").string() + " 2> " + (dir / "stderr").string();
        const int st = std::system(cmd.c_str());
        return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, read("stderr")};
    }
    std::string read(const std::string& name) const {
        std::ifstream f(dir / name, std::ios::binary);
        std::ostringstream s;
        s << f.rdbuf();
        return s.str();
    }
    void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }
};

size_t count(const std::string& s, const std::string& what) {
    size_t n = 0;
    for (size_t p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
    return n;
}

}  // namespace

TEST_F(Cli, CoveringWritesCsvAndSvg) {
    const auto r = run("covering --family bessel-box --window -1..1");
    EXPECT_EQ(r.code, 0) << r.err;
    const auto csv = read("covering.csv");
    EXPECT_NE(csv.find("# command = covering"), std::string::npos);
    EXPECT_NE(csv.find("index,center0,center1,half0,half1,diameter"), std::string::npos);
    const size_t n = build_covering(covering_shorthand("bessel-box", "-1..1")).size();
    EXPECT_EQ(count(read("covering.svg"), "<rect"), n);
    EXPECT_NE(read("covering_report.txt").find("C1"), std::string::npos);
}

TEST_F(Cli, CorruptedCoveringFails) {
    const auto r = run("covering --spec 'list(real,0:1,1.5:3)'");
    EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
    EXPECT_EQ(run("covering --family nonsense --window 0..1").code, 2);
    write("bad.ini", "[kernel]\nspec = bessel(-1)\n[covering]\nspec = bessel(-1,1)\n");
    const auto r = run("--config " + (dir / "bad.ini").string() + " verify");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("config error"), std::string::npos);
}

TEST_F(Cli, VerifySmallCampaign) {
    write("c.ini", "[verify]\ny_random = 2\n");
    const auto r = run("--config " + (dir / "c.ini").string() +
                       " verify --kernel 'bessel(1)' --covering 'bessel(-1,1)' --conditions A1prime,a3,limits");
    EXPECT_EQ(r.code, 0) << r.err;
    const auto v = read("verify.csv");
    EXPECT_NE(v.find("# verify.y_random = 2"), std::string::npos);
    EXPECT_NE(v.find("condition,cuboid_index,constant,error,params_hash"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "A1prime.txt"));
}

TEST_F(Cli, SchrodingerZeroPotentialFailsDecay) {
    write("c.ini", "[verify]\ny_random = 1\n");
    const auto r = run("--config " + (dir / "c.ini").string() +
                       " verify --kernel 'schrodinger(zero)' --covering 'uniform(1,-1:1)' --conditions Dprime");
    EXPECT_EQ(r.code, 1) << r.err;
}

TEST_F(Cli, DecomposeAtomAndWindowError) {
    const auto X = DomainSpec::half_line();
    {
        std::ofstream f(dir / "atom.txt");
        write_atom(f, make_local_atom(Cuboid::interval(1.0, 2.0), X), 1.0);
    }
    auto r = run("decompose --kernel 'bessel(1)' --covering 'bessel(-3,3)' --input " + (dir / "atom.txt").string());
    EXPECT_EQ(r.code, 0) << r.err;
    const auto csv = read("decompose.csv");
    EXPECT_NE(csv.find("sum_abs_lambda"), std::string::npos);
    EXPECT_NE(read("decomposition.txt").find("sum_abs_lambda=1\n"), std::string::npos);

    r = run("decompose --kernel 'bessel(1)' --covering 'bessel(-3,3)' --function 'bump(15,2)'");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("window error"), std::string::npos);
}

TEST_F(Cli, SubordinateCheckPasses) { EXPECT_EQ(run("subordinate-check").code, 0); }

TEST_F(Cli, FixedSeedIsByteIdentical) {
    write("c.ini", "[maximal]\natoms = 3\ncells = 16\n");
    const std::string args = "--config " + (dir / "c.ini").string() +
                             " --seed 5 maximal --kernel 'bessel(1)' --covering 'bessel(0,1)'";
    ASSERT_EQ(run(args, "a").code, 0);
    ASSERT_EQ(run(args, "b").code, 0);
    const auto a = read("a/maximal.csv"), b = read("b/maximal.csv");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b);
    ASSERT_EQ(run("--config " + (dir / "c.ini").string() + " --seed 6 maximal --kernel 'bessel(1)' --covering 'bessel(0,1)'",
                  "c").code,
              0);
    EXPECT_NE(read("c/maximal.csv"), a);
}

TEST(Config, ParseAndEcho) {
    auto c = Config::parse("[verify]\nppd = 24\nconditions = A1prime, a3\n");
    EXPECT_EQ(c.get("verify.ppd", 16), 24);
    EXPECT_EQ(c.get("verify.W", 50.0), 50.0);
    const auto l = c.list("verify.conditions", "");
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[1], "a3");
    std::ostringstream o;
    c.echo(o, "# ");
    EXPECT_NE(o.str().find("# verify.ppd = 24"), std::string::npos);
    EXPECT_NE(o.str().find("# verify.W = 50"), std::string::npos);
    EXPECT_THROW(c.require("kernel.spec"), config_error);
    EXPECT_THROW(c.get("verify.conditions", 1.0), config_error);
}
