#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

using json = nlohmann::json;

namespace {

const std::string kCli = ROBBA_CLI;
const std::string kData = ROBBA_TEST_DATA;

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run(const std::string& args) {
    std::string cmd = kCli + " " + args + " 2>/dev/null";
    CliRun r;
    FILE* f = popen(cmd.c_str(), "r");
    if (!f) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) r.out.append(buf.data(), n);
    int st = pclose(f);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

CliRun run_err(const std::string& args) {
    std::string cmd = kCli + " " + args + " 2>&1 >/dev/null";
    CliRun r;
    FILE* f = popen(cmd.c_str(), "r");
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) r.out.append(buf.data(), n);
    int st = pclose(f);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string data(const std::string& name) { return kData + "/" + name; }

json last_line(const std::string& out) {
    auto end = out.find_last_not_of('\n');
    auto start = out.rfind('\n', end);
    return json::parse(out.substr(start == std::string::npos ? 0 : start + 1, end + 1 - (start == std::string::npos ? 0 : start + 1)));
}

}  // namespace

TEST(Cli, AbelianProductMatchesCommutativeOracle) {
    for (int p : {3, 5}) {
        std::string g = " --group abelian:2 --p " + std::to_string(p);
        CliRun a = run("mul " + data("x2.json") + " " + data("y2.json") + g);
        CliRun b = run("oracle-mul " + data("x2.json") + " " + data("y2.json") + g);
        ASSERT_EQ(a.code, 0);
        ASSERT_EQ(b.code, 0);
        EXPECT_EQ(a.out, b.out);
    }
}

TEST(Cli, OutputIsDeterministic) {
    std::string args = "mul " + data("x3.json") + " " + data("y3.json") + " --group heisenberg --p 3";
    CliRun a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    json j = last_line(a.out);
    EXPECT_TRUE(j.contains("product"));
    EXPECT_EQ(j["product"]["d"], 3);
}

TEST(Cli, ProductIsNotCommutativeForHeisenberg) {
    CliRun a = run("mul " + data("x3.json") + " " + data("y3.json"));
    CliRun b = run("mul " + data("y3.json") + " " + data("x3.json"));
    ASSERT_EQ(a.code, 0);
    EXPECT_NE(last_line(a.out)["product"], last_line(b.out)["product"]);
}

TEST(Cli, NormReportsProvenance) {
    CliRun r = run("norm " + data("x3.json") + " --rho 1/2 --rho 1/3");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\"provenance\":\"computed\""), std::string::npos);
    EXPECT_NE(r.out.find("certified-upper-bound"), std::string::npos);
}

TEST(Cli, UsageErrorsNameTheFlag) {
    CliRun r = run_err("mul " + data("x3.json") + " " + data("y3.json") + " --p 4");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("--p"), std::string::npos);
    r = run_err("mul " + data("x3.json") + " " + data("y3.json") + " --window 3");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("--window"), std::string::npos);
    r = run_err("mul " + data("x3.json") + " " + data("missing.json"));
    EXPECT_EQ(r.code, 1);
    r = run_err("mul " + data("x3.json") + " " + data("y3.json") + " --group sl2");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("--group"), std::string::npos);
    r = run_err("mul " + data("repeated.json") + " " + data("repeated.json") + " --group abelian:2");
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(run("").code, 1);
}

TEST(Cli, LawFileGroup) {
    CliRun a = run("mul " + data("x3.json") + " " + data("y3.json") + " --group file:" + data("heisenberg_law.json"));
    CliRun b = run("mul " + data("x3.json") + " " + data("y3.json"));
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(last_line(a.out)["product"], last_line(b.out)["product"]);
    EXPECT_EQ(run("mul " + data("x3.json") + " " + data("y3.json") + " --group file:" + data("nonuniform_law.json")).code, 1);
}

TEST(Cli, SelfTests) {
    EXPECT_EQ(run("selftest --group heisenberg --p 3").code, 0);
    EXPECT_EQ(run("selftest --group heisenberg --p 5 --prec 6").code, 0);
    EXPECT_EQ(run("selftest --group abelian:3 --p 3").code, 0);
}

TEST(Cli, DualBasis) {
    CliRun r = run("dualbasis --alpha 1,1,0 --defect-target 3");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("converged"), std::string::npos);
}

TEST(Cli, OreExample) {
    CliRun r = run("ore --s b1 --a b2 --eps 1");
    ASSERT_EQ(r.code, 0) << r.out;
    json j = last_line(r.out);
    EXPECT_EQ(j["ell"], 2);
    EXPECT_EQ(j["status"], "certified");
    r = run("ore --s b1 --a b2 --eps 2");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(last_line(r.out)["ell"], 3);
}

TEST(Cli, GradedSignRule) {
    CliRun z = run("gradedmul --u 1,-1,1 --v -1,0,0");
    ASSERT_EQ(z.code, 0);
    EXPECT_NE(z.out.find("\"0\""), std::string::npos) << z.out;
    CliRun n = run("gradedmul --u 2:1:1,0,0 --v 2:0:0,1,0");
    ASSERT_EQ(n.code, 0);
    EXPECT_NE(n.out.find("1*X0^1*X^(b1*b2)"), std::string::npos) << n.out;
}

TEST(Cli, OtherCommands) {
    EXPECT_EQ(run("pair " + data("x3.json") + " " + data("y3.json")).code, 0);
    EXPECT_EQ(run("lattice " + data("x3.json") + " " + data("y3.json")).code, 0);
    EXPECT_EQ(run("unitdecomp --x 6 --degree 4").code, 0);
    EXPECT_EQ(run("commutator --i 2 --j 1").code, 0);
    EXPECT_EQ(run("qacheck --samples 20").code, 0);
    EXPECT_EQ(run("dupper " + data("fraction3.json") + " " + data("fraction3.json") + " --budget 4 --samples 10").code, 0);
    EXPECT_EQ(run("mul " + data("x2.json") + " " + data("y2.json") + " --group abelian:2 --trace-potential").code, 0);
}
