#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <sys/wait.h>

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(TELEROUTE_CLI) + " " + args + " 2>/dev/null";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const char* name) { return std::string(TELEROUTE_DATA_DIR) + "/" + name; }
std::string scratch(const char* name) { return std::string(TELEROUTE_SCRATCH_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, VerifyAll) {
    Result r = run("verify --protocol all");
    EXPECT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j.size(), 3u);
    for (const auto& rep : j) EXPECT_EQ(rep["pass"], true);
    EXPECT_EQ(run("verify --protocol tele-target").code, 0);
    EXPECT_EQ(run("verify --protocol teleport").code, 2);
}

TEST(Cli, GenTwoLines) {
    Result r = run("gen --qubits 2 --g 1 --depth 1 --seed 4");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out == "qubits 2\ncnot 0 1\n" || r.out == "qubits 2\ncnot 1 0\n") << r.out;
    EXPECT_EQ(run("gen --qubits 20 --g 3 --depth 5 --seed 9").out, run("gen --qubits 20 --g 3 --depth 5 --seed 9").out);
    EXPECT_EQ(run("gen --qubits 2 --g 2 --depth 1 --seed 1").code, 2);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("gen --qubits 4 --g 1").code, 2);
    EXPECT_EQ(run("gen --qubits 4 --g 1 --depth 2 --bogus 1").code, 2);
    EXPECT_EQ(run("compile --circuit x --layout square").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, CrossingExampleDepths) {
    const std::string base = "compile --circuit " + data("crossing_circuit.txt") + " --mapping " +
                             data("crossing_mapping.json") + " --layout pair --seed 1 --k 1";
    Result st = run(base + " --mode static");
    EXPECT_EQ(st.code, 0);
    EXPECT_EQ(st.out, "d_L 2\nd_tilde 3\n");
    Result op = run(base + " --mode optimized");
    EXPECT_EQ(op.code, 0);
    EXPECT_EQ(op.out, "d_L 2\nd_tilde 2\n");
}

TEST(Cli, CompileFailures) {
    std::ofstream(scratch("bad_circuit.txt")) << "qubits 2\ncnot 0 5\n";
    EXPECT_EQ(run("compile --circuit " + scratch("bad_circuit.txt") + " --seed 1").code, 1);
    EXPECT_EQ(run("compile --circuit " + scratch("missing.txt") + " --seed 1").code, 1);
}

TEST(Cli, ZeroIterationsMatchesStaticAndIsReproducible) {
    const std::string circ = scratch("gen_circuit.txt");
    ASSERT_EQ(run("gen --qubits 30 --g 5 --depth 12 --seed 21 --out " + circ).code, 0);
    const std::string base = "compile --circuit " + circ + " --layout triple --qubits 30 --seed 21";
    Result st = run(base + " --mode static --out " + scratch("st.json"));
    Result zero = run(base + " --mode optimized --iters 0 --out " + scratch("zero.json"));
    ASSERT_EQ(st.code, 0);
    EXPECT_EQ(st.out, zero.out);
    EXPECT_EQ(slurp(scratch("st.json")), slurp(scratch("zero.json")));

    Result a = run(base + " --mode optimized --iters 30 --out " + scratch("a.json"));
    Result b = run(base + " --mode optimized --iters 30 --out " + scratch("b.json"));
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(slurp(scratch("a.json")), slurp(scratch("b.json")));
    auto j = nlohmann::json::parse(slurp(scratch("a.json")));
    EXPECT_TRUE(j.contains("layers"));
    EXPECT_TRUE(j.contains("final_mapping"));
}

TEST(Cli, ConfigFile) {
    std::ofstream(scratch("cfg.json")) << R"({"k": 2, "iterations": 0})";
    std::ofstream(scratch("bad_cfg.json")) << R"({"lookahead": 2})";
    const std::string circ = data("crossing_circuit.txt");
    const std::string base = "compile --circuit " + circ + " --mapping " + data("crossing_mapping.json") + " --seed 2";
    EXPECT_EQ(run(base + " --config " + scratch("cfg.json")).out, "d_L 2\nd_tilde 3\n");
    EXPECT_EQ(run(base + " --config " + scratch("bad_cfg.json")).code, 2);
}

TEST(Cli, BenchAndSweepOutputs) {
    const std::string args = "--layouts single,pair --depths 4,8 --qubits 16 --g 2 --samples 2 --iters 10 --seed 5 --quiet";
    Result a = run("bench " + args + " --json " + scratch("bench.json"));
    Result b = run("bench " + args + " --jobs 2");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    std::istringstream in(a.out);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    EXPECT_EQ(lines, 5);
    EXPECT_EQ(a.out.rfind("layout,q,g,dL,samples,", 0), 0u);
    EXPECT_EQ(nlohmann::json::parse(slurp(scratch("bench.json"))).size(), 8u);

    Result s = run("sweep --g 2,4 --total-gates 16 --qubits 12 --layout triple --samples 2 --iters 10 --seed 5 --quiet");
    EXPECT_EQ(s.code, 0);
    EXPECT_NE(s.out.find("\ntriple,12,4,4,2,"), std::string::npos) << s.out;
    EXPECT_EQ(run("sweep --g 7 --total-gates 16 --qubits 12 --seed 1").code, 2);
    EXPECT_EQ(run("bench --depths 4,x --seed 1").code, 2);
}
