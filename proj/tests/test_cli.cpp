#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run
{
    int status = 0;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch()
{
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("oscamp_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run run(const std::string& args, const std::string& env = "")
{
    const auto o = scratch() / "stdout.txt", e = scratch() / "stderr.txt";
    const std::string cmd = env + " " + OSCAMP_CLI_PATH + " " + args + " >" + o.string() + " 2>" + e.string();
    const int rc = std::system(cmd.c_str());
    return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, slurp(o), slurp(e)};
}

double field_after(const std::string& text, const std::string& key)
{
    const auto pos = text.find(key);
    if (pos == std::string::npos) return std::nan("");
    return std::stod(text.substr(pos + key.size()));
}

}  // namespace

TEST(Cli, AmplitudeFifthMap)
{
    const auto out = scratch() / "amp5.csv";
    const auto r = run("amplitude --weights 0.1,0,0.9 --samples 64 --output " + out.string());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("1.01288677326"), std::string::npos) << r.out;
    EXPECT_NEAR(field_after(r.out, "g1 = "), 1.59e-8, 5e-10) << r.out;
    const auto csv = slurp(out);
    EXPECT_EQ(csv.rfind("# config: {", 0), 0u);
    EXPECT_NE(csv.find("\nquantity,value,err\n"), std::string::npos);
    EXPECT_NE(csv.find("\"weights\":[\"0.1\",\"0\",\"0.9\"]"), std::string::npos);
}

TEST(Cli, AmplitudeQuarterMap)
{
    const auto r = run("amplitude --weights 0.25,0,0.75 --samples 64 --output " + (scratch() / "amp4.csv").string());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("1.33381"), std::string::npos) << r.out;
    EXPECT_NEAR(field_after(r.out, "oscillation = "), 8.86e-8, 5e-10) << r.out;
}

TEST(Cli, SimulateIsByteIdentical)
{
    const std::string args = "simulate --weights 0.25,0,0.75 --n 20 --samples 1000 --seed 7";
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.status, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.err, b.err);
    EXPECT_NE(a.out.find("\"seed\":7"), std::string::npos);
    const auto c = run(args + " --threads 3");
    EXPECT_EQ(a.out.substr(a.out.find('\n')), c.out.substr(c.out.find('\n')));
}

TEST(Cli, EmbeddedConfigReproducesOutput)
{
    const auto first = scratch() / "fe.json";
    auto r = run("free-energy --weights 1/4,0,3/4 --h-grid 0.5,1,2 --format json --output " + first.string());
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(first));
    ASSERT_TRUE(j.contains("config"));
    ASSERT_EQ(j["result"].size(), 3u);
    auto cfg = j["config"];
    const auto second = scratch() / "fe2.json";
    cfg["output"] = second.string();
    const auto cfg_path = scratch() / "cfg.json";
    std::ofstream(cfg_path) << cfg.dump();
    r = run("free-energy --h-grid 0.5,1,2 --config " + cfg_path.string());
    ASSERT_EQ(r.status, 0) << r.err;
    const auto k = nlohmann::json::parse(slurp(second));
    EXPECT_EQ(j["result"], k["result"]);
}

TEST(Cli, CsvColumnsAndFullPrecision)
{
    const auto r = run("free-energy --weights 0.1,0,0.9 --h-grid 0.2:1:5");
    ASSERT_EQ(r.status, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# config:", 0), 0u);
    std::getline(in, line);
    EXPECT_EQ(line, "h,value,err");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        const auto v = line.substr(line.find(',') + 1);
        EXPECT_GE(v.find(','), 40u) << line;  // value carries the working precision
    }
    EXPECT_EQ(rows, 5);
    EXPECT_NE(r.err.find("free-energy:"), std::string::npos);
}

TEST(Cli, SeriesDump)
{
    const auto r = run("series --dump --weights 0.1,0,0.9");
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    for (const char* k : {"g", "g_inverse", "phi"}) {
        ASSERT_TRUE(j["result"][k].contains("envelope")) << k;
        EXPECT_TRUE(j["result"][k]["envelope"].contains("certificate") || std::string(k) == "g_inverse");
    }
    EXPECT_EQ(j["result"]["phi"]["kind"], "laurent");
}

TEST(Cli, OmegaAndHarris)
{
    auto r = run("omega --weights 0.1,0,0.9 --samples 32 --harmonics 2 --format json");
    ASSERT_EQ(r.status, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(std::stod(j["result"]["mean"]["value"].get<std::string>()), 4.45140273002, 1e-10);
    r = run("harris --weights 0.1,0,0.9 --s-grid 1,2");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("s,psi,psi_err,psi_direct,psi_direct_err,L,L_err,Omega,Omega_err"), std::string::npos);
}

TEST(Cli, JuliaMethods)
{
    auto r = run("julia --method preimage --depth 5 --weights 0.25,0,0.75");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2 + 32);
    r = run("julia --method boettcher --points 16 --weights 0.25,0,0.75");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("\nt,re,im\n"), std::string::npos);
    EXPECT_NE(r.out.find("\n1,-1,"), std::string::npos) << r.out;
}

TEST(Cli, ErrorsAreMachineReadable)
{
    auto r = run("amplitude --weights 0.5,0,0.4");
    EXPECT_NE(r.status, 0);
    auto j = nlohmann::json::parse(r.err);
    EXPECT_EQ(j["error"]["code"], "invalid_map");
    r = run("free-energy --weights 0.1,0.2,0.3,0.4 --h-grid 1 --near-critical");
    EXPECT_NE(r.status, 0);
    EXPECT_EQ(nlohmann::json::parse(r.err)["error"]["code"], "domain");
    r = run("nonsense");
    EXPECT_NE(r.status, 0);
    EXPECT_EQ(nlohmann::json::parse(r.err)["error"]["code"], "usage");
    r = run("free-energy --config /nonexistent/cfg.json");
    EXPECT_NE(r.status, 0);
    EXPECT_EQ(nlohmann::json::parse(r.err)["error"]["code"], "invalid_argument");
}

TEST(Cli, PrecisionFromEnvironment)
{
    const auto a = run("free-energy --weights 0.1,0,0.9 --h-grid 1 --format json", "OSCAMP_DIGITS=30");
    ASSERT_EQ(a.status, 0) << a.err;
    EXPECT_EQ(nlohmann::json::parse(a.out)["config"]["digits"], 30);
    const auto b = run("free-energy --weights 0.1,0,0.9 --h-grid 1 --format json --digits 80", "OSCAMP_DIGITS=30");
    EXPECT_EQ(nlohmann::json::parse(b.out)["config"]["digits"], 80);
    const auto c = run("free-energy --h-grid 1", "OSCAMP_DIGITS=5");
    EXPECT_NE(c.status, 0);
}
