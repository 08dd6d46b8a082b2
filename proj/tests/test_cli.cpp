#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "helmns/driver.hpp"

using namespace helmns;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
  protected:
    fs::path dir_;
    void SetUp() override {
        dir_ = fs::temp_directory_path() / "helmns_cli_test";
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& body) {
        const fs::path p = dir_ / name;
        std::ofstream os(p);
        os << body;
        return p;
    }

    std::string small_run_config(const std::string& outdir,
                                 const std::string& extra = "") {
        return "grid.n = 16 16 16\n"
               "grid.length = 6.283185307179586 6.283185307179586 6.283185307179586\n"
               "grid.boundary = periodic\n"
               "sim.nu = 0.1\n"
               "sim.rho = 1.0\n"
               "sim.dt = 0.005\n"
               "sim.t_end = 0.1\n"
               "sim.ic = taylor_green\n"
               "sim.snapshot_every = 5\n"
               "checks.run = check_reconstruction check_theorem1 monitor_theorem34\n"
               "output.dir = " +
               outdir + "\n" + extra;
    }
};

nlohmann::json load_json(const fs::path& p) {
    std::ifstream is(p);
    return nlohmann::json::parse(is);
}

nlohmann::json strip_runtimes(nlohmann::json j) {
    for (auto& c : j["checks"]) c.erase("runtime_seconds");
    return j;
}

}  // namespace

TEST_F(CliTest, ListChecksContainsRegistryAnchors) {
    const std::string text = driver::list_checks_text();
    EXPECT_NE(text.find("check_theorem1 (Eq. 14)"), std::string::npos);
    EXPECT_NE(text.find("delta_diagnostic (Eq. 29–33, informational)"), std::string::npos);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    EXPECT_EQ(lines, verify::check_registry().size());
}

TEST_F(CliTest, SmallRunSucceedsAndWritesArtifacts) {
    const auto out = (dir_ / "out").string();
    const auto cfgPath = write("small.cfg", small_run_config(out));
    std::ostringstream log;
    EXPECT_EQ(driver::run(cfgPath.string(), log), 0) << log.str();
    EXPECT_TRUE(fs::exists(fs::path(out) / "manifest.json"));
    EXPECT_TRUE(fs::exists(fs::path(out) / "check_theorem1.json"));
    EXPECT_TRUE(fs::exists(fs::path(out) / "check_theorem1.csv"));
    EXPECT_TRUE(fs::exists(fs::path(out) / "state_0000.hnsf"));
    EXPECT_TRUE(fs::exists(fs::path(out) / "state_0004.hnsf"));

    // snapshots round trip and the last one matches the recorded decay
    auto u = read_snapshot_vector((fs::path(out) / "state_0004.hnsf").string());
    EXPECT_EQ(u.grid.n[0], 16);

    // JSON report schema is exactly the documented field set
    auto j = load_json(fs::path(out) / "check_theorem1.json");
    const std::vector<std::string> keys = {"informational", "masked_total", "name",
                                           "notes",         "passed",       "series_csv_path",
                                           "tolerance",     "worst_l2",     "worst_sup"};
    ASSERT_EQ(j.size(), keys.size());
    for (const auto& k : keys) EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_TRUE(j["passed"].get<bool>());

    // series CSV has the documented columns
    std::ifstream csv(fs::path(out) / "check_theorem1.csv");
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "t,sup,l2,masked");
}

TEST_F(CliTest, UnknownCheckNameIsConfigError) {
    const auto cfgPath = write(
        "bad.cfg", small_run_config((dir_ / "o").string()) + "checks.run2 = x\n");
    std::ostringstream log;
    EXPECT_EQ(driver::run(cfgPath.string(), log), driver::kExitConfigError);
    EXPECT_NE(log.str().find("checks.run2"), std::string::npos);

    const auto cfg2 = write("bad2.cfg",
                            "grid.n = 16 16 16\n"
                            "grid.length = 6.28 6.28 6.28\n"
                            "sim.nu = 0.1\nsim.dt = 0.005\nsim.t_end = 0.05\n"
                            "sim.snapshot_every = 10\n"
                            "checks.run = check_theoremX\n");
    std::ostringstream log2;
    EXPECT_EQ(driver::run(cfg2.string(), log2), driver::kExitConfigError);
    EXPECT_NE(log2.str().find("check_theoremX"), std::string::npos);
}

TEST_F(CliTest, CflViolationIsSimulationAbort) {
    const auto cfgPath = write("cfl.cfg",
                               "grid.n = 16 16 16\n"
                               "grid.length = 6.283185307179586 6.283185307179586 "
                               "6.283185307179586\n"
                               "sim.nu = 0.1\n"
                               "sim.dt = 0.5\n"  // sup|u| = 1, h ~ 0.39: CFL ~ 1.3
                               "sim.t_end = 1.0\n"
                               "sim.ic = taylor_green\n"
                               "sim.snapshot_every = 1\n"
                               "checks.run = check_theorem1\n"
                               "output.dir = " +
                                   (dir_ / "cfl_out").string() + "\n");
    std::ostringstream log;
    EXPECT_EQ(driver::run(cfgPath.string(), log), driver::kExitSimulationError);
    EXPECT_NE(log.str().find("CFL"), std::string::npos);
}

TEST_F(CliTest, RerunProducesIdenticalManifestUpToRuntimes) {
    const auto cfgA = write("a.cfg", small_run_config((dir_ / "a").string()));
    const auto cfgB = write("b.cfg", small_run_config((dir_ / "b").string()));
    std::ostringstream log;
    ASSERT_EQ(driver::run(cfgA.string(), log), 0);
    ASSERT_EQ(driver::run(cfgB.string(), log), 0);
    auto ja = strip_runtimes(load_json(dir_ / "a" / "manifest.json"));
    auto jb = strip_runtimes(load_json(dir_ / "b" / "manifest.json"));
    // config echo differs only in output.dir
    ja["config"].erase("output.dir");
    jb["config"].erase("output.dir");
    EXPECT_EQ(ja, jb);

    // snapshot files are bit-identical across the two runs
    for (const auto& name : {"state_0000.hnsf", "state_0004.hnsf"}) {
        std::ifstream fa(dir_ / "a" / name, std::ios::binary);
        std::ifstream fb(dir_ / "b" / name, std::ios::binary);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        EXPECT_EQ(sa.str(), sb.str()) << name;
    }
}

TEST_F(CliTest, CompareBackendsSingleRungAndWarning) {
    const auto cfgPath = write("ladder1.cfg",
                               "ladder.n = 10\n"
                               "ladder.length = 8\n"
                               "ladder.sigma = 1.0\n"
                               "output.dir = " +
                                   (dir_ / "lad").string() + "\n");
    std::ostringstream log;
    ASSERT_EQ(driver::compare_backends(cfgPath.string(), log), 0) << log.str();
    std::ifstream csv(dir_ / "lad" / "backend_compare.csv");
    std::string line;
    std::size_t rows = 0;
    std::getline(csv, line);
    EXPECT_EQ(line, "n,length,h,rel_sup_discrepancy,rms_discrepancy,decay_warning");
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 1u);

    const auto warnCfg = write("ladder2.cfg",
                               "ladder.n = 10\n"
                               "ladder.length = 8\n"
                               "ladder.field = sinusoid\n"
                               "output.dir = " +
                                   (dir_ / "ladw").string() + "\n");
    std::ostringstream log2;
    ASSERT_EQ(driver::compare_backends(warnCfg.string(), log2), 0);
    std::ifstream csv2(dir_ / "ladw" / "backend_compare.csv");
    std::getline(csv2, line);  // header
    std::getline(csv2, line);
    EXPECT_EQ(line.back(), '1');  // decay_warning column set
}

TEST_F(CliTest, BinaryExitCodesThroughMain) {
    const std::string exe = HELMNS_CLI_PATH;
    ASSERT_TRUE(fs::exists(exe));
    const auto cfgPath = write("binrun.cfg", small_run_config((dir_ / "bin_out").string()));
    const std::string quiet = " > /dev/null 2>&1";
    EXPECT_EQ(WEXITSTATUS(std::system((exe + " list-checks" + quiet).c_str())), 0);
    EXPECT_EQ(WEXITSTATUS(std::system((exe + " run " + cfgPath.string() + quiet).c_str())), 0);
    EXPECT_EQ(WEXITSTATUS(std::system((exe + " run /nonexistent.cfg" + quiet).c_str())), 2);
    EXPECT_EQ(WEXITSTATUS(std::system((exe + " frobnicate" + quiet).c_str())), 2);
}
