#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;  // stdout and stderr together
};

Run cli(const std::string& args) {
  const std::string cmd = std::string("'") + PSMETA_CLI + "' " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("psmeta_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, MapsPrintsDistances) {
  const auto r = cli("maps");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("map a: shortest_path=14"), std::string::npos);
  EXPECT_NE(r.output.find("distractor_path=12"), std::string::npos);
  EXPECT_NE(r.output.find(".......#G"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli("preset nosuch").code, 2);
  EXPECT_EQ(cli("--bogus maps").code, 2);
  EXPECT_EQ(cli("").code, 2);
  const auto r = cli("preset nosuch");
  EXPECT_NE(r.output.find("unknown preset 'nosuch'"), std::string::npos);
}

TEST(Cli, BadConfigNamesLineAndKey) {
  const auto dir = scratch("badcfg");
  const auto cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "name = x\nn_agents = lots\n";
  const auto r = cli("--config '" + cfg.string() + "' run");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("line 2"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("n_agents"), std::string::npos);
  EXPECT_EQ(cli("--config '" + (dir / "missing.cfg").string() + "' run").code, 1);
  fs::remove_all(dir);
}

TEST(Cli, PresetWritesFilesReproducibly) {
  const auto dir = scratch("fig3");
  const auto r = cli("--out '" + dir.string() + "' --desk preset fig3");
  ASSERT_EQ(r.code, 0) << r.output;
  ASSERT_TRUE(fs::exists(dir / "fig3_fixed.csv"));
  ASSERT_TRUE(fs::exists(dir / "fig3_fixed.meta"));
  const std::string first = slurp(dir / "fig3_fixed.csv");
  EXPECT_EQ(first.rfind("axis_value,success,reward,", 0), 0u);
  ASSERT_EQ(cli("--out '" + dir.string() + "' --workers 3 --desk preset fig3").code, 0);
  EXPECT_EQ(slurp(dir / "fig3_fixed.csv"), first);
  ASSERT_EQ(cli("--out '" + dir.string() + "' --seed 99 --desk preset fig3").code, 0);
  EXPECT_NE(slurp(dir / "fig3_fixed.csv"), first);
  fs::remove_all(dir);
}

TEST(Cli, RunReplaysSidecar) {
  const auto dir = scratch("replay");
  ASSERT_EQ(cli("--out '" + dir.string() + "' --desk preset fig3").code, 0);
  const std::string first = slurp(dir / "fig3_fixed.csv");
  const auto again = dir / "again";
  const auto r = cli("--out '" + again.string() + "' --config '" + (dir / "fig3_fixed.meta").string() + "' run");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(slurp(again / "fig3_fixed.csv"), first);
  fs::remove_all(dir);
}

TEST(Cli, ValidateSingleCriterion) {
  const auto r = cli("validate --only 1");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("PASS criterion 1"), std::string::npos);
}
