// Drives the built `cmi` binary end to end.
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

const fs::path kWork = fs::temp_directory_path() / "cmi_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(CMI_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const auto p = kWork / name;
  std::ofstream(p) << text;
  return p;
}

TEST(Cli, TestSubcommandReport) {
  const auto csv = write("four.csv", "x,y\n1,-1\n2,-1\n3,1\n4,1\n");
  const auto out = kWork / "four.json";
  ASSERT_EQ(run("test " + csv.string() + " --sigma-min 0.1 --out " + out.string()), 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(doc.at("kind"), "test");
  const auto& r = doc.at("report");
  EXPECT_EQ(r.at("reject"), false);
  EXPECT_EQ(r.at("statistic"), 2.0);
  EXPECT_NEAR(r.at("cv").get<double>(), 4.351376313403752, 1e-12);
}

TEST(Cli, ByteIdenticalWithoutTimestamp) {
  std::string text = "x,y1,y2\n";
  for (int i = 0; i < 60; ++i) {
    text += std::to_string(i % 17) + "," + std::to_string((i * 37 % 11) - 5) + "," + std::to_string(i % 3 - 1) + "\n";
  }
  const auto csv = write("multi.csv", text);
  const auto a = kWork / "a.json";
  const auto b = kWork / "b.json";
  const std::string flags = " --contact estimate --no-timestamp --out ";
  ASSERT_EQ(run("test " + csv.string() + flags + a.string()), 0);
  ASSERT_EQ(run("test " + csv.string() + flags + b.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const auto doc = nlohmann::json::parse(slurp(a));
  EXPECT_EQ(doc.at("report").at("coordinates").size(), 2u);
}

TEST(Cli, SimulationSubcommandsAreDeterministic) {
  const auto a = kWork / "size_a.json";
  const auto b = kWork / "size_b.json";
  ASSERT_EQ(run("size --n 100 --reps 20 --seed 4 --no-timestamp --out " + a.string()), 0);
  ASSERT_EQ(run("size --n 100 --reps 20 --seed 4 --no-timestamp --out " + b.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const auto doc = nlohmann::json::parse(slurp(a));
  EXPECT_EQ(doc.at("report").at("summary").at("reps"), 20);

  const auto p = kWork / "power.json";
  ASSERT_EQ(run("power --n 100,200 --reps 10 --out " + p.string()), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(p)).at("report").at("cells").size(), 4u);

  const auto l = kWork / "limit.json";
  ASSERT_EQ(run("limit --horizon 50 --reps 10 --out " + l.string()), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(l)).at("report").at("minima").size(), 10u);
}

TEST(Cli, FailuresExitNonZero) {
  const auto bad = write("bad.csv", "x,y\n1,abc\n");
  EXPECT_NE(run("test " + bad.string()), 0);
  EXPECT_NE(run("test " + (kWork / "missing.csv").string()), 0);
  const auto ok = write("ok.csv", "x,y\n1,1\n2,-1\n3,1\n");
  EXPECT_NE(run("test " + ok.string() + " --alpha 1.5"), 0);
  EXPECT_NE(run("test " + ok.string() + " --delta 0.5"), 0);
  EXPECT_NE(run("test " + ok.string() + " --contact 3,1"), 0);
  EXPECT_NE(run("limit --step 0.9"), 0);
}

TEST(Cli, ExplicitSigmaOverridesSchedule) {
  const auto csv = write("prec.csv", "x,y\n1,-1\n2,-1\n3,1\n4,1\n");
  const auto out = kWork / "prec.json";
  ASSERT_EQ(run("test " + csv.string() + " --sigma-min 0.1 --delta 0.3 --out " + out.string()), 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(doc.at("report").at("sigma_min"), 0.1);
  EXPECT_EQ(doc.at("report").at("config").at("truncation").at("mode"), "explicit");
}

}  // namespace
