#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "kleinian/cli.hpp"

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "kleinian");
  std::ostringstream out, err;
  const int code = kleinian::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::path(testing::TempDir()) / name).string();
}

const std::string kSamples = KLEINIAN_SAMPLES_DIR;

TEST(Cli, CnPrintsValue) {
  const Outcome o = run({"cn", "--mu", "0+2i", "--n", "3"});
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.out.substr(0, o.out.find('\n')), "-5+0i");
  EXPECT_NE(o.out.find("closed_form_error: 0"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"cn", "--mu", "1"}).code, 1);
  EXPECT_EQ(run({"cn", "--mu", "1", "--n", "2", "stray"}).code, 1);
  EXPECT_EQ(run({"cn", "--mu", "1", "--n", "2", "--unknown", "3"}).code, 1);
  EXPECT_EQ(run({"cn", "--mu", "1+", "--n", "2"}).code, 1);
  EXPECT_EQ(run({"no-such-command"}).code, 1);
  const Outcome o = run({"scan-slice", "--res", "10"});
  EXPECT_EQ(o.code, 1);
  EXPECT_FALSE(o.err.empty());
}

TEST(Cli, EverySubcommandHasHelp) {
  for (const char* sub : {"classify", "normalize", "cn", "scan-slice", "render-limitset", "render-kp",
                          "check-combination", "check-ford", "check-hexahedron"}) {
    const Outcome o = run({sub, "--help"});
    EXPECT_EQ(o.code, 0) << sub;
    EXPECT_NE(o.out.find("Usage"), std::string::npos) << sub;
  }
}

TEST(Cli, ScanSliceWritesOutputs) {
  const std::string prefix = temp_path("cli_scan");
  const Outcome o = run({"scan-slice", "--plane", "p0", "--bounds", "0,2,0,1", "--res", "40x20", "--N", "10",
                         "--out", prefix});
  ASSERT_EQ(o.code, 0) << o.err;
  const std::string csv = read_file(prefix + ".csv");
  EXPECT_EQ(csv.rfind("mu_re,mu_im,verdict,first_excluding_n,overlap_count\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 801);
  const std::string ppm = read_file(prefix + ".ppm");
  EXPECT_EQ(ppm.rfind("P6\n40 20\n255\n", 0), 0u);
  EXPECT_EQ(ppm.size(), std::string("P6\n40 20\n255\n").size() + 40 * 20 * 3);
  EXPECT_EQ(read_file(prefix + "_overlap.pgm").rfind("P5\n40 20\n255\n", 0), 0u);
}

TEST(Cli, ThreadsDoNotChangeOutputs) {
  const std::string a = temp_path("cli_t1"), b = temp_path("cli_t4");
  ASSERT_EQ(run({"--threads", "1", "scan-slice", "--res", "30x15", "--out", a}).code, 0);
  ASSERT_EQ(run({"--threads", "4", "scan-slice", "--res", "30x15", "--out", b}).code, 0);
  EXPECT_EQ(read_file(a + ".csv"), read_file(b + ".csv"));
  EXPECT_EQ(read_file(a + ".ppm"), read_file(b + ".ppm"));

  const std::string c1 = temp_path("lim1.csv"), c4 = temp_path("lim4.csv");
  const std::vector<std::string> base = {"render-limitset", "--max-len", "7", "--prune", "0.01", "--width", "32",
                                         "--height", "32"};
  auto with = [&](std::string threads, std::string csv, std::string ppm) {
    std::vector<std::string> v = {"--threads", threads};
    v.insert(v.end(), base.begin(), base.end());
    v.insert(v.end(), {"--csv", csv, "--ppm", ppm});
    return run(v);
  };
  ASSERT_EQ(with("1", c1, c1 + ".ppm").code, 0);
  ASSERT_EQ(with("4", c4, c4 + ".ppm").code, 0);
  EXPECT_EQ(read_file(c1), read_file(c4));
  EXPECT_EQ(read_file(c1 + ".ppm"), read_file(c4 + ".ppm"));
}

TEST(Cli, RenderKpWritesSpheres) {
  const std::string csv = temp_path("kp.csv");
  const Outcome o = run({"render-kp", "--p", "0,4,0", "--max-len", "3", "--csv", csv});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(read_file(csv).rfind("kind,a,b,c,d,generation,word\nplane,", 0), 0u);
}

TEST(Cli, HexahedronReport) {
  const Outcome o = run({"check-hexahedron", "--q", "4"});
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("edges_at_pi_over_4: 8"), std::string::npos);
  EXPECT_NE(o.out.find("edges_at_pi_over_2: 4"), std::string::npos);
  EXPECT_EQ(run({"check-hexahedron", "--q", "1.5"}).code, 1);
}

TEST(Cli, CombinationExitCodes) {
  const Outcome pass = run({"check-combination", "--p", "0,0,2.5", "--L", "3"});
  EXPECT_EQ(pass.code, 0);
  EXPECT_NE(pass.out.find("truncation_L: 3"), std::string::npos);
  const Outcome fail = run({"check-combination", "--p", "0,0,0.4", "--L", "4"});
  EXPECT_EQ(fail.code, 2);
  EXPECT_NE(fail.out.find("witness_word:"), std::string::npos);
}

TEST(Cli, FordExitCodes) {
  EXPECT_EQ(run({"check-ford", "--x", "2,0,0"}).code, 0);
  const Outcome o = run({"check-ford", "--x", "0.1,0,0"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.out.find("violating_word:"), std::string::npos);
  EXPECT_EQ(run({"check-ford", "--x", "inf"}).code, 0);
  EXPECT_EQ(run({"check-ford", "--group", "Gp", "--x", "1,1,1"}).code, 1);
}

TEST(Cli, ClassifyAndNormalizeSamples) {
  const Outcome c = run({"classify", "--config", kSamples + "/map_loxodromic.cfg"});
  EXPECT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("kind: loxodromic"), std::string::npos);
  const Outcome s = run({"classify", "--config", kSamples + "/map_screw.cfg"});
  EXPECT_NE(s.out.find("kind: parabolic_screw"), std::string::npos);
  const Outcome w = run({"classify", "--family", "Gp", "--p", "0,0,2.5", "--word", "b"});
  EXPECT_NE(w.out.find("kind: parabolic_pure"), std::string::npos);
  const Outcome n = run({"normalize", "--config", kSamples + "/group_gp_conjugated.cfg"});
  EXPECT_EQ(n.code, 0) << n.err;
  EXPECT_TRUE(n.out.find("p: 0.3,1.5,2\n") != std::string::npos ||
              n.out.find("p: 0.3,-1.5,-2\n") != std::string::npos)
      << n.out;
  EXPECT_EQ(run({"classify", "--config", kSamples + "/missing.cfg"}).code, 1);
}

TEST(Cli, SameArgvSameBytes) {
  const std::vector<std::string> args = {"check-combination", "--p", "0,0,0.4", "--L", "3"};
  EXPECT_EQ(run(args).out, run(args).out);
}

}  // namespace
