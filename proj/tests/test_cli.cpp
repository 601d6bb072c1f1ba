#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "matte/analysis.hpp"
#include "matte/cli/commands.hpp"
#include "matte/metrics.hpp"
#include "matte/png_io.hpp"
#include "oracles.hpp"

namespace matte::cli {
namespace {

namespace fs = std::filesystem;

struct CallResult {
  int code;
  std::string out;
  std::string err;
};

CallResult call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("matte_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(Cli, SolveFixedPointReproducesTrimapBytes) {
  write_image(p("img.png"), ImagePlane::from_gray(Field::Constant(8, 8, 0.3)));
  for (Label l : {Label::Background, Label::Foreground}) {
    write_trimap(p("tri.png"), Trimap(8, 8, l));
    const CallResult r = call({"solve", p("img.png"), p("tri.png"), "-o", p("alpha.png")});
    ASSERT_EQ(r.code, 0) << r.err;
    const Raster alpha = read_png(p("alpha.png"));
    for (std::uint16_t v : alpha.samples) EXPECT_EQ(v, trimap_byte(l));
  }

  const auto trace = nlohmann::json::parse(bytes_of(p("alpha.json")));
  EXPECT_EQ(trace["iterations"], 0);
  EXPECT_TRUE(trace["converged"].get<bool>());
  EXPECT_EQ(trace["policy"], "ddc");
}

TEST_F(Cli, SolveRampSceneMeetsRegressionThreshold) {
  ASSERT_EQ(call({"analyze", "synth", "--kind", "ramp", "--width", "6", "--out-dir", p("")}).code, 0);
  const CallResult r = call({"solve", p("ramp_image.png"), p("ramp_trimap.png"), "-o", p("out.png")});
  ASSERT_EQ(r.code, 0) << r.err;
  const PixelMetrics m = pixel_metrics(read_alpha(p("out.png")), read_alpha(p("ramp_alpha.png")));
  EXPECT_LE(m.sad, 0.006);
}

TEST_F(Cli, SolveMissingTrimapReportsPath) {
  write_image(p("img.png"), ImagePlane::from_gray(Field::Zero(4, 4)));
  const CallResult r = call({"solve", p("img.png"), p("nope.png"), "-o", p("a.png")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nope.png"), std::string::npos);
}

TEST_F(Cli, SolveRejectsBadTrimapBytesAndMismatch) {
  write_image(p("img.png"), ImagePlane::from_gray(Field::Zero(4, 4)));
  write_png(p("bad.png"), Raster{4, 4, 1, 8, std::vector<std::uint16_t>(16, 64)});
  EXPECT_EQ(call({"solve", p("img.png"), p("bad.png"), "-o", p("a.png")}).code, 1);
  write_trimap(p("small.png"), Trimap(3, 4, Label::Unknown));
  EXPECT_EQ(call({"solve", p("img.png"), p("small.png"), "-o", p("a.png")}).code, 1);
}

TEST_F(Cli, ConfigFileMergesUnderFlags) {
  ASSERT_EQ(call({"analyze", "synth", "--kind", "ramp", "--out-dir", p("")}).code, 0);
  std::ofstream(p("run.cfg")) << "# settings\nwindow = 5\nmax-iters=30\npolicy=affinity\n";
  const CallResult r = call({"solve", p("ramp_image.png"), p("ramp_trimap.png"), "-o", p("a.png"), "--config", p("run.cfg"),
                      "--max-iters", "12", "--deep"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto trace = nlohmann::json::parse(bytes_of(p("a.json")));
  EXPECT_EQ(trace["config"]["window"], 5);
  EXPECT_EQ(trace["config"]["max_iters"], 12);
  EXPECT_EQ(trace["policy"], "affinity");
  EXPECT_EQ(read_png(p("a.png")).bit_depth, 16);
}

TEST_F(Cli, ConfigFileRejectsUnknownKeysAndBadValues) {
  ASSERT_EQ(call({"analyze", "synth", "--out-dir", p("")}).code, 0);
  std::ofstream(p("bad.cfg")) << "windw=5\n";
  EXPECT_EQ(call({"solve", p("ramp_image.png"), p("ramp_trimap.png"), "-o", p("a.png"), "--config", p("bad.cfg")}).code, 1);
  EXPECT_EQ(call({"solve", p("ramp_image.png"), p("ramp_trimap.png"), "-o", p("a.png"), "--window", "x"}).code, 1);
  EXPECT_EQ(call({"solve", p("ramp_image.png"), p("ramp_trimap.png"), "-o", p("a.png"), "--window", "4"}).code, 1);
}

TEST_F(Cli, BatchModeProcessesInOrder) {
  fs::create_directories(dir_ / "in" / "image");
  fs::create_directories(dir_ / "in" / "trimap");
  for (const std::string name : {"b", "a", "c"}) {
    write_image(dir_ / "in" / "image" / (name + ".png"), ImagePlane::from_gray(Field::Constant(6, 6, 0.2)));
    write_trimap(dir_ / "in" / "trimap" / (name + ".png"), Trimap(6, 6, Label::Foreground));
  }
  const CallResult r = call({"solve", "--dir", p("in"), "-o", p("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(r.out.find("a.png"), r.out.find("b.png"));
  EXPECT_LT(r.out.find("b.png"), r.out.find("c.png"));
  for (const std::string name : {"a", "b", "c"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / (name + ".png")));
    EXPECT_TRUE(fs::exists(dir_ / "out" / (name + ".json")));
  }
}

TEST_F(Cli, TrimapKernelOneOnBinaryAlphaHasNoUnknown) {
  Field a = Field::Zero(10, 10);
  a.topRows(4).setOnes();
  write_alpha(p("a.png"), AlphaMatte(a));
  ASSERT_EQ(call({"trimap", p("a.png"), "-o", p("t.png"), "--kernel", "1"}).code, 0);
  const Raster t = read_png(p("t.png"));
  EXPECT_EQ(std::count(t.samples.begin(), t.samples.end(), 128), 0);
}

TEST_F(Cli, TrimapUnknownGrowsWithKernel) {
  std::mt19937_64 rng(3);
  write_alpha(p("a.png"), AlphaMatte(oracle::random_matte(rng, 40, 40)));
  ASSERT_EQ(call({"trimap", p("a.png"), "-o", p("t11.png"), "--kernel", "11"}).code, 0);
  ASSERT_EQ(call({"trimap", p("a.png"), "-o", p("t31.png"), "--kernel", "31"}).code, 0);
  EXPECT_LE(read_trimap(p("t11.png")).unknown_count(), read_trimap(p("t31.png")).unknown_count());
}

TEST_F(Cli, TrimapRandomKernelIsSeeded) {
  std::mt19937_64 rng(4);
  write_alpha(p("a.png"), AlphaMatte(oracle::random_matte(rng, 30, 30)));
  ASSERT_EQ(call({"trimap", p("a.png"), "-o", p("x.png"), "--kernel-range", "1", "30", "--seed", "7"}).code, 0);
  ASSERT_EQ(call({"trimap", p("a.png"), "-o", p("y.png"), "--kernel-range", "1", "30", "--seed", "7"}).code, 0);
  EXPECT_EQ(bytes_of(p("x.png")), bytes_of(p("y.png")));
}

TEST_F(Cli, TrimapRejectsEvenKernelAndConflictingOptions) {
  write_alpha(p("a.png"), AlphaMatte(Field::Ones(5, 5)));
  EXPECT_EQ(call({"trimap", p("a.png"), "-o", p("t.png"), "--kernel", "10"}).code, 1);
  EXPECT_EQ(call({"trimap", p("a.png"), "-o", p("t.png"), "--kernel", "3", "--kernel-range", "1", "5"}).code, 1);
}

TEST_F(Cli, EvalIdentityIsAllZero) {
  std::mt19937_64 rng(5);
  write_alpha(p("a.png"), AlphaMatte(oracle::random_matte(rng, 16, 16)));
  std::vector<Label> labels(256, Label::Background);
  labels[10] = Label::Unknown;
  write_trimap(p("t.png"), Trimap(16, 16, labels));
  const CallResult r = call({"eval", p("a.png"), p("a.png"), p("t.png")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"sad", "mad", "mse", "grad", "conn", "sad_t", "mse_t"}) EXPECT_EQ(j[key].get<double>(), 0.0) << key;
}

TEST_F(Cli, EvalRowExampleAndNulls) {
  Field pred(1, 4), gt(1, 4);
  pred << 1, 0.5, 0, 0;
  gt << 1, 1, 0, 0;
  write_alpha(p("p.png"), AlphaMatte(pred), true);
  write_alpha(p("g.png"), AlphaMatte(gt), true);
  write_trimap(p("t.png"), Trimap(1, 4, {Label::Foreground, Label::Unknown, Label::Background, Label::Background}));
  write_trimap(p("known.png"), Trimap(1, 4, Label::Foreground));
  auto j = nlohmann::json::parse(call({"eval", p("p.png"), p("g.png"), p("t.png")}).out);
  // 16-bit storage of 0.5 is 32768/65535, off by under 1e-5.
  EXPECT_NEAR(j["mad"].get<double>(), 0.125, 1e-5);
  EXPECT_NEAR(j["mse_t"].get<double>(), 0.25, 1e-5);
  EXPECT_TRUE(j["grad"].is_null());
  j = nlohmann::json::parse(call({"eval", p("p.png"), p("g.png"), p("known.png")}).out);
  EXPECT_TRUE(j["sad_t"].is_null());
  EXPECT_TRUE(j["mse_t"].is_null());
}

TEST_F(Cli, EvalMismatchedDimensions) {
  write_alpha(p("a.png"), AlphaMatte(Field::Ones(3, 3)));
  write_alpha(p("b.png"), AlphaMatte(Field::Ones(3, 4)));
  write_trimap(p("t.png"), Trimap(3, 3, Label::Unknown));
  EXPECT_EQ(call({"eval", p("a.png"), p("b.png"), p("t.png")}).code, 1);
}

TEST_F(Cli, AnalyzeModes) {
  CallResult r = call({"analyze", "bounds", "--samples", "20", "--seed", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("violations: 0"), std::string::npos);

  r = call({"analyze", "braking", "--form", "quadratic", "--K", "5"});
  EXPECT_EQ(r.code, 0);
  const auto pos = r.out.find("max |residual|: ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LT(std::stod(r.out.substr(pos + 16)), 1e-12);

  r = call({"analyze", "symmetry", "--K", "11"});
  EXPECT_EQ(r.code, 0);
  EXPECT_LT(std::stod(r.out.substr(r.out.find(": ") + 2)), 1e-12);

  r = call({"analyze", "synth", "--kind", "ramp", "--width", "6", "--out-dir", p("scene")});
  EXPECT_EQ(r.code, 0);
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_ / "scene")) ++files;
  EXPECT_EQ(files, 3);

  EXPECT_EQ(call({"analyze", "synth", "--kind", "hair", "--length", "200", "--canvas", "20", "30", "--out-dir", p("x")}).code, 1);
  EXPECT_EQ(call({"analyze", "braking", "--form", "sine"}).code, 1);
}

TEST_F(Cli, GradcheckPassesForEveryLoss) {
  for (const char* loss : {"known", "affinity", "dc", "ddc"}) {
    const CallResult r = call({"gradcheck", "--loss", loss, "--size", "8", "--seed", "1"});
    EXPECT_EQ(r.code, 0) << loss << ": " << r.out;
  }
  EXPECT_EQ(call({"gradcheck", "--loss", "tv"}).code, 1);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"frobnicate"}).code, 1);
  EXPECT_EQ(call({"--help"}).code, 0);
}

TEST_F(Cli, SolveIsDeterministicAcrossThreadCounts) {
  SceneSpec spec;
  spec.kind = TextureScene{};
  spec.height = 24;
  spec.width = 24;
  const Scene s = make_scene(spec);
  write_image(p("img.png"), s.image);
  write_trimap(p("tri.png"), s.trimap);
  std::string first;
  for (const char* threads : {"1", "3", "8"}) {
    const std::string cmd = std::string("MATTE_THREADS=") + threads + " " + MATTE_BINARY + " solve " + p("img.png") +
                            " " + p("tri.png") + " -o " + p("out.png") + " --max-iters 200 --seed 4 > /dev/null";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    const std::string bytes = bytes_of(p("out.png"));
    if (first.empty()) first = bytes;
    EXPECT_EQ(bytes, first) << "threads " << threads;
  }
}

}  // namespace
}  // namespace matte::cli
