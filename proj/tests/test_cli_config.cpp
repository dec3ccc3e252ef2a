// Config parsing and validation, experiments and the command-line tool.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "rvlab/rvlab.hpp"

using namespace rvlab;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(name = "small_tail"
seed = 42
n = 20_000

[generator]
type = "pareto"
alpha = 2

[analysis]
kind = "tail_index"
target_alpha = 2
)";

std::string config_error(const std::string& text) {
  try {
    (void)prepare_experiment(parse_config_text(text));
  } catch (const Error& e) {
    EXPECT_FALSE(e.is_statistical()) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "config was accepted";
  return {};
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) s.replace(at, from.size(), to);
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Cli {
  int code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rvlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
            std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  Cli run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + RVLAB_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Cli r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path dir_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Config format

TEST(Config, ParsesTheSupportedSubset) {
  const auto j = parse_config_text(R"(# comment
a = 1_000
b = "text"  # trailing comment
c = [1, 2.5, inf]
d = [[0, 1], [2, 3]]
e = true

[t.u]
x = -3e2
)");
  EXPECT_EQ(j.at("a").get<double>(), 1000.0);
  EXPECT_EQ(j.at("b").get<std::string>(), "text");
  EXPECT_TRUE(std::isinf(j.at("c")[2].get<double>()));
  EXPECT_EQ(j.at("d")[1][0].get<double>(), 2.0);
  EXPECT_TRUE(j.at("e").get<bool>());
  EXPECT_EQ(j.at("t").at("u").at("x").get<double>(), -300.0);
}

TEST(Config, SyntaxErrorsNameTheLine) {
  for (const char* bad : {"a = \n", "a = [1, 2\n", "[t]\n[t]\n", "a = 1\na = 2\n", "= 3\n", "a = \"open\n"}) {
    try {
      (void)parse_config_text(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Config);
      EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
    }
  }
}

TEST(Config, SemanticErrorsNameTheKey) {
  EXPECT_NE(config_error(replace(kSmall, "seed = 42\n", "")).find("seed"), std::string::npos);
  EXPECT_NE(config_error(replace(kSmall, "alpha = 2", "alpha = -1")).find("generator: "), std::string::npos);
  EXPECT_NE(config_error(replace(kSmall, "target_alpha", "target_alhpa")).find("analysis.target_alhpa"),
            std::string::npos);
  EXPECT_NE(config_error(replace(kSmall, "n = 20_000", "n = \"many\"")).find("n"), std::string::npos);
  EXPECT_NE(config_error(replace(kSmall, "\"tail_index\"", "\"nonsense\"")).find("analysis.kind"),
            std::string::npos);
  EXPECT_NE(config_error(replace(kSmall, "\"pareto\"", "\"paretto\"")).find("generator.type"), std::string::npos);
  EXPECT_NE(config_error(std::string(kSmall) + "extra = 1\n").find("extra"), std::string::npos);
}

TEST(Config, SeedOverrideIsHashed) {
  const auto a = prepare_experiment(parse_config_text(kSmall));
  const auto b = prepare_experiment(parse_config_text(kSmall), 43);
  const auto c = prepare_experiment(parse_config_text(replace(kSmall, "seed = 42", "seed = 43")));
  EXPECT_EQ(a.seed, 42u);
  EXPECT_EQ(b.seed, 43u);
  EXPECT_NE(a.config_hash, b.config_hash);
  EXPECT_EQ(b.config_hash, c.config_hash);
}

TEST(Config, EveryBundledExperimentValidates) {
  ASSERT_GE(catalog().size(), 10u);
  for (const auto& entry : catalog()) {
    const auto e = prepare_experiment(catalog_config(entry.name));
    EXPECT_EQ(e.name, entry.name);
  }
  EXPECT_THROW((void)catalog_config("no_such_experiment"), Error);
}

TEST(Experiment, ReportIsDeterministic) {
  const auto e = prepare_experiment(parse_config_text(kSmall));
  const auto a = run_experiment(e);
  const auto b = run_experiment(e);
  EXPECT_EQ(a.report_text, b.report_text);
  EXPECT_EQ(a.trace_csv, b.trace_csv);
  EXPECT_EQ(a.report.at("seed").get<std::uint64_t>(), 42u);
  EXPECT_TRUE(a.report.contains("config_hash"));
  ASSERT_EQ(a.report.at("verdicts").size(), 1u);
  const auto& v = a.report.at("verdicts")[0];
  for (const char* key : {"claim", "estimate", "target", "tolerance", "pass"}) EXPECT_TRUE(v.contains(key)) << key;
  EXPECT_EQ(a.trace_csv.rfind("level,statistic,value,stderr\r\n", 0), 0u);
}

// ---------------------------------------------------------------------------
// Command-line tool

TEST_F(CliTest, RunIsByteIdenticalAcrossRunsAndThreads) {
  const auto cfg = write("small.toml", kSmall);
  std::string first_json, first_csv;
  for (const char* threads : {"1", "2", "8", "1"}) {
    const auto out = dir_ / (std::string("out") + threads);
    const auto r = run("run --config \"" + cfg.string() + "\" --threads " + threads + " --out-dir \"" + out.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("small_tail"), std::string::npos);
    const auto json = slurp(out / "small_tail.json");
    const auto csv = slurp(out / "small_tail.csv");
    ASSERT_FALSE(json.empty());
    if (first_json.empty()) {
      first_json = json;
      first_csv = csv;
    } else {
      EXPECT_EQ(json, first_json) << threads;
      EXPECT_EQ(csv, first_csv) << threads;
    }
  }
}

TEST_F(CliTest, MissingSeedIsAConfigError) {
  const auto cfg = write("noseed.toml", replace(kSmall, "seed = 42\n", ""));
  const auto r = run("run --config \"" + cfg.string() + "\" --out-dir \"" + dir_.string() + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("seed"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "small_tail.json"));
}

TEST_F(CliTest, UsageAndUnknownConfigAreConfigErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("run").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  const auto r = run("validate --config no_such_file_or_experiment");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no_such_file_or_experiment"), std::string::npos);
  EXPECT_EQ(run("--version").code, 0);
}

TEST_F(CliTest, InsufficientDataIsAStatisticalError) {
  const auto cfg = write("thin.toml", R"(name = "thin"
seed = 1
n = 1000

[generator]
type = "pareto_iid"
alpha = 1
dim = 2

[analysis]
kind = "spectral"
modulus = "max_abs"
quantile = 0.999
)");
  const auto r = run("run --config \"" + cfg.string() + "\" --out-dir \"" + dir_.string() + "\"");
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("InsufficientExceedances"), std::string::npos) << r.err;
}

TEST_F(CliTest, ListShowAndValidate) {
  const auto l = run("list");
  ASSERT_EQ(l.code, 0);
  for (const char* name : {"moduli2_ladder", "breiman_uniform", "frechet_mda"})
    EXPECT_NE(l.out.find(name), std::string::npos) << name;
  EXPECT_GE(std::count(l.out.begin(), l.out.end(), '\n'), 10);

  const auto shown = run("list --show frechet_mda");
  ASSERT_EQ(shown.code, 0);
  const auto cfg = write("copy.toml", shown.out);
  const auto v = run("validate --config \"" + cfg.string() + "\"");
  EXPECT_EQ(v.code, 0) << v.err;
  EXPECT_NE(v.out.find("frechet_mda: ok"), std::string::npos);
  EXPECT_EQ(run("validate --config moduli2_ladder").code, 0);
  EXPECT_EQ(run("list --show nothing").code, 2);
}

TEST_F(CliTest, DumpSamples) {
  const auto cfg = write("small.toml", kSmall);
  const auto r = run("dump-samples --config \"" + cfg.string() + "\" --n 5");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0].rfind("index,x0", 0), 0u);
  // The dumped values are the first draws of the experiment's own sample.
  const auto xs = sample_scalars(gen::Pareto{2.0}, 42, 5);
  EXPECT_EQ(lines[1].rfind("0," + format_number(xs[0]), 0), 0u) << lines[1];

  const auto hull = run("dump-samples --config hull_set_pipeline --n 3 --out \"" + (dir_ / "hull.csv").string() + "\"");
  ASSERT_EQ(hull.code, 0) << hull.err;
  EXPECT_EQ(slurp(dir_ / "hull.csv").rfind("index,vertex,x0,x1", 0), 0u);
}
