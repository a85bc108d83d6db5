#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mroot/mroot.hpp"
#include "support/corpus.hpp"

using namespace mroot;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "mroot_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_scratch(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MROOT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string funk_at_origin() {
  return corpus::read_text(corpus::metrics_path("funk1")) +
         "probe = 0 ; 1\nprobe = 0 ; -1\nprobe = 0 ; 2\n";
}

}  // namespace

TEST(Cli, IdentitiesOnEuclidPass) {
  const fs::path out = scratch_dir() / "euclid_identities.json";
  EXPECT_EQ(run_cli("identities " + corpus::metrics_path("euclid2") + " --out " + out.string()),
            0);
  const auto j = nlohmann::json::parse(corpus::read_text(out.string()));
  EXPECT_EQ(j["command"], "identities");
  EXPECT_EQ(j["exit_code"], 0);
  for (const auto& v : j["verdicts"]) EXPECT_LE(v["residual"].get<double>(), 1e-15);
}

TEST(Cli, DuallyFlatFunkReportsTheta) {
  const fs::path metric = write_scratch("funk_origin.metric", funk_at_origin());
  const fs::path out = scratch_dir() / "funk_df.json";
  EXPECT_EQ(run_cli("classify-dually-flat " + metric.string() + " --out " + out.string()), 0);
  const auto j = nlohmann::json::parse(corpus::read_text(out.string()));
  EXPECT_NEAR(j["payload"]["theta"][0]["theta"][0].get<double>(), 2.0, 1e-6);
}

TEST(Cli, PayloadEqualsLibraryResultExactly) {
  const std::string text = funk_at_origin();
  const fs::path metric = write_scratch("funk_origin2.metric", text);
  const fs::path out = scratch_dir() / "funk_df2.json";
  ASSERT_EQ(run_cli("classify-dually-flat " + metric.string() + " --out " + out.string()), 0);
  const auto j = nlohmann::json::parse(corpus::read_text(out.string()));

  const MetricFile file = parse_metric_file(text);
  const Verdict v = recover_theta(file.field, group_probes(file.config.probes), 1e-7);
  EXPECT_EQ(j["payload"]["theta"][0]["theta"][0].get<double>(),
            std::get<OneForm>(v.payload).theta[0](0));
  EXPECT_EQ(j["verdicts"][2]["residual"].get<double>(), v.residual);

  const Report r = run_command("classify-dually-flat", file);
  EXPECT_EQ(to_json_text(r.doc), corpus::read_text(out.string()));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("classify-dually-flat " + corpus::metrics_path("funk1")), 0);
  EXPECT_EQ(run_cli("classify-dually-flat " + corpus::metrics_path("quartic2_scaled")), 1);
  EXPECT_EQ(run_cli("classify-dually-flat " + corpus::metrics_path("funk1_perturbed")), 0);
  EXPECT_EQ(run_cli("classify-isotropic " + corpus::metrics_path("funk1")), 2);
  EXPECT_EQ(run_cli("identities " + corpus::metrics_path("quartic2_degenerate")), 3);
  const fs::path bad = write_scratch("bad.metric", "n = 2\nm = 2\nbox.1 = -1, 1\nbox.2 = -1, 1\n3 3 : 1\n");
  EXPECT_EQ(run_cli("identities " + bad.string()), 2);
  EXPECT_EQ(run_cli("identities /nonexistent/file.metric"), 2);
  EXPECT_EQ(run_cli("no-such-command " + corpus::metrics_path("euclid2")), 2);
  EXPECT_EQ(run_cli("identities " + corpus::metrics_path("euclid2") + " --tol notanumber"), 2);
}

TEST(Cli, ReportAllIsDeterministic) {
  for (const char* name : {"euclid2", "cubic3"}) {
    const fs::path a = scratch_dir() / (std::string(name) + "_a.json");
    const fs::path b = scratch_dir() / (std::string(name) + "_b.json");
    const std::string args = "report-all " + corpus::metrics_path(name) + " --seed 5 --bases 3 --out ";
    const int rc1 = run_cli(args + a.string());
    const int rc2 = run_cli(args + b.string());
    EXPECT_EQ(rc1, rc2);
    const std::string ta = corpus::read_text(a.string());
    EXPECT_FALSE(ta.empty());
    EXPECT_EQ(ta, corpus::read_text(b.string()));
  }
}

TEST(Cli, SeedChangesProbes) {
  const MetricFile file = corpus::load("quartic2_scaled");
  CommandOptions a, b;
  a.seed = 1;
  b.seed = 2;
  EXPECT_NE(to_json_text(run_command("spray", file, a).doc),
            to_json_text(run_command("spray", file, b).doc));
}

TEST(Cli, GeodesicCsv) {
  const fs::path csv = scratch_dir() / "funk_geodesic.csv";
  const std::string cmd = std::string(MROOT_CLI_PATH) + " geodesic " +
                          corpus::metrics_path("funk1") +
                          " --x0 0 --y0 1 --t-end 0.5 --steps 100 > " + csv.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
  const std::string text = corpus::read_text(csv.string());
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,x1,y1,F");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 102);
}

TEST(Cli, GeodesicNeedsStart) {
  EXPECT_EQ(run_cli("geodesic " + corpus::metrics_path("funk1")), 2);
}

TEST(Report, FloatsUseSeventeenDigits) {
  Json j;
  j["a"] = 0.1;
  j["b"] = 3;
  j["c"] = Json::array({1.0, -2.5e-300});
  EXPECT_EQ(to_json_text(j),
            "{\n  \"a\": 0.10000000000000001,\n  \"b\": 3,\n  \"c\": [\n    1,\n    "
            "-2.5e-300\n  ]\n}\n");
  EXPECT_NO_THROW(nlohmann::json::parse(to_json_text(j)));
}
