// mroot: evaluate and classify m-th root Finsler metrics from a metric file.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mroot/mroot.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mroot::UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate and classify m-th root Finsler metrics"};
  app.set_version_flag("--version", std::string(mroot::tool_version));

  std::string command;
  std::string metric_path;
  std::string out_path;
  std::optional<double> tol;
  std::optional<std::size_t> fan;
  std::optional<std::size_t> bases;
  std::optional<std::uint64_t> seed;
  std::vector<double> x0, y0;
  mroot::CommandOptions opt;

  app.add_option("command", command, "Command to run")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(mroot::command_names),
                                                     std::end(mroot::command_names))));
  app.add_option("metric", metric_path, "Metric definition file")->required();
  app.add_option("--tol", tol, "Residual tolerance override");
  app.add_option("--fan", fan, "Directions per base point (default 4 n^2)");
  app.add_option("--bases", bases, "Number of seeded base points (default 8)");
  app.add_option("--seed", seed, "Seed for base points and direction fans");
  app.add_option("--out", out_path, "Write the JSON report to this path");
  app.add_option("--x0", x0, "Geodesic start point, comma separated")->delimiter(',');
  app.add_option("--y0", y0, "Geodesic start velocity, comma separated")->delimiter(',');
  app.add_option("--t-end", opt.t_end, "Geodesic end time");
  app.add_option("--steps", opt.steps, "Geodesic RK4 steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mroot::exit_input_error;
  }

  opt.tol = tol;
  opt.fan = fan;
  opt.bases = bases;
  opt.seed = seed;
  if (!x0.empty()) opt.x0 = mroot::to_vec(x0);
  if (!y0.empty()) opt.y0 = mroot::to_vec(y0);

  try {
    const mroot::MetricFile file = mroot::parse_metric_file(read_file(metric_path));
    const mroot::Report report = mroot::run_command(command, file, opt);
    const std::string table = mroot::verdict_table(report.verdicts);
    if (command == "geodesic") {
      std::cout << report.csv;
      std::cerr << table;
    } else {
      std::cout << table;
    }
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw mroot::UsageError("cannot write '" + out_path + "'");
      out << mroot::to_json_text(report.doc);
    }
    return report.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mroot::exit_code_for(e);
  }
}
