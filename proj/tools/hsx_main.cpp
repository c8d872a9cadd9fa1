// Command-line driver: evolve scenarios through the quantile-side flow,
// export the solution surface and reconstructed states, compute the
// Wasserstein-based stability metric, and run the invariant sweeps.
//
//   hsx solve delta:alpha=1 --times 0,0.25,0.5 --eta-samples 5 --format csv
//   hsx metric delta:alpha=1 delta:alpha=2 --times 0,1,2,4
//   hsx verify lipschitz --seed 7
//
// Exit codes: 0 success / all bounds hold, 1 stability bound violated,
// 2 usage error, 3 domain error (unknown scenario, divergent tails, ...).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsx/serialize.hpp"
#include "hsx/verify.hpp"

namespace {

std::vector<double> parse_times(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw hsx::ArgumentError("bad time value: " + item);
    }
    if (used != item.size())
      throw hsx::ArgumentError("bad time value: " + item);
    if (v < 0) throw hsx::ArgumentError("negative time: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw hsx::ArgumentError("no times given");
  return out;
}

struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw hsx::ArgumentError("cannot open output file: " + path);
      stream = &file;
    }
  }
  std::ostream& out() { return *stream; }
};

int cmd_solve(const std::string& scenario_text, const std::string& times_csv,
              int eta_samples, const std::string& format,
              const std::string& out_path) {
  const auto times = parse_times(times_csv);
  const auto scenario = hsx::parse_scenario(scenario_text, eta_samples);
  auto ts0 = scenario.transport0;
  try {
    ts0 = hsx::extend_by_continuity(ts0);
  } catch (const hsx::InfiniteBoundaryError&) {
    // unbounded support on both sides: tabulate the interior only
  }
  const auto rows = hsx::solution_surface(ts0, times, eta_samples);

  Output output(out_path);
  auto& os = output.out();
  if (format == "csv") {
    os << hsx::surface_csv_header() << "\n";
    for (const auto& r : rows) os << hsx::surface_csv_row(r) << "\n";
    for (double t : times) {
      const auto state = hsx::reconstruct_eulerian(hsx::evolve(ts0, t));
      os << "\n# state t=" << hsx::fmt17(t) << "\n";
      os << "record,a,b,p1,p2\n";
      const auto pieces = hsx::u_pieces_json(state.u);
      for (const auto& p : pieces) {
        auto str = [](const nlohmann::json& v) {
          return v.is_string() ? v.get<std::string>()
                               : hsx::fmt17(v.get<double>());
        };
        os << "u_piece," << str(p[0]) << "," << str(p[1]) << ","
           << hsx::fmt17(p[3].get<double>()) << ","
           << hsx::fmt17(p[4].get<double>()) << "\n";
      }
      for (const auto& a : state.mu.atoms())
        os << "atom," << hsx::fmt17(a.x) << "," << hsx::fmt17(a.mass)
           << ",,\n";
      for (const auto& d : state.mu.density())
        os << "density," << hsx::fmt17(d.a) << "," << hsx::fmt17(d.b) << ","
           << hsx::fmt17(d.value) << ",\n";
    }
  } else {
    nlohmann::json doc;
    doc["scenario"] = scenario.name;
    doc["surface"] = nlohmann::json::array();
    for (const auto& r : rows)
      doc["surface"].push_back({{"t", r.t}, {"eta", r.eta}, {"chi", r.chi},
                                {"U", r.U}});
    doc["states"] = nlohmann::json::array();
    for (double t : times) {
      const auto state = hsx::reconstruct_eulerian(hsx::evolve(ts0, t));
      auto j = hsx::to_json(state);
      j["t"] = t;
      doc["states"].push_back(std::move(j));
    }
    os << doc.dump(2) << "\n";
  }
  return 0;
}

int cmd_metric(const std::string& a_text, const std::string& b_text,
               const std::string& times_csv, int eta_samples,
               const std::string& format, const std::string& out_path) {
  const auto times = parse_times(times_csv);
  const auto a = hsx::parse_scenario(a_text, eta_samples);
  const auto b = hsx::parse_scenario(b_text, eta_samples);
  const auto reports = hsx::verify_lipschitz(a.initial, b.initial, times);

  Output output(out_path);
  auto& os = output.out();
  if (format == "csv") {
    os << hsx::metric_csv_header() << "\n";
    for (const auto& r : reports) os << hsx::metric_csv_row(r) << "\n";
  } else {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : reports) doc.push_back(hsx::to_json(r));
    os << doc.dump(2) << "\n";
  }
  for (const auto& r : reports)
    if (!r.satisfied) return 1;
  return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
  const auto results = hsx::run_verify(suite, seed);
  std::printf("%-14s %-42s %7s %12s %10s %s\n", "suite", "property", "cases",
              "max_err", "tol", "status");
  bool all = true;
  for (const auto& r : results) {
    std::printf("%-14s %-42s %7d %12.3e %10.1e %s\n", r.suite.c_str(),
                r.name.c_str(), r.cases, r.max_err, r.tol,
                r.pass() ? "PASS" : "FAIL");
    all = all && r.pass();
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conservative Hunter-Saxton solutions via quantile transforms"};
  app.require_subcommand(1);

  std::string scenario_a, scenario_b, times = "0", format = "csv", out_path;
  int eta_samples = 4096;
  std::uint64_t seed = 42;
  std::string suite;

  auto* solve = app.add_subcommand("solve", "evolve a scenario and export it");
  solve->add_option("scenario", scenario_a, "scenario, e.g. delta:alpha=1")
      ->required();
  solve->add_option("--times", times, "comma-separated times (default 0)");
  solve->add_option("--eta-samples", eta_samples,
                    "surface samples / sampling grid (default 4096)");
  solve->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  solve->add_option("--out", out_path, "output path (default stdout)");

  auto* metric = app.add_subcommand(
      "metric", "stability metric between two scenarios over time");
  metric->add_option("a", scenario_a, "first scenario")->required();
  metric->add_option("b", scenario_b, "second scenario")->required();
  metric->add_option("--times", times, "comma-separated times (default 0)");
  metric->add_option("--eta-samples", eta_samples,
                     "sampling grid for smooth scenarios (default 4096)");
  metric->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  metric->add_option("--out", out_path, "output path (default stdout)");

  auto* verify = app.add_subcommand("verify", "run invariant sweeps");
  verify
      ->add_option("suite", suite,
                   "roundtrip | ode | conservation | lipschitz | all")
      ->required()
      ->check(CLI::IsMember(
          {"roundtrip", "ode", "conservation", "lipschitz", "all"}));
  verify->add_option("--seed", seed, "random seed (default 42)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed())
      return cmd_solve(scenario_a, times, eta_samples, format, out_path);
    if (metric->parsed())
      return cmd_metric(scenario_a, scenario_b, times, eta_samples, format,
                        out_path);
    return cmd_verify(suite, seed);
  } catch (const hsx::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
