#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ebfission/config.hpp"
#include "ebfission/csv.hpp"
#include "ebfission/error.hpp"
#include "ebfission/fission.hpp"
#include "ebfission/harness.hpp"

namespace fs = std::filesystem;
using namespace ebfission;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RuntimeError("cannot write '" + path.string() + "'");
  return os;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

struct SimulateArgs {
  std::string config;
  CliOverrides overrides;
};

int cmd_simulate(const SimulateArgs& args) {
  const auto cli = load_cli_config(args.config, args.overrides);
  std::vector<SimulationReport> reports;
  for (const auto& exp : cli.experiments) {
    const std::string name(exp.lik.name());
    const std::size_t total = exp.mc_reps;
    reports.push_back(run_experiment(exp, [&](std::size_t rep, std::uint64_t checksum) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum));
      std::cerr << name << ": rep " << rep + 1 << "/" << total << " done (dataset " << buf << ")\n";
    }));
  }
  const fs::path out(cli.out_dir);
  ensure_dir(out);
  {
    auto os = open_output(out / "table.csv");
    write_table_csv(os, reports);
  }
  {
    auto os = open_output(out / "report.json");
    os << report_json(reports) << "\n";
  }
  std::cerr << "wrote " << (out / "table.csv").string() << " and " << (out / "report.json").string() << "\n";
  return kOk;
}

struct FigureArgs {
  std::string config;
  double g_split = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
  std::optional<std::string> scheme;
  std::size_t grid_points = 200;
};

int cmd_figure_data(const FigureArgs& args) {
  // Reject the split before touching the config so the message is about the flag.
  (void)tau_from_info_split(FissionScheme::GaussianAdditive, args.g_split);
  CliOverrides ov;
  ov.out_dir = args.out;
  const auto cli = load_cli_config(args.config, ov);
  const ExperimentConfig* chosen = &cli.experiments.front();
  if (args.scheme) {
    const auto kind = parse_likelihood_kind(*args.scheme);
    chosen = nullptr;
    for (const auto& e : cli.experiments) {
      if (e.lik.kind() == kind) {
        chosen = &e;
        break;
      }
    }
    if (!chosen) throw ConfigError("config has no " + *args.scheme + " likelihood");
  }
  const auto fig = export_figure_data(*chosen, args.g_split, args.seed, args.grid_points);
  const fs::path out(cli.out_dir);
  ensure_dir(out);
  {
    auto os = open_output(out / "scatter.csv");
    write_scatter_csv(os, fig.scatter);
  }
  {
    auto os = open_output(out / "curve.csv");
    write_curve_csv(os, fig.curve);
  }
  std::cerr << chosen->lik.name() << " tau=" << format_double(fig.fission.tau) << ": wrote "
            << fig.scatter.size() << " scatter rows and " << fig.curve.size() << " curve rows to "
            << out.string() << "\n";
  return kOk;
}

struct FissionArgs {
  std::string scheme;
  std::optional<double> tau;
  std::optional<double> g_split;
  std::string input;
  std::uint64_t seed = 0;
  std::string out = ".";
  double variance = 1.0;
};

int cmd_fission(const FissionArgs& args) {
  const auto scheme = parse_fission_scheme(args.scheme);
  FissionConfig cfg;
  if (args.tau) {
    cfg = scheme == FissionScheme::GaussianAdditive ? FissionConfig::gaussian(*args.tau, args.variance)
                                                    : FissionConfig::poisson(*args.tau);
  } else {
    cfg = FissionConfig::from_info_split(scheme, *args.g_split, args.variance);
  }
  cfg.validate();

  std::ifstream in(args.input);
  if (!in) throw ConfigError("cannot read input file '" + args.input + "'");
  const auto xs = read_csv_column(in, "x");
  const auto samples = fission_dataset(xs, cfg, args.seed);

  const fs::path out(args.out);
  ensure_dir(out);
  auto os = open_output(out / "fission.csv");
  os << "x,f,g\n";
  for (const auto& s : samples) {
    os << format_double(s.x) << ',' << format_double(s.f) << ',' << format_double(s.g) << '\n';
  }
  std::cerr << "wrote " << samples.size() << " rows to " << (out / "fission.csv").string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical Bayes via data fission: simulations and fission primitives"};
  app.require_subcommand(1);

  SimulateArgs sim;
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::size_t> sim_reps;
  std::optional<unsigned> sim_threads;
  std::optional<std::string> sim_out;
  auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo risk comparison; writes table.csv and report.json");
  simulate->add_option("--config", sim.config, "TOML experiment file")->required();
  simulate->add_option("--seed", sim_seed, "Base seed (overrides the file)");
  simulate->add_option("--mc-reps", sim_reps, "Monte Carlo replicates (overrides the file)");
  simulate->add_option("--threads", sim_threads, "Worker threads, 0 = all cores (overrides the file)");
  simulate->add_option("--out", sim_out, "Output directory (overrides the file)");

  FigureArgs fig;
  auto* figure = app.add_subcommand("figure-data", "Export one fissioned dataset, its isotonic fit, and the true mean curve");
  figure->add_option("--config", fig.config, "TOML experiment file")->required();
  figure->add_option("--g-split", fig.g_split, "Share of Fisher information carried by g")->required();
  figure->add_option("--seed", fig.seed, "Seed for the dataset and the fission draw");
  figure->add_option("--out", fig.out, "Output directory (overrides the file)");
  figure->add_option("--scheme", fig.scheme, "Likelihood to use: gaussian or poisson (default: first in the file)");
  figure->add_option("--grid-points", fig.grid_points, "Curve points for the Gaussian likelihood");

  FissionArgs fis;
  auto* fission = app.add_subcommand("fission", "Split each x of a CSV column into (f, g); writes fission.csv");
  fission->add_option("--scheme", fis.scheme, "gaussian or poisson")->required();
  auto* tau_opt = fission->add_option("--tau", fis.tau, "Fission parameter");
  auto* g_opt = fission->add_option("--g-split", fis.g_split, "Share of Fisher information carried by g");
  tau_opt->excludes(g_opt);
  fission->add_option("--input-csv", fis.input, "CSV with a numeric column named x")->required();
  fission->add_option("--seed", fis.seed, "Seed for the fission noise");
  fission->add_option("--out", fis.out, "Output directory");
  fission->add_option("--variance", fis.variance, "Gaussian noise variance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) {
      sim.overrides = CliOverrides{sim_seed, sim_reps, sim_threads, sim_out};
      return cmd_simulate(sim);
    }
    if (*figure) return cmd_figure_data(fig);
    if (!fis.tau && !fis.g_split) throw ConfigError("fission needs --tau or --g-split");
    return cmd_fission(fis);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
