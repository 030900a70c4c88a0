// mfvolterra: simulate | verify | localtime | tanaka
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 numerical error.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "mfvolterra/analysis.hpp"
#include "mfvolterra/config.hpp"
#include "mfvolterra/errors.hpp"
#include "mfvolterra/simulate.hpp"
#include "mfvolterra/tanaka.hpp"
#include "mfvolterra/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

fs::path prepare_out(const mfv::CampaignConfig& cfg, const std::string& out) {
  fs::path dir = out.empty() ? fs::path(cfg.output_dir) : fs::path(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw mfv::ConfigError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

std::ofstream open_out(const fs::path& p, bool binary = false) {
  std::ofstream f(p, binary ? std::ios::binary : std::ios::out);
  if (!f) throw mfv::ConfigError("cannot write '" + p.string() + "'");
  f.precision(17);
  return f;
}

void write_json(const fs::path& p, const json& j) {
  auto f = open_out(p);
  f << j.dump(2) << '\n';
}

mfv::PathEnsemble simulate(const mfv::CampaignConfig& cfg, const mfv::HurstFunction& h,
                           const mfv::TimeGrid& grid, int n_paths) {
  if (cfg.method == "volterra") {
    return mfv::sample_volterra(grid, h, cfg.n_sub, n_paths, cfg.seed, cfg.quadrature);
  }
  return mfv::sample_cholesky(grid, h, n_paths, cfg.seed, cfg.covariance_method, cfg.quadrature);
}

mfv::PathEnsemble load_ensemble(const std::string& file) {
  const bool binary = fs::path(file).extension() == ".bin";
  std::ifstream in(file, binary ? std::ios::binary : std::ios::in);
  if (!in) throw mfv::ConfigError("cannot open ensemble file '" + file + "'");
  return binary ? mfv::read_binary(in) : mfv::read_csv(in);
}

std::string level_tag(double a) {
  std::ostringstream os;
  os << a;
  return os.str();
}

int cmd_simulate(const mfv::CampaignConfig& cfg, const std::string& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto h = cfg.hurst();
  const auto dir = prepare_out(cfg, out);
  const auto grid = mfv::TimeGrid::uniform(cfg.horizon, cfg.grid_size);
  const auto ens = simulate(cfg, h, grid, cfg.n_paths);
  {
    auto f = open_out(dir / "ensemble.csv");
    mfv::write_csv(ens, f);
  }
  {
    auto f = open_out(dir / "ensemble.bin", true);
    mfv::write_binary(ens, f);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(dir / "manifest.json",
             {{"config", cfg.to_json()},
              {"seed", cfg.seed},
              {"method", mfv::to_string(ens.method)},
              {"covariance_method", cfg.method == "cholesky" ? mfv::to_string(cfg.covariance_method) : ""},
              {"n_paths", ens.n_paths()},
              {"n_times", ens.n_times()},
              {"hurst", ens.hurst},
              {"files", {"ensemble.csv", "ensemble.bin"}},
              {"wall_time_seconds", wall}});
  std::cout << "wrote " << ens.n_paths() << " paths x " << ens.n_times() << " times to "
            << dir.string() << '\n';
  return kOk;
}

int cmd_verify(const mfv::CampaignConfig& cfg, const std::string& suite_opt, const std::string& out) {
  std::vector<std::string> suites = suite_opt.empty() ? cfg.suites : std::vector{suite_opt};
  if (std::find(suites.begin(), suites.end(), "all") != suites.end()) suites = {"all"};
  mfv::VerifyReport report;
  for (const auto& s : suites) {
    auto part = mfv::run_verify(cfg, s);
    report.suite = report.suite.empty() ? s : report.suite + "+" + s;
    report.phi_constant = part.phi_constant;
    report.elapsed_seconds += part.elapsed_seconds;
    report.checks.insert(report.checks.end(), part.checks.begin(), part.checks.end());
  }
  const auto dir = prepare_out(cfg, out);
  write_json(dir / "verify_report.json", report.to_json(cfg));
  for (const auto& c : report.checks) {
    std::cout << (c.skipped ? "SKIP" : c.pass ? "PASS" : "FAIL") << "  " << c.suite << '.' << c.name;
    if (!c.skipped) std::cout << "  value=" << c.value << ' ' << c.relation << ' ' << c.tolerance;
    if (!c.pass || c.skipped) std::cout << "  (" << c.detail << ')';
    std::cout << '\n';
  }
  std::cout << (report.pass() ? "verify: all checks passed" : "verify: " + std::to_string(report.failed()) + " check(s) failed")
            << " (" << std::fixed << std::setprecision(1) << report.elapsed_seconds << " s)\n";
  return report.pass() ? kOk : kVerifyFailed;
}

int cmd_localtime(const mfv::CampaignConfig& cfg, const std::string& out) {
  const auto h = cfg.hurst();
  const auto dir = prepare_out(cfg, out);
  const mfv::PathEnsemble ens =
      cfg.ensemble_file ? load_ensemble(*cfg.ensemble_file)
                        : simulate(cfg, h, mfv::TimeGrid::uniform(cfg.horizon, cfg.grid_size),
                                   std::max(1, cfg.path_index + 1));
  if (cfg.path_index >= ens.n_paths()) {
    throw mfv::ConfigError("path_index " + std::to_string(cfg.path_index) + " but the ensemble has " +
                           std::to_string(ens.n_paths()) + " paths");
  }
  const auto& grid = ens.grid;
  std::vector<double> path(static_cast<std::size_t>(ens.n_times()));
  for (Eigen::Index i = 0; i < ens.n_times(); ++i) path[static_cast<std::size_t>(i)] = ens.paths(cfg.path_index, i);
  const mfv::Bins bins =
      cfg.bin_width ? mfv::Bins::with_width(path, *cfg.bin_width) : mfv::Bins::freedman_diaconis(path);
  std::vector<double> checkpoints;
  const int n_check = std::min<int>(cfg.checkpoints, static_cast<int>(grid.size()) - 1);
  for (int k = 1; k <= n_check; ++k) {
    checkpoints.push_back(grid[static_cast<std::size_t>((grid.size() - 1) * k / n_check)]);
  }
  const auto lt = mfv::local_time_binned(path, grid, bins, checkpoints);
  {
    auto f = open_out(dir / "localtime.csv");
    mfv::write_csv(lt, f);
  }
  std::cout << "wrote localtime.csv (" << bins.count() << " bins, " << checkpoints.size()
            << " checkpoints)\n";
  if (!h.differentiable()) {
    std::cerr << "warning: h is not differentiable; weighted local time skipped\n";
    return kOk;
  }
  for (double a : cfg.levels) {
    if (bins.locate(a) < 0) {
      std::cerr << "warning: level " << a << " lies outside the bins; skipped\n";
      continue;
    }
    const auto w = mfv::weighted_local_time(path, grid, a, h, bins, checkpoints, cfg.convention);
    const std::string name = "weighted_localtime_a" + level_tag(a) + ".csv";
    auto f = open_out(dir / name);
    f << "t,weighted_local_time\n";
    for (std::size_t k = 0; k < w.checkpoints.size(); ++k) f << w.checkpoints[k] << ',' << w.values[k] << '\n';
    std::cout << "wrote " << name << " (" << mfv::to_string(cfg.convention) << ")\n";
  }
  return kOk;
}

int cmd_tanaka(const mfv::CampaignConfig& cfg, const std::string& out) {
  const auto h = cfg.hurst();
  if (!h.differentiable()) throw mfv::ConfigError("tanaka needs a differentiable hurst function");
  const auto dir = prepare_out(cfg, out);
  if (cfg.n_paths < mfv::kMinMonteCarloPaths) {
    write_json(dir / "tanaka.json",
               {{"pass", false},
                {"error", "insufficient sample: need at least " +
                              std::to_string(mfv::kMinMonteCarloPaths) + " paths"}});
    std::cerr << "insufficient sample: need at least " << mfv::kMinMonteCarloPaths << " paths\n";
    return kVerifyFailed;
  }
  const auto grid = mfv::TimeGrid::uniform(cfg.horizon, 1025);
  const auto ens = simulate(cfg, h, grid, cfg.n_paths);
  json checks = json::array();
  bool all = true;
  for (double a : cfg.levels) {
    for (double eps : cfg.epsilon) {
      for (double t : {0.5 * cfg.horizon, cfg.horizon}) {
        const auto c = mfv::tanaka_expectation_identity(ens, h, a, eps, t, cfg.quadrature);
        all = all && c.pass;
        checks.push_back({{"a", c.a},
                          {"eps", c.eps},
                          {"t", c.t},
                          {"mc_mean", c.mc_mean},
                          {"mc_se", c.mc_se},
                          {"deterministic", c.deterministic},
                          {"pass", c.pass}});
        std::cout << (c.pass ? "PASS" : "FAIL") << "  a=" << a << " eps=" << eps << " t=" << t
                  << "  mc=" << c.mc_mean << " +- " << c.mc_se << "  deterministic=" << c.deterministic
                  << '\n';
      }
    }
  }
  write_json(dir / "tanaka.json",
             {{"pass", all}, {"n_paths", cfg.n_paths}, {"grid_points", 1025}, {"checks", checks}});
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for a Volterra-type multifractional Gaussian process"};
  app.require_subcommand(1);
  std::string config_path, suite, out;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "campaign configuration (JSON)")->required();
    sub->add_option("--out", out, "output directory (overrides output_dir)");
  };
  auto* sim = app.add_subcommand("simulate", "sample an ensemble and write CSV, binary and manifest");
  auto* ver = app.add_subcommand("verify", "run verification suites and write a JSON report");
  auto* loc = app.add_subcommand("localtime", "local time field and weighted local time CSVs");
  auto* tan = app.add_subcommand("tanaka", "expectation identity of the weighted Tanaka formula");
  for (auto* s : {sim, ver, loc, tan}) add_common(s);
  ver->add_option("--suite", suite, "covariance, moments, lass, holder, berman, lnd, localtime, tanaka or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    const auto cfg = mfv::load_config(config_path);
    if (sim->parsed()) return cmd_simulate(cfg, out);
    if (ver->parsed()) return cmd_verify(cfg, suite, out);
    if (loc->parsed()) return cmd_localtime(cfg, out);
    return cmd_tanaka(cfg, out);
  } catch (const mfv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const mfv::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const mfv::InsufficientSampleError& e) {
    std::cerr << e.what() << '\n';
    return kVerifyFailed;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  }
}
