// Command-line driver: correlation sweeps, mixture tables, detection and
// PR-box sweeps, and the acceptance suite.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "ghzsim/commands.hpp"

namespace {

constexpr const char* angle_help =
    "Angles are in units of pi: 0.25 means pi/4. A single value is a setting sum, split at random "
    "over the parties; a:b:c gives every party's setting explicitly.";

/// Opens --out, or returns stdout when it is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool to_file() const { return file_ != nullptr; }
  void close() {
    if (!file_) {
      std::cout.flush();
      return;
    }
    file_->close();
    if (!*file_) throw std::runtime_error("error writing output file");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void add_run_options(CLI::App& cmd, ghzsim::RunConfig& cfg, std::string& out) {
  cmd.add_option("--phi", cfg.phi, std::string("Grid points, repeatable. ") + angle_help)->delimiter(',');
  cmd.add_option("--grid", cfg.grid, "Number of sums evenly spaced over [0, 2pi] when --phi is absent")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--trials", cfg.trials, "Trials per grid point")->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_option("--seed", cfg.seed, "64-bit seed")->capture_default_str();
  cmd.add_option("--lanes", cfg.lanes, "Worker threads; results do not depend on it")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--epsilon", cfg.epsilon, "Certified tail bound of the mixture table")->capture_default_str();
  cmd.add_option("--out", out, "CSV output file (default: standard output)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical simulation of tripartite GHZ correlations"};
  app.require_subcommand(1);
  app.footer(angle_help);

  ghzsim::SweepConfig sweep;
  std::string protocol = "p2", detection_seed = "v1tripleprime", out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Estimate <alpha beta gamma> over a grid of setting sums");
  add_run_options(*sweep_cmd, sweep, out);
  sweep_cmd->add_option("--protocol", protocol, "p1, p2, v1prime, v1doubleprime, v1tripleprime, twobit, nparty, boxes, detect")
      ->capture_default_str();
  sweep_cmd->add_option("--n-parties", sweep.n_parties, "Number of parties (nparty only)")->capture_default_str();
  sweep_cmd->add_option("--detection-seed", detection_seed, "Protocol behind the detection model (detect only)")
      ->capture_default_str();

  ghzsim::CoeffsConfig coeffs;
  std::int64_t m_max = 0;
  auto* coeffs_cmd = app.add_subcommand("coeffs", "Emit the E1 Fourier coefficients and mixture weights");
  auto* m_max_opt = coeffs_cmd->add_option("--m-max", m_max, "Largest odd harmonic to tabulate");
  coeffs_cmd->add_option("--epsilon", coeffs.epsilon, "Smallest table whose certified tail is below this")
      ->capture_default_str();
  coeffs_cmd->add_option("--out", out, "CSV output file (default: standard output)");

  ghzsim::SweepConfig detect;
  auto* detect_cmd = app.add_subcommand("detect", "Detection rates and conditional correlation of the detection model");
  add_run_options(*detect_cmd, detect, out);
  detect_cmd->add_option("--detection-seed", detection_seed, "p1, v1prime, v1doubleprime or v1tripleprime")
      ->capture_default_str();

  ghzsim::RunConfig boxes;
  auto* boxes_cmd = app.add_subcommand("boxes", "Zero-communication simulation with 8 PR boxes");
  add_run_options(*boxes_cmd, boxes, out);

  ghzsim::AcceptanceConfig verify;
  std::string level = "fast";
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite");
  verify_cmd->add_option("--level", level, "fast (1e5 trials per check) or full (1e6)")->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "64-bit seed")->capture_default_str();
  verify_cmd->add_option("--lanes", verify.lanes, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep_cmd) {
      sweep.protocol = ghzsim::parse_protocol(protocol);
      sweep.detection_seed = ghzsim::parse_detection_seed(detection_seed);
      Output o(out);
      ghzsim::cmd_sweep(sweep, o.stream());
      o.close();
    } else if (*coeffs_cmd) {
      if (*m_max_opt) coeffs.m_max = m_max;
      Output o(out);
      // keep the summary off the CSV stream
      ghzsim::cmd_coeffs(coeffs, o.stream(), o.to_file() ? std::cout : std::cerr);
      o.close();
    } else if (*detect_cmd) {
      detect.detection_seed = ghzsim::parse_detection_seed(detection_seed);
      Output o(out);
      ghzsim::cmd_detect(detect, o.stream());
      o.close();
    } else if (*boxes_cmd) {
      Output o(out);
      ghzsim::cmd_boxes(boxes, o.stream());
      o.close();
    } else if (*verify_cmd) {
      verify.level = ghzsim::parse_level(level);
      const auto start = std::chrono::steady_clock::now();
      const bool ok = ghzsim::cmd_verify(verify, std::cout);
      std::cerr << "elapsed "
                << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s\n";
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "ghzsim: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
