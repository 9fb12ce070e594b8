// adapca: run the toy and dataset PCA experiments and the regret-bound audits.
//
//   adapca toy     [--n 20 --k 2 --intervals 3 --samples 200 --rank 2 --eta 1 --alpha 1e-5]
//   adapca dataset --input faces.csv [--k 2 --eta 5 --alpha 1e-4 --segments 20]
//   adapca audit   --suite experts|pca|var-unit|var-simplex [--trials N --adversary random|zero]
//
// Every subcommand accepts --config FILE with key=value lines; a flag given
// on the command line wins over the file, which wins over the default.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 audit failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "adapca/adapca.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAudit = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// key=value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(row) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

// Applies file values to options that were not given on the command line.
void apply_config(CLI::App& command, const std::string& path) {
  for (const auto& [key, value] : read_config(path)) {
    if (key == "config") continue;
    CLI::Option* option = command.get_option_no_throw("--" + key);
    if (option == nullptr) throw UsageError("unknown key '" + key + "' in " + path);
    if (option->count() > 0) continue;
    if (option->get_expected_min() == 0) {
      const std::string v = CLI::detail::to_lower(value);
      if (v == "true" || v == "1" || v == "yes" || v == "on") option->add_result("true");
      else if (v == "false" || v == "0" || v == "no" || v == "off") option->add_result("false");
      else throw UsageError("key '" + key + "' expects true or false");
    } else {
      option->add_result(value);
    }
    try {
      option->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("bad value for '" + key + "' in " + path + ": " + e.what());
    }
  }
}

void print_summary(const adapca::RegretReport& report) {
  std::printf("T=%lld n=%lld k=%lld\n", static_cast<long long>(report.horizon), static_cast<long long>(report.n),
              static_cast<long long>(report.k));
  std::printf("%-18s %16s %16s", "algorithm", "cum_expected", "cum_sampled");
  if (report.has_regret) std::printf(" %14s %14s  %s", "static_regret", "adaptive_regret", "interval");
  std::printf("\n");
  for (const auto& a : report.algorithms) {
    std::printf("%-18s %16.6f %16.6f", a.name.c_str(), a.total_expected(), a.total_sampled());
    if (report.has_regret) {
      std::printf(" %14.6f %14.6f  [%lld, %lld]", a.static_regret, a.adaptive.value,
                  static_cast<long long>(a.adaptive.interval.first),
                  static_cast<long long>(a.adaptive.interval.last));
    }
    std::printf("\n");
  }
  std::printf("best fixed projection loss:  %.6f\n", report.best_fixed_loss);
  std::printf("per-segment oracle loss:     %.6f (%zu segments)\n", report.segment_oracle_loss,
              report.segments.size());
}

void write_outputs(const adapca::RegretReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw adapca::Error("cannot create output directory '" + out_dir + "': " + ec.message());
  const fs::path losses = fs::path(out_dir) / "losses.csv";
  std::ofstream loss_file(losses, std::ios::binary);
  if (!loss_file) throw adapca::Error("cannot write '" + losses.string() + "'");
  adapca::write_loss_csv(report, loss_file);
  std::printf("wrote %s\n", losses.string().c_str());
  if (report.has_regret) {
    const fs::path regret = fs::path(out_dir) / "regret.csv";
    std::ofstream regret_file(regret, std::ios::binary);
    if (!regret_file) throw adapca::Error("cannot write '" + regret.string() + "'");
    adapca::write_regret_csv(report, regret_file);
    std::printf("wrote %s\n", regret.string().c_str());
  }
}

struct Common {
  std::string out_dir = ".";
  std::string config;
  std::uint64_t seed = 42;
  double eta = 1.0;
  double alpha = 1e-5;
  long long k = 2;
};

void add_common(CLI::App& command, Common& common) {
  command.add_option("--out-dir", common.out_dir, "Directory for losses.csv and regret.csv")->capture_default_str();
  command.add_option("--seed", common.seed, "Random seed")->capture_default_str();
  command.add_option("--eta", common.eta, "Learning rate")->capture_default_str();
  command.add_option("--alpha", common.alpha, "Fixed-share rate")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  command.add_option("--k", common.k, "Rank of the projection")->capture_default_str();
  command.add_option("--config", common.config, "File of key=value defaults");
}

int run_report(const adapca::ExperimentConfig& config, const std::string& out_dir) {
  adapca::validate(config);
  const adapca::RegretReport report = adapca::run_experiment(config);
  print_summary(report);
  write_outputs(report, out_dir);
  return 0;
}

const char* suite_name(adapca::AuditSuite suite) {
  switch (suite) {
    case adapca::AuditSuite::kExperts: return "experts";
    case adapca::AuditSuite::kPca: return "pca";
    case adapca::AuditSuite::kUnitVariance: return "var-unit";
    case adapca::AuditSuite::kSimplexVariance: return "var-simplex";
  }
  return "?";
}

const char* bound_formula(const std::string& label) {
  if (label == "var-simplex") return "2*sqrt(2L(ln((1+T)n)+1)) + 2 ln((1+T)n)";
  if (label == "var-unit/horizon") return "(ln(n/alpha) + T ln(1/(1-alpha)))/eta + eta T/2";
  return "sqrt(2 L D) + D";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online adaptive PCA experiments and regret audits"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common toy_common;
  adapca::ExperimentConfig toy;
  bool toy_no_regret = false;
  CLI::App* toy_cmd = app.add_subcommand("toy", "Piecewise-stationary synthetic stream");
  add_common(*toy_cmd, toy_common);
  toy_cmd->add_option("--n", toy.n, "Dimension")->capture_default_str();
  toy_cmd->add_option("--intervals", toy.intervals, "Number of stationary intervals")->capture_default_str();
  toy_cmd->add_option("--samples", toy.samples_per_interval, "Samples per interval")->capture_default_str();
  toy_cmd->add_option("--rank", toy.rank, "Rank of each interval's covariance")->capture_default_str();
  toy_cmd->add_flag("--no-regret", toy_no_regret, "Skip the interval regret scan");

  Common data_common;
  data_common.eta = 5.0;
  data_common.alpha = 1e-4;
  adapca::ExperimentConfig dataset;
  dataset.scenario = adapca::Scenario::kDataset;
  bool data_no_regret = false;
  CLI::App* data_cmd = app.add_subcommand("dataset", "Stream the rows of a numeric CSV");
  add_common(*data_cmd, data_common);
  data_cmd->add_option("--input", dataset.input_path, "CSV file, one sample per row");
  data_cmd->add_option("--segments", dataset.segments, "Equal segments for the per-segment oracle")
      ->capture_default_str();
  data_cmd->add_flag("--no-regret", data_no_regret, "Skip the interval regret scan");

  std::string suite_text;
  std::string adversary_text = "random";
  int trials = 0;
  long long audit_n = 0;
  long long audit_k = 0;
  long long audit_horizon = 0;
  std::uint64_t audit_seed = 42;
  std::string audit_config;
  CLI::App* audit_cmd = app.add_subcommand("audit", "Check measured adaptive regret against the bounds");
  audit_cmd->add_option("--suite", suite_text, "experts | pca | var-unit | var-simplex")
      ->required()
      ->check(CLI::IsMember({"experts", "pca", "var-unit", "var-simplex"}));
  audit_cmd->add_option("--trials", trials, "Number of random instances (suite default if omitted)");
  audit_cmd->add_option("--seed", audit_seed, "Random seed")->capture_default_str();
  audit_cmd->add_option("--adversary", adversary_text, "random | zero")
      ->capture_default_str()
      ->check(CLI::IsMember({"random", "zero"}));
  audit_cmd->add_option("--n", audit_n, "Dimension (suite default if omitted)");
  audit_cmd->add_option("--k", audit_k, "Subset or projection rank (suite default if omitted)");
  audit_cmd->add_option("--horizon", audit_horizon, "Stream length T (suite default if omitted)");
  audit_cmd->add_option("--config", audit_config, "File of key=value defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (toy_cmd->parsed()) {
      if (!toy_common.config.empty()) apply_config(*toy_cmd, toy_common.config);
      toy.scenario = adapca::Scenario::kToySwitching;
      toy.k = toy_common.k;
      toy.eta = toy_common.eta;
      toy.alpha = toy_common.alpha;
      toy.seed = toy_common.seed;
      toy.compute_regret = !toy_no_regret;
      try {
        adapca::validate(toy);
      } catch (const adapca::InvalidInput& e) {
        throw UsageError(e.what());
      }
      return run_report(toy, toy_common.out_dir);
    }

    if (data_cmd->parsed()) {
      if (!data_common.config.empty()) apply_config(*data_cmd, data_common.config);
      if (dataset.input_path.empty()) throw UsageError("dataset needs --input");
      dataset.k = data_common.k;
      dataset.eta = data_common.eta;
      dataset.alpha = data_common.alpha;
      dataset.seed = data_common.seed;
      dataset.compute_regret = !data_no_regret;
      // n comes from the file; check the remaining fields before loading it.
      adapca::ExperimentConfig probe = dataset;
      probe.n = dataset.k + 1;
      try {
        adapca::validate(probe);
      } catch (const adapca::InvalidInput& e) {
        throw UsageError(e.what());
      }
      const adapca::DataStream data = adapca::load_matrix_csv(dataset.input_path);
      if (data.empty()) throw adapca::Error("'" + dataset.input_path + "' contains no rows");
      dataset.n = data.front().size();
      const adapca::RegretReport report = adapca::run_experiment(dataset, data);
      print_summary(report);
      write_outputs(report, data_common.out_dir);
      return 0;
    }

    if (audit_cmd->parsed()) {
      if (!audit_config.empty()) apply_config(*audit_cmd, audit_config);
      const std::map<std::string, adapca::AuditSuite> suites = {
          {"experts", adapca::AuditSuite::kExperts},
          {"pca", adapca::AuditSuite::kPca},
          {"var-unit", adapca::AuditSuite::kUnitVariance},
          {"var-simplex", adapca::AuditSuite::kSimplexVariance}};
      const auto found = suites.find(suite_text);
      if (found == suites.end()) throw UsageError("unknown suite '" + suite_text + "'");
      const adapca::AuditSuite suite = found->second;
      adapca::AuditSettings settings = adapca::default_audit_settings(suite);
      if (trials > 0) settings.trials = trials;
      if (audit_n > 0) settings.n = audit_n;
      if (audit_k > 0) settings.k = audit_k;
      if (audit_horizon > 0) settings.horizon = audit_horizon;
      settings.seed = audit_seed;
      settings.adversary = adversary_text == "zero" ? adapca::Adversary::kZero : adapca::Adversary::kRandom;
      if (settings.trials < 1 || settings.horizon < 1 || settings.horizon > adapca::kMaxRegretHorizon) {
        throw UsageError("need trials >= 1 and 1 <= horizon <= " + std::to_string(adapca::kMaxRegretHorizon));
      }
      if (suite == adapca::AuditSuite::kExperts || suite == adapca::AuditSuite::kPca) {
        if (settings.k < 1 || settings.k >= settings.n) throw UsageError("need 1 <= k < n");
      } else if (settings.n < 1) {
        throw UsageError("need n >= 1");
      }

      std::printf("suite %s: n=%lld k=%lld T=%lld trials=%d seed=%llu adversary=%s\n", suite_name(suite),
                  static_cast<long long>(settings.n), static_cast<long long>(settings.k),
                  static_cast<long long>(settings.horizon), settings.trials,
                  static_cast<unsigned long long>(settings.seed), adversary_text.c_str());
      const std::vector<adapca::BoundCheck> checks = adapca::run_audit(suite, settings);
      std::string last_label;
      int failures = 0;
      for (const auto& check : checks) {
        if (check.label != last_label) {
          std::printf("%s bound: %s\n", check.label.c_str(), bound_formula(check.label));
          last_label = check.label;
        }
        std::printf("%s trial %d: L=%.6f regret=%.6f on [%lld, %lld] bound=%.6f  regret ≤ bound: %s\n",
                    check.label.c_str(), check.trial + 1, check.loss_budget, check.regret,
                    static_cast<long long>(check.interval.first), static_cast<long long>(check.interval.last),
                    check.bound, check.holds() ? "OK" : "FAIL");
        if (!check.holds()) ++failures;
      }
      std::printf("%zu checks, %d failed\n", checks.size(), failures);
      return failures == 0 ? 0 : kExitAudit;
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const adapca::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
