// Copyright 2026 The attrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line front end: train, attack, evaluate, report, selftest.
//
// Exit codes: 0 success, 1 the run failed or finished incomplete, 2 usage or
// configuration error. ATTROBUST_OUTPUT_ROOT, when set, prefixes relative
// output directories.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "attrobust/errors.h"
#include "attrobust/experiment.h"
#include "attrobust/report.h"
#include "attrobust/selftest.h"

namespace {

namespace fs = std::filesystem;
using attrobust::ExperimentConfig;

constexpr int kOk = 0;
constexpr int kRunFailed = 1;
constexpr int kUsage = 2;

struct Overrides {
  std::string config_path;
  std::string output;
  std::vector<std::string> regimes;
  std::vector<std::string> methods;
  std::string checkpoint_dir;
  long long seed = -1;
  int threads = 0;
  int folds = 0;
  int epochs = -1;
  int max_eval_samples = -1;
};

void AddCommonOptions(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--output", o.output, "output directory");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--threads", o.threads, "attack worker threads");
  cmd->add_option("--folds", o.folds, "1 or 3");
  cmd->add_option("--epochs", o.epochs, "training epochs");
}

ExperimentConfig BuildConfig(const Overrides& o) {
  ExperimentConfig config = attrobust::LoadConfig(o.config_path);
  if (!o.output.empty()) config.output_dir = fs::absolute(o.output).string();
  if (!o.regimes.empty()) config.regimes = o.regimes;
  if (!o.methods.empty()) {
    config.methods.clear();
    for (const std::string& m : o.methods) {
      config.methods.push_back(attrobust::ParseMethod(m));
    }
  }
  if (!o.checkpoint_dir.empty()) {
    config.checkpoint_dir = fs::absolute(o.checkpoint_dir).string();
  }
  if (o.seed >= 0) config.seed = static_cast<uint64_t>(o.seed);
  if (o.threads > 0) config.threads = o.threads;
  if (o.folds > 0) config.folds = o.folds;
  if (o.epochs >= 0) config.training.epochs = o.epochs;
  if (o.max_eval_samples >= 0) config.max_eval_samples = o.max_eval_samples;
  if (const char* root = std::getenv("ATTROBUST_OUTPUT_ROOT");
      root != nullptr && *root != '\0' && fs::path(config.output_dir).is_relative()) {
    config.output_dir = (fs::path(root) / config.output_dir).string();
  }
  return config;
}

int Run(const Overrides& o, bool evaluate) {
  const ExperimentConfig config = BuildConfig(o);
  attrobust::RunOptions options;
  options.evaluate = evaluate;
  const attrobust::ExperimentResult result =
      attrobust::RunExperiment(config, options);
  std::cerr << "bundle: " << result.output_dir << '\n';
  if (!result.error.empty()) {
    std::cerr << "error: " << result.error << '\n';
    return kRunFailed;
  }
  if (result.malformed_lines > 0 || result.dropped_samples > 0) {
    std::cerr << "warning: " << result.malformed_lines << " malformed lines, "
              << result.dropped_samples << " dropped samples (see manifest)\n";
  }
  if (evaluate) {
    std::cout << attrobust::RenderReport(result.report.aggregates);
  }
  if (result.report.failures > 0) {
    std::cerr << "error: " << result.report.failures << " sample attacks failed\n";
    for (const std::string& m : result.report.failure_messages) {
      std::cerr << "  " << m << '\n';
    }
    return kRunFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribution robustness toolkit for text classifiers"};
  app.require_subcommand(1);

  Overrides train_opts;
  CLI::App* train = app.add_subcommand("train", "train models and save checkpoints");
  AddCommonOptions(train, train_opts);
  train->add_option("--regime", train_opts.regimes, "vanilla|adversarial|far")
      ->check(CLI::IsMember({"vanilla", "adversarial", "far"}));

  Overrides attack_opts;
  CLI::App* attack = app.add_subcommand("attack", "attack saved checkpoints");
  AddCommonOptions(attack, attack_opts);
  attack->add_option("--checkpoint-dir", attack_opts.checkpoint_dir,
                     "directory holding <regime>_fold<f>.ckpt")
      ->required();
  attack->add_option("--regime", attack_opts.regimes, "vanilla|adversarial|far")
      ->check(CLI::IsMember({"vanilla", "adversarial", "far"}));
  attack->add_option("--method", attack_opts.methods, "S|DL|IG|A")
      ->check(CLI::IsMember({"S", "DL", "IG", "A"}));
  attack->add_option("--max-eval-samples", attack_opts.max_eval_samples,
                     "limit on attacked test samples");

  Overrides eval_opts;
  CLI::App* evaluate = app.add_subcommand("evaluate", "full robustness sweep");
  AddCommonOptions(evaluate, eval_opts);
  evaluate->add_option("--max-eval-samples", eval_opts.max_eval_samples,
                       "limit on attacked test samples");

  std::string bundle_dir;
  CLI::App* report = app.add_subcommand("report", "render a bundle as markdown");
  report->add_option("bundle", bundle_dir, "bundle directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  CLI::App* selftest = app.add_subcommand("selftest", "run the property checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return Run(train_opts, false);
    if (*attack) return Run(attack_opts, true);
    if (*evaluate) return Run(eval_opts, true);
    if (*report) {
      std::cout << attrobust::RenderBundle(bundle_dir);
      return kOk;
    }
    if (*selftest) {
      bool all = true;
      for (const attrobust::SelfTestCheck& c : attrobust::RunSelfTest()) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail
                  << ")\n";
        all = all && c.passed;
      }
      return all ? kOk : kRunFailed;
    }
  } catch (const attrobust::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const attrobust::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunFailed;
  }
  return kUsage;
}
