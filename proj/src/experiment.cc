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


#include "attrobust/experiment.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "attrobust/candidates.h"
#include "attrobust/checkpoint.h"
#include "attrobust/errors.h"
#include "attrobust/random.h"
#include "attrobust/report.h"
#include "json.hpp"

namespace attrobust {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string BaselineName(BaselineKind kind) {
  return kind == BaselineKind::kZero ? "zero" : "pad";
}

BaselineKind ParseBaseline(const std::string& name) {
  if (name == "zero") return BaselineKind::kZero;
  if (name == "pad") return BaselineKind::kPad;
  throw ConfigError("unknown baseline '" + name + "'");
}

json AttributionJson(const AttributionConfig& a) {
  return {{"method", std::string(MethodTag(a.method))},
          {"ig_steps", a.ig_steps},
          {"baseline", BaselineName(a.baseline)}};
}

AttributionConfig ParseAttribution(const json& j, AttributionConfig a) {
  if (j.contains("method")) a.method = ParseMethod(j.at("method").get<std::string>());
  a.ig_steps = j.value("ig_steps", a.ig_steps);
  if (j.contains("baseline")) a.baseline = ParseBaseline(j.at("baseline").get<std::string>());
  return a;
}

json AttackJson(const AttackConfig& a) {
  return {{"rho_max", a.rho_max},
          {"k", a.k},
          {"distance", a.distance},
          {"constraint", std::string(ConstraintModeName(a.constraint))},
          {"epsilon_sigma_scale", a.epsilon_sigma_scale},
          {"strict_vocabulary", a.strict_vocabulary}};
}

AttackConfig ParseAttack(const json& j, AttackConfig a) {
  a.rho_max = j.value("rho_max", a.rho_max);
  a.k = j.value("k", a.k);
  a.distance = j.value("distance", a.distance);
  if (j.contains("constraint")) {
    a.constraint = ParseConstraintMode(j.at("constraint").get<std::string>());
  }
  a.epsilon_sigma_scale = j.value("epsilon_sigma_scale", a.epsilon_sigma_scale);
  a.strict_vocabulary = j.value("strict_vocabulary", a.strict_vocabulary);
  return a;
}

json ToJson(const ExperimentConfig& c) {
  json methods = json::array();
  for (AttributionMethod m : c.methods) methods.push_back(std::string(MethodTag(m)));
  const DatasetSpec& d = c.dataset;
  return {
      {"dataset",
       {{"path", d.path},
        {"format", d.format},
        {"task_mode", std::string(TaskModeName(d.task_mode))},
        {"labels", d.labels},
        {"max_length", d.max_length},
        {"preprocess",
         {{"lowercase", d.preprocess.lowercase},
          {"keep_digits", d.preprocess.keep_digits},
          {"retained_punctuation", d.preprocess.retained_punctuation}}}}},
      {"architecture",
       {{"embedding_dim", c.architecture.embedding_dim},
        {"hidden_dim", c.architecture.hidden_dim},
        {"attention_dim", c.architecture.attention_dim},
        {"pooling", std::string(PoolingName(c.architecture.pooling))}}},
      {"training",
       {{"learning_rate", c.training.learning_rate},
        {"epochs", c.training.epochs},
        {"batch_size", c.training.batch_size},
        {"warmup_epochs", c.training.warmup_epochs}}},
      {"regimes", c.regimes},
      {"adversarial", {{"attack_ratio", c.adversarial_attack_ratio}}},
      {"far",
       {{"preset", c.far.preset},
        {"gamma", c.far.gamma},
        {"delta", c.far.delta},
        {"attack_ratio", c.far.attack_ratio},
        {"attribution", AttributionJson(c.far.attribution)},
        {"freeze_reference_attribution", c.far.freeze_reference_attribution}}},
      {"training_attack", AttackJson(c.training_attack)},
      {"attack", AttackJson(c.attack)},
      {"stop_words", c.stop_words_path},
      {"candidates",
       {{"kind", c.candidates.kind},
        {"path", c.candidates.path},
        {"command", c.candidates.command}}},
      {"methods", methods},
      {"attribution", AttributionJson(c.attribution)},
      {"metrics",
       {{"distance_floor", c.policy.distance_floor}, {"encoder", c.encoder}}},
      {"seed", c.seed},
      {"folds", c.folds},
      {"threads", c.threads},
      {"eval_split", c.eval_split},
      {"max_eval_samples", c.max_eval_samples},
      {"output_dir", c.output_dir},
      {"checkpoint_dir", c.checkpoint_dir},
  };
}

const json& Section(const json& j, const char* key) {
  static const json kEmpty = json::object();
  return j.contains(key) ? j.at(key) : kEmpty;
}

std::string Timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

std::string Hex(uint64_t value) {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

std::unordered_set<std::string> LoadStopWords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stop-word list: " + path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty() && line.front() != '#') words.insert(line);
  }
  return words;
}

// Keeps the extractor and whatever language model backs it alive together.
struct ExtractorBundle {
  std::unique_ptr<MaskedLanguageModel> lm;
  std::unique_ptr<CandidateExtractor> extractor;
};

ExtractorBundle MakeExtractor(const ExperimentConfig& config,
                              std::span<const TextSample> train) {
  ExtractorBundle bundle;
  const CandidateSource& source = config.candidates;
  if (source.kind == "synonyms") {
    bundle.extractor = std::make_unique<SynonymTable>(
        SynonymTable::Load(config.Resolve(source.path)));
  } else if (source.kind == "unigram") {
    bundle.lm = std::make_unique<UnigramLanguageModel>(train);
    bundle.extractor = std::make_unique<MaskedLmExtractor>(*bundle.lm);
  } else if (source.kind == "process") {
    bundle.lm = std::make_unique<ProcessLanguageModel>(source.command);
    bundle.extractor = std::make_unique<MaskedLmExtractor>(*bundle.lm);
  } else {
    throw ConfigError("unknown candidate source '" + source.kind + "'");
  }
  return bundle;
}

class Manifest {
 public:
  Manifest(fs::path path, const ExperimentConfig& config, const SeedPlan& seeds)
      : path_(std::move(path)) {
    data_["status"] = "running";
    data_["config_hash"] = ConfigHash(config);
    data_["started"] = Timestamp();
    data_["seeds"] = {{"master", config.seed},
                      {"split", seeds.split},
                      {"train", seeds.train},
                      {"init", seeds.init},
                      {"batch_order", seeds.batch_order},
                      {"attack_epsilon", seeds.attack_epsilon}};
    data_["encoder"] = config.encoder;
    data_["distance_floor"] = config.policy.distance_floor;
    data_["stages"] = json::array();
    Flush();
  }

  void Complete(const std::string& stage, double seconds, json extra = {}) {
    json entry = {{"stage", stage}, {"finished", Timestamp()}, {"seconds", seconds}};
    if (!extra.is_null()) entry.update(extra);
    data_["stages"].push_back(std::move(entry));
    Flush();
  }

  void Finish(const std::string& status, const std::string& error = {}) {
    data_["status"] = status;
    data_["finished"] = Timestamp();
    if (!error.empty()) data_["error"] = error;
    Flush();
  }

  void Set(const std::string& key, json value) {
    data_[key] = std::move(value);
    Flush();
  }

 private:
  void Flush() { WriteFile(path_, data_.dump(2) + "\n"); }

  fs::path path_;
  json data_;
};

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

void ExperimentConfig::Validate() const {
  dataset.Validate();
  if (!fs::exists(Resolve(dataset.path))) {
    throw ConfigError("dataset not found: " + Resolve(dataset.path));
  }
  if (regimes.empty()) throw ConfigError("no regimes requested");
  for (const std::string& r : regimes) {
    if (r != "vanilla" && r != "adversarial" && r != "far") {
      throw ConfigError("unknown regime '" + r + "'");
    }
  }
  if (!(adversarial_attack_ratio >= 0.0 && adversarial_attack_ratio <= 1.0)) {
    throw ConfigError("adversarial attack_ratio must lie in [0, 1]");
  }
  if (architecture.embedding_dim < 1 || architecture.hidden_dim < 1 ||
      architecture.attention_dim < 1) {
    throw ConfigError("architecture dimensions must be positive");
  }
  FarConfig far_check = far;
  far_check.train = training;
  far_check.attack = training_attack;
  far_check.Validate();
  attack.Validate();
  training_attack.Validate();
  policy.Validate();
  if (methods.empty()) throw ConfigError("no attribution methods requested");
  if (attribution.ig_steps < 1) throw ConfigError("ig_steps must be positive");
  if (encoder != "tfidf-embedding") throw ConfigError("unknown encoder '" + encoder + "'");
  if (folds != 1 && folds != 3) throw ConfigError("folds must be 1 or 3");
  if (threads < 1) throw ConfigError("threads must be positive");
  if (max_eval_samples < 0) throw ConfigError("max_eval_samples must be >= 0");
  if (eval_split != "test" && eval_split != "all") {
    throw ConfigError("eval_split must be \"test\" or \"all\"");
  }
  if (!stop_words_path.empty() && !fs::exists(Resolve(stop_words_path))) {
    throw ConfigError("stop-word list not found: " + Resolve(stop_words_path));
  }
  if (candidates.kind == "synonyms") {
    if (!fs::exists(Resolve(candidates.path))) {
      throw ConfigError("synonym table not found: " + Resolve(candidates.path));
    }
  } else if (candidates.kind == "process") {
    if (candidates.command.empty()) throw ConfigError("process command is empty");
  } else if (candidates.kind != "unigram") {
    throw ConfigError("unknown candidate source '" + candidates.kind + "'");
  }
  if (!checkpoint_dir.empty() && !fs::is_directory(Resolve(checkpoint_dir))) {
    throw ConfigError("checkpoint directory not found: " + Resolve(checkpoint_dir));
  }
}

std::string ExperimentConfig::Resolve(const std::string& path) const {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

std::string ConfigToJson(const ExperimentConfig& config) {
  return ToJson(config).dump(2) + "\n";
}

ExperimentConfig ParseConfig(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed config: ") + e.what(), 0);
  }
  ExperimentConfig c;
  try {
    const json& d = Section(j, "dataset");
    c.dataset.path = d.value("path", c.dataset.path);
    c.dataset.format = d.value("format", c.dataset.format);
    if (d.contains("task_mode")) {
      c.dataset.task_mode = ParseTaskMode(d.at("task_mode").get<std::string>());
    }
    c.dataset.labels = d.value("labels", c.dataset.labels);
    c.dataset.max_length = d.value("max_length", c.dataset.max_length);
    const json& p = Section(d, "preprocess");
    c.dataset.preprocess.lowercase = p.value("lowercase", true);
    c.dataset.preprocess.keep_digits = p.value("keep_digits", false);
    c.dataset.preprocess.retained_punctuation =
        p.value("retained_punctuation", c.dataset.preprocess.retained_punctuation);

    const json& a = Section(j, "architecture");
    c.architecture.embedding_dim = a.value("embedding_dim", c.architecture.embedding_dim);
    c.architecture.hidden_dim = a.value("hidden_dim", c.architecture.hidden_dim);
    c.architecture.attention_dim = a.value("attention_dim", c.architecture.attention_dim);
    if (a.contains("pooling")) {
      c.architecture.pooling = ParsePooling(a.at("pooling").get<std::string>());
    }
    c.architecture.task_mode = c.dataset.task_mode;

    const json& t = Section(j, "training");
    c.training.learning_rate = t.value("learning_rate", c.training.learning_rate);
    c.training.epochs = t.value("epochs", c.training.epochs);
    c.training.batch_size = t.value("batch_size", c.training.batch_size);
    c.training.warmup_epochs = t.value("warmup_epochs", c.training.warmup_epochs);

    c.regimes = j.value("regimes", c.regimes);
    c.adversarial_attack_ratio =
        Section(j, "adversarial").value("attack_ratio", c.adversarial_attack_ratio);

    const json& f = Section(j, "far");
    const std::string preset = f.value("preset", std::string("AdvAAT"));
    c.far = preset == "AAT" ? FarConfig::AAT() : FarConfig::AdvAAT();
    c.far.preset = preset;
    c.far.gamma = f.value("gamma", c.far.gamma);
    c.far.delta = f.value("delta", c.far.delta);
    c.far.attack_ratio = f.value("attack_ratio", c.far.attack_ratio);
    c.far.attribution = ParseAttribution(Section(f, "attribution"), c.far.attribution);
    c.far.freeze_reference_attribution =
        f.value("freeze_reference_attribution", c.far.freeze_reference_attribution);

    AttackConfig defaults;
    defaults.constraint = DefaultConstraintFor(c.dataset.task_mode);
    c.training_attack = ParseAttack(Section(j, "training_attack"), defaults);
    c.attack = ParseAttack(Section(j, "attack"), defaults);
    c.stop_words_path = j.value("stop_words", c.stop_words_path);

    const json& cand = Section(j, "candidates");
    c.candidates.kind = cand.value("kind", c.candidates.kind);
    c.candidates.path = cand.value("path", c.candidates.path);
    c.candidates.command = cand.value("command", c.candidates.command);

    if (j.contains("methods")) {
      c.methods.clear();
      for (const json& m : j.at("methods")) {
        c.methods.push_back(ParseMethod(m.get<std::string>()));
      }
    }
    c.attribution = ParseAttribution(Section(j, "attribution"), c.attribution);
    const json& m = Section(j, "metrics");
    c.policy.distance_floor = m.value("distance_floor", c.policy.distance_floor);
    c.encoder = m.value("encoder", c.encoder);
    c.seed = j.value("seed", c.seed);
    c.folds = j.value("folds", c.folds);
    c.threads = j.value("threads", c.threads);
    c.eval_split = j.value("eval_split", c.eval_split);
    c.max_eval_samples = j.value("max_eval_samples", c.max_eval_samples);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.checkpoint_dir = j.value("checkpoint_dir", c.checkpoint_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config field: ") + e.what());
  }
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  ExperimentConfig config = ParseConfig(text.str());
  config.base_dir = fs::absolute(fs::path(path)).parent_path().string();
  return config;
}

std::string ConfigHash(const ExperimentConfig& config) {
  ExperimentConfig located = config;
  located.output_dir.clear();
  located.checkpoint_dir.clear();
  return Hex(Fnv1a64(ConfigToJson(located)));
}

SeedPlan DeriveSeeds(uint64_t master) {
  SeedPlan seeds;
  seeds.split = SubSeed(master, "split");
  seeds.train = SubSeed(master, "train");
  seeds.init = SubSeed(seeds.train, "init");
  seeds.batch_order = SubSeed(seeds.train, "batch_order");
  seeds.attack_epsilon = SubSeed(master, "attack_epsilon");
  return seeds;
}

ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const RunOptions& options) {
  config.Validate();
  ExperimentResult result;
  const fs::path out_dir = config.Resolve(config.output_dir);
  fs::create_directories(out_dir);
  result.output_dir = out_dir.string();
  const SeedPlan seeds = DeriveSeeds(config.seed);
  const std::string config_hash = ConfigHash(config);
  WriteFile(out_dir / "config.json", ConfigToJson(config));
  Manifest manifest(out_dir / "manifest.json", config, seeds);

  std::string stage = "load";
  try {
    Stopwatch load_clock;
    const LoadedDataset loaded = LoadDataset(
        [&] {
          DatasetSpec spec = config.dataset;
          spec.path = config.Resolve(spec.path);
          return spec;
        }());
    result.dropped_samples = loaded.dropped_samples;
    result.malformed_lines = loaded.malformed_lines;
    manifest.Complete(stage, load_clock.Seconds(),
                      {{"samples", loaded.dataset.size()},
                       {"warnings", loaded.warnings}});
    result.completed_stages.push_back(stage);

    const std::unordered_set<std::string> stop_words =
        config.stop_words_path.empty()
            ? DefaultStopWords()
            : LoadStopWords(config.Resolve(config.stop_words_path));
    AttackConfig attack = config.attack;
    attack.stop_words = stop_words;
    attack.epsilon_seed = seeds.attack_epsilon;
    AttackConfig training_attack = config.training_attack;
    training_attack.stop_words = stop_words;
    training_attack.epsilon_seed = seeds.attack_epsilon;
    TrainConfig training = config.training;
    training.seed = seeds.train;

    for (int fold = 0; fold < config.folds; ++fold) {
      const std::string suffix = "fold" + std::to_string(fold);
      stage = "split:" + suffix;
      Stopwatch split_clock;
      DatasetSplit split =
          SplitDataset(loaded.dataset.samples, seeds.split, fold);
      const Vocabulary vocab = BuildVocabulary(split.train);
      EncodeSamples(split.train, vocab);
      EncodeSamples(split.validation, vocab);
      EncodeSamples(split.test, vocab);
      std::vector<TextSample> everything;
      if (config.eval_split == "all") {
        everything = loaded.dataset.samples;
        EncodeSamples(everything, vocab);
      }
      vocab.Save((out_dir / ("vocab_" + suffix + ".txt")).string());
      manifest.Complete(stage, split_clock.Seconds(),
                        {{"train", split.train.size()},
                         {"validation", split.validation.size()},
                         {"test", split.test.size()},
                         {"vocabulary", vocab.size()}});
      result.completed_stages.push_back(stage);

      ArchitectureConfig arch = config.architecture;
      arch.vocab_size = vocab.size();
      arch.num_classes = loaded.dataset.num_classes();
      arch.task_mode = loaded.dataset.mode;
      const ExtractorBundle extractor = MakeExtractor(config, split.train);
      const TrainingData data{split.train, split.validation, &vocab};

      for (const std::string& regime : config.regimes) {
        stage = "train:" + regime + ":" + suffix;
        Stopwatch train_clock;
        const std::string checkpoint_name = regime + "_" + suffix + ".ckpt";
        ReferenceClassifier model = ReferenceClassifier::Initialize(arch, 0);
        json train_info = json::object();
        if (!config.checkpoint_dir.empty()) {
          const LoadedCheckpoint loaded_ckpt = LoadCheckpoint(
              (fs::path(config.Resolve(config.checkpoint_dir)) / checkpoint_name)
                  .string(),
              vocab);
          if (loaded_ckpt.metadata.regime != regime) {
            throw ConfigError("checkpoint " + checkpoint_name + " holds a " +
                              loaded_ckpt.metadata.regime + " model");
          }
          model = loaded_ckpt.model;
          train_info["loaded"] = checkpoint_name;
        } else {
          TrainedModel trained = [&] {
            if (regime == "vanilla") return TrainVanilla(data, arch, training);
            if (regime == "adversarial") {
              AdvTrainConfig adv;
              adv.train = training;
              adv.attack_ratio = config.adversarial_attack_ratio;
              adv.attack = training_attack;
              return AdversarialTrain(data, arch, *extractor.extractor, adv);
            }
            FarConfig far = config.far;
            far.train = training;
            far.attack = training_attack;
            return FarTrain(data, arch, *extractor.extractor, far);
          }();
          SaveCheckpoint((out_dir / checkpoint_name).string(), trained.model,
                         vocab, trained.metadata);
          std::ostringstream log;
          WriteTrainingLogCsv(log, trained.log);
          WriteFile(out_dir / ("training_" + regime + "_" + suffix + ".csv"),
                    log.str());
          model = trained.model;
          train_info["final_train_loss"] = trained.final_train_loss;
          train_info["final_validation_loss"] = trained.final_validation_loss;
        }
        model = QuantizeToFloat32(model);
        train_info["test_accuracy"] = Accuracy(model, split.test);
        manifest.Complete(stage, train_clock.Seconds(), train_info);
        result.completed_stages.push_back(stage);

        if (!options.evaluate) continue;
        stage = "evaluate:" + regime + ":" + suffix;
        Stopwatch eval_clock;
        std::span<const TextSample> eval_set(
            config.eval_split == "all" ? everything : split.test);
        if (config.max_eval_samples > 0 &&
            eval_set.size() > static_cast<size_t>(config.max_eval_samples)) {
          eval_set = eval_set.first(config.max_eval_samples);
        }
        const TfidfEmbeddingEncoder encoder(model, vocab, split.train);
        RobustnessRequest request;
        request.regime = regime;
        request.fold = fold;
        request.methods = config.methods;
        request.attribution = config.attribution;
        request.attack = attack;
        request.policy = config.policy;
        request.threads = config.threads;
        RobustnessReport report = DatasetRobustness(
            model, vocab, eval_set, *extractor.extractor, encoder, request);
        double attack_seconds = 0.0;
        for (const AttackRecord& r : report.transcripts) attack_seconds += r.wall_seconds;
        manifest.Complete(stage, eval_clock.Seconds(),
                          {{"rows", report.rows.size()},
                           {"failures", report.failures},
                           {"failure_messages", report.failure_messages},
                           {"attack_seconds", attack_seconds}});
        result.completed_stages.push_back(stage);
        auto append = [](auto& to, auto& from) {
          to.insert(to.end(), std::make_move_iterator(from.begin()),
                    std::make_move_iterator(from.end()));
        };
        append(result.report.rows, report.rows);
        append(result.report.transcripts, report.transcripts);
        append(result.report.failure_messages, report.failure_messages);
        result.report.failures += report.failures;
      }
    }

    if (options.evaluate) {
      stage = "report";
      Stopwatch report_clock;
      result.report.aggregates = Aggregate(result.report.rows);
      std::ostringstream rows, aggregates, transcripts;
      WriteRowsCsv(rows, result.report.rows);
      WriteAggregatesCsv(aggregates, result.report.aggregates);
      for (const AttackRecord& r : result.report.transcripts) {
        transcripts << TranscriptLine(r, config_hash) << '\n';
      }
      WriteFile(out_dir / "rows.csv", rows.str());
      WriteFile(out_dir / "aggregates.csv", aggregates.str());
      WriteFile(out_dir / "transcripts.jsonl", transcripts.str());
      ReportContext context;
      context.encoder = config.encoder;
      context.distance_floor = config.policy.distance_floor;
      WriteFile(out_dir / "report.md",
                RenderReport(result.report.aggregates, context));
      manifest.Complete(stage, report_clock.Seconds());
      result.completed_stages.push_back(stage);
    }
    manifest.Set("sample_failures", result.report.failures);
    manifest.Finish("complete");
    result.complete = result.report.failures == 0;
  } catch (const std::exception& e) {
    result.error = stage + ": " + e.what();
    manifest.Finish("failed", result.error);
  }
  return result;
}

}  // namespace attrobust
