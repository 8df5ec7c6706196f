// Copyright 2026 The argmine Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command line front end: prepare, train-adur, train-are, predict,
// evaluate, analyze and bootstrap.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "argmine/adur.hpp"
#include "argmine/are.hpp"
#include "argmine/config.hpp"
#include "argmine/corpus.hpp"
#include "argmine/embed.hpp"
#include "argmine/eval.hpp"
#include "argmine/graph.hpp"
#include "argmine/pipeline.hpp"

namespace fs = std::filesystem;
using namespace argmine;

namespace {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kMissingInput = 3,
  kParseFailure = 4,
  kConfigFailure = 5,
  kFormatFailure = 6,
  kInferenceFailure = 7,
  kVerificationFailure = 8,
};

class MissingInput : public Error {
 public:
  using Error::Error;
};

class InferenceFailure : public Error {
 public:
  using Error::Error;
};

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

void require_path(const std::string& path, const std::string& what) {
  if (path.empty()) throw MissingInput(what + " not given");
  if (!fs::exists(path)) throw MissingInput(what + " not found: " + path);
}

// Writes to `<path>.tmp`, then renames it over `path`.
void write_output(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
  }
  fs::rename(tmp, path);
}

template <typename Model>
void save_model(Model& model, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  model.save(tmp);
  fs::rename(tmp, path);
}

std::string warnings_text(const Warnings& w) {
  std::string out;
  for (const auto& m : w.messages) out += m + '\n';
  return out;
}

// Options shared by the commands that build or run models.
struct ModelOptions {
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string embed = "hash:64:0";
  std::size_t threads = 1;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "Config file with `key = value` lines");
    cmd->add_option("--set", overrides, "Override one field, e.g. adur.lr=0.01 (repeatable)");
    cmd->add_option("--seed", seed, "Seed for both models");
    cmd->add_option("--embed", embed, "Embedding source: hash:DIM:SEED or file:PATH")->capture_default_str();
    cmd->add_option("--threads", threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  }
};

struct Configs {
  AdurConfig adur;
  AreConfig are;
};

// Keys are "adur.<field>" or "are.<field>"; a bare field name applies to
// every config that has it.
void apply_setting(Configs& c, const std::string& key, const std::string& value) {
  bool found = false;
  if (key.rfind("adur.", 0) == 0) {
    found = config_set(c.adur, key.substr(5), value);
  } else if (key.rfind("are.", 0) == 0) {
    found = config_set(c.are, key.substr(4), value);
  } else {
    found = config_set(c.adur, key, value);
    found = config_set(c.are, key, value) || found;
  }
  if (!found) throw ConfigError("unknown config key " + key);
}

Configs load_configs(const ModelOptions& opt) {
  Configs c;
  if (!opt.config_file.empty()) {
    require_path(opt.config_file, "config file");
    for (const auto& [k, v] : parse_key_values(detail::read_file(opt.config_file), opt.config_file))
      apply_setting(c, k, v);
  }
  for (const auto& o : opt.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + o);
    apply_setting(c, o.substr(0, eq), o.substr(eq + 1));
  }
  if (opt.seed) {
    c.adur.seed = *opt.seed;
    c.are.seed = *opt.seed;
  }
  c.adur.validate();
  c.are.validate();
  return c;
}

EmbeddingSource load_source(const std::string& spec) {
  if (spec.rfind("file:", 0) == 0) require_path(spec.substr(5), "embedding file");
  try {
    return EmbeddingSource::parse(spec);
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

void print_config(const std::string& command, const EmbeddingSource& source, const Configs& c) {
  std::cout << "# argmine " << command << '\n'
            << "embed = " << nlohmann::json(source.describe()).dump() << '\n'
            << config_dump(c.adur, "adur.") << config_dump(c.are, "are.") << std::flush;
}

std::vector<Section> load_sections(const std::string& path, const std::string& what) {
  require_path(path, what);
  return read_sections_jsonl(fs::path(path));
}

// Consecutive sections of the same document, in input order.
std::vector<std::vector<Section>> group_by_document(const std::vector<Section>& sections) {
  std::vector<std::vector<Section>> docs;
  for (const auto& s : sections) {
    if (docs.empty() || docs.back().front().doc_id != s.doc_id) docs.emplace_back();
    docs.back().push_back(s);
  }
  return docs;
}

void check_folds(std::size_t folds, std::size_t docs) {
  if (folds > docs)
    throw ConfigError(std::to_string(folds) + " folds requested but the training file has " + std::to_string(docs) +
                      " documents");
}

template <typename Result>
nlohmann::json cv_log(const std::string& command, const EmbeddingSource& source, const nlohmann::json& config,
                      const CrossValidation<Result>& cv, const nlohmann::json& data, const Warnings& warnings) {
  nlohmann::json j;
  j["command"] = command;
  j["embedding"] = source.describe();
  j["config"] = config;
  j["data"] = data;
  j["best_fold"] = cv.best_fold;
  j["folds"] = nlohmann::json::array();
  for (std::size_t f = 0; f < cv.fold_logs.size(); ++f)
    j["folds"].push_back({{"fold", f}, {"best_dev_score", cv.fold_scores[f]}, {"log", cv.fold_logs[f]}});
  j["warnings"] = warnings.messages;
  return j;
}

MatchMode parse_mode(const std::string& mode, const std::string& denominator) {
  MatchMode m;
  m.kind = mode == "weak" ? MatchMode::weak : MatchMode::exact;
  m.denominator = denominator == "longer" ? MatchMode::longer : MatchMode::shorter;
  return m;
}

std::vector<ArgumentGraph> load_predictions(const std::string& path, const std::string& what,
                                            std::size_t* errors = nullptr) {
  require_path(path, what);
  return read_graphs_jsonl(fs::path(path), errors);
}

// ---------------------------------------------------------------------------
// prepare

struct PrepareOptions {
  std::string corpus;
  std::string out;
  bool verify = false;
};

nlohmann::json document_stats(const Document& d) {
  const auto s = label_stats({d});
  nlohmann::json j = to_json(s);
  j["id"] = d.id;
  j["sections"] = d.sections.size();
  j["dropped_relations"] = d.dropped_relations;
  return j;
}

std::vector<std::string> compare_counts(const std::string& part, const LabelStats& want, const LabelStats& got) {
  std::vector<std::string> out;
  for (int i = 0; i < kNumAduTypes; ++i)
    if (want.adus[i] != got.adus[i])
      out.push_back(part + " " + std::string(to_string(static_cast<AduType>(i))) + ": expected " +
                    std::to_string(want.adus[i]) + ", found " + std::to_string(got.adus[i]));
  for (int i = 0; i < kNumRelationLabels; ++i)
    if (want.relations[i] != got.relations[i])
      out.push_back(part + " " + std::string(to_string(static_cast<RelationLabel>(i))) + ": expected " +
                    std::to_string(want.relations[i]) + ", found " + std::to_string(got.relations[i]));
  return out;
}

int cmd_prepare(const PrepareOptions& opt) {
  if (opt.corpus.empty()) throw MissingInput("no corpus given (use --corpus or set ARGMINE_CORPUS)");
  if (!fs::is_directory(opt.corpus)) throw MissingInput("corpus directory not found: " + opt.corpus);
  Warnings warnings;
  auto docs = parse_corpus(opt.corpus, &warnings);
  const fs::path out(opt.out);
  fs::create_directories(out);

  auto jsonl = [](const std::vector<Document>& d) {
    std::ostringstream ss;
    write_sections_jsonl(ss, d);
    return ss.str();
  };
  nlohmann::json stats;
  std::size_t sections = 0, dropped = 0;
  stats["per_document"] = nlohmann::json::array();
  for (const auto& d : docs) {
    sections += d.sections.size();
    dropped += d.dropped_relations;
    stats["per_document"].push_back(document_stats(d));
  }
  stats["documents"] = docs.size();
  stats["sections"] = sections;
  stats["dropped_relations"] = dropped;
  stats["total"] = to_json(label_stats(docs));
  stats["warnings"] = warnings.messages.size();
  write_output(out / "sections.jsonl", jsonl(docs));

  std::optional<Split> split;
  if (docs.size() > kTrainDocuments) {
    split = make_split(docs);
    write_output(out / "train.jsonl", jsonl(split->train));
    write_output(out / "test.jsonl", jsonl(split->test));
    stats["split"]["train"] = to_json(label_stats(split->train));
    stats["split"]["train"]["documents"] = split->train.size();
    stats["split"]["test"] = to_json(label_stats(split->test));
    stats["split"]["test"]["documents"] = split->test.size();
  } else {
    stats["split"] = nullptr;
    std::cout << "split skipped: " << docs.size() << " documents, need more than " << kTrainDocuments << '\n';
  }
  write_output(out / "stats.json", stats.dump(2) + '\n');
  write_output(out / "warnings.txt", warnings_text(warnings));

  std::cout << "documents " << docs.size() << ", sections " << sections << ", dropped cross-section relations "
            << dropped << ", warnings " << warnings.messages.size() << '\n';
  const auto total = label_stats(docs);
  for (int i = 0; i < kNumAduTypes; ++i)
    std::cout << "  " << to_string(static_cast<AduType>(i)) << ' ' << total.adus[i] << '\n';
  for (int i = 0; i < kNumRelationLabels; ++i)
    std::cout << "  " << to_string(static_cast<RelationLabel>(i)) << ' ' << total.relations[i] << '\n';

  if (!opt.verify) return kOk;
  if (!split)
    throw VerificationFailure("verification needs the full corpus; found only " + std::to_string(docs.size()) +
                              " documents");
  const ReferenceCounts ref;
  std::vector<std::string> problems;
  if (split->train.size() != ref.train_docs || split->test.size() != ref.test_docs)
    problems.push_back("split: expected " + std::to_string(ref.train_docs) + "/" + std::to_string(ref.test_docs) +
                       " documents, found " + std::to_string(split->train.size()) + "/" +
                       std::to_string(split->test.size()));
  for (auto& p : compare_counts("train", ref.train, label_stats(split->train))) problems.push_back(std::move(p));
  for (auto& p : compare_counts("test", ref.test, label_stats(split->test))) problems.push_back(std::move(p));
  for (const auto& p : problems) std::cout << "MISMATCH " << p << '\n';
  if (!problems.empty()) throw VerificationFailure(std::to_string(problems.size()) + " count mismatches");
  std::cout << "verification passed\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// train-adur / train-are

struct TrainOptions {
  std::string train;
  std::string out;
};

int cmd_train_adur(const TrainOptions& opt, const ModelOptions& mopt) {
  const auto configs = load_configs(mopt);
  const auto source = load_source(mopt.embed);
  print_config("train-adur", source, configs);
  const auto sections = load_sections(opt.train, "training file");
  source.validate(sections);
  const auto docs = group_by_document(sections);
  check_folds(configs.adur.folds, docs.size());

  Warnings warnings;
  std::vector<std::vector<TaggedSection>> tagged;
  for (const auto& d : docs) tagged.push_back(prepare_tagged(d, source, configs.adur.tag_scheme(), &warnings));
  auto cv = cross_validate_adur(tagged, configs.adur, mopt.threads);

  const fs::path out(opt.out);
  save_model(cv.best.model, out / "adur.ckpt");
  const nlohmann::json data{{"documents", docs.size()}, {"sections", sections.size()}};
  write_output(out / "adur_log.json",
               cv_log("train-adur", source, config_to_json(configs.adur), cv, data, warnings).dump(2) + '\n');
  for (std::size_t f = 0; f < cv.fold_scores.size(); ++f)
    std::cout << "fold " << f << " dev token macro-F1 " << std::fixed << std::setprecision(4) << cv.fold_scores[f]
              << '\n';
  std::cout << "best fold " << cv.best_fold << " -> " << (out / "adur.ckpt").string() << '\n';
  return kOk;
}

int cmd_train_are(const TrainOptions& opt, const ModelOptions& mopt) {
  const auto configs = load_configs(mopt);
  const auto source = load_source(mopt.embed);
  print_config("train-are", source, configs);
  const auto sections = load_sections(opt.train, "training file");
  source.validate(sections);
  const auto docs = group_by_document(sections);
  check_folds(configs.are.folds, docs.size());

  Warnings warnings;
  Rng rng(mix_seed(configs.are.seed, 31));
  std::vector<std::vector<AreInstance>> instances;
  std::size_t total = 0, positives = 0;
  for (const auto& d : docs) {
    auto& bucket = instances.emplace_back();
    for (const auto& s : d) {
      const auto prepared = prepare_are_section(s, source, s.adus, &warnings);
      for (auto& inst : build_training_instances(prepared, configs.are, rng, &warnings)) {
        if (inst.candidate.label != AreLabel::no_relation) ++positives;
        bucket.push_back(std::move(inst));
      }
    }
    total += bucket.size();
  }
  for (const auto& bucket : instances)
    if (bucket.empty()) throw ConfigError("a document yields no relation candidates; check are.max_dist_d");
  auto cv = cross_validate_are(instances, configs.are, mopt.threads);

  const fs::path out(opt.out);
  save_model(cv.best.model, out / "are.ckpt");
  const nlohmann::json data{{"documents", docs.size()},
                            {"sections", sections.size()},
                            {"instances", total},
                            {"positives", positives},
                            {"negatives", total - positives}};
  write_output(out / "are_log.json",
               cv_log("train-are", source, config_to_json(configs.are), cv, data, warnings).dump(2) + '\n');
  for (std::size_t f = 0; f < cv.fold_scores.size(); ++f)
    std::cout << "fold " << f << " dev relation micro-F1 " << std::fixed << std::setprecision(4)
              << cv.fold_scores[f] << '\n';
  std::cout << "best fold " << cv.best_fold << " -> " << (out / "are.ckpt").string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// predict

struct PredictOptions {
  std::string sections;
  std::string adur;
  std::string are;
  std::string out;
  bool gold_adus = false;
};

int cmd_predict(const PredictOptions& opt, const ModelOptions& mopt) {
  require_path(opt.adur, "ADUR checkpoint");
  require_path(opt.are, "ARE checkpoint");
  const auto source = load_source(mopt.embed);
  const auto adur = AdurModel::load(opt.adur);
  const auto are = AreModel::load(opt.are);
  print_config("predict", source, Configs{adur.config(), are.config()});
  for (auto [name, dim] : {std::pair{"ADUR", adur.embedding_dim()}, std::pair{"ARE", are.embedding_dim()}})
    if (dim != source.dim())
      throw nn::CheckpointVersionError(std::string(name) + " checkpoint expects " + std::to_string(dim) +
                                       "-dimensional embeddings, source gives " + std::to_string(source.dim()));
  const auto sections = load_sections(opt.sections, "sections file");
  source.validate(sections);

  const auto run = run_corpus(adur, are, sections, source, opt.gold_adus, mopt.threads);
  std::ostringstream ss;
  run.write_jsonl(ss);
  write_output(opt.out, ss.str());
  std::cout << "predicted " << sections.size() - run.failures() << " of " << sections.size() << " sections -> "
            << opt.out << '\n';
  if (run.failures()) {
    for (const auto& r : run.results)
      if (!r.graph) std::cerr << "failed " << r.doc_id << "#" << r.section_index << ": " << r.error << '\n';
    throw InferenceFailure(std::to_string(run.failures()) + " sections failed");
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// evaluate / analyze / bootstrap

struct ScoringOptions {
  std::string gold;
  std::string pred;
  std::string mode = "exact";
  std::string denominator = "shorter";
  std::string out;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--gold", gold, "Gold sections (JSON lines)")->required();
    cmd->add_option("--mode", mode, "Span matching")->check(CLI::IsMember({"exact", "weak"}))->capture_default_str();
    cmd->add_option("--denominator", denominator, "Overlap denominator in weak mode")
        ->check(CLI::IsMember({"shorter", "longer"}))
        ->capture_default_str();
  }
};

int cmd_evaluate(const ScoringOptions& opt, bool include_outside) {
  const auto gold = load_sections(opt.gold, "gold file");
  std::size_t failed = 0;
  const auto pred = load_predictions(opt.pred, "prediction file", &failed);
  const auto ev = evaluate_corpus(gold, pred, parse_mode(opt.mode, opt.denominator), include_outside);
  std::cout << ev.tables();
  std::cout << "\nsections " << ev.sections << ", missing predictions " << ev.missing_predictions
            << ", failed sections " << failed << '\n';
  if (!opt.out.empty()) {
    const fs::path out(opt.out);
    auto j = ev.to_json();
    j["failed_sections"] = failed;
    j["include_outside"] = include_outside;
    write_output(out / "eval.json", j.dump(2) + '\n');
    write_output(out / "confusion_adu_tokens.csv", ev.tokens.confusion.csv());
    write_output(out / "confusion_adu_spans.csv", ev.spans.confusion.csv());
    write_output(out / "confusion_relations.csv", ev.relations.confusion.csv());
  }
  return kOk;
}

int cmd_analyze(const ScoringOptions& opt) {
  const auto gold = load_sections(opt.gold, "gold file");
  const auto pred = align_predictions(gold, load_predictions(opt.pred, "prediction file"));
  std::vector<ArgumentGraph> gold_graphs;
  for (const auto& s : gold) gold_graphs.push_back(gold_graph(s));
  const auto rep = error_feature_report(pred, gold_graphs, gold, parse_mode(opt.mode, opt.denominator));
  const std::string text = rep.to_json().dump(2) + '\n';
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    write_output(opt.out, text);
    for (const auto& [name, d] : rep.categories) std::cout << name << ' ' << d.count << '\n';
  }
  return kOk;
}

struct BootstrapOptions {
  std::string pred_a;
  std::string pred_b;
  std::size_t samples = 100;
  std::size_t sample_size = 10;
  std::uint64_t seed = 42;
};

int cmd_bootstrap(const ScoringOptions& opt, const BootstrapOptions& bopt) {
  const auto gold = load_sections(opt.gold, "gold file");
  const auto a = align_predictions(gold, load_predictions(bopt.pred_a, "prediction file A"));
  const auto b = align_predictions(gold, load_predictions(bopt.pred_b, "prediction file B"));
  std::vector<ArgumentGraph> g;
  for (const auto& s : gold) g.push_back(gold_graph(s));
  const auto mode = parse_mode(opt.mode, opt.denominator);
  if (bopt.sample_size > gold.size())
    throw ConfigError("sample size " + std::to_string(bopt.sample_size) + " exceeds " + std::to_string(gold.size()) +
                      " sections");
  Rng rng(bopt.seed);
  const auto res = bootstrap_compare(
      [&](const std::vector<std::size_t>& sample) {
        return std::pair{relation_micro_f1(g, a, sample, mode), relation_micro_f1(g, b, sample, mode)};
      },
      gold.size(), bopt.samples, bopt.sample_size, rng);
  const nlohmann::json j{{"mode", mode.name()},       {"samples", bopt.samples},   {"sample_size", bopt.sample_size},
                         {"seed", bopt.seed},         {"mean_a", res.mean_a},      {"mean_b", res.mean_b},
                         {"p_value", res.p_value},    {"scores_a", res.scores_a},  {"scores_b", res.scores_b}};
  std::cout << std::fixed << std::setprecision(4) << "relation micro-F1 A " << res.mean_a << ", B " << res.mean_b
            << std::setprecision(6) << ", p = " << res.p_value << '\n';
  if (!opt.out.empty()) write_output(opt.out, j.dump(2) + '\n');
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"argmine: argument mining on scientific text"};
  app.require_subcommand(1);

  PrepareOptions prep;
  if (const char* env = std::getenv("ARGMINE_CORPUS")) prep.corpus = env;
  auto* prepare = app.add_subcommand("prepare", "Parse a brat corpus into JSON-lines sections and statistics");
  prepare->add_option("--corpus", prep.corpus, "Corpus directory (default: $ARGMINE_CORPUS)");
  prepare->add_option("--out", prep.out, "Output directory")->required();
  prepare->add_flag("--verify-table1", prep.verify, "Check the published label counts and split");

  ModelOptions mopt;
  TrainOptions topt;
  auto* train_adur = app.add_subcommand("train-adur", "Train the ADU tagger with cross-validation");
  auto* train_are = app.add_subcommand("train-are", "Train the relation classifier with cross-validation");
  for (auto* cmd : {train_adur, train_are}) {
    cmd->add_option("--train", topt.train, "Training sections (JSON lines)")->required();
    cmd->add_option("--out", topt.out, "Output directory")->required();
    mopt.add_to(cmd);
  }

  PredictOptions popt;
  auto* predict = app.add_subcommand("predict", "Run the pipeline and write argument graphs");
  predict->add_option("--sections", popt.sections, "Sections (JSON lines)")->required();
  predict->add_option("--adur", popt.adur, "ADUR checkpoint")->required();
  predict->add_option("--are", popt.are, "ARE checkpoint")->required();
  predict->add_option("--out", popt.out, "Output file (JSON lines)")->required();
  predict->add_flag("--gold-adus", popt.gold_adus, "Use the gold ADUs instead of the tagger");
  mopt.add_to(predict);

  ScoringOptions sopt;
  bool include_outside = false;
  auto* evaluate = app.add_subcommand("evaluate", "Score predicted graphs against gold sections");
  sopt.add_to(evaluate);
  evaluate->add_option("--pred", sopt.pred, "Predicted graphs (JSON lines)")->required();
  evaluate->add_option("--out", sopt.out, "Directory for eval.json and confusion matrices");
  evaluate->add_flag("--include-outside", include_outside, "Average token F1 over the O class as well");

  auto* analyze = app.add_subcommand("analyze", "Connector and argument-type features of TP, FP and FN relations");
  sopt.add_to(analyze);
  analyze->add_option("--pred", sopt.pred, "Predicted graphs (JSON lines)")->required();
  analyze->add_option("--out", sopt.out, "Output file (default: stdout)");

  BootstrapOptions bopt;
  auto* bootstrap = app.add_subcommand("bootstrap", "Paired bootstrap comparison of two prediction files");
  sopt.add_to(bootstrap);
  bootstrap->add_option("--pred-a", bopt.pred_a, "Predictions of system A")->required();
  bootstrap->add_option("--pred-b", bopt.pred_b, "Predictions of system B")->required();
  bootstrap->add_option("--samples", bopt.samples, "Number of samples")->capture_default_str();
  bootstrap->add_option("--sample-size", bopt.sample_size, "Sections per sample")->capture_default_str();
  bootstrap->add_option("--seed", bopt.seed, "Sampling seed")->capture_default_str();
  bootstrap->add_option("--out", sopt.out, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*prepare) return cmd_prepare(prep);
    if (*train_adur) return cmd_train_adur(topt, mopt);
    if (*train_are) return cmd_train_are(topt, mopt);
    if (*predict) return cmd_predict(popt, mopt);
    if (*evaluate) return cmd_evaluate(sopt, include_outside);
    if (*analyze) return cmd_analyze(sopt);
    if (*bootstrap) return cmd_bootstrap(sopt, bopt);
  } catch (const MissingInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMissingInput;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParseFailure;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormatFailure;
  } catch (const TokenCountError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormatFailure;
  } catch (const InferenceFailure& e) {
    std::cerr << "inference failed: " << e.what() << '\n';
    return kInferenceFailure;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
