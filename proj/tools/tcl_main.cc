// tcl: generate synthetic corpora, train baseline or two-stage curriculum
// taggers, score sentence difficulty, evaluate checkpoints and tabulate
// learning curves.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli_config.h"
#include "tcl/curriculum.h"
#include "tcl/errors.h"
#include "tcl/eval.h"

namespace fs = std::filesystem;

namespace tcl::cli {
namespace {

// Flag values; unset optionals leave the config untouched.
struct Overrides {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<int> e0, es, e_grow, tlc_n, bu_k, threads;
  std::optional<double> lambda0;
  std::optional<std::string> metric, scheme, train, dev, test, out_dir;
};

void AddCommonFlags(CLI::App *cmd, Overrides &o) {
  cmd->add_option("-c,--config", o.config, "JSON config file");
  cmd->add_option("--seed", o.seed, "Random seed (overrides TCL_SEED and config)");
  cmd->add_option("--out-dir", o.out_dir, "Directory receiving run subdirectories");
}

CliConfig Resolve(const Overrides &o) {
  CliConfig c;
  if (!o.config.empty()) ApplyFile(o.config, c);
  if (auto env = SeedFromEnv()) c.run.seed = *env;
  if (o.seed) c.run.seed = *o.seed;
  if (o.e0) c.run.e0 = *o.e0;
  if (o.es) c.run.es = *o.es;
  if (o.e_grow) c.run.schedule.e_grow = *o.e_grow;
  if (o.lambda0) c.run.schedule.lambda0 = *o.lambda0;
  if (o.tlc_n) c.run.metric.top_n = *o.tlc_n;
  if (o.bu_k) c.run.metric.passes = *o.bu_k;
  if (o.threads) c.run.score_threads = *o.threads;
  if (o.metric) c.run.metric.kind = ParseMetric(*o.metric);
  if (o.scheme) c.synth.scheme = c.scheme = ParseScheme(*o.scheme);
  if (o.train) c.train = *o.train;
  if (o.dev) c.dev = *o.dev;
  if (o.test) c.test = *o.test;
  if (o.out_dir) c.out_dir = *o.out_dir;
  c.run.metric.seed = c.run.seed;
  return c;
}

void RequireFile(const fs::path &path, const char *what) {
  if (path.empty()) throw ConfigError(std::string("no ") + what + " file given");
  if (!fs::is_regular_file(path)) throw ConfigError(std::string(what) + " file not found: " + path.string());
}

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

int Gen(const Overrides &o) {
  CliConfig c = Resolve(o);
  c.synth.Validate();
  SynthCorpus corpus = GenerateSynthetic(c.synth, c.run.seed);
  const fs::path dir = FreshRunDir(c.out_dir, "gen");
  WriteColumnFile(corpus.train, dir / "train.txt");
  WriteColumnFile(corpus.dev, dir / "dev.txt");
  WriteColumnFile(corpus.test, dir / "test.txt");
  nlohmann::ordered_json manifest;
  manifest["config_hash"] = SynthHash(c.synth);
  manifest["seed"] = c.run.seed;
  manifest["config"] = SynthToJson(c.synth);
  manifest["files"] = {{"train", "train.txt"}, {"dev", "dev.txt"}, {"test", "test.txt"}};
  manifest["sentences"] = {{"train", corpus.train.size()}, {"dev", corpus.dev.size()}, {"test", corpus.test.size()}};
  WriteText(dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << dir.string() << "\n";
  return 0;
}

int Train(const Overrides &o, const std::string &mode) {
  if (mode == "baseline" && o.metric) throw CLI::ValidationError("--metric", "not used by --mode baseline");
  CliConfig c = Resolve(o);
  const bool tcl = mode == "tcl";
  c.run.Validate(tcl);
  RequireFile(c.train, "train");
  RequireFile(c.dev, "dev");
  const Dataset train = ParseColumnFile(c.train, c.scheme);
  const Dataset dev = ParseColumnFile(c.dev, train.label_set(), train.vocab_ptr());

  const fs::path dir = FreshRunDir(c.out_dir, mode);
  nlohmann::ordered_json resolved = ToJson(c);
  resolved["mode"] = mode;
  WriteText(dir / "config.json", resolved.dump(2) + "\n");

  auto progress = [](const CurriculumState &, const EpochRecord &r) {
    std::fprintf(stderr, "epoch %d lambda %.4f selected %zu loss %.4f dev_f1 %.4f\n", r.epoch, r.lambda,
                 r.selected_size, r.train_loss, r.dev_f1_cws);
  };
  const RunResult result = tcl ? RunTcl(train, dev, c.run, progress) : RunBaseline(train, dev, c.run, progress);

  SaveCheckpoint(result.student, c.run.tagger, train.label_set(), train.vocab(), dir / "final.ckpt.json");
  SaveCheckpoint(result.best, c.run.tagger, train.label_set(), train.vocab(), dir / "best.ckpt.json");
  WriteText(dir / "runlog.jsonl", result.log.ToJsonLines());
  std::fprintf(stderr, "best dev f1 %.4f at epoch %d, %llu sentence visits\n", result.log.summary.best_dev_f1,
               result.log.summary.best_epoch, static_cast<unsigned long long>(result.log.summary.total_visits));
  std::cout << dir.string() << "\n";
  return 0;
}

// Data parsed against the checkpoint's labels and vocabulary when there is
// one, otherwise on its own.
Dataset LoadData(const fs::path &path, const std::optional<Checkpoint> &ckpt, Scheme scheme) {
  RequireFile(path, "data");
  if (!ckpt) return ParseColumnFile(path, scheme);
  Dataset data = ParseColumnFile(path, ckpt->label_set, ckpt->vocab);
  CheckCompatible(*ckpt, data);
  return data;
}

int Score(const Overrides &o, const std::string &checkpoint, const std::string &data_path,
          const std::string &out_csv) {
  CliConfig c = Resolve(o);
  c.run.metric.Validate();
  std::optional<Checkpoint> ckpt;
  if (!checkpoint.empty()) {
    RequireFile(checkpoint, "checkpoint");
    ckpt = LoadCheckpoint(checkpoint);
  } else if (c.run.metric.model_dependent()) {
    throw ConfigError(std::string("metric ") + std::string(MetricName(c.run.metric.kind)) + " needs --checkpoint");
  }
  const Dataset data = LoadData(data_path, ckpt, c.scheme);
  ScoringOptions options;
  options.threads = c.run.score_threads;
  if (ckpt) options.dropout_rate = ckpt->config.dropout_rate;
  Rng rng(c.run.seed);
  ScoringStats stats;
  const auto scores = ScoreDataset(ckpt ? &ckpt->params : nullptr, data, c.run.metric, options, rng, &stats);
  if (stats.mnlp_clamped > 0) {
    std::fprintf(stderr, "warning: %zu token probabilities clamped to %g\n", stats.mnlp_clamped, kMnlpMinProb);
  }

  std::ostringstream csv;
  csv << "sentence_id,score,metric\n";
  char buf[64];
  for (const auto &s : scores) {
    std::snprintf(buf, sizeof buf, "%.9g", s.score);
    csv << s.sentence_id << ',' << buf << ',' << MetricName(s.metric) << '\n';
  }
  if (out_csv.empty()) {
    std::cout << csv.str();
  } else {
    WriteText(out_csv, csv.str());
  }
  return 0;
}

nlohmann::ordered_json PrfJson(const Prf &p) {
  return {{"p", p.precision}, {"r", p.recall}, {"f1", p.f1}};
}

int Eval(const std::string &checkpoint, const std::string &data_path) {
  RequireFile(checkpoint, "checkpoint");
  const Checkpoint ckpt = LoadCheckpoint(checkpoint);
  const Dataset data = LoadData(data_path, ckpt, ckpt.label_set.scheme());
  const EvalReport report = Evaluate(ckpt.params, data);
  nlohmann::ordered_json out;
  out["cws"] = PrfJson(report.cws);
  if (report.joint) out["joint"] = PrfJson(*report.joint);
  out["sentences"] = report.sentences;
  out["tokens"] = report.tokens;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int Report(const std::vector<std::string> &paths, const std::string &out_csv) {
  std::vector<RunLog> logs;
  for (const auto &p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open run log " + p);
    std::stringstream text;
    text << in.rdbuf();
    try {
      logs.push_back(RunLog::FromJsonLines(text.str()));
    } catch (const ParseError &e) {
      throw Error(p + ": " + e.what());
    }
  }
  std::ostringstream csv;
  csv << "epoch";
  size_t rows = 0;
  for (size_t i = 0; i < logs.size(); ++i) {
    csv << ",run" << i + 1 << "_dev_f1,run" << i + 1 << "_visits";
    rows = std::max(rows, logs[i].StudentRecords().size());
  }
  csv << "\n";
  char buf[64];
  for (size_t e = 0; e < rows; ++e) {
    csv << e;
    for (const auto &log : logs) {
      const auto records = log.StudentRecords();
      if (e < records.size()) {
        std::snprintf(buf, sizeof buf, "%.6f", records[e]->dev_f1_cws);
        csv << ',' << buf << ',' << records[e]->cumulative_sentence_visits;
      } else {
        csv << ",,";
      }
    }
    csv << "\n";
  }
  if (out_csv.empty()) {
    std::cout << csv.str();
  } else {
    WriteText(out_csv, csv.str());
  }
  return 0;
}

}  // namespace
}  // namespace tcl::cli

int main(int argc, char **argv) {
  using namespace tcl::cli;
  CLI::App app{"Two-stage curriculum learning for sequence tagging"};
  app.require_subcommand(1);

  Overrides gen_o, train_o, score_o;
  CLI::App *gen = app.add_subcommand("gen", "Write a synthetic train/dev/test corpus and manifest");
  AddCommonFlags(gen, gen_o);
  gen->add_option("--scheme", gen_o.scheme, "bmes or joint");

  std::string mode = "tcl";
  CLI::App *train = app.add_subcommand("train", "Train a tagger, with or without the curriculum");
  AddCommonFlags(train, train_o);
  train->add_option("--mode", mode, "tcl or baseline")->check(CLI::IsMember({"tcl", "baseline"}));
  train->add_option("--metric", train_o.metric, "Difficulty metric: random, length, tlc, mnlp, bu");
  train->add_option("--train", train_o.train, "Training data (column format)");
  train->add_option("--dev", train_o.dev, "Dev data (column format)");
  train->add_option("--scheme", train_o.scheme, "Label scheme: bmes, joint or generic");
  train->add_option("--e0", train_o.e0, "Teacher epochs");
  train->add_option("--es", train_o.es, "Student epochs");
  train->add_option("--lambda0", train_o.lambda0, "Initial data fraction");
  train->add_option("--e-grow", train_o.e_grow, "Epochs until all data is used");
  train->add_option("--tlc-n", train_o.tlc_n, "Tokens averaged by tlc");
  train->add_option("--bu-k", train_o.bu_k, "Dropout passes for bu");
  train->add_option("--threads", train_o.threads, "Scoring threads");

  std::string checkpoint, data, out_csv;
  CLI::App *score = app.add_subcommand("score", "Write per-sentence difficulty scores as CSV");
  AddCommonFlags(score, score_o);
  score->add_option("--checkpoint", checkpoint, "Model checkpoint (not needed for length, random)");
  score->add_option("--data", data, "Data to score (column format)")->required();
  score->add_option("--metric", score_o.metric, "Difficulty metric");
  score->add_option("--scheme", score_o.scheme, "Label scheme when no checkpoint is given");
  score->add_option("--tlc-n", score_o.tlc_n, "Tokens averaged by tlc");
  score->add_option("--bu-k", score_o.bu_k, "Dropout passes for bu");
  score->add_option("--threads", score_o.threads, "Scoring threads");
  score->add_option("-o,--out", out_csv, "Output CSV (default stdout)");

  std::string eval_ckpt, eval_data;
  CLI::App *eval = app.add_subcommand("eval", "Print P/R/F1 of a checkpoint on a data file as JSON");
  eval->add_option("--checkpoint", eval_ckpt, "Model checkpoint")->required();
  eval->add_option("--data", eval_data, "Data to evaluate (column format)")->required();

  std::vector<std::string> logs;
  std::string report_out;
  CLI::App *report = app.add_subcommand("report", "Tabulate dev F1 and visits per epoch for run logs");
  report->add_option("logs", logs, "runlog.jsonl files")->required();
  report->add_option("-o,--out", report_out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
    if (*gen) return Gen(gen_o);
    if (*train) return Train(train_o, mode);
    if (*score) return Score(score_o, checkpoint, data, out_csv);
    if (*eval) return Eval(eval_ckpt, eval_data);
    if (*report) return Report(logs, report_out);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  } catch (const tcl::ConfigError &e) {
    std::fprintf(stderr, "tcl: config error: %s\n", e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "tcl: %s\n", e.what());
    return 1;
  }
  return 2;
}
