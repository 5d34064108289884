#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <set>

#include "tcl/curriculum.h"
#include "tcl/errors.h"
#include "tcl/eval.h"

namespace py = pybind11;
using namespace tcl;

namespace {

// A trained tagger with the labels and vocabulary it was trained on.
struct Model {
  Checkpoint ckpt;

  // data encoded against this model's vocabulary.
  Dataset Align(const Dataset &data) const {
    CheckCompatible(ckpt, data);
    if (data.vocab_ptr() == ckpt.vocab) return data;
    return data.Reencode(ckpt.vocab);
  }
};

Model MakeModel(const TaggerParams &params, const RunConfig &cfg, const Dataset &train) {
  return {{params, cfg.tagger, train.label_set(), train.vocab_ptr()}};
}

struct PyRunResult {
  Model final_model;
  Model best_model;
  RunLog log;
};

py::dict PrfDict(const Prf &p) {
  py::dict d;
  d["p"] = p.precision;
  d["r"] = p.recall;
  d["f1"] = p.f1;
  return d;
}

py::dict RecordDict(const EpochRecord &r) {
  py::dict d;
  d["stage"] = r.stage;
  d["epoch"] = r.epoch;
  d["lambda"] = r.lambda;
  d["selected_size"] = r.selected_size;
  d["newly_added"] = r.newly_added;
  d["train_loss"] = r.train_loss;
  d["dev_f1_cws"] = r.dev_f1_cws;
  d["dev_f1_joint"] = r.dev_f1_joint ? py::cast(*r.dev_f1_joint) : py::none();
  d["cumulative_sentence_visits"] = r.cumulative_sentence_visits;
  d["wall_ms"] = r.wall_ms;
  return d;
}

LabelSet LabelSetFor(const std::vector<std::string> &tags) {
  std::set<std::string> pos;
  bool joint = false;
  for (const auto &t : tags) {
    const auto dash = t.rfind('-');
    if (dash != std::string::npos) {
      joint = true;
      pos.insert(t.substr(0, dash));
    }
  }
  return joint ? LabelSet::Joint({pos.begin(), pos.end()}) : LabelSet::Segmentation();
}

SpanSet ToSpans(const std::vector<std::tuple<int, int, std::string>> &spans) {
  SpanSet out;
  for (const auto &[s, e, p] : spans) out.push_back({s, e, p});
  return out;
}

std::vector<DifficultyScore> Score(const Model *model, const Dataset &data, const std::string &metric, uint64_t seed,
                                   int top_n, int passes, int threads) {
  MetricConfig m;
  m.kind = ParseMetric(metric);
  m.top_n = top_n;
  m.passes = passes;
  m.seed = seed;
  m.Validate();
  ScoringOptions options;
  options.threads = threads;
  Rng rng(seed);
  if (!model) return ScoreDataset(nullptr, data, m, options, rng);
  options.dropout_rate = model->ckpt.config.dropout_rate;
  const Dataset aligned = model->Align(data);
  py::gil_scoped_release release;
  return ScoreDataset(&model->ckpt.params, aligned, m, options, rng);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-stage curriculum learning for sequence tagging";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<SchemeError>(m, "SchemeError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
  py::register_exception<NumericError>(m, "NumericError", error.ptr());
  auto ckpt_error = py::register_exception<CheckpointError>(m, "CheckpointError", error.ptr());
  py::register_exception<CheckpointVersionError>(m, "CheckpointVersionError", ckpt_error.ptr());

  // Scheduler.
  m.def(
      "lambda_at",
      [](double lambda0, int e_grow, int epoch) {
        const ScheduleConfig c{lambda0, e_grow};
        c.Validate();
        return LambdaAt(c, epoch);
      },
      py::arg("lambda0"), py::arg("e_grow"), py::arg("epoch"));
  m.def(
      "target_size",
      [](double lambda0, int e_grow, int epoch, size_t corpus_size) {
        const ScheduleConfig c{lambda0, e_grow};
        c.Validate();
        return TargetSize(c, epoch, corpus_size);
      },
      py::arg("lambda0"), py::arg("e_grow"), py::arg("epoch"), py::arg("corpus_size"));

  // Difficulty metrics over per-token label distributions (M x T arrays).
  m.def("lc_token", [](const std::vector<double> &p) { return LcToken(p); }, py::arg("probs"));
  m.def("score_tlc", [](const Distributions &d, int n) { return ScoreTlc(d, n); }, py::arg("dists"),
        py::arg("top_n") = 5);
  m.def("score_mnlp", [](const Distributions &d) { return ScoreMnlp(d); }, py::arg("dists"));
  m.def("bu_from_passes", [](const std::vector<Distributions> &passes) { return BuFromPasses(passes); },
        py::arg("passes"));

  // Evaluation.
  m.def(
      "decode_bmes",
      [](const std::vector<std::string> &tags) {
        const LabelSet ls = LabelSetFor(tags);
        std::vector<int> ids;
        for (const auto &t : tags) ids.push_back(ls.Id(t));
        std::vector<std::tuple<int, int, std::string>> out;
        for (const auto &s : DecodeBmes(ids, ls)) out.emplace_back(s.start, s.end, s.pos);
        return out;
      },
      py::arg("tags"), "Word spans (start, end, pos) of a BMES or POS-BMES tag sequence.");
  m.def(
      "f1",
      [](const std::vector<std::tuple<int, int, std::string>> &pred,
         const std::vector<std::tuple<int, int, std::string>> &gold, bool joint) {
        const Prf p = F1(ToSpans(pred), ToSpans(gold), joint);
        return std::make_tuple(p.precision, p.recall, p.f1);
      },
      py::arg("pred"), py::arg("gold"), py::arg("joint") = false);

  // Corpora.
  py::class_<Dataset>(m, "Dataset")
      .def("__len__", &Dataset::size)
      .def_property_readonly("labels", [](const Dataset &d) { return d.label_set().labels(); })
      .def_property_readonly("scheme", [](const Dataset &d) { return std::string(SchemeName(d.label_set().scheme())); })
      .def_property_readonly("token_count", &Dataset::token_count)
      .def("tokens", [](const Dataset &d, size_t i) { return d[i].tokens; }, py::arg("index"))
      .def(
          "tags",
          [](const Dataset &d, size_t i) {
            std::vector<std::string> out;
            for (int l : d[i].labels) out.push_back(d.label_set().Name(l));
            return out;
          },
          py::arg("index"))
      .def("to_column_text", &FormatColumnText)
      .def("write", [](const Dataset &d, const std::filesystem::path &p) { WriteColumnFile(d, p); }, py::arg("path"));

  m.def(
      "parse_column_file",
      [](const std::filesystem::path &path, const std::string &scheme) { return ParseColumnFile(path, ParseScheme(scheme)); },
      py::arg("path"), py::arg("scheme") = "bmes");
  m.def(
      "parse_column_file_like",
      [](const std::filesystem::path &path, const Dataset &like) {
        return ParseColumnFile(path, like.label_set(), like.vocab_ptr());
      },
      py::arg("path"), py::arg("like"), "Parse against the label set and vocabulary of another dataset.");

  py::class_<SynthConfig>(m, "SynthConfig")
      .def(py::init<>())
      .def_readwrite("vocab_a", &SynthConfig::vocab_a)
      .def_readwrite("vocab_b", &SynthConfig::vocab_b)
      .def_readwrite("chars_a", &SynthConfig::chars_a)
      .def_readwrite("chars_b", &SynthConfig::chars_b)
      .def_readwrite("word_length_probs", &SynthConfig::word_length_probs)
      .def_readwrite("num_pos", &SynthConfig::num_pos)
      .def_readwrite("min_words", &SynthConfig::min_words)
      .def_readwrite("max_words", &SynthConfig::max_words)
      .def_readwrite("train_size", &SynthConfig::train_size)
      .def_readwrite("dev_size", &SynthConfig::dev_size)
      .def_readwrite("test_size", &SynthConfig::test_size)
      .def_readwrite("noise_rate", &SynthConfig::noise_rate)
      .def_readwrite("mix_ratio", &SynthConfig::mix_ratio)
      .def_property(
          "scheme", [](const SynthConfig &c) { return std::string(SchemeName(c.scheme)); },
          [](SynthConfig &c, const std::string &s) { c.scheme = ParseScheme(s); });

  m.def(
      "generate_synthetic",
      [](const SynthConfig &config, uint64_t seed) {
        SynthCorpus c = GenerateSynthetic(config, seed);
        return std::make_tuple(std::move(c.train), std::move(c.dev), std::move(c.test));
      },
      py::arg("config"), py::arg("seed"), "Returns (train, dev, test).");

  // Training.
  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("e0", &RunConfig::e0)
      .def_readwrite("es", &RunConfig::es)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("score_threads", &RunConfig::score_threads)
      .def_property(
          "lambda0", [](const RunConfig &c) { return c.schedule.lambda0; },
          [](RunConfig &c, double v) { c.schedule.lambda0 = v; })
      .def_property(
          "e_grow", [](const RunConfig &c) { return c.schedule.e_grow; },
          [](RunConfig &c, int v) { c.schedule.e_grow = v; })
      .def_property(
          "metric", [](const RunConfig &c) { return std::string(MetricName(c.metric.kind)); },
          [](RunConfig &c, const std::string &v) { c.metric.kind = ParseMetric(v); })
      .def_property(
          "tlc_n", [](const RunConfig &c) { return c.metric.top_n; }, [](RunConfig &c, int v) { c.metric.top_n = v; })
      .def_property(
          "bu_k", [](const RunConfig &c) { return c.metric.passes; }, [](RunConfig &c, int v) { c.metric.passes = v; })
#define TCL_TAGGER_FIELD(name)                                      \
  def_property(                                                     \
      #name, [](const RunConfig &c) { return c.tagger.name; },      \
      [](RunConfig &c, decltype(TaggerConfig::name) v) { c.tagger.name = v; })
      .TCL_TAGGER_FIELD(embed_dim)
      .TCL_TAGGER_FIELD(window)
      .TCL_TAGGER_FIELD(hidden_dim)
      .TCL_TAGGER_FIELD(dropout_rate)
      .TCL_TAGGER_FIELD(learning_rate)
      .TCL_TAGGER_FIELD(batch_size);
#undef TCL_TAGGER_FIELD

  py::class_<Model>(m, "Model")
      .def(
          "evaluate",
          [](const Model &model, const Dataset &data) {
            const Dataset aligned = model.Align(data);
            const EvalReport r = Evaluate(model.ckpt.params, aligned);
            py::dict d;
            d["cws"] = PrfDict(r.cws);
            if (r.joint) d["joint"] = PrfDict(*r.joint);
            d["sentences"] = r.sentences;
            d["tokens"] = r.tokens;
            return d;
          },
          py::arg("data"))
      .def(
          "score",
          [](const Model &model, const Dataset &data, const std::string &metric, uint64_t seed, int top_n, int passes,
             int threads) {
            std::vector<double> out;
            for (const auto &s : Score(&model, data, metric, seed, top_n, passes, threads)) out.push_back(s.score);
            return out;
          },
          py::arg("data"), py::arg("metric") = "bu", py::arg("seed") = 0, py::arg("top_n") = 5, py::arg("passes") = 3,
          py::arg("threads") = 1)
      .def(
          "save",
          [](const Model &model, const std::filesystem::path &path) {
            SaveCheckpoint(model.ckpt.params, model.ckpt.config, model.ckpt.label_set, *model.ckpt.vocab, path);
          },
          py::arg("path"))
      .def("to_json", [](const Model &model) {
        return SerializeCheckpoint(model.ckpt.params, model.ckpt.config, model.ckpt.label_set, *model.ckpt.vocab);
      });

  m.def("load_model", [](const std::filesystem::path &path) { return Model{LoadCheckpoint(path)}; }, py::arg("path"));

  m.def(
      "score_model_free",
      [](const Dataset &data, const std::string &metric, uint64_t seed) {
        std::vector<double> out;
        for (const auto &s : Score(nullptr, data, metric, seed, 5, 3, 1)) out.push_back(s.score);
        return out;
      },
      py::arg("data"), py::arg("metric"), py::arg("seed") = 0, "Length or random scores, no model needed.");

  py::class_<PyRunResult>(m, "RunResult")
      .def_readonly("final", &PyRunResult::final_model)
      .def_readonly("best", &PyRunResult::best_model)
      .def("log_jsonl", [](const PyRunResult &r, bool wall_clock) { return r.log.ToJsonLines(wall_clock); },
           py::arg("include_wall_clock") = true)
      .def_property_readonly("records",
                             [](const PyRunResult &r) {
                               py::list out;
                               for (const auto &rec : r.log.records) out.append(RecordDict(rec));
                               return out;
                             })
      .def_property_readonly("summary", [](const PyRunResult &r) {
        py::dict d;
        d["total_wall_ms"] = r.log.summary.total_wall_ms;
        d["total_visits"] = r.log.summary.total_visits;
        d["teacher_visits"] = r.log.summary.teacher_visits;
        d["best_dev_f1"] = r.log.summary.best_dev_f1;
        d["best_epoch"] = r.log.summary.best_epoch;
        return d;
      });

  auto run = [](bool curriculum) {
    return [curriculum](const Dataset &train, const Dataset &dev_in, const RunConfig &cfg) {
      const Dataset dev = dev_in.vocab_ptr() == train.vocab_ptr() ? dev_in : dev_in.Reencode(train.vocab_ptr());
      RunResult r;
      {
        py::gil_scoped_release release;
        r = curriculum ? RunTcl(train, dev, cfg) : RunBaseline(train, dev, cfg);
      }
      return PyRunResult{MakeModel(r.student, cfg, train), MakeModel(r.best, cfg, train), std::move(r.log)};
    };
  };
  m.def("run_tcl", run(true), py::arg("train"), py::arg("dev"), py::arg("config"),
        "Teacher warm-up, then curriculum training of the student.");
  m.def("run_baseline", run(false), py::arg("train"), py::arg("dev"), py::arg("config"),
        "Plain training on all of train.");
}
