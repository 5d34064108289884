#include "tcl/tagger.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tcl/errors.h"

namespace tcl {

using nlohmann::json;

void TaggerConfig::Validate() const {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) throw ConfigError("tagger config: " + what);
  };
  require(embed_dim >= 1, "embed_dim must be >= 1");
  require(window >= 0, "window must be >= 0");
  require(hidden_dim >= 1, "hidden_dim must be >= 1");
  require(dropout_rate >= 0 && dropout_rate < 1, "dropout_rate must be in [0, 1)");
  require(learning_rate > 0 && std::isfinite(learning_rate), "learning_rate must be positive");
  require(batch_size >= 1, "batch_size must be >= 1");
}

// ---------------------------------------------------------------------------
// Parameters

TaggerParams TaggerParams::Init(const TaggerConfig &config, size_t vocab_size,
                                size_t num_labels, Rng &rng) {
  config.Validate();
  if (vocab_size < 2) throw ShapeError("vocabulary must hold the two reserved ids");
  if (num_labels < 1) throw ShapeError("label set is empty");
  const Eigen::Index context = (2 * config.window + 1) * config.embed_dim;
  auto uniform = [&rng](Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Uniform(-0.1, 0.1);
    return m;
  };
  TaggerParams p;
  p.embedding = uniform(vocab_size, config.embed_dim);
  p.hidden_weight = uniform(context, config.hidden_dim);
  p.hidden_bias = Matrix::Zero(1, config.hidden_dim);
  p.output_weight = uniform(config.hidden_dim, num_labels);
  p.output_bias = Matrix::Zero(1, num_labels);
  return p;
}

TaggerParams TaggerParams::ZerosLike(const TaggerParams &other) {
  TaggerParams p;
  p.embedding = Matrix::Zero(other.embedding.rows(), other.embedding.cols());
  p.hidden_weight = Matrix::Zero(other.hidden_weight.rows(), other.hidden_weight.cols());
  p.hidden_bias = Matrix::Zero(1, other.hidden_bias.cols());
  p.output_weight = Matrix::Zero(other.output_weight.rows(), other.output_weight.cols());
  p.output_bias = Matrix::Zero(1, other.output_bias.cols());
  return p;
}

int TaggerParams::window() const {
  const auto d = embedding.cols();
  if (d == 0) return 0;
  return static_cast<int>((hidden_weight.rows() / d - 1) / 2);
}

void TaggerParams::ForEachTensor(
    const std::function<void(const std::string &, Matrix &)> &fn) {
  fn("embedding", embedding);
  fn("hidden_weight", hidden_weight);
  fn("hidden_bias", hidden_bias);
  fn("output_weight", output_weight);
  fn("output_bias", output_bias);
}

void TaggerParams::ForEachTensor(
    const std::function<void(const std::string &, const Matrix &)> &fn) const {
  fn("embedding", embedding);
  fn("hidden_weight", hidden_weight);
  fn("hidden_bias", hidden_bias);
  fn("output_weight", output_weight);
  fn("output_bias", output_bias);
}

void TaggerParams::CheckShapes(const TaggerConfig &config) const {
  auto expect = [](const std::string &name, const Matrix &m, Eigen::Index rows,
                   Eigen::Index cols) {
    if (m.rows() != rows || m.cols() != cols) {
      throw ShapeError(name + " is " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                       "x" + std::to_string(cols));
    }
  };
  const Eigen::Index context = (2 * config.window + 1) * config.embed_dim;
  expect("embedding", embedding, embedding.rows(), config.embed_dim);
  expect("hidden_weight", hidden_weight, context, config.hidden_dim);
  expect("hidden_bias", hidden_bias, 1, config.hidden_dim);
  expect("output_weight", output_weight, config.hidden_dim, output_weight.cols());
  expect("output_bias", output_bias, 1, output_weight.cols());
}

bool TaggerParams::AllFinite() const {
  bool finite = true;
  ForEachTensor([&finite](const std::string &, const Matrix &m) {
    finite = finite && m.allFinite();
  });
  return finite;
}

bool TaggerParams::operator==(const TaggerParams &o) const {
  auto same = [](const Matrix &a, const Matrix &b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
  };
  return same(embedding, o.embedding) && same(hidden_weight, o.hidden_weight) &&
         same(hidden_bias, o.hidden_bias) && same(output_weight, o.output_weight) &&
         same(output_bias, o.output_bias);
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

struct Activations {
  // Vocabulary id of every context slot, (2w+1) per token.
  std::vector<int> context_ids;
  Matrix inputs;
  Matrix hidden;
  // Scaled keep mask; empty when dropout is off.
  Matrix mask;
  Matrix dropped;
  Matrix logits;
};

Activations RunForward(const TaggerParams &params,
                       std::span<const Sentence *const> batch,
                       const DropoutMode &dropout) {
  const int w = params.window();
  const Eigen::Index d = params.embed_dim();
  const Eigen::Index span = 2 * w + 1;
  const auto vocab_size = static_cast<int>(params.vocab_size());

  Eigen::Index tokens = 0;
  for (const Sentence *s : batch) tokens += static_cast<Eigen::Index>(s->size());

  Activations a;
  a.context_ids.resize(tokens * span);
  a.inputs.resize(tokens, span * d);
  Eigen::Index row = 0;
  for (const Sentence *s : batch) {
    const auto m = static_cast<int>(s->token_ids.size());
    for (int i = 0; i < m; ++i, ++row) {
      for (int k = -w; k <= w; ++k) {
        const int j = i + k;
        const int id = (j < 0 || j >= m) ? Vocab::kBoundary : s->token_ids[j];
        if (id < 0 || id >= vocab_size) {
          throw ShapeError("token id " + std::to_string(id) + " in sentence " +
                           std::to_string(s->id) + " is outside the embedding table of " +
                           std::to_string(vocab_size) + " rows");
        }
        a.context_ids[row * span + (k + w)] = id;
        a.inputs.block(row, (k + w) * d, 1, d) = params.embedding.row(id);
      }
    }
  }

  a.hidden.noalias() = a.inputs * params.hidden_weight;
  a.hidden.rowwise() += params.hidden_bias.row(0);
  a.hidden = a.hidden.array().tanh().matrix();

  if (dropout.active()) {
    const double keep = 1.0 - dropout.rate();
    const double scale = 1.0 / keep;
    a.mask.resize(a.hidden.rows(), a.hidden.cols());
    Rng &rng = dropout.rng();
    for (Eigen::Index i = 0; i < a.mask.size(); ++i) {
      a.mask.data()[i] = rng.Uniform() < keep ? scale : 0.0;
    }
    a.dropped = a.hidden.cwiseProduct(a.mask);
  } else {
    a.dropped = a.hidden;
  }

  a.logits.noalias() = a.dropped * params.output_weight;
  a.logits.rowwise() += params.output_bias.row(0);
  return a;
}

// Row-wise softmax, shifted by the row maximum.
Matrix Softmax(const Matrix &logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    p.row(r) = (logits.row(r).array() - mx).exp().matrix();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

}  // namespace

Matrix HiddenActivations(const TaggerParams &params, const Sentence &sentence,
                         const DropoutMode &dropout) {
  const Sentence *one[] = {&sentence};
  return RunForward(params, one, dropout).dropped;
}

Distributions Forward(const TaggerParams &params, const Sentence &sentence,
                      const DropoutMode &dropout) {
  const Sentence *one[] = {&sentence};
  return Softmax(RunForward(params, one, dropout).logits);
}

std::vector<int> Predict(const TaggerParams &params, const Sentence &sentence) {
  const Sentence *one[] = {&sentence};
  const Matrix logits = RunForward(params, one, DropoutMode::Off()).logits;
  std::vector<int> out(logits.rows());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index best;
    logits.row(r).maxCoeff(&best);
    out[r] = static_cast<int>(best);
  }
  return out;
}

LossAndGrads LossAndGradients(const TaggerParams &params,
                              std::span<const Sentence *const> batch,
                              const DropoutMode &dropout) {
  if (batch.empty()) throw Error("loss requires a non-empty batch");
  Activations a = RunForward(params, batch, dropout);
  const Eigen::Index n = a.logits.rows();
  const auto num_labels = static_cast<int>(params.num_labels());

  // dlogits = (softmax - onehot) / n
  Matrix dlogits(n, a.logits.cols());
  double loss = 0;
  Eigen::Index row = 0;
  for (const Sentence *s : batch) {
    for (int gold : s->labels) {
      if (gold < 0 || gold >= num_labels) {
        throw ShapeError("gold label id " + std::to_string(gold) + " outside the output layer");
      }
      const double mx = a.logits.row(row).maxCoeff();
      const auto shifted = (a.logits.row(row).array() - mx).eval();
      const auto e = shifted.exp().eval();
      const double z = e.sum();
      loss += std::log(z) - shifted(gold);
      dlogits.row(row) = (e / z).matrix();
      dlogits(row, gold) -= 1.0;
      ++row;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  dlogits *= inv_n;

  LossAndGrads out;
  out.loss = loss * inv_n;
  TaggerParams &g = out.grads;
  g = TaggerParams::ZerosLike(params);

  g.output_weight.noalias() = a.dropped.transpose() * dlogits;
  g.output_bias = dlogits.colwise().sum();

  Matrix dhidden = dlogits * params.output_weight.transpose();
  if (dropout.active()) dhidden = dhidden.cwiseProduct(a.mask);
  Matrix dpre = dhidden.cwiseProduct(
      (1.0 - a.hidden.array().square()).matrix());

  g.hidden_weight.noalias() = a.inputs.transpose() * dpre;
  g.hidden_bias = dpre.colwise().sum();

  const Matrix dinputs = dpre * params.hidden_weight.transpose();
  const Eigen::Index d = params.embed_dim();
  const Eigen::Index span = 2 * params.window() + 1;
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index k = 0; k < span; ++k) {
      g.embedding.row(a.context_ids[t * span + k]) += dinputs.block(t, k * d, 1, d);
    }
  }
  return out;
}

LossAndGrads LossAndGradients(const TaggerParams &params,
                              const std::vector<Sentence> &batch,
                              const DropoutMode &dropout) {
  std::vector<const Sentence *> ptrs;
  ptrs.reserve(batch.size());
  for (const auto &s : batch) ptrs.push_back(&s);
  return LossAndGradients(params, ptrs, dropout);
}

void SgdStep(TaggerParams &params, const TaggerParams &grads, double learning_rate) {
  std::vector<const Matrix *> g;
  grads.ForEachTensor([&g](const std::string &, const Matrix &m) { g.push_back(&m); });
  size_t i = 0;
  params.ForEachTensor([&](const std::string &name, Matrix &p) {
    const Matrix &gi = *g[i++];
    if (gi.rows() != p.rows() || gi.cols() != p.cols()) {
      throw ShapeError("gradient for " + name + " has the wrong shape");
    }
    if (!gi.allFinite()) throw NumericError("non-finite gradient in tensor '" + name + "'");
    p.noalias() -= learning_rate * gi;
    if (!p.allFinite()) throw NumericError("non-finite value in tensor '" + name + "' after update");
  });
}

double TrainOneEpoch(TaggerParams &params, std::span<const Sentence *const> data,
                     const TaggerConfig &config, Rng &rng) {
  if (data.empty()) throw Error("cannot train on an empty data set");
  std::vector<const Sentence *> order(data.begin(), data.end());
  rng.Shuffle(std::span<const Sentence *>(order));
  const size_t batch = static_cast<size_t>(config.batch_size);
  double total = 0;
  size_t batches = 0;
  for (size_t start = 0; start < order.size(); start += batch) {
    const size_t len = std::min(batch, order.size() - start);
    std::span<const Sentence *const> chunk(order.data() + start, len);
    LossAndGrads lg = LossAndGradients(params, chunk, DropoutMode::On(config.dropout_rate, rng));
    SgdStep(params, lg.grads, config.learning_rate);
    total += lg.loss;
    ++batches;
  }
  return total / static_cast<double>(batches);
}

double TrainOneEpoch(TaggerParams &params, const Dataset &data,
                     const TaggerConfig &config, Rng &rng) {
  std::vector<const Sentence *> ptrs;
  ptrs.reserve(data.size());
  for (const auto &s : data.sentences()) ptrs.push_back(&s);
  return TrainOneEpoch(params, ptrs, config, rng);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[] = "{\"format\":\"tcl-checkpoint\"";

json ConfigToJson(const TaggerConfig &c) {
  return json{{"embed_dim", c.embed_dim},         {"window", c.window},
              {"hidden_dim", c.hidden_dim},       {"dropout_rate", c.dropout_rate},
              {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
              {"seed", c.seed}};
}

TaggerConfig ConfigFromJson(const json &j) {
  TaggerConfig c;
  c.embed_dim = j.at("embed_dim").get<int>();
  c.window = j.at("window").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

LabelSet LabelSetFromJson(const json &j) {
  const Scheme scheme = ParseScheme(j.at("scheme").get<std::string>());
  const auto labels = j.at("labels").get<std::vector<std::string>>();
  LabelSet set;
  if (scheme == Scheme::kSegmentation) {
    set = LabelSet::Segmentation();
  } else if (scheme == Scheme::kJoint) {
    std::vector<std::string> pos;
    for (const auto &l : labels) {
      auto dash = l.rfind('-');
      if (dash == std::string::npos) throw CheckpointError("malformed joint label '" + l + "'");
      pos.push_back(l.substr(0, dash));
    }
    set = LabelSet::Joint(pos);
  } else {
    set = LabelSet::Generic(labels);
  }
  if (set.labels() != labels) throw CheckpointError("label set is not in canonical order");
  return set;
}

void AppendDouble(double v, std::string *out) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out->append(buf);
}

}  // namespace

std::string SerializeCheckpoint(const TaggerParams &params, const TaggerConfig &config,
                                const LabelSet &label_set, const Vocab &vocab) {
  params.CheckShapes(config);
  if (params.vocab_size() != vocab.size()) {
    throw ShapeError("embedding has " + std::to_string(params.vocab_size()) +
                     " rows but the vocabulary has " + std::to_string(vocab.size()));
  }
  if (params.num_labels() != label_set.size()) {
    throw ShapeError("output layer has " + std::to_string(params.num_labels()) +
                     " labels but the label set has " + std::to_string(label_set.size()));
  }
  std::string out = kMagic;
  out += ",\"format_version\":" + std::to_string(kCheckpointVersion) + ",\n";
  out += "\"config\":" + ConfigToJson(config).dump() + ",\n";
  out += "\"label_set\":" +
         json{{"scheme", SchemeName(label_set.scheme())}, {"labels", label_set.labels()}}.dump() +
         ",\n";
  out += "\"vocab\":" + json(vocab.tokens()).dump() + ",\n";
  out += "\"tensors\":{";
  bool first = true;
  params.ForEachTensor([&](const std::string &name, const Matrix &m) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "\"" + name + "\":{\"rows\":" + std::to_string(m.rows()) +
           ",\"cols\":" + std::to_string(m.cols()) + ",\"data\":[";
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (i) out += ',';
      AppendDouble(m.data()[i], &out);
    }
    out += "]}";
  });
  out += "}}\n";
  return out;
}

void SaveCheckpoint(const TaggerParams &params, const TaggerConfig &config,
                    const LabelSet &label_set, const Vocab &vocab,
                    const std::filesystem::path &path) {
  const std::string text = SerializeCheckpoint(params, config, label_set, vocab);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out << text;
  if (!out) throw CheckpointError("write failed for checkpoint " + path.string());
}

Checkpoint DeserializeCheckpoint(const std::string &text) {
  if (text.rfind(kMagic, 0) != 0) {
    throw CheckpointVersionError("not a tcl checkpoint (bad magic)");
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw CheckpointError(std::string("truncated or malformed checkpoint: ") + e.what());
  }
  Checkpoint ck;
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      throw CheckpointVersionError("unsupported checkpoint format_version " +
                                   std::to_string(version));
    }
    ck.config = ConfigFromJson(doc.at("config"));
    ck.config.Validate();
    ck.label_set = LabelSetFromJson(doc.at("label_set"));

    const auto tokens = doc.at("vocab").get<std::vector<std::string>>();
    if (tokens.size() < 2) throw CheckpointError("vocabulary lacks the reserved ids");
    auto vocab = std::make_shared<Vocab>();
    for (size_t i = 2; i < tokens.size(); ++i) {
      if (vocab->Add(tokens[i]) != static_cast<int>(i)) {
        throw CheckpointError("duplicate vocabulary token '" + tokens[i] + "'");
      }
    }
    ck.vocab = vocab;

    const json &tensors = doc.at("tensors");
    ck.params.ForEachTensor([&](const std::string &name, Matrix &m) {
      const json &t = tensors.at(name);
      const auto rows = t.at("rows").get<Eigen::Index>();
      const auto cols = t.at("cols").get<Eigen::Index>();
      const json &data = t.at("data");
      if (rows < 0 || cols < 0 || static_cast<size_t>(rows * cols) != data.size()) {
        throw ShapeError("tensor " + name + " declares " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " but holds " + std::to_string(data.size()) +
                         " values");
      }
      m.resize(rows, cols);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = data[i].get<double>();
    });
  } catch (const json::exception &e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
  ck.params.CheckShapes(ck.config);
  if (ck.params.vocab_size() != ck.vocab->size()) {
    throw ShapeError("embedding rows do not match the stored vocabulary");
  }
  if (ck.params.num_labels() != ck.label_set.size()) {
    throw ShapeError("output layer does not match the stored label set");
  }
  return ck;
}

Checkpoint LoadCheckpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return DeserializeCheckpoint(text);
}

void CheckCompatible(const Checkpoint &checkpoint, const Dataset &data) {
  if (!(checkpoint.label_set == data.label_set())) {
    throw ShapeError("checkpoint has " + std::to_string(checkpoint.label_set.size()) + " " +
                     std::string(SchemeName(checkpoint.label_set.scheme())) +
                     " labels but the data uses " + std::to_string(data.label_set().size()) +
                     " " + std::string(SchemeName(data.label_set().scheme())) + " labels");
  }
  if (data.vocab().size() > checkpoint.params.vocab_size()) {
    throw ShapeError("data vocabulary is larger than the checkpoint embedding table");
  }
}

}  // namespace tcl
