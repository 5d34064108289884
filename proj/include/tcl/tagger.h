#ifndef TCL_TAGGER_H_
#define TCL_TAGGER_H_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tcl/corpus.h"
#include "tcl/rng.h"

namespace tcl {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row i is the label distribution of token i.
using Distributions = Matrix;

struct TaggerConfig {
  int embed_dim = 32;
  // Context half-width; 2 * window + 1 tokens feed the hidden layer.
  int window = 2;
  int hidden_dim = 128;
  double dropout_rate = 0.1;
  double learning_rate = 0.1;
  int batch_size = 32;
  uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
  bool operator==(const TaggerConfig &) const = default;
};

// Learnable tensors of the window tagger:
//   embedding      |vocab| x embed_dim
//   hidden_weight  (2w+1)*embed_dim x hidden_dim
//   hidden_bias    1 x hidden_dim
//   output_weight  hidden_dim x |labels|
//   output_bias    1 x |labels|
struct TaggerParams {
  Matrix embedding;
  Matrix hidden_weight;
  Matrix hidden_bias;
  Matrix output_weight;
  Matrix output_bias;

  // Uniform [-0.1, 0.1] weights and embeddings, zero biases.
  static TaggerParams Init(const TaggerConfig &config, size_t vocab_size,
                           size_t num_labels, Rng &rng);
  static TaggerParams ZerosLike(const TaggerParams &other);

  int window() const;
  size_t vocab_size() const { return embedding.rows(); }
  size_t embed_dim() const { return embedding.cols(); }
  size_t hidden_dim() const { return hidden_weight.cols(); }
  size_t num_labels() const { return output_weight.cols(); }

  // Visits (name, tensor) in serialization order.
  void ForEachTensor(const std::function<void(const std::string &, Matrix &)> &fn);
  void ForEachTensor(const std::function<void(const std::string &, const Matrix &)> &fn) const;

  // Throws ShapeError if the tensors disagree with each other or with config.
  void CheckShapes(const TaggerConfig &config) const;
  bool AllFinite() const;

  bool operator==(const TaggerParams &other) const;
};

// Dropout is either off (deterministic forward) or on with a given rate,
// drawing inverted-dropout masks from the supplied stream.
class DropoutMode {
 public:
  static DropoutMode Off() { return DropoutMode(0.0, nullptr); }
  static DropoutMode On(double rate, Rng &rng) { return DropoutMode(rate, &rng); }

  bool active() const { return rng_ != nullptr; }
  double rate() const { return rate_; }
  Rng &rng() const { return *rng_; }

 private:
  DropoutMode(double rate, Rng *rng) : rate_(rate), rng_(rng) {}
  double rate_;
  Rng *rng_;
};

// Post-dropout hidden activations, one row per token.
Matrix HiddenActivations(const TaggerParams &params, const Sentence &sentence,
                         const DropoutMode &dropout);

// One softmax distribution per token. Throws ShapeError for token ids outside
// the embedding table.
Distributions Forward(const TaggerParams &params, const Sentence &sentence,
                      const DropoutMode &dropout);

// Argmax label per token with dropout off.
std::vector<int> Predict(const TaggerParams &params, const Sentence &sentence);

struct LossAndGrads {
  double loss = 0;
  TaggerParams grads;
};

// Mean token cross-entropy over the batch and its gradient with respect to
// every tensor.
LossAndGrads LossAndGradients(const TaggerParams &params,
                              std::span<const Sentence *const> batch,
                              const DropoutMode &dropout);
LossAndGrads LossAndGradients(const TaggerParams &params,
                              const std::vector<Sentence> &batch,
                              const DropoutMode &dropout);

// params -= learning_rate * grads. Throws NumericError naming the offending
// tensor if a gradient or an updated value is not finite.
void SgdStep(TaggerParams &params, const TaggerParams &grads, double learning_rate);

// Shuffles, then runs minibatch SGD with dropout on. Returns the mean of the
// per-batch losses.
double TrainOneEpoch(TaggerParams &params, std::span<const Sentence *const> data,
                     const TaggerConfig &config, Rng &rng);
double TrainOneEpoch(TaggerParams &params, const Dataset &data,
                     const TaggerConfig &config, Rng &rng);

struct Checkpoint {
  TaggerParams params;
  TaggerConfig config;
  LabelSet label_set;
  std::shared_ptr<const Vocab> vocab;
};

inline constexpr int kCheckpointVersion = 1;

// Self-describing JSON document. Tensors are stored row-major with 17
// significant digits so that loading reproduces every value exactly.
void SaveCheckpoint(const TaggerParams &params, const TaggerConfig &config,
                    const LabelSet &label_set, const Vocab &vocab,
                    const std::filesystem::path &path);
std::string SerializeCheckpoint(const TaggerParams &params, const TaggerConfig &config,
                                const LabelSet &label_set, const Vocab &vocab);

Checkpoint LoadCheckpoint(const std::filesystem::path &path);
Checkpoint DeserializeCheckpoint(const std::string &text);

// Throws ShapeError unless the checkpoint's label set matches the dataset's.
void CheckCompatible(const Checkpoint &checkpoint, const Dataset &data);

}  // namespace tcl

#endif  // TCL_TAGGER_H_
