#include "cli_config.h"

#include <chrono>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>

#include "tcl/errors.h"

namespace tcl::cli {
namespace {

using nlohmann::json;
using Setter = std::function<void(const json &, CliConfig &)>;

template <typename T>
T As(const std::string &key, const json &v) {
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError(key + ": expected a string");
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw ConfigError(key + ": expected a number");
  } else if constexpr (std::is_same_v<T, uint64_t>) {
    if (!v.is_number_unsigned()) throw ConfigError(key + ": expected a non-negative integer");
  } else {
    if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
  }
  return v.get<T>();
}

template <typename T, typename F>
std::pair<const std::string, Setter> Key(const std::string &key, F field) {
  return {key, [key, field](const json &v, CliConfig &c) { field(c) = As<T>(key, v); }};
}

const std::map<std::string, Setter> &Setters() {
  static const std::map<std::string, Setter> setters = {
      Key<uint64_t>("seed", [](CliConfig &c) -> uint64_t & { return c.run.seed; }),
      Key<int>("e0", [](CliConfig &c) -> int & { return c.run.e0; }),
      Key<int>("es", [](CliConfig &c) -> int & { return c.run.es; }),
      Key<double>("lambda0", [](CliConfig &c) -> double & { return c.run.schedule.lambda0; }),
      Key<int>("e_grow", [](CliConfig &c) -> int & { return c.run.schedule.e_grow; }),
      Key<int>("tlc_n", [](CliConfig &c) -> int & { return c.run.metric.top_n; }),
      Key<int>("bu_k", [](CliConfig &c) -> int & { return c.run.metric.passes; }),
      Key<int>("score_threads", [](CliConfig &c) -> int & { return c.run.score_threads; }),
      Key<int>("embed_dim", [](CliConfig &c) -> int & { return c.run.tagger.embed_dim; }),
      Key<int>("window", [](CliConfig &c) -> int & { return c.run.tagger.window; }),
      Key<int>("hidden_dim", [](CliConfig &c) -> int & { return c.run.tagger.hidden_dim; }),
      Key<double>("dropout_rate", [](CliConfig &c) -> double & { return c.run.tagger.dropout_rate; }),
      Key<double>("learning_rate", [](CliConfig &c) -> double & { return c.run.tagger.learning_rate; }),
      Key<int>("batch_size", [](CliConfig &c) -> int & { return c.run.tagger.batch_size; }),
      Key<int>("synth_vocab_a", [](CliConfig &c) -> int & { return c.synth.vocab_a; }),
      Key<int>("synth_vocab_b", [](CliConfig &c) -> int & { return c.synth.vocab_b; }),
      Key<int>("synth_chars_a", [](CliConfig &c) -> int & { return c.synth.chars_a; }),
      Key<int>("synth_chars_b", [](CliConfig &c) -> int & { return c.synth.chars_b; }),
      Key<int>("synth_num_pos", [](CliConfig &c) -> int & { return c.synth.num_pos; }),
      Key<int>("synth_min_words", [](CliConfig &c) -> int & { return c.synth.min_words; }),
      Key<int>("synth_max_words", [](CliConfig &c) -> int & { return c.synth.max_words; }),
      Key<int>("synth_train_size", [](CliConfig &c) -> int & { return c.synth.train_size; }),
      Key<int>("synth_dev_size", [](CliConfig &c) -> int & { return c.synth.dev_size; }),
      Key<int>("synth_test_size", [](CliConfig &c) -> int & { return c.synth.test_size; }),
      Key<double>("synth_noise_rate", [](CliConfig &c) -> double & { return c.synth.noise_rate; }),
      Key<double>("synth_mix_ratio", [](CliConfig &c) -> double & { return c.synth.mix_ratio; }),
      {"synth_word_length_probs",
       [](const json &v, CliConfig &c) {
         if (!v.is_array() || v.size() != 3) {
           throw ConfigError("synth_word_length_probs: expected an array of 3 numbers");
         }
         for (size_t i = 0; i < 3; ++i) c.synth.word_length_probs[i] = As<double>("synth_word_length_probs", v[i]);
       }},
      {"metric",
       [](const json &v, CliConfig &c) { c.run.metric.kind = ParseMetric(As<std::string>("metric", v)); }},
      {"scheme",
       [](const json &v, CliConfig &c) {
         c.scheme = ParseScheme(As<std::string>("scheme", v));
         c.synth.scheme = c.scheme;
       }},
      {"train", [](const json &v, CliConfig &c) { c.train = As<std::string>("train", v); }},
      {"dev", [](const json &v, CliConfig &c) { c.dev = As<std::string>("dev", v); }},
      {"test", [](const json &v, CliConfig &c) { c.test = As<std::string>("test", v); }},
      {"out_dir", [](const json &v, CliConfig &c) { c.out_dir = As<std::string>("out_dir", v); }},
  };
  return setters;
}

}  // namespace

void ApplyJson(const json &doc, CliConfig &config) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  const auto &setters = Setters();
  for (const auto &[key, value] : doc.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(value, config);
  }
}

void ApplyFile(const std::filesystem::path &path, CliConfig &config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config file " + path.string() + " is not valid JSON");
  ApplyJson(doc, config);
}

std::optional<uint64_t> SeedFromEnv() {
  const char *v = std::getenv("TCL_SEED");
  if (!v || !*v) return std::nullopt;
  char *end = nullptr;
  errno = 0;
  const unsigned long long seed = std::strtoull(v, &end, 10);
  if (*end != '\0' || errno != 0 || *v == '-') throw ConfigError(std::string("TCL_SEED is not an unsigned integer: ") + v);
  return seed;
}

nlohmann::ordered_json SynthToJson(const SynthConfig &s) {
  nlohmann::ordered_json j;
  j["synth_vocab_a"] = s.vocab_a;
  j["synth_vocab_b"] = s.vocab_b;
  j["synth_chars_a"] = s.chars_a;
  j["synth_chars_b"] = s.chars_b;
  j["synth_word_length_probs"] = s.word_length_probs;
  j["synth_num_pos"] = s.num_pos;
  j["synth_min_words"] = s.min_words;
  j["synth_max_words"] = s.max_words;
  j["synth_train_size"] = s.train_size;
  j["synth_dev_size"] = s.dev_size;
  j["synth_test_size"] = s.test_size;
  j["synth_noise_rate"] = s.noise_rate;
  j["synth_mix_ratio"] = s.mix_ratio;
  j["scheme"] = SchemeName(s.scheme);
  return j;
}

nlohmann::ordered_json ToJson(const CliConfig &c) {
  nlohmann::ordered_json j;
  j["seed"] = c.run.seed;
  j["e0"] = c.run.e0;
  j["es"] = c.run.es;
  j["lambda0"] = c.run.schedule.lambda0;
  j["e_grow"] = c.run.schedule.e_grow;
  j["metric"] = MetricName(c.run.metric.kind);
  j["tlc_n"] = c.run.metric.top_n;
  j["bu_k"] = c.run.metric.passes;
  j["score_threads"] = c.run.score_threads;
  j["embed_dim"] = c.run.tagger.embed_dim;
  j["window"] = c.run.tagger.window;
  j["hidden_dim"] = c.run.tagger.hidden_dim;
  j["dropout_rate"] = c.run.tagger.dropout_rate;
  j["learning_rate"] = c.run.tagger.learning_rate;
  j["batch_size"] = c.run.tagger.batch_size;
  const auto synth = SynthToJson(c.synth);
  for (const auto &[k, v] : synth.items()) j[k] = v;
  j["scheme"] = SchemeName(c.scheme);
  j["train"] = c.train.string();
  j["dev"] = c.dev.string();
  j["test"] = c.test.string();
  j["out_dir"] = c.out_dir.string();
  return j;
}

std::string SynthHash(const SynthConfig &synth) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : SynthToJson(synth).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path FreshRunDir(const std::filesystem::path &out_dir, const std::string &prefix) {
  std::filesystem::create_directories(out_dir);
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  const std::string base = prefix + "-" + stamp;
  for (int n = 1;; ++n) {
    auto dir = out_dir / (n == 1 ? base : base + "-" + std::to_string(n));
    if (std::filesystem::create_directory(dir)) return dir;
  }
}

}  // namespace tcl::cli
