#include <nlohmann/json.hpp>

#include "tcl/curriculum.h"
#include "tcl/errors.h"

namespace tcl {

using ordered_json = nlohmann::ordered_json;

std::string RunLog::ToJsonLines(bool include_wall_clock) const {
  std::string out;
  for (const EpochRecord &r : records) {
    ordered_json j;
    j["stage"] = r.stage;
    j["epoch"] = r.epoch;
    j["lambda"] = r.lambda;
    j["selected_size"] = r.selected_size;
    j["newly_added"] = r.newly_added;
    j["train_loss"] = r.train_loss;
    j["dev_f1_cws"] = r.dev_f1_cws;
    if (r.dev_f1_joint) j["dev_f1_joint"] = *r.dev_f1_joint;
    j["cumulative_sentence_visits"] = r.cumulative_sentence_visits;
    if (include_wall_clock) j["wall_ms"] = r.wall_ms;
    out += j.dump();
    out += '\n';
  }
  ordered_json s;
  s["stage"] = "summary";
  if (include_wall_clock) s["total_wall_ms"] = summary.total_wall_ms;
  s["total_visits"] = summary.total_visits;
  s["teacher_visits"] = summary.teacher_visits;
  s["best_dev_f1"] = summary.best_dev_f1;
  s["best_epoch"] = summary.best_epoch;
  out += s.dump();
  out += '\n';
  return out;
}

RunLog RunLog::FromJsonLines(std::string_view text) {
  RunLog log;
  size_t line_no = 0;
  size_t pos = 0;
  bool saw_summary = false;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto stage = j.at("stage").get<std::string>();
      if (stage == "summary") {
        log.summary.total_wall_ms = j.value("total_wall_ms", 0.0);
        log.summary.total_visits = j.at("total_visits").get<uint64_t>();
        log.summary.teacher_visits = j.value("teacher_visits", uint64_t{0});
        log.summary.best_dev_f1 = j.at("best_dev_f1").get<double>();
        log.summary.best_epoch = j.at("best_epoch").get<int>();
        saw_summary = true;
        continue;
      }
      if (stage != "teacher" && stage != "student") {
        throw ParseError("unknown stage '" + stage + "'", line_no);
      }
      EpochRecord r;
      r.stage = stage;
      r.epoch = j.at("epoch").get<int>();
      r.lambda = j.at("lambda").get<double>();
      r.selected_size = j.at("selected_size").get<size_t>();
      r.newly_added = j.at("newly_added").get<size_t>();
      r.train_loss = j.at("train_loss").get<double>();
      r.dev_f1_cws = j.at("dev_f1_cws").get<double>();
      if (j.contains("dev_f1_joint")) r.dev_f1_joint = j.at("dev_f1_joint").get<double>();
      r.cumulative_sentence_visits = j.at("cumulative_sentence_visits").get<uint64_t>();
      r.wall_ms = j.value("wall_ms", 0.0);
      log.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(std::string("malformed run log record: ") + e.what(), line_no);
    }
  }
  if (log.records.empty() && !saw_summary) throw ParseError("run log is empty");
  return log;
}

std::vector<const EpochRecord *> RunLog::StudentRecords() const {
  std::vector<const EpochRecord *> out;
  for (const auto &r : records) {
    if (r.stage == "student") out.push_back(&r);
  }
  return out;
}

}  // namespace tcl
