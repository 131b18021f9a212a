// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/metrics.hpp"

#include <algorithm>
#include <memory>
#include <unordered_map>

#include "dab/util/errors.hpp"

namespace dab::bench {

namespace {

double ratio(std::size_t num, std::size_t den, const char* name, std::vector<std::string>& undefined) {
  if (den == 0) {
    undefined.emplace_back(name);
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

void finish(EvalReport& r) {
  r.undefined.clear();
  r.accuracy = ratio(r.tp + r.tn, r.total, "accuracy", r.undefined);
  r.precision = ratio(r.tp, r.tp + r.fp, "precision", r.undefined);
  r.recall = ratio(r.tp, r.tp + r.fn, "recall", r.undefined);
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  } else {
    r.f1 = 0.0;
    r.undefined.emplace_back("f1");
  }
  r.yes_ratio = ratio(r.tp + r.fp, r.total, "yes_ratio", r.undefined);
}

double pct(double v) { return round_to(100.0 * v, 2); }

}  // namespace

EvalReport compute_metrics(std::span<const PredictionRecord> preds, std::span<const bool> gold,
                           std::string name) {
  if (preds.size() != gold.size()) {
    throw DimensionError("compute_metrics: " + std::to_string(preds.size()) +
                         " predictions for " + std::to_string(gold.size()) + " gold labels");
  }
  EvalReport r;
  r.name = std::move(name);
  r.total = preds.size();
  for (std::size_t i = 0; i < preds.size(); ++i) {
    switch (preds[i].parsed) {
      case Answer::yes: ++(gold[i] ? r.tp : r.fp); break;
      case Answer::no: ++(gold[i] ? r.fn : r.tn); break;
      case Answer::unparseable:
        ++r.unparseable;
        if (gold[i]) {
          ++r.fn;
        } else {
          ++r.unparseable_no;
        }
        break;
    }
  }
  finish(r);
  return r;
}

EvalReport compute_metrics(std::span<const PredictionRecord> preds, const std::vector<bool>& gold,
                           std::string name) {
  // vector<bool> has no contiguous storage to view.
  const std::unique_ptr<bool[]> flat(new bool[gold.size()]);
  for (std::size_t i = 0; i < gold.size(); ++i) flat[i] = gold[i];
  return compute_metrics(preds, std::span<const bool>(flat.get(), gold.size()), std::move(name));
}

EvalReport evaluate(std::span<const QAInstance> instances,
                    std::span<const PredictionRecord> preds, std::string name) {
  std::unordered_map<std::string, const PredictionRecord*> by_id;
  for (const auto& p : preds) by_id.emplace(p.instance_id, &p);
  std::vector<PredictionRecord> aligned;
  std::vector<bool> gold;
  std::vector<std::string> missing;
  for (const auto& inst : instances) {
    const auto it = by_id.find(inst.id);
    if (it == by_id.end()) {
      missing.push_back(inst.id);
      continue;
    }
    aligned.push_back(*it->second);
    gold.push_back(inst.gold);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 20) list += ", ...";
    throw DataError("no prediction for " + std::to_string(missing.size()) + " instance(s): " + list);
  }
  return compute_metrics(aligned, gold, std::move(name));
}

EvalReport macro_average(std::span<const EvalReport> reports, std::string name) {
  EvalReport r;
  r.name = std::move(name);
  if (reports.empty()) {
    finish(r);
    return r;
  }
  for (const auto& x : reports) {
    r.total += x.total;
    r.tp += x.tp;
    r.fp += x.fp;
    r.tn += x.tn;
    r.fn += x.fn;
    r.unparseable += x.unparseable;
    r.unparseable_no += x.unparseable_no;
    r.accuracy += x.accuracy;
    r.precision += x.precision;
    r.recall += x.recall;
    r.f1 += x.f1;
    r.yes_ratio += x.yes_ratio;
    for (const auto& u : x.undefined) {
      if (std::find(r.undefined.begin(), r.undefined.end(), u) == r.undefined.end()) {
        r.undefined.push_back(u);
      }
    }
  }
  const auto n = static_cast<double>(reports.size());
  r.accuracy /= n;
  r.precision /= n;
  r.recall /= n;
  r.f1 /= n;
  r.yes_ratio /= n;
  return r;
}

Json to_json(const EvalReport& r) {
  Json j{{"name", r.name},       {"total", r.total},
         {"tp", r.tp},           {"fp", r.fp},
         {"tn", r.tn},           {"fn", r.fn},
         {"unparseable", r.unparseable},
         {"accuracy", pct(r.accuracy)},
         {"precision", pct(r.precision)},
         {"recall", pct(r.recall)},
         {"f1", pct(r.f1)},
         {"yes_ratio", pct(r.yes_ratio)}};
  if (!r.undefined.empty()) j["undefined"] = r.undefined;
  return j;
}

std::string to_csv_row(const EvalReport& r) {
  std::string row = r.name;
  for (auto c : {r.total, r.tp, r.fp, r.tn, r.fn, r.unparseable}) row += "," + std::to_string(c);
  for (double m : {r.accuracy, r.precision, r.recall, r.f1, r.yes_ratio}) {
    row += "," + format_fixed(100.0 * m, 2);
  }
  return row;
}

std::string reports_to_csv(std::span<const EvalReport> reports) {
  std::string out = std::string(kReportCsvHeader) + "\n";
  for (const auto& r : reports) out += to_csv_row(r) + "\n";
  return out;
}

}  // namespace dab::bench
