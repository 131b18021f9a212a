// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "dab/bench/answers.hpp"
#include "dab/bench/qa_instance.hpp"

namespace dab::bench {

/// Confusion counts and the five summary metrics, as fractions in [0, 1].
///
/// "yes" is the positive class. An unparseable answer is always wrong: it
/// adds to fn when the gold is yes and to `unparseable_no` when the gold
/// is no, so it never inflates tp, fp or tn. A metric whose denominator
/// is zero is reported as 0 and named in `undefined`.
struct EvalReport {
  std::string name;
  std::size_t total = 0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t unparseable = 0;     // all unparseable answers
  std::size_t unparseable_no = 0;  // the ones with gold no
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0, yes_ratio = 0.0;
  std::vector<std::string> undefined;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Throws DimensionError when the lists differ in length.
EvalReport compute_metrics(std::span<const PredictionRecord> preds, std::span<const bool> gold,
                           std::string name = {});
EvalReport compute_metrics(std::span<const PredictionRecord> preds, const std::vector<bool>& gold,
                           std::string name = {});

/// Aligns predictions to instances by id. Missing ids are a DataError
/// listing them; predictions for unknown ids are ignored.
EvalReport evaluate(std::span<const QAInstance> instances,
                    std::span<const PredictionRecord> preds, std::string name = {});

/// Unweighted mean of each metric; counts are summed.
EvalReport macro_average(std::span<const EvalReport> reports, std::string name);

/// Metrics as percentages rounded to 2 places.
Json to_json(const EvalReport& report);
inline constexpr const char* kReportCsvHeader =
    "name,total,tp,fp,tn,fn,unparseable,accuracy,precision,recall,f1,yes_ratio";
std::string to_csv_row(const EvalReport& report);
std::string reports_to_csv(std::span<const EvalReport> reports);

}  // namespace dab::bench
