// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>

#include "dab/harness/options.hpp"

namespace dab::harness {

// Each command writes its files plus manifest.json into its output
// directory and a one-line summary to `log`. Failures surface as dab::Error.

void run_gen_data(const CommonSettings& common, const GenDataSettings& s, std::ostream& log);
void run_run_sim(const CommonSettings& common, const RunSimSettings& s, std::ostream& log);
void run_eval(const CommonSettings& common, const EvalSettings& s, std::ostream& log);
void run_sweep(const CommonSettings& common, const SweepSettings& s, std::ostream& log);
void run_report(const CommonSettings& common, const ReportSettings& s, std::ostream& log);

/// Column order of sweep.csv.
inline constexpr const char* kSweepCsvHeader =
    "kind,point,negative_ratio,instances,accuracy,f1,dab_accuracy,dab_f1,status,manifest";

}  // namespace dab::harness
