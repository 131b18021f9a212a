// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dab/bench/answers.hpp"
#include "dab/bench/qa_instance.hpp"
#include "dab/core/rebalance.hpp"
#include "dab/sim/decoder.hpp"
#include "dab/sim/readout.hpp"

namespace dab::sim {

/// Per-instance seed for the readout draws: the decoder seed split by the
/// instance id, so baseline and balanced runs share their draws.
std::uint64_t instance_seed(const DecoderConfig& config, const bench::QAInstance& inst);

struct SimulatedAnswer {
  bench::PredictionRecord prediction;
  std::size_t clamp_events = 0;
  std::size_t rows_touched = 0;
};

/// Forward pass, optional balancing, readout for one existence instance.
SimulatedAnswer simulate_instance(const bench::QAInstance& inst, const DecoderConfig& config,
                                  const ReadoutModel& readout,
                                  const std::optional<core::RebalanceConfig>& rebalance);

/// Answers every instance. Results are independent of `workers`, which
/// only sets how many threads share the work (0 picks the hardware count).
/// Throws DataError naming the first non-existence instance.
std::vector<bench::PredictionRecord> simulate_suite(
    std::span<const bench::QAInstance> instances, const DecoderConfig& config,
    const ReadoutModel& readout, const std::optional<core::RebalanceConfig>& rebalance,
    std::size_t workers = 1);

/// Gold-yes instances answered "no".
std::size_t hallucinated_misses(std::span<const bench::QAInstance> instances,
                                std::span<const bench::PredictionRecord> preds);

}  // namespace dab::sim
