// SPDX-License-Identifier: Apache-2.0
#include "dab/sim/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "dab/util/errors.hpp"
#include "dab/util/rng.hpp"

namespace dab::sim {

std::uint64_t instance_seed(const DecoderConfig& config, const bench::QAInstance& inst) {
  return derive_seed(config.seed, "instance/" + inst.id);
}

SimulatedAnswer simulate_instance(const bench::QAInstance& inst, const DecoderConfig& config,
                                  const ReadoutModel& readout,
                                  const std::optional<core::RebalanceConfig>& rebalance) {
  const auto scene = scene_from_instance(inst);
  const auto segmap = scene_segments(scene, config);
  auto tensor = forward(scene, config);
  SimulatedAnswer out;
  if (rebalance) {
    auto outcome = core::rebalance_tensor(tensor, segmap, *rebalance);
    out.clamp_events = outcome.clamp_events;
    out.rows_touched = outcome.rows_touched;
    tensor = std::move(outcome.adjusted);
  }
  const auto ans = answer_existence(tensor, segmap, scene, readout, instance_seed(config, inst));
  out.prediction = bench::make_prediction(inst.id, ans.yes ? "Yes" : "No");
  out.prediction.image_ratios = ans.mean_ratios;
  return out;
}

std::vector<bench::PredictionRecord> simulate_suite(
    std::span<const bench::QAInstance> instances, const DecoderConfig& config,
    const ReadoutModel& readout, const std::optional<core::RebalanceConfig>& rebalance,
    std::size_t workers) {
  config.validate();
  readout.validate();
  if (rebalance) rebalance->validate();
  for (const auto& inst : instances) {
    if (inst.task != bench::TaskKind::existence) {
      throw DataError("instance '" + inst.id + "' is a " +
                      std::string(bench::to_string(inst.task)) +
                      " question; the simulator answers existence questions only");
    }
  }

  std::vector<bench::PredictionRecord> out(instances.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(instances.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < instances.size(); ++i) {
      out[i] = simulate_instance(instances[i], config, readout, rebalance).prediction;
    }
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < instances.size(); i = next++) {
        try {
          out[i] = simulate_instance(instances[i], config, readout, rebalance).prediction;
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

std::size_t hallucinated_misses(std::span<const bench::QAInstance> instances,
                                std::span<const bench::PredictionRecord> preds) {
  std::unordered_map<std::string, bench::Answer> by_id;
  for (const auto& p : preds) by_id.emplace(p.instance_id, p.parsed);
  std::size_t misses = 0;
  for (const auto& inst : instances) {
    const auto it = by_id.find(inst.id);
    if (inst.gold && it != by_id.end() && it->second != bench::Answer::yes) ++misses;
  }
  return misses;
}

}  // namespace dab::sim
