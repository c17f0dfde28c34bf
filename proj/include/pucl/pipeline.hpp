#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pucl/config.hpp"
#include "pucl/pupl.hpp"

namespace pucl {

struct PipelineResult {
  Metrics metrics;
  TrainHistory history;
  double pupl_one_step_potential = 0.0;
  double pupl_potential = 0.0;
  int pupl_iterations = 0;
  bool pseudo_single_class = false;  // head fallback engaged
  nlohmann::json to_json() const;
};

// Algorithm A -> B -> C in memory: generate data, sample the PU view, train
// the encoder contrastively, pseudo-label with puPL, fit the linear head on
// pseudo labels, evaluate on a held-out draw from the same mixture.
PipelineResult run_pipeline(const RunConfig& cfg);

// File-emitting variants used by the CLI. Both write a manifest that
// reproduces the run bit-exactly.
void cmd_gen_data(const RunConfig& cfg, const std::filesystem::path& out_dir);
PipelineResult cmd_pipeline(const RunConfig& cfg,
                            const std::filesystem::path& out_dir);

enum class SweepAxis { kGamma, kPiP, kLossKind };
SweepAxis sweep_axis_from_name(const std::string& name);

struct SweepRow {
  std::string axis_value;
  std::string loss_kind;
  double accuracy = 0.0;
  std::uint64_t seed = 0;
};

// One pipeline run per (value, seed); tasks run on a small worker pool
// (PUCL_WORKERS caps it) with per-task configs, results in task order.
std::vector<SweepRow> run_sweep(const RunConfig& base, SweepAxis axis,
                                const std::vector<std::string>& values,
                                int seeds);

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path);

int worker_count(std::size_t tasks);

}  // namespace pucl
