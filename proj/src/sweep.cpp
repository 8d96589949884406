// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "adata/corpus_io.hpp"
#include "adata/error.hpp"
#include "adata/metrics.hpp"
#include "adata/pooling.hpp"
#include "adata/rng.hpp"

namespace adata {

std::uint64_t sweep_cell_seed(std::uint64_t base, std::size_t cell_index) { return base ^ mix_seed(cell_index); }

SceneOptions sweep_scene(const SweepOptions& options, std::size_t scene_index) {
  SceneOptions s = options.scene;
  s.seed = derive_seed(options.scene.seed, scene_index);
  return s;
}

namespace {

SweepCell run_cell(const PipelineConfig& base, const SweepOptions& o, const std::vector<SyntheticScene>& scenes,
                   const TextEmbedding& text, const std::vector<TokenId>& ids, std::size_t index, std::size_t alpha,
                   std::size_t beta_request) {
  const auto start = std::chrono::steady_clock::now();
  SweepCell cell;
  cell.index = index;
  cell.alpha = alpha;
  cell.cell_seed = sweep_cell_seed(base.seed, index);
  PipelineConfig config = base;
  config.seed = cell.cell_seed;
  config.grid_side = o.scene.side;
  config.channels = o.scene.channels;
  if (o.scene.side % alpha != 0) {
    throw Error("pooling", ErrorCode::NonDivisible,
                "alpha " + std::to_string(alpha) + " does not divide side " + std::to_string(o.scene.side));
  }
  const std::size_t side_out = o.scene.side / alpha;
  cell.n_tokens = side_out * side_out;
  cell.beta = beta_request == kBetaAll ? cell.n_tokens : beta_request;
  cell.beta_label = beta_request == kBetaAll ? "all" : std::to_string(beta_request);

  PipelineOptions popts;
  popts.profile_explicit = GranularityProfile{alpha, cell.beta, 0};
  double ari_sum = 0.0;
  double coh_sum = 0.0;
  cell.ari_min = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    PipelineInputs in{scenes[s].features, scenes[s].saliency, text, ids};
    const PipelineResult r = run_pipeline(config, nullptr, in, popts);
    const auto planted = pool_labels(scenes[s].labels, o.scene.side, alpha);
    const double ari = adjusted_rand_index(r.clustering.assignments, planted);
    ari_sum += ari;
    cell.ari_min = std::min(cell.ari_min, ari);
    double coh = 0.0;
    for (const auto& sc : r.scores) coh += sc.coherence_score;
    coh_sum += coh / static_cast<double>(r.scores.size());
    if (s == 0) cell.budget = r.budget;
  }
  cell.ari_mean = ari_sum / static_cast<double>(scenes.size());
  cell.mean_coherence = coh_sum / static_cast<double>(scenes.size());
  cell.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return cell;
}

}  // namespace

std::vector<SweepCell> run_sweep(const PipelineConfig& config, const SweepOptions& o) {
  if (o.alphas.empty() || o.betas.empty() || o.scenes == 0) {
    throw Error("harness", ErrorCode::BadConfig, "sweep needs at least one alpha, one beta and one scene");
  }
  std::vector<SyntheticScene> scenes;
  for (std::size_t s = 0; s < o.scenes; ++s) scenes.push_back(generate_scene(sweep_scene(o, s)));
  const auto ids = Vocabulary::builtin().tokenize(o.question);
  const TextEmbedding text = encode_text_surrogate(ids, config.model_dim, config.encoder_seed);

  struct Task {
    std::size_t alpha;
    std::size_t beta;
  };
  std::vector<Task> tasks;
  for (std::size_t a : o.alphas) {
    for (std::size_t b : o.betas) tasks.push_back({a, b});
  }
  std::vector<SweepCell> cells(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        cells[i] = run_cell(config, o, scenes, text, ids, i, tasks[i].alpha, tasks[i].beta);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(o.jobs, 1, tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells, bool timings) {
  std::ostringstream out;
  out << "cell,alpha,beta,beta_label,cell_seed,n_tokens,ari_mean,ari_min,mean_coherence,n_pixel,n_semantic,n_text,"
         "total,overhead_ratio";
  if (timings) out << ",runtime_ms";
  out << '\n';
  for (const auto& c : cells) {
    out << c.index << ',' << c.alpha << ',' << c.beta << ',' << c.beta_label << ',' << c.cell_seed << ','
        << c.n_tokens << ',' << format_double(c.ari_mean) << ',' << format_double(c.ari_min) << ','
        << format_double(c.mean_coherence) << ',' << c.budget.n_pixel << ',' << c.budget.n_semantic << ','
        << c.budget.n_text << ',' << c.budget.total << ',' << format_double(c.budget.overhead_ratio);
    if (timings) out << ',' << format_double(c.runtime_ms);
    out << '\n';
  }
  return out.str();
}

}  // namespace adata
