// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <string>

#include "adata/model_io.hpp"
#include "adata/scene.hpp"
#include "adata/tensor_io.hpp"
#include "cli_support.hpp"
#include "doctest.h"

using namespace adata;
using namespace adata::testing;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("adata_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Scene tensors for error-path tests.
fs::path write_scene(const fs::path& dir) {
  SceneOptions so;
  so.seed = 1;
  const auto scene = generate_scene(so);
  write_tensor(to_container(scene.features, "features", 1), dir / "f.adt");
  write_tensor(to_container(scene.saliency, "saliency", 1), dir / "s.adt");
  return dir;
}

std::string q(const fs::path& p) { return quote(p.string()); }

}  // namespace

TEST_CASE("every subcommand is byte-identical across repeated runs") {
  const auto results = cli_determinism(fresh_dir("determinism"));
  CHECK(results.size() == 10);
  for (const auto& r : results) {
    CAPTURE(r.name);
    CAPTURE(r.detail);
    CHECK(r.ok);
  }
}

TEST_CASE("ADATA_SEED changes the default seed") {
  const auto dir = fresh_dir("env");
  CHECK(run_cli("gen-scene --out-dir " + q(dir / "zero"), dir / "log") == 0);
  const std::string cmd = "ADATA_SEED=9 " + quote(ADATA_CLI_PATH) + " gen-scene --out-dir " + q(dir / "nine") +
                          " >/dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(run_cli("gen-scene --seed 9 --out-dir " + q(dir / "flag"), dir / "log") == 0);
  CHECK(read_bytes(dir / "zero/features.adt") != read_bytes(dir / "nine/features.adt"));
  CHECK(read_bytes(dir / "nine/features.adt") == read_bytes(dir / "flag/features.adt"));
}

TEST_CASE("input errors exit with status 2") {
  const auto dir = write_scene(fresh_dir("input"));
  const auto log = dir / "log";
  CHECK(run_cli("", log) == 2);
  CHECK(run_cli("no-such-command", log) == 2);
  CHECK(run_cli("pool --features " + q(dir / "missing.adt") + " --alpha 2 --out " + q(dir / "p.adt"), log) == 2);
  CHECK(read_bytes(log).find("harness.IoFailure") != std::string::npos);

  std::string bytes = read_bytes(dir / "f.adt");
  bytes[0] = 'Z';
  std::ofstream(dir / "bad.adt", std::ios::binary) << bytes;
  CHECK(run_cli("pool --features " + q(dir / "bad.adt") + " --alpha 2 --out " + q(dir / "p.adt"), log) == 2);
  CHECK(read_bytes(log).find("harness.BadMagic") != std::string::npos);

  std::ofstream(dir / "short.adt", std::ios::binary) << read_bytes(dir / "f.adt").substr(0, 40);
  CHECK(run_cli("pool --features " + q(dir / "short.adt") + " --alpha 2 --out " + q(dir / "p.adt"), log) == 2);
  CHECK(read_bytes(log).find("harness.TruncatedPayload") != std::string::npos);

  CHECK(run_cli("report --in " + q(dir / "f.adt.json"), log) == 2);
}

TEST_CASE("config errors exit with status 3") {
  const auto dir = write_scene(fresh_dir("config"));
  const auto log = dir / "log";
  CHECK(run_cli("pool --features " + q(dir / "f.adt") + " --alpha 3 --out " + q(dir / "p.adt"), log) == 3);
  CHECK(read_bytes(log).find("NonDivisible") != std::string::npos);

  std::ofstream(dir / "bad.json") << R"({"lambda_f": 0.5, "unknown_key": 1})";
  CHECK(run_cli("cluster --config " + q(dir / "bad.json") + " --features " + q(dir / "f.adt") + " --saliency " +
                    q(dir / "s.adt") + " --out " + q(dir / "c.json"),
                log) == 3);
  CHECK(read_bytes(log).find("harness.BadConfig") != std::string::npos);

  CHECK(run_cli("cluster --features " + q(dir / "f.adt") + " --saliency " + q(dir / "s.adt") + " -M 300", log) == 3);
  CHECK(read_bytes(log).find("clustering.TooManyClusters") != std::string::npos);
}

TEST_CASE("numeric errors exit with status 4") {
  const auto dir = write_scene(fresh_dir("numeric"));
  const auto log = dir / "log";
  TensorContainer zero;
  zero.dims = {16, 16};
  zero.values.assign(256, 0.0f);
  zero.role = TensorRole::Saliency;
  write_tensor(zero, dir / "zero.adt");
  CHECK(run_cli("cluster --features " + q(dir / "f.adt") + " --saliency " + q(dir / "zero.adt") + " -M 3", log) == 4);
  CHECK(read_bytes(log).find("AllZeroSaliency") != std::string::npos);
}

TEST_CASE("forced fine profile reports the 25/256 budget") {
  const auto dir = write_scene(fresh_dir("budget"));
  const auto log = dir / "log";
  REQUIRE(run_cli("controller-train --epochs 50 --items-per-class 20 --out " + q(dir / "c.json"), log) == 0);
  REQUIRE(run_cli("pipeline --features " + q(dir / "f.adt") + " --saliency " + q(dir / "s.adt") + " --controller " +
                      q(dir / "c.json") + " --question \"what is in this image\" --profile fine --out " +
                      q(dir / "r.json"),
                  log) == 0);
  const Json r = read_json(dir / "r.json");
  CHECK(r["token_budget"]["n_pixel"] == 256);
  CHECK(r["token_budget"]["n_semantic"] == 25);
  CHECK(r["token_budget"]["overhead_ratio"].get<double>() == 25.0 / 256.0);
  CHECK(!r.contains("timings_ms"));
}
