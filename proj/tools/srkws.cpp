// tools/srkws.cpp

// Copyright 2026 The srkws Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: synth, train, eval and stream.

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srkws/commands.hpp"
#include "srkws/config.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App *cmd, CommonFlags &f) {
  cmd->add_option("--config", f.config, "key = value configuration file");
  cmd->add_option("--seed", f.seed, "global seed (overrides the config)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads for audio and features");
  cmd->add_option("--set", f.overrides, "override one config key, as key=value");
}

// File values first, then --set, then the dedicated flags.
srkws::RunConfig resolve(const CommonFlags &f) {
  srkws::RunConfig cfg;
  if (!f.config.empty()) cfg = srkws::load_config(f.config);
  for (const auto &kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      srkws::detail::fail(srkws::ErrorCode::kInvalidArgument, "--set expects key=value, got '", kv, "'");
    srkws::set_config_value(cfg, srkws::detail::trim(kv.substr(0, eq)),
                            srkws::detail::trim(kv.substr(eq + 1)));
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  return cfg;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Successive-refinement keyword spotting"};
  app.require_subcommand(1);

  CommonFlags synth_f, train_f, eval_f, stream_f;
  std::optional<std::string> head;
  std::string train_manifest;
  std::string eval_ckpt, eval_manifest, eval_compare, eval_ood;
  bool eval_embed = false;
  std::string stream_ckpt, stream_wav;

  auto *synth = app.add_subcommand("synth", "generate the synthetic corpus");
  add_common(synth, synth_f);

  auto *train = app.add_subcommand("train", "train an SR or baseline model");
  add_common(train, train_f);
  train->add_option("--head", head, "head kind (overrides model.head)")->check(CLI::IsMember({"sr", "baseline"}));
  train->add_option("--manifest", train_manifest, "corpus manifest (default <data_dir>/manifest.jsonl)");

  auto *eval = app.add_subcommand("eval", "evaluate a checkpoint on a manifest");
  add_common(eval, eval_f);
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint to evaluate");
  eval->add_option("--manifest", eval_manifest, "labelled manifest")->required();
  eval->add_option("--compare", eval_compare, "second checkpoint of the other head kind");
  eval->add_option("--ood-manifest", eval_ood, "out-of-domain negatives for FA");
  eval->add_flag("--embeddings", eval_embed, "dump per-branch hidden activations");

  auto *stream = app.add_subcommand("stream", "run the detector over a long recording");
  add_common(stream, stream_f);
  stream->add_option("--checkpoint", stream_ckpt, "checkpoint to run");
  stream->add_option("--wav", stream_wav, "16-bit mono recording")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      auto cfg = resolve(synth_f);
      srkws::cmd_synth(cfg, synth_f.out.empty() ? cfg.data_dir : synth_f.out, std::cout);
    } else if (train->parsed()) {
      auto cfg = resolve(train_f);
      if (head) cfg.model.head = srkws::parse_head_kind(*head);
      const std::filesystem::path manifest =
          train_manifest.empty() ? std::filesystem::path(cfg.data_dir) / "manifest.jsonl"
                                 : std::filesystem::path(train_manifest);
      srkws::cmd_train(cfg, manifest, train_f.out.empty() ? cfg.report_dir : train_f.out, std::cout);
    } else if (eval->parsed()) {
      auto cfg = resolve(eval_f);
      if (eval_ckpt.empty()) eval_ckpt = cfg.checkpoint;
      if (eval_ckpt.empty())
        srkws::detail::fail(srkws::ErrorCode::kInvalidArgument, "eval needs --checkpoint or paths.checkpoint");
      srkws::EvalOptions opts;
      if (!eval_compare.empty()) opts.compare_checkpoint = eval_compare;
      if (!eval_ood.empty()) opts.ood_manifest = eval_ood;
      opts.embeddings = eval_embed;
      auto r = srkws::cmd_eval(cfg, eval_ckpt, eval_manifest, eval_f.out.empty() ? cfg.report_dir : eval_f.out,
                               opts, std::cout);
      return r.exit_code;
    } else if (stream->parsed()) {
      auto cfg = resolve(stream_f);
      if (stream_ckpt.empty()) stream_ckpt = cfg.checkpoint;
      if (stream_ckpt.empty())
        srkws::detail::fail(srkws::ErrorCode::kInvalidArgument, "stream needs --checkpoint or paths.checkpoint");
      srkws::cmd_stream(cfg, stream_ckpt, stream_wav, stream_f.out.empty() ? cfg.report_dir : stream_f.out,
                        std::cout);
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
