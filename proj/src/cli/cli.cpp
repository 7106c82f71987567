// Copyright 2026 The hwnas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hwnas/cli.hpp"
#include "hwnas/costmodel.hpp"
#include "hwnas/data.hpp"
#include "hwnas/error.hpp"
#include "hwnas/graph.hpp"
#include "hwnas/latency.hpp"
#include "hwnas/lint.hpp"
#include "hwnas/nn.hpp"
#include "hwnas/profiler.hpp"
#include "hwnas/search.hpp"
#include "hwnas/spaces.hpp"
#include "json.hpp"

namespace hwnas {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct CommonOptions {
  std::uint64_t seed = 42;
  bool json = false;
  std::string manifest;
};

struct DeviceOptions {
  std::string kind = "sim";
  std::string config_path;
  std::string command;
  double timeout_s = 60.0;
};

struct DataOptions {
  int samples = 600;
  std::uint64_t seed = 42;
  double noise = 0.25;
};

/// Result of one command: a summary for the terminal and the files it wrote.
struct Outcome {
  ordered_json summary = ordered_json::object();
  std::vector<std::pair<std::string, std::string>> artifacts;  ///< (kind, path)
  /// Directory of the default manifest.
  std::string anchor;
  /// Replaces the key/value listing in non-JSON mode.
  std::optional<std::string> text;
  int exit_code = kExitOk;
};

void add_common(CLI::App* sub, CommonOptions& c) {
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_flag("--json", c.json, "Machine-readable output");
  sub->add_option("--manifest", c.manifest, "Run manifest to update (default: manifest.json next to the output)");
}

void add_device(CLI::App* sub, DeviceOptions& d) {
  sub->add_option("--device", d.kind, "Device backend")
      ->check(CLI::IsMember({"sim", "external"}))->capture_default_str();
  sub->add_option("--device-config", d.config_path, "Device config JSON")
      ->envname("HWNAS_DEVICE_CONFIG")
      ->check(CLI::ExistingFile);
  sub->add_option("--command", d.command, "External runner command; {graph} is replaced by the net path");
  sub->add_option("--timeout", d.timeout_s, "External runner timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_data(CLI::App* sub, DataOptions& d) {
  sub->add_option("--samples", d.samples, "Dataset size before the 70/15/15 split")
      ->check(CLI::Range(20, 1000000))
      ->capture_default_str();
  sub->add_option("--data-seed", d.seed, "Dataset seed")->capture_default_str();
  sub->add_option("--noise", d.noise, "Classification pixel noise")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
}

SimulatedVpuConfig sim_config(const DeviceOptions& d, const CLI::App* sub, std::uint64_t seed) {
  SimulatedVpuConfig cfg;
  if (!d.config_path.empty()) cfg = simulated_vpu_config_from_json(read_text(d.config_path));
  if (sub->count("--seed") > 0 || d.config_path.empty()) cfg.seed = seed;
  return cfg;
}

std::unique_ptr<DeviceRunner> make_device(const DeviceOptions& d, const CLI::App* sub, std::uint64_t seed) {
  if (d.kind == "sim") return std::make_unique<SimulatedVPU>(sim_config(d, sub, seed));
  ExternalRunnerConfig cfg;
  if (!d.config_path.empty()) {
    const auto j = nlohmann::json::parse(read_text(d.config_path));
    cfg.command = j.value("command", "");
    cfg.timeout_s = j.value("timeout_s", cfg.timeout_s);
  }
  if (!d.command.empty()) cfg.command = d.command;
  if (sub->count("--timeout") > 0) cfg.timeout_s = d.timeout_s;
  if (cfg.command.empty()) throw Error(ErrorCode::kInvalidArgument, "--device external needs --command");
  return std::make_unique<ExternalCommandRunner>(cfg);
}

Dataset dataset_for(Task task, const TensorShape& input, std::optional<int> classes, std::optional<int> scale,
                    const DataOptions& d) {
  DatasetSpec spec;
  spec.task = task;
  spec.num_samples = d.samples;
  spec.image = input;
  spec.num_classes = classes.value_or(10);
  spec.sr_scale = scale.value_or(2);
  spec.seed = d.seed;
  spec.noise = d.noise;
  return generate_dataset(spec);
}

void write_file(const std::string& path, std::string_view text) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  save_text(path, text);
}

std::string parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  return parent.empty() ? "." : parent.string();
}

std::string arch_to_json(const ArchParams& arch) {
  ordered_json j;
  j["format"] = "hwnas.arch";
  j["version"] = 1;
  j["alpha"] = arch.alpha;
  return j.dump(2) + "\n";
}

ArchParams arch_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "hwnas.arch") throw ParseError("$.format", "not an architecture file");
    if (j.at("version") != 1) throw ParseError("$.version", "unsupported version");
    ArchParams arch;
    arch.alpha = j.at("alpha").get<std::vector<std::vector<double>>>();
    return arch;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("$", e.what());
  }
}

std::string default_history_path(const std::string& arch_out) {
  constexpr std::string_view kSuffix = ".arch.json";
  if (arch_out.size() > kSuffix.size() && arch_out.ends_with(kSuffix)) {
    return arch_out.substr(0, arch_out.size() - kSuffix.size()) + ".history.csv";
  }
  return arch_out + ".history.csv";
}

std::string render_summary(const ordered_json& summary) {
  std::ostringstream os;
  for (const auto& [key, value] : summary.items()) {
    os << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
  }
  return os.str();
}

// --- commands -------------------------------------------------------------

struct SpaceArgs {
  std::string name;
  std::string out;
  bool list = false;
};

Outcome run_space(const SpaceArgs& a) {
  Outcome o;
  if (a.list || a.out.empty()) {
    std::string text;
    for (auto n : spaces::names()) text += std::string(n) + "\n";
    o.text = text;
    o.summary["spaces"] = spaces::names();
    return o;
  }
  const SuperNet net = spaces::by_name(a.name);
  write_file(a.out, serialize(net));
  o.summary["space"] = a.name;
  o.summary["out"] = a.out;
  o.summary["stages"] = net.stages.size();
  o.artifacts.emplace_back("supernet", a.out);
  o.anchor = parent_dir(a.out);
  return o;
}

struct LutBuildArgs {
  std::string net, out;
  int n = 20;
  int trials = 5;
};

Outcome run_lut_build(const LutBuildArgs& a, const DeviceOptions& d, const CLI::App* sub, std::uint64_t seed) {
  Outcome o;
  const SuperNet net = load_supernet(a.net);
  auto device = make_device(d, sub, seed);
  LutBuildReport report;
  try {
    LatencyTable lut = build_lut(*device, net, {a.n, a.trials}, &report);
    write_file(a.out, to_json(lut));
    o.summary["entries"] = lut.size();
  } catch (const LutBuildError& e) {
    write_file(a.out, to_json(e.partial()));
    throw;
  }
  o.summary["out"] = a.out;
  o.summary["device_runs"] = report.device_runs;
  o.summary["clamped_keys"] = report.clamped_keys;
  o.artifacts.emplace_back("lut", a.out);
  o.anchor = parent_dir(a.out);
  return o;
}

struct LutFromModelArgs {
  std::string model, net, out;
  double clock_ghz = 0.7;
};

Outcome run_lut_from_model(const LutFromModelArgs& a) {
  Outcome o;
  CostModel model = CostModel::from_json(read_text(a.model));
  const SuperNet net = load_supernet(a.net);
  const LatencyTable lut = lut_from_model(model, net, a.clock_ghz);
  write_file(a.out, to_json(lut));
  o.summary["out"] = a.out;
  o.summary["entries"] = lut.size();
  o.artifacts.emplace_back("lut", a.out);
  o.anchor = parent_dir(a.out);
  return o;
}

struct RecordsArgs {
  std::string out;
  int count = 500;
};

Outcome run_costmodel_records(const RecordsArgs& a, const DeviceOptions& d, const CLI::App* sub,
                              std::uint64_t seed) {
  if (d.kind != "sim") throw Error(ErrorCode::kInvalidArgument, "costmodel records needs --device sim");
  Outcome o;
  const SimulatedVPU device(sim_config(d, sub, seed));
  const auto records = simulate_records(device, a.count, seed);
  write_file(a.out, to_jsonl(records));
  o.summary["out"] = a.out;
  o.summary["records"] = records.size();
  o.artifacts.emplace_back("records", a.out);
  o.anchor = parent_dir(a.out);
  return o;
}

struct TrainModelArgs {
  std::string records, out;
  CostModelConfig cfg;
};

Outcome run_costmodel_train(TrainModelArgs a, std::uint64_t seed) {
  Outcome o;
  const auto records = records_from_jsonl(read_text(a.records));
  a.cfg.seed = seed;
  auto [model, report] = train_cost_model(records, a.cfg);
  write_file(a.out, model.to_json());
  o.summary["out"] = a.out;
  o.summary["train_records"] = report.train_records;
  o.summary["val_records"] = report.val_records;
  o.summary["train_mape_percent"] = report.train_mape;
  o.summary["val_mape_percent"] = report.val_mape;
  o.artifacts.emplace_back("model", a.out);
  o.anchor = parent_dir(a.out);
  return o;
}

struct EvalModelArgs {
  std::string model, records;
};

Outcome run_costmodel_eval(const EvalModelArgs& a) {
  Outcome o;
  CostModel model = CostModel::from_json(read_text(a.model));
  const auto records = records_from_jsonl(read_text(a.records));
  o.summary["records"] = records.size();
  o.summary["mape_percent"] = evaluate_mape(model, records);
  o.anchor = parent_dir(a.model);
  return o;
}

struct SearchArgs {
  std::string net, lut, out, history, config;
  std::optional<double> lambda1, lambda2, lr_weights, lr_arch;
  std::optional<int> rounds, weight_steps, arch_steps, batch;
};

Outcome run_search(const SearchArgs& a, const DataOptions& d, const CLI::App* sub, std::uint64_t seed) {
  Outcome o;
  SearchConfig cfg;
  if (!a.config.empty()) cfg = search_config_from_json(read_text(a.config));
  if (sub->count("--seed") > 0 || a.config.empty()) cfg.seed = seed;
  if (a.lambda1) cfg.lambda1 = *a.lambda1;
  if (a.lambda2) cfg.lambda2 = *a.lambda2;
  if (a.lr_weights) cfg.lr_weights = *a.lr_weights;
  if (a.lr_arch) cfg.lr_arch = *a.lr_arch;
  if (a.rounds) cfg.rounds = *a.rounds;
  if (a.weight_steps) cfg.weight_steps_per_round = *a.weight_steps;
  if (a.arch_steps) cfg.arch_steps_per_round = *a.arch_steps;
  if (a.batch) cfg.batch_size = *a.batch;
  cfg.latency_source = a.lut;

  const SuperNet net = load_supernet(a.net);
  const LatencyTable lut = load_lut(a.lut);
  // Fail on missing keys before the dataset is generated.
  for (const auto& stage : net.stages) (void)candidate_latencies(lut, stage);
  (void)fixed_latency(lut, net);

  const Dataset data = dataset_for(net.task, net.input_shape, net.num_classes, net.sr_scale, d);
  SupernetModel model(net, cfg.seed);
  const SearchResult result = train_search(model, data, lut, cfg);

  const std::string history = a.history.empty() ? default_history_path(a.out) : a.history;
  write_file(a.out, arch_to_json(result.arch));
  write_file(history, result.history.to_csv());
  o.summary["out"] = a.out;
  o.summary["history"] = history;
  o.summary["rounds"] = result.history.rounds.size();
  if (!result.history.rounds.empty()) {
    o.summary["e_latency_ms"] = result.history.rounds.back().e_latency_ms;
    o.summary["chosen"] = result.history.rounds.back().chosen;
  }
  o.artifacts.emplace_back("arch", a.out);
  o.artifacts.emplace_back("history", history);
  o.anchor = parent_dir(a.out);
  return o;
}

struct DeriveArgs {
  std::string net, arch, out;
};

Outcome run_derive(const DeriveArgs& a) {
  Outcome o;
  const SuperNet net = load_supernet(a.net);
  const ArchParams arch = arch_from_json(read_text(a.arch));
  const CompactNet compact = derive_compact(net, arch);
  write_file(a.out, serialize(compact));
  o.summary["out"] = a.out;
  o.summary["choices"] = compact.derivation->choices;
  o.summary["ties"] = compact.derivation->ties;
  o.artifacts.emplace_back("derived_net", a.out);
  o.anchor = parent_dir(a.out);
  return o;
}

struct TrainCompactArgs {
  std::string net, out;
  TrainConfig cfg;
};

Outcome run_train_compact(TrainCompactArgs a, const DataOptions& d, std::uint64_t seed) {
  Outcome o;
  const CompactNet net = load_compact(a.net);
  const Dataset data = dataset_for(net.task, net.input_shape, net.num_classes, net.sr_scale, d);
  Network model(net, seed);
  a.cfg.seed = seed;
  const auto losses = train_compact(model, data, a.cfg);
  write_file(a.out, checkpoint_to_json(model.parameters()));
  o.summary["out"] = a.out;
  o.summary["epochs"] = losses.size();
  if (!losses.empty()) o.summary["final_train_loss"] = losses.back();
  o.artifacts.emplace_back("checkpoint", a.out);
  o.anchor = parent_dir(a.out);
  return o;
}

struct EvalArgs {
  std::string net, checkpoint, lut, out;
  std::string split = "test";
};

Outcome run_eval(const EvalArgs& a, const DataOptions& d, std::uint64_t seed) {
  Outcome o;
  const CompactNet net = load_compact(a.net);
  const Dataset data = dataset_for(net.task, net.input_shape, net.num_classes, net.sr_scale, d);
  Network model(net, seed);
  checkpoint_from_json(read_text(a.checkpoint), model.parameters());
  const Split& split = a.split == "val" ? data.val : (a.split == "train" ? data.train : data.test);
  const EvalMetrics m = evaluate(model, split, net.task);

  ordered_json j;
  j["format"] = "hwnas.metrics";
  j["version"] = 1;
  j["net"] = a.net;
  j["task"] = std::string(to_string(net.task));
  j["split"] = a.split;
  j["samples"] = m.samples;
  j["loss"] = m.loss;
  const bool cls = net.task == Task::kClassification;
  j["quality_name"] = cls ? "accuracy" : "psnr_db";
  j["quality"] = cls ? m.accuracy : m.psnr_db;
  if (!a.lut.empty()) j["latency_ms"] = network_latency(load_lut(a.lut), net);
  o.summary = j;
  if (!a.out.empty()) {
    write_file(a.out, j.dump(2) + "\n");
    o.artifacts.emplace_back("metrics", a.out);
    o.anchor = parent_dir(a.out);
  } else {
    o.anchor = parent_dir(a.checkpoint);
  }
  return o;
}

struct LintArgs {
  std::string net, out;
  bool strict = false;
  bool no_fail = false;
};

Outcome run_lint(const LintArgs& a, bool json) {
  Outcome o;
  LintOptions options;
  options.strict_leaky_relu = a.strict;
  const auto network = deserialize_network(read_text(a.net));
  const auto findings = std::visit([&](const auto& n) { return lint_network(n, options); }, network);
  const std::string as_json = findings_to_json(findings);
  o.text = json ? as_json : findings_to_table(findings);
  if (!a.out.empty()) {
    write_file(a.out, as_json);
    o.artifacts.emplace_back("lint", a.out);
    o.anchor = parent_dir(a.out);
  } else {
    o.anchor = parent_dir(a.net);
  }
  if (has_warnings(findings) && !a.no_fail) o.exit_code = kExitLintWarnings;
  return o;
}

struct CalibrateArgs {
  std::string net, lut, out;
  int samples = 50;
  int trials = 5;
};

Outcome run_calibrate(const CalibrateArgs& a, const DeviceOptions& d, const CLI::App* sub, std::uint64_t seed) {
  Outcome o;
  const SuperNet net = load_supernet(a.net);
  const LatencyTable lut = load_lut(a.lut);
  auto device = make_device(d, sub, seed);
  const CalibrationReport report = calibrate(*device, net, lut, a.samples, seed, a.trials);
  write_file(a.out, report.to_csv());
  o.summary["out"] = a.out;
  o.summary["points"] = report.points.size();
  o.summary["mape_percent"] = report.mape;
  o.summary["pearson"] = report.pearson ? ordered_json(*report.pearson) : ordered_json(nullptr);
  o.artifacts.emplace_back("calibration", a.out);
  o.anchor = parent_dir(a.out);
  return o;
}

struct ReportArgs {
  std::string out_dir;
};

Outcome run_report(const ReportArgs& a, const std::string& manifest_path) {
  Outcome o;
  if (manifest_path.empty()) throw Error(ErrorCode::kInvalidArgument, "report needs --manifest");
  if (!fs::exists(manifest_path)) throw Error(ErrorCode::kIoError, "no manifest at '" + manifest_path + "'");
  const RunManifest manifest = RunManifest::from_json(read_text(manifest_path));
  const auto written = write_report(manifest, a.out_dir, parent_dir(manifest_path));
  o.summary["out_dir"] = a.out_dir;
  o.summary["files"] = written;
  for (const auto& path : written) {
    const bool svg = path.ends_with(".svg");
    o.artifacts.emplace_back(svg ? "plot" : "report", path);
  }
  o.anchor = parent_dir(manifest_path);
  return o;
}

std::string command_path(const CLI::App* sub) {
  std::string path = sub->get_name();
  for (const CLI::App* p = sub->get_parent(); p != nullptr && p->get_parent() != nullptr; p = p->get_parent()) {
    path = p->get_name() + " " + path;
  }
  return path;
}

void update_manifest(const Outcome& o, const CLI::App* sub, const CommonOptions& common) {
  const std::string path =
      common.manifest.empty() ? (fs::path(o.anchor.empty() ? "." : o.anchor) / "manifest.json").string()
                              : common.manifest;
  RunManifest m = RunManifest::load_or_empty(path);
  std::string config = sub->config_to_str(true, false);
  m.runs.push_back({command_path(sub), common.seed, sha256_hex(config)});
  for (const auto& [kind, file] : o.artifacts) m.record(kind, file, parent_dir(path));
  write_file(path, m.to_json());
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hardware-aware neural architecture search toolkit", "hwnas"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommonOptions common;
  DeviceOptions device;
  DataOptions data;

  SpaceArgs space_args;
  auto* space = app.add_subcommand("space", "Write a built-in search space as .net.json");
  space->add_option("--name", space_args.name, "Space name")->check(CLI::IsMember(spaces::names()));
  space->add_option("--out", space_args.out, "Output path");
  space->add_flag("--list", space_args.list, "List built-in spaces");
  add_common(space, common);

  auto* lut = app.add_subcommand("lut", "Latency lookup tables");
  lut->require_subcommand(1);
  LutBuildArgs lut_build_args;
  auto* lut_build = lut->add_subcommand("build", "Profile every supernet operator on a device");
  lut_build->add_option("--net", lut_build_args.net, "Supernet .net.json")->required()->check(CLI::ExistingFile);
  lut_build->add_option("--out", lut_build_args.out, "Output .lut.json")->required();
  lut_build->add_option("-n,--stack", lut_build_args.n, "Stack depth N")
      ->check(CLI::PositiveNumber)->capture_default_str();
  lut_build->add_option("--trials", lut_build_args.trials, "Runs per measurement")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_device(lut_build, device);
  add_common(lut_build, common);
  LutFromModelArgs lut_model_args;
  auto* lut_model = lut->add_subcommand("from-model", "Fill a LUT from a trained cost model");
  lut_model->add_option("--model", lut_model_args.model, "Cost model JSON")->required()->check(CLI::ExistingFile);
  lut_model->add_option("--net", lut_model_args.net, "Supernet .net.json")->required()->check(CLI::ExistingFile);
  lut_model->add_option("--out", lut_model_args.out, "Output .lut.json")->required();
  lut_model->add_option("--clock", lut_model_args.clock_ghz, "Device clock in GHz")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(lut_model, common);

  auto* costmodel = app.add_subcommand("costmodel", "Learned latency cost model");
  costmodel->require_subcommand(1);
  RecordsArgs records_args;
  auto* cm_records = costmodel->add_subcommand("records", "Generate profile records on the simulator");
  cm_records->add_option("--out", records_args.out, "Output .jsonl")->required();
  cm_records->add_option("--count", records_args.count, "Number of records")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_device(cm_records, device);
  add_common(cm_records, common);
  TrainModelArgs train_model_args;
  auto* cm_train = costmodel->add_subcommand("train", "Train the cost model");
  cm_train->add_option("--records", train_model_args.records, "Profile records .jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  cm_train->add_option("--out", train_model_args.out, "Output model JSON")->required();
  cm_train->add_option("--epochs", train_model_args.cfg.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  cm_train->add_option("--lr", train_model_args.cfg.lr)->check(CLI::PositiveNumber)->capture_default_str();
  cm_train->add_option("--weight-decay", train_model_args.cfg.weight_decay)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cm_train->add_option("--batch", train_model_args.cfg.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
  add_common(cm_train, common);
  EvalModelArgs eval_model_args;
  auto* cm_eval = costmodel->add_subcommand("eval", "MAPE of a cost model on records");
  cm_eval->add_option("--model", eval_model_args.model, "Cost model JSON")->required()->check(CLI::ExistingFile);
  cm_eval->add_option("--records", eval_model_args.records, "Profile records .jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(cm_eval, common);

  auto* search = app.add_subcommand("search", "Architecture search");
  search->require_subcommand(1);
  SearchArgs search_args;
  auto* search_run = search->add_subcommand("run", "Run the latency-regularized search");
  search_run->add_option("--net", search_args.net, "Supernet .net.json")->required()->check(CLI::ExistingFile);
  search_run->add_option("--lut", search_args.lut, "Latency table .lut.json")->required()->check(CLI::ExistingFile);
  search_run->add_option("--out", search_args.out, "Output .arch.json")->required();
  search_run->add_option("--history", search_args.history, "History CSV (default: next to --out)");
  search_run->add_option("--config", search_args.config, "Search config JSON")->check(CLI::ExistingFile);
  search_run->add_option("--lambda1", search_args.lambda1, "Weight decay coefficient")->check(CLI::NonNegativeNumber);
  search_run->add_option("--lambda2", search_args.lambda2, "Latency coefficient per ms")
      ->check(CLI::NonNegativeNumber);
  search_run->add_option("--lr-weights", search_args.lr_weights)->check(CLI::PositiveNumber);
  search_run->add_option("--lr-arch", search_args.lr_arch)->check(CLI::PositiveNumber);
  search_run->add_option("--rounds", search_args.rounds)->check(CLI::PositiveNumber);
  search_run->add_option("--weight-steps", search_args.weight_steps)->check(CLI::NonNegativeNumber);
  search_run->add_option("--arch-steps", search_args.arch_steps)->check(CLI::NonNegativeNumber);
  search_run->add_option("--batch", search_args.batch)->check(CLI::PositiveNumber);
  add_data(search_run, data);
  add_common(search_run, common);

  DeriveArgs derive_args;
  auto* derive = app.add_subcommand("derive", "Cut the compact net out of a searched supernet");
  derive->add_option("--net", derive_args.net, "Supernet .net.json")->required()->check(CLI::ExistingFile);
  derive->add_option("--arch", derive_args.arch, "Architecture .arch.json")->required()->check(CLI::ExistingFile);
  derive->add_option("--out", derive_args.out, "Output compact .net.json")->required();
  add_common(derive, common);

  TrainCompactArgs train_args;
  auto* train = app.add_subcommand("train-compact", "Train a compact net from scratch");
  train->add_option("--net", train_args.net, "Compact .net.json")->required()->check(CLI::ExistingFile);
  train->add_option("--out", train_args.out, "Output checkpoint JSON")->required();
  train->add_option("--epochs", train_args.cfg.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--lr", train_args.cfg.lr)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--weight-decay", train_args.cfg.weight_decay)
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  train->add_option("--batch", train_args.cfg.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
  add_data(train, data);
  add_common(train, common);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate a trained compact net");
  eval->add_option("--net", eval_args.net, "Compact .net.json")->required()->check(CLI::ExistingFile);
  eval->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--lut", eval_args.lut, "Latency table for the net's LUT latency")->check(CLI::ExistingFile);
  eval->add_option("--split", eval_args.split)->check(CLI::IsMember({"train", "val", "test"}))->capture_default_str();
  eval->add_option("--out", eval_args.out, "Output metrics JSON");
  add_data(eval, data);
  add_common(eval, common);

  LintArgs lint_args;
  auto* lint = app.add_subcommand("lint", "Check a network against accelerator rules");
  lint->add_option("--net", lint_args.net, "Supernet or compact .net.json")->required()->check(CLI::ExistingFile);
  lint->add_option("--out", lint_args.out, "Findings JSON");
  lint->add_flag("--strict", lint_args.strict, "Flag every LeakyReLU");
  lint->add_flag("--no-fail", lint_args.no_fail, "Exit 0 even with warnings");
  add_common(lint, common);

  CalibrateArgs cal_args;
  auto* cal = app.add_subcommand("calibrate", "Compare LUT predictions with whole-net measurements");
  cal->add_option("--net", cal_args.net, "Supernet .net.json")->required()->check(CLI::ExistingFile);
  cal->add_option("--lut", cal_args.lut, "Latency table .lut.json")->required()->check(CLI::ExistingFile);
  cal->add_option("--out", cal_args.out, "Output CSV")->required();
  cal->add_option("--count", cal_args.samples, "Random compact nets")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cal->add_option("--trials", cal_args.trials)->check(CLI::PositiveNumber)->capture_default_str();
  add_device(cal, device);
  add_common(cal, common);

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Plots and summary from a run manifest");
  report->add_option("--out-dir", report_args.out_dir, "Output directory")->required();
  add_common(report, common);

  std::vector<const char*> argv{"hwnas"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsageError;
  }

  const CLI::App* leaf = app.get_subcommands().front();
  while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();

  try {
    Outcome o;
    if (leaf == space) {
      if (!space_args.list && !space_args.out.empty() && space_args.name.empty()) {
        err << "error: space needs --name with --out\n";
        return kExitUsageError;
      }
      o = run_space(space_args);
    } else if (leaf == lut_build) {
      o = run_lut_build(lut_build_args, device, leaf, common.seed);
    } else if (leaf == lut_model) {
      o = run_lut_from_model(lut_model_args);
    } else if (leaf == cm_records) {
      o = run_costmodel_records(records_args, device, leaf, common.seed);
    } else if (leaf == cm_train) {
      o = run_costmodel_train(train_model_args, common.seed);
    } else if (leaf == cm_eval) {
      o = run_costmodel_eval(eval_model_args);
    } else if (leaf == search_run) {
      o = run_search(search_args, data, leaf, common.seed);
    } else if (leaf == derive) {
      o = run_derive(derive_args);
    } else if (leaf == train) {
      o = run_train_compact(train_args, data, common.seed);
    } else if (leaf == eval) {
      o = run_eval(eval_args, data, common.seed);
    } else if (leaf == lint) {
      o = run_lint(lint_args, common.json);
    } else if (leaf == cal) {
      o = run_calibrate(cal_args, device, leaf, common.seed);
    } else if (leaf == report) {
      o = run_report(report_args, common.manifest);
    }
    if (!o.anchor.empty() || !common.manifest.empty()) update_manifest(o, leaf, common);
    if (o.text) {
      out << *o.text;
    } else if (common.json) {
      out << o.summary.dump(2) << "\n";
    } else {
      out << render_summary(o.summary);
    }
    return o.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitOperationError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitOperationError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitOperationError;
  }
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace hwnas
