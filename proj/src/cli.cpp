// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "oce/config.hpp"
#include "oce/corpus.hpp"
#include "oce/error.hpp"
#include "oce/genclient.hpp"
#include "oce/pipeline.hpp"
#include "oce/promptgen.hpp"
#include "oce/rng.hpp"
#include "oce/stats.hpp"
#include "oce/synth.hpp"

namespace oce::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Sub-streams of the master seed owned by the CLI.
constexpr std::uint64_t kMixStream = 0x300;
constexpr std::uint64_t kStatsStream = 0x400;

struct Flags {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  // synthesize
  std::size_t pairs = 10;
  std::optional<std::string> backend;
  std::optional<std::string> corpus;
  std::optional<std::string> corpus_kind;
  std::optional<std::string> mock_script;
  std::optional<std::string> model;
  std::optional<int> parallelism;

  // filter / stats / export
  std::vector<std::string> inputs;
  std::string input;
  std::optional<std::int64_t> target;
  std::optional<std::size_t> per_source;
  std::optional<std::string> order;
  std::string format = "finetune";
  bool skip_flagged = false;
};

config::RunConfig resolve_config(const Flags& f) {
  config::RunConfig cfg;
  if (!f.config_path.empty()) cfg.load_file(f.config_path);
  for (const auto& kv : f.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(Errc::kConfigError, "--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) cfg.master_seed = *f.seed;
  if (f.out) cfg.output_dir = *f.out;
  if (f.backend) cfg.backend = *f.backend;
  if (f.corpus) cfg.corpus.path = *f.corpus;
  if (f.corpus_kind) cfg.corpus.kind = corpus::corpus_kind_from_string(*f.corpus_kind);
  if (f.mock_script) cfg.mock_script = *f.mock_script;
  if (f.model) cfg.gen.model_id = *f.model;
  if (f.parallelism) cfg.parallelism = *f.parallelism;
  if (f.target) cfg.target_total = *f.target;
  if (f.per_source) cfg.per_style_per_source = *f.per_source;
  if (f.order) cfg.order = *f.order;
  cfg.validate();
  return cfg;
}

std::map<std::string, std::size_t> style_counts(std::span<const EditTriplet> ts) {
  std::map<std::string, std::size_t> out{{"lazy", 0}, {"descriptive", 0}};
  for (const auto& t : ts) ++out[std::string(to_string(t.style))];
  return out;
}

pipeline::Manifest base_manifest(const config::RunConfig& cfg, std::string_view command) {
  pipeline::Manifest m;
  m.config = cfg.to_json();
  m.seed = cfg.master_seed;
  m.extra["command"] = command;
  return m;
}

std::vector<EditTriplet> read_input(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(Errc::kUnreadable, "cannot read input " + path.string());
  return pipeline::import_dataset(path);
}

std::unique_ptr<gen::Backend> make_backend(const config::RunConfig& cfg) {
  if (cfg.backend == "mock") {
    gen::MockBackend::Script script;
    if (!cfg.mock_script.empty()) script = gen::MockBackend::load_script(cfg.mock_script);
    return std::make_unique<gen::MockBackend>(std::move(script), cfg.mock_fallback);
  }
  const char* key = std::getenv("OCE_API_KEY");
  if (key == nullptr || *key == '\0') {
    throw Error(Errc::kConfigError, "the remote backend needs the OCE_API_KEY environment variable");
  }
  gen::RemoteConfig rc;
  rc.base_url = cfg.base_url;
  rc.api_key = key;
  rc.retry.max_retries = cfg.max_retries;
  rc.requests_per_minute = cfg.requests_per_minute;
  rc.timeout = std::chrono::seconds(cfg.timeout_s);
  return std::make_unique<gen::RemoteBackend>(std::move(rc));
}

fs::path cmd_synthesize(const config::RunConfig& cfg, std::size_t pairs, const fs::path& out) {
  if (cfg.corpus.path.empty()) throw Error(Errc::kConfigError, "no corpus path (--corpus or corpus.path)");
  auto backend = make_backend(cfg);
  const auto corpus = corpus::load_corpus(cfg.corpus, cfg.snippet);
  const auto pool = prompt::load_shot_pool(cfg.shot_pool_path);
  for (const auto& w : pool.warnings) std::cerr << "warning: " << w << '\n';

  synth::SynthContext ctx;
  ctx.pool = pool.shots;
  ctx.params = cfg.gen;
  ctx.backend = backend.get();
  if (!cfg.round1_template_path.empty()) ctx.round1 = prompt::load_round1_template(cfg.round1_template_path);

  synth::BatchOptions opts;
  opts.n_pairs = pairs;
  opts.seed = cfg.master_seed;
  opts.parallelism = cfg.parallelism;
  opts.snippet = cfg.snippet;
  const auto result = synth::synthesize_batch(corpus, ctx, opts);

  fs::create_directories(out);
  pipeline::write_json_file(out / "discards.json", result.discards.to_json());

  auto m = base_manifest(cfg, "synthesize");
  m.counts_by_style = style_counts(result.triplets);
  m.extra["pairs"] = pairs;
  m.extra["discarded_pairs"] = result.discards.records.size();
  m.extra["template_version"] = ctx.round1.version;
  m.extra["shot_pool_size"] = pool.shots.size();
  m.extra["corpus"] = {{"total", corpus.report.total},
                       {"eligible", corpus.report.eligible},
                       {"excluded", corpus.report.excluded}};
  const auto path = out / "triplets.jsonl";
  pipeline::export_dataset(result.triplets, path, pipeline::ExportFormat::kTripletRecords, std::move(m),
                           out / "manifest.json");
  std::cerr << "synthesized " << result.triplets.size() << " triplets from " << pairs << " pairs ("
            << result.discards.records.size() << " discarded)\n";
  return path;
}

fs::path cmd_filter(const config::RunConfig& cfg, const std::vector<std::string>& inputs, const fs::path& out) {
  if (inputs.empty()) throw Error(Errc::kInvalidArgument, "filter needs at least one --input");
  std::vector<pipeline::SourceDataset> sources;
  for (const auto& in : inputs) sources.push_back({in, read_input(in)});

  const auto pcfg = cfg.pipeline();
  pipeline::CuratedDataset curated;
  bool mixed = false;
  if (sources.size() == 1) {
    curated = pipeline::dt_filter(sources.front().triplets, pcfg);
  } else if (cfg.order == "filter_then_mix") {
    curated = pipeline::filter_then_mix(sources, pcfg);
    mixed = true;
  } else {
    Rng rng(derive_seed(cfg.master_seed, kMixStream));
    const auto pool = pipeline::mix_sources(sources, cfg.per_style_per_source, rng);
    curated = pipeline::dt_filter(pool, pcfg);
    mixed = true;
  }
  for (const auto& w : curated.warnings) std::cerr << "warning: " << w << '\n';

  fs::create_directories(out);
  auto m = base_manifest(cfg, "filter");
  for (const auto& [s, n] : curated.counts_by_style()) m.counts_by_style[std::string(to_string(s))] = n;
  for (const auto& [r, n] : curated.rejections) m.rejections_by_reason[std::string(to_string(r))] = n;
  m.extra["inputs"] = inputs;
  m.extra["mixed"] = mixed;
  m.extra["warnings"] = curated.warnings;
  const auto path = out / "curated.jsonl";
  pipeline::export_dataset(curated.triplets, path, pipeline::ExportFormat::kTripletRecords, std::move(m),
                           out / "manifest.json");
  std::cerr << "kept " << curated.triplets.size() << " records\n";
  return path;
}

void cmd_stats(const config::RunConfig& cfg, const fs::path& input, const fs::path& out) {
  const auto data = read_input(input);
  auto hdp = cfg.hdp;
  hdp.seed = derive_seed(cfg.master_seed, kStatsStream);
  diff::DiffConfig dc;
  dc.context_lines = cfg.context_lines;
  auto reports = stats::build_reports(data, cfg.tokenizer(), hdp, cfg.min_doc_freq, dc);
  reports.extra["config"] = cfg.to_json();
  reports.extra["seed"] = cfg.master_seed;
  reports.extra["input"] = input.string();
  stats::emit_report(reports, out / "report");
  std::cerr << "wrote report for " << data.size() << " records to " << (out / "report").string() << '\n';
}

void cmd_export(const config::RunConfig& cfg, const fs::path& input, std::string_view format_name,
                bool skip_flagged, const fs::path& out) {
  const auto format = pipeline::export_format_from_string(format_name);
  auto data = read_input(input);
  std::vector<EditTriplet> clean;
  clean.reserve(data.size());
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data[i].flagged()) {
      clean.push_back(std::move(data[i]));
      continue;
    }
    if (!skip_flagged) {
      throw Error(Errc::kInvalidArgument,
                  "record " + std::to_string(i + 1) + " is flagged; rerun with --skip-flagged to drop it");
    }
    ++flagged;
  }
  if (flagged > 0) std::cerr << "skipped " << flagged << " flagged records\n";

  fs::create_directories(out);
  auto m = base_manifest(cfg, "export");
  m.counts_by_style = style_counts(clean);
  m.extra["input"] = input.string();
  m.extra["skipped_flagged"] = flagged;
  const auto path =
      out / (format == pipeline::ExportFormat::kFinetuneRecords ? "finetune.jsonl" : "triplets.jsonl");
  pipeline::export_dataset(clean, path, format, std::move(m), out / "manifest.json");
  std::cerr << "exported " << clean.size() << " records to " << path.string() << '\n';
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument:
    case Errc::kUnreadable:
    case Errc::kZeroEligibleFiles:
    case Errc::kInsufficientFiles:
    case Errc::kEmptyShotPool:
    case Errc::kSourceExhausted:
    case Errc::kConfigError:
    case Errc::kParseError:
      return kExitUsage;
    default:
      return kExitInternal;
  }
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Synthesize, curate and analyse instruction-tuning data for code editing."};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config_path, "Sectioned TOML/INI config file");
  app.add_option("--set", f.sets, "Override one config entry, e.g. --set hdp.iterations=50");
  app.add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { f.seed = s; }, "Master seed");
  app.add_option_function<std::string>("--out", [&](const std::string& s) { f.out = s; }, "Output directory");

  auto opt = [](CLI::App* sub, const char* name, auto& target, const char* help) {
    using T = typename std::decay_t<decltype(target)>::value_type;
    return sub->add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
  };

  auto* syn = app.add_subcommand("synthesize", "Generate edit triplets from a seed corpus");
  syn->add_option("--pairs", f.pairs, "Number of snippet pairs")->check(CLI::PositiveNumber);
  opt(syn, "--backend", f.backend, "remote | mock")->check(CLI::IsMember({"remote", "mock"}));
  opt(syn, "--corpus", f.corpus, "Corpus directory or JSONL file");
  opt(syn, "--corpus-kind", f.corpus_kind, "dir | records");
  opt(syn, "--mock-script", f.mock_script, "Scripted responses for the mock backend");
  opt(syn, "--model", f.model, "Model id sent to the backend");
  opt(syn, "--parallelism", f.parallelism, "Concurrent pairs");

  auto* fil = app.add_subcommand("filter", "Diff filter and topic balancing (mixing several inputs)");
  fil->add_option("--input", f.inputs, "Triplet datasets")->required();
  opt(fil, "--target", f.target, "Total records to keep (even)");
  opt(fil, "--per-source", f.per_source, "Records drawn per style from each input when mixing");
  opt(fil, "--order", f.order, "mix_then_filter | filter_then_mix");

  auto* sta = app.add_subcommand("stats", "Write the report directory for a dataset");
  sta->add_option("--input", f.input, "Triplet dataset")->required();

  auto* exp = app.add_subcommand("export", "Write fine-tuning records");
  exp->add_option("--input", f.input, "Triplet dataset")->required();
  exp->add_option("--format", f.format, "finetune | triplet")
      ->check(CLI::IsMember({"finetune", "triplet", "finetune_records", "triplet_records"}));
  exp->add_flag("--skip-flagged", f.skip_flagged, "Drop flagged records instead of failing");

  auto* all = app.add_subcommand("run-all", "synthesize, filter, stats and export in sequence");
  all->add_option("--pairs", f.pairs, "Number of snippet pairs")->check(CLI::PositiveNumber);
  opt(all, "--backend", f.backend, "remote | mock")->check(CLI::IsMember({"remote", "mock"}));
  opt(all, "--corpus", f.corpus, "Corpus directory or JSONL file");
  opt(all, "--corpus-kind", f.corpus_kind, "dir | records");
  opt(all, "--mock-script", f.mock_script, "Scripted responses for the mock backend");
  opt(all, "--model", f.model, "Model id sent to the backend");
  opt(all, "--parallelism", f.parallelism, "Concurrent pairs");
  opt(all, "--target", f.target, "Total records to keep (even)");
  all->add_flag("--skip-flagged", f.skip_flagged, "Drop flagged records on export");

  for (auto* sub : {syn, fil, sta, exp, all}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const auto cfg = resolve_config(f);
    const fs::path out = cfg.output_dir;
    if (syn->parsed()) {
      cmd_synthesize(cfg, f.pairs, out);
    } else if (fil->parsed()) {
      cmd_filter(cfg, f.inputs, out);
    } else if (sta->parsed()) {
      cmd_stats(cfg, f.input, out);
    } else if (exp->parsed()) {
      cmd_export(cfg, f.input, f.format, f.skip_flagged, out);
    } else if (all->parsed()) {
      const auto triplets = cmd_synthesize(cfg, f.pairs, out / "synthesize");
      const auto curated = cmd_filter(cfg, {triplets.string()}, out / "filter");
      cmd_stats(cfg, curated, out);
      cmd_export(cfg, curated, "finetune", f.skip_flagged, out / "export");
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> copy = args;
  std::vector<char*> argv;
  argv.reserve(copy.size() + 1);
  for (auto& a : copy) argv.push_back(a.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(copy.size()), argv.data());
}

}  // namespace oce::cli
