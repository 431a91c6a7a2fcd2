// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/cli.hpp"

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <fstream>
#include <optional>
#include <ostream>

#include "typobench/builder.hpp"
#include "typobench/config.hpp"
#include "typobench/corpus.hpp"
#include "typobench/error.hpp"
#include "typobench/manifest.hpp"
#include "typobench/metrics.hpp"
#include "typobench/mixture.hpp"
#include "typobench/stats.hpp"
#include "typobench/taxonomy.hpp"

namespace typobench {

namespace fs = std::filesystem;

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool stub = false;
  std::string cache_dir;
  std::optional<int> workers;
  bool strict = false;
  bool force = false;
  bool verbose = false;
};

RunConfig resolve_config(const GlobalFlags& g) {
  RunConfig c = g.config.empty() ? RunConfig{} : load_config(g.config);
  if (g.seed) c.global_seed = *g.seed;
  if (g.stub) c.providers.stub = true;
  if (!g.cache_dir.empty()) c.cache_dir = g.cache_dir;
  if (g.workers) c.workers = *g.workers;
  c.validate();
  return c;
}

Taxonomy load_taxonomy(const RunConfig& c, const std::string& path, const std::string& names) {
  const std::string hierarchy = path.empty() ? c.taxonomy : path;
  const std::string class_names = names.empty() ? c.class_names : names;
  if (hierarchy.empty()) throw ValidationError("no taxonomy given (--taxonomy or paths.taxonomy)");
  std::optional<fs::path> names_path;
  if (!class_names.empty()) names_path = class_names;
  return Taxonomy::load(hierarchy, names_path);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Builds and scores typographic-attack VQA benchmarks", "typobench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "typobench 0.3.0");

  GlobalFlags g;
  app.add_option("--config", g.config, "Run configuration JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Global seed (overrides the config)");
  app.add_flag("--stub-providers", g.stub, "Use offline deterministic providers");
  app.add_option("--cache-dir", g.cache_dir, "Provider response cache directory");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::Range(1, 1024));
  app.add_flag("--strict", g.strict, "Fail on orphan predictions");
  app.add_flag("--force", g.force, "Score even if manifest config hashes differ");
  app.add_flag("-v,--verbose", g.verbose, "Debug logging");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Join QA, OCR and labels into corpus.jsonl");
  ingest->fallthrough();
  std::string qa_path, ocr_path, labels_path, taxonomy_path, names_path, image_root;
  std::string corpus_out = "corpus.jsonl";
  bool drop_unknown = false;
  ingest->add_option("--qa", qa_path, "QA JSON")->required()->check(CLI::ExistingFile);
  ingest->add_option("--ocr", ocr_path, "OCR token JSON")->check(CLI::ExistingFile);
  ingest->add_option("--labels", labels_path, "Object labels (CSV or JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--taxonomy", taxonomy_path, "Class hierarchy JSON");
  ingest->add_option("--class-names", names_path, "machine_id,name CSV");
  ingest->add_option("--image-root", image_root, "Directory holding <image_id>.jpg");
  ingest->add_option("--out", corpus_out, "Output corpus JSONL");
  ingest->add_flag("--drop-unknown-labels", drop_unknown, "Drop labels missing from the taxonomy");

  // build
  auto* build = app.add_subcommand("build", "Build the eleven subset manifests");
  build->fallthrough();
  std::string build_corpus, build_out;
  build->add_option("--corpus", build_corpus, "corpus.jsonl");
  build->add_option("--taxonomy", taxonomy_path, "Class hierarchy JSON");
  build->add_option("--class-names", names_path, "machine_id,name CSV");
  build->add_option("--out", build_out, "Output directory");

  // score
  auto* score = app.add_subcommand("score", "Score a prediction file");
  score->fallthrough();
  std::string predictions, manifest_dir, report_out;
  score->add_option("--predictions", predictions, "Prediction JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--manifests", manifest_dir, "Manifest directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  score->add_option("--taxonomy", taxonomy_path, "Class hierarchy JSON (class space)");
  score->add_option("--class-names", names_path, "machine_id,name CSV");
  score->add_option("--out", report_out, "Report JSON path (a .txt table is written beside it)");

  // stats
  auto* stats = app.add_subcommand("stats", "Count items per subset");
  stats->fallthrough();
  std::string stats_dir;
  bool stats_json = false;
  stats->add_option("--manifests", stats_dir, "Manifest directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  stats->add_flag("--json", stats_json, "Print JSON instead of a table");

  // compose-mixture
  auto* mix = app.add_subcommand("compose-mixture", "Sample an SFT training mixture");
  mix->fallthrough();
  std::string recipe_arg, mix_dir, mix_out;
  std::optional<std::uint64_t> recipe_seed;
  mix->add_option("--recipe", recipe_arg, "Recipe JSON or preset (balanced, ignore_text)")
      ->required();
  mix->add_option("--manifests", mix_dir, "Manifest directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  mix->add_option("--out", mix_out, "Output JSONL")->required();
  mix->add_option("--recipe-seed", recipe_seed, "Override the recipe seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  spdlog::set_level(g.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    const RunConfig cfg = resolve_config(g);

    if (*ingest) {
      const auto taxonomy = load_taxonomy(cfg, taxonomy_path, names_path);
      auto qa = load_qa_file(qa_path);
      const auto total_qa = qa.size();
      const auto selected = dedup_questions(std::move(qa));
      const OcrTable ocr = ocr_path.empty() ? OcrTable{} : load_ocr_file(ocr_path);
      const auto labels = load_labels_file(labels_path);
      JoinOptions opts;
      opts.image_root = image_root;
      opts.drop_unknown_labels = drop_unknown;
      const auto joined = join_object_labels(selected, labels, ocr, taxonomy, opts);
      write_corpus(corpus_out, joined.records);
      out << "qa entries:            " << total_qa << '\n'
          << "unique images:         " << selected.size() << '\n'
          << "records written:       " << joined.records.size() << '\n'
          << "dropped (no labels):   " << joined.dropped_unlabeled << '\n'
          << "unknown labels:        " << joined.dropped_unknown_labels << '\n'
          << "clipped OCR boxes:     " << joined.clipped_tokens << '\n'
          << "adjusted answer lists: " << joined.adjusted_answer_lists << '\n';
      return kExitOk;
    }

    if (*build) {
      const std::string corpus = build_corpus.empty() ? cfg.corpus : build_corpus;
      const std::string out_dir = build_out.empty() ? cfg.out_dir : build_out;
      if (corpus.empty()) throw ValidationError("no corpus given (--corpus or paths.corpus)");
      if (out_dir.empty()) throw ValidationError("no output directory (--out or paths.out_dir)");
      const auto taxonomy = load_taxonomy(cfg, taxonomy_path, names_path);
      auto records = read_corpus(corpus);
      const auto providers = make_providers(cfg);
      const BuildInputs inputs{cfg, taxonomy, *providers.embed, *providers.generate};
      const auto summary = build_benchmark(std::move(records), inputs, out_dir);
      for (const auto& s : all_subsets()) {
        const auto& st = summary.subsets.at(std::string(s.name));
        std::size_t skipped = 0;
        for (const auto& [reason, n] : st.skips) skipped += n;
        out << s.name << std::string(22 - s.name.size(), ' ') << st.items << " items, "
            << skipped << " skipped\n";
      }
      return kExitOk;
    }

    if (*score) {
      const auto manifests = read_manifest_dir(manifest_dir);
      const auto expected = config_hash(cfg);
      for (const auto& [subset, m] : manifests) {
        if (m.header.config_hash != expected) {
          if (!g.force) {
            throw ValidationError("manifest " + subset + " was built with config " +
                                  m.header.config_hash + ", current config is " + expected +
                                  " (use --force to score anyway)");
          }
          spdlog::warn("manifest {} config hash differs; scoring anyway", subset);
        }
      }
      const auto preds = load_predictions(predictions);

      bool needs_space = false;
      for (const auto& p : preds) {
        if (is_subset_name(p.subset) && subset_info(p.subset).task == Task::obj_oe) {
          needs_space = true;
        }
      }
      std::optional<Taxonomy> taxonomy;
      std::optional<Providers> providers;
      std::unique_ptr<ClassEmbedder> embedder;
      std::unique_ptr<ClassSpace> space;
      if (needs_space) {
        taxonomy = load_taxonomy(cfg, taxonomy_path, names_path);
        providers = make_providers(cfg);
        embedder = std::make_unique<ClassEmbedder>(*providers->embed, cfg.class_templates);
        space = std::make_unique<ClassSpace>(taxonomy->classes(), *embedder);
      }
      ScoreOptions opts;
      opts.k = cfg.clip_k;
      opts.vqa_normalize = cfg.vqa_normalize;
      const auto report = score_predictions(preds, manifests, space.get(), opts);
      const auto table = report.to_table();
      out << table;
      if (!report_out.empty()) {
        write_text(report_out, report.to_json().dump(2) + "\n");
        write_text(fs::path(report_out).replace_extension(".txt"), table);
      }
      if (!report.orphans.empty()) {
        err << report.orphans.size() << " orphan prediction(s)\n";
        if (g.strict) return kExitValidation;
      }
      return kExitOk;
    }

    if (*stats) {
      const auto st = compute_stats(stats_dir);
      out << (stats_json ? st.to_json().dump(2) + "\n" : st.to_table());
      return kExitOk;
    }

    if (*mix) {
      MixtureRecipe recipe;
      const auto presets = preset_names();
      if (std::find(presets.begin(), presets.end(), recipe_arg) != presets.end()) {
        recipe = preset_recipe(recipe_arg);
      } else {
        recipe = load_recipe(recipe_arg);
      }
      if (recipe_seed) recipe.seed = *recipe_seed;
      const auto manifests = read_manifest_dir(mix_dir);
      const auto examples = compose_mixture(recipe, manifests, mix_dir);
      write_mixture(mix_out, examples);
      out << "wrote " << examples.size() << " examples to " << mix_out << '\n';
      return kExitOk;
    }
  } catch (const ProviderError& e) {
    err << "provider error: " << e.what() << '\n';
    return kExitProvider;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace typobench
