// Command-line front end: experiment runs, reports, replay and analysis.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "infoagg/knowledge.hpp"
#include "infoagg/metrics.hpp"
#include "infoagg/runner.hpp"
#include "infoagg/separability.hpp"
#include "infoagg/structure_io.hpp"
#include "infoagg/transcript_io.hpp"

using namespace infoagg;
namespace fs = std::filesystem;

namespace {

InfoStructure load_structure(const std::string& arg) {
  if (const auto id = parse_structure_id(arg)) return make_structure(*id);
  return read_structure_file(arg);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information aggregation in LMSR prediction markets"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run an experiment grid");
  std::string grid_path, out_dir = "results";
  std::size_t parallelism = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> repetitions;
  bool dry_run = false, no_transcripts = false, verbose = false;
  double crash = kCrashThreshold;
  run->add_option("grid", grid_path, "Grid file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--parallelism,-j", parallelism, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out-dir,-o", out_dir, "Output directory");
  run->add_option("--seed", seed, "Override the grid's base seed");
  run->add_option("--repetitions", repetitions, "Override repetitions per cell");
  run->add_option("--crash-threshold", crash, "Log error above which a market counts as crashed");
  run->add_flag("--dry-run", dry_run, "Print the number of markets and exit");
  run->add_flag("--no-transcripts", no_transcripts, "Skip per-market transcript files");
  run->add_flag("--verbose,-v", verbose, "Log each finished market");

  // report
  auto* rep = app.add_subcommand("report", "Summarize markets.csv by structure and duration");
  std::string markets_csv, report_csv;
  rep->add_option("markets", markets_csv, "markets.csv")->required();
  rep->add_option("--csv", report_csv, "Also write the table as CSV");
  rep->add_option("--crash-threshold", crash, "Log error above which a market counts as crashed");

  // replay
  auto* replay = app.add_subcommand("replay", "Re-execute a transcript and verify it");
  std::vector<std::string> transcripts;
  replay->add_option("transcripts", transcripts, "Transcript files (.jsonl)")->required();

  // separability
  auto* sep = app.add_subcommand("separability", "Classify a security under a structure");
  std::string structure_arg;
  sep->add_option("structure", structure_arg, "Structure file or preset name")->required();

  // structure
  auto* st = app.add_subcommand("structure", "Print a preset as a structure file");
  std::string preset_name;
  st->add_option("preset", preset_name, "Easy, Medium, Hard or VeryHard")->required();

  // trace
  auto* tr = app.add_subcommand("trace", "Myopic price and public-event trace");
  int trace_rounds = 0;
  tr->add_option("structure", structure_arg, "Structure file or preset name")->required();
  tr->add_option("--rounds", trace_rounds, "Number of turns (default: one per trader)");

  // deception
  auto* dec = app.add_subcommand("deception", "Deception distance of public messages");
  std::string labels_path;
  dec->add_option("labels", labels_path, "Labels CSV")->required()->check(CLI::ExistingFile);
  dec->add_option("transcripts", transcripts, "Transcript files (.jsonl)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto grid = read_grid_file(grid_path);
      if (seed) grid.base_seed = *seed;
      if (repetitions) grid.repetitions = *repetitions;
      const auto plans = expand_grid(grid);
      std::cout << fmt::format("{} markets planned\n", plans.size());
      if (dry_run) return 0;
      RunOptions opts;
      opts.out_dir = out_dir;
      opts.parallelism = parallelism;
      opts.write_transcripts = !no_transcripts;
      opts.crash_threshold = crash;
      opts.quiet = !verbose;
      const auto res = run_experiment(plans, opts);
      std::cout << fmt::format("completed {}, skipped {}, failed {}\n", res.completed, res.skipped,
                               res.failed);
      std::cout << report_file(fs::path(out_dir) / "markets.csv", crash).text;
      return res.failed == 0 ? 0 : 1;
    }
    if (*rep) {
      const auto r = report_file(markets_csv, crash);
      std::cout << r.text;
      if (!report_csv.empty()) write_text(report_csv, r.csv);
      return 0;
    }
    if (*replay) {
      int bad = 0;
      for (const auto& path : transcripts) {
        const auto check = replay_transcript(read_transcript(path));
        std::cout << fmt::format("{}: {} ({})\n", path, check.ok ? "ok" : "MISMATCH", check.detail);
        bad += check.ok ? 0 : 1;
      }
      return bad == 0 ? 0 : 1;
    }
    if (*sep) {
      const auto s = load_structure(structure_arg);
      std::cout << describe_verdict(s, classify(s));
      return 0;
    }
    if (*st) {
      const auto id = parse_structure_id(preset_name);
      if (!id) throw std::invalid_argument("unknown preset " + preset_name);
      std::cout << structure_to_json(make_structure(*id)).dump(2) << "\n";
      return 0;
    }
    if (*tr) {
      const auto s = load_structure(structure_arg);
      for (const auto& step : myopic_trace(s, trace_rounds))
        std::cout << fmt::format("round {} {} price {:.6g} public {}\n", step.round,
                                 trader_name(step.trader), step.price,
                                 describe_event(s, step.public_event));
      return 0;
    }
    if (*dec) {
      std::vector<Transcript> ts;
      for (const auto& path : transcripts) ts.push_back(read_transcript(path));
      const auto rep_d = assess_deception(ts, read_labels(labels_path));
      for (const auto& row : rep_d.rows)
        std::cout << fmt::format("{} round {} {} distance {}\n", row.market_id, row.round,
                                 trader_name(row.trader), row.distance);
      std::cout << fmt::format("messages {}, skipped {}, mean distance {:.4f}\n", rep_d.rows.size(),
                               rep_d.skipped, rep_d.mean());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
