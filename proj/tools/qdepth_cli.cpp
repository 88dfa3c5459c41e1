#include "qdepth/harness.hpp"
#include "qdepth/lemma.hpp"
#include "qdepth/records.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace qdepth;

struct RunFlags {
  std::string out;
  int workers = 0;
  std::optional<std::uint64_t> seed;
  bool resume = true;
  bool no_resume = false;
  std::size_t limit = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--out", f.out, "Output directory (overrides the config)");
  cmd->add_option("--workers", f.workers, "Worker threads (overrides config and QDEPTH_WORKERS)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Base seed (overrides the config)");
  cmd->add_flag("--resume", f.resume, "Skip runs that already have a checkpoint (default)");
  cmd->add_flag("--no-resume", f.no_resume, "Recompute every run");
  cmd->add_option("--limit", f.limit, "Stop after this many new runs");
}

int execute(ExperimentConfig cfg, const RunFlags& f) {
  if (!f.out.empty()) cfg.out = f.out;
  if (f.seed) cfg.seed = *f.seed;
  RunOptions opt;
  opt.resume = !f.no_resume;
  opt.max_new_runs = f.limit;
  opt.workers = f.workers;
  opt.log = &std::cerr;
  const RunSummary s = run_grid(cfg, opt);
  std::cout << "cells " << s.cells << ", new runs " << s.executed << ", resumed " << s.resumed
            << (s.complete ? "" : " (incomplete)") << "\nresults in " << cfg.out.string() << '\n';
  return 0;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth scaling of layered Ry/CZ circuits on spin chains"};
  app.require_subcommand(1);

  RunFlags run_flags;
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment grid from a config file");
  run->add_option("--config", config_path, "Config file (key = value lines)")->required();
  add_run_flags(run, run_flags);

  RunFlags recipe_flags;
  std::string recipe;
  bool print_only = false;
  auto* rec = app.add_subcommand("recipe", "Run or print a built-in figure recipe");
  rec->add_option("name", recipe, "Recipe name")->check(CLI::IsMember(recipe_names()));
  rec->add_flag("--print", print_only, "Print the config instead of running it");
  rec->add_flag("--list", "List recipe names");
  add_run_flags(rec, recipe_flags);

  std::string records_path;
  std::string analyze_out = "analysis";
  AnalysisOptions analysis;
  auto* ana = app.add_subcommand("analyze", "Fit and crossover reports from run records");
  ana->add_option("records", records_path, "results.csv or results.jsonl")->required();
  ana->add_option("--out", analyze_out, "Report directory");
  ana->add_option("--kind", analysis.kind, "all, exponential, crossover or entropy")
      ->check(CLI::IsMember({"all", "exponential", "crossover", "entropy"}));
  ana->add_option("--threshold", analysis.crossover_threshold, "Crossover jump threshold in decades");

  std::string model = "ising";
  double coupling = 2.0;
  int sites = 8;
  std::string eps_text = "0.1,0.03,0.01,0.003,0.001";
  LemmaOptions lemma_opt;
  std::string lemma_out;
  auto* lem = app.add_subcommand("lemma", "Energy and entropy error exponents under exp(-i eps A)");
  lem->add_option("--model", model, "ising or xxz");
  lem->add_option("--coupling", coupling, "lambda or Delta");
  lem->add_option("--n", sites, "Chain length");
  lem->add_option("--eps", eps_text, "Comma-separated perturbation strengths");
  lem->add_option("--trials", lemma_opt.trials, "Random perturbations");
  lem->add_option("--seed", lemma_opt.seed, "Seed");
  lem->add_option("--out", lemma_out, "Write lemma.json here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return execute(load_config(config_path), run_flags);

    if (*rec) {
      if (rec->count("--list") > 0 || recipe.empty()) {
        for (const auto& n : recipe_names()) std::cout << n << '\n';
        return recipe.empty() && rec->count("--list") == 0 ? 2 : 0;
      }
      const std::string text = recipe_config(recipe);
      if (print_only) {
        std::cout << format_config(parse_config(text));
        return 0;
      }
      return execute(parse_config(text), recipe_flags);
    }

    if (*ana) {
      const auto records = read_records(records_path);
      const auto report = analyze_records(records, analyze_out, analysis);
      std::cout << report.dump(2) << '\n';
      return 0;
    }

    if (*lem) {
      lemma_opt.epsilons = parse_list(eps_text);
      try {
        validate(lemma_opt);
      } catch (const std::invalid_argument& e) {
        throw ConfigError({e.what()});
      }
      const Model m = parse_model(model);
      const HamiltonianSpec h = m == Model::Xxz ? HamiltonianSpec::xxz(coupling, sites)
                                                 : HamiltonianSpec::ising(coupling, sites);
      const LemmaReport r = lemma_harness(h, lemma_opt);
      nlohmann::json j{{"model", model},
                       {"coupling", coupling},
                       {"n", sites},
                       {"trials", lemma_opt.trials},
                       {"epsilons", lemma_opt.epsilons},
                       {"e0", r.e0},
                       {"gap", r.gap},
                       {"energy_exponent", r.energy.slope},
                       {"energy_exponent_ci95", r.energy_ci},
                       {"entropy_exponent", r.entropy.slope},
                       {"entropy_exponent_ci95", r.entropy_ci}};
      if (!lemma_out.empty()) {
        std::filesystem::create_directories(lemma_out);
        std::ofstream(std::filesystem::path(lemma_out) / "lemma.json") << j.dump(2) << '\n';
      }
      std::cout << j.dump(2) << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
