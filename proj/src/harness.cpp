#include "qdepth/harness.hpp"

#include "qdepth/records.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace qdepth {

namespace fs = std::filesystem;

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument([&] {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view s) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("'" + std::string(s) + "' is not a valid number");
  }
  return v;
}

bool parse_flag(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("'" + std::string(s) + "' is not a boolean");
}

DepthRange parse_depth(std::string_view s) {
  const auto dots = s.find("..");
  if (dots == std::string_view::npos) {
    const int v = parse_number<int>(s);
    return {v, v, std::nullopt};
  }
  DepthRange r;
  r.first = parse_number<int>(trim(s.substr(0, dots)));
  const std::string_view hi = trim(s.substr(dots + 2));
  if (hi.starts_with("n/2")) {
    std::string_view rest = trim(hi.substr(3));
    if (rest.starts_with('+')) rest = trim(rest.substr(1));
    r.half_n_offset = rest.empty() ? 0 : parse_number<int>(rest);
    r.last = r.first;
  } else {
    r.last = parse_number<int>(hi);
  }
  return r;
}

std::string depth_text(const DepthRange& d) {
  if (d.half_n_offset) {
    const int k = *d.half_n_offset;
    std::string s = std::to_string(d.first) + "..n/2";
    if (k > 0) s += "+" + std::to_string(k);
    if (k < 0) s += std::to_string(k);
    return s;
  }
  if (d.first == d.last) return std::to_string(d.first);
  return std::to_string(d.first) + ".." + std::to_string(d.last);
}

template <class T, class F>
std::string join(const std::vector<T>& v, F fmt) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt(v[i]);
  }
  return s;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::vector<std::string> problems;
  std::set<std::string> seen;
  std::size_t number = 0;
  for (std::string_view line : split(text, '\n')) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back("line " + std::to_string(number) + ": expected key = value");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      problems.push_back(key + ": given more than once");
      continue;
    }
    try {
      OptimizerConfig& o = cfg.optimizer;
      if (key == "model") {
        cfg.model = parse_model(value);
      } else if (key == "coupling" || key == "couplings") {
        cfg.couplings.clear();
        for (auto v : split(value, ',')) cfg.couplings.push_back(parse_number<double>(v));
      } else if (key == "n") {
        cfg.sizes.clear();
        for (auto v : split(value, ',')) cfg.sizes.push_back(parse_number<int>(v));
      } else if (key == "l") {
        cfg.depths.clear();
        for (auto v : split(value, ',')) cfg.depths.push_back(parse_depth(v));
      } else if (key == "seeds") {
        cfg.seeds = parse_number<int>(value);
      } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(value);
      } else if (key == "wrap_cz") {
        cfg.wrap_cz = parse_flag(value);
      } else if (key == "periodic") {
        cfg.periodic = parse_flag(value);
      } else if (key == "workers") {
        cfg.workers = parse_number<int>(value);
      } else if (key == "out") {
        cfg.out = std::string(value);
      } else if (key == "aavqe_steps") {
        cfg.aavqe_steps = parse_number<int>(value);
      } else if (key == "restarts") {
        o.restarts = parse_number<int>(value);
      } else if (key == "init") {
        o.init = parse_init_mode(value);
      } else if (key == "init_scale") {
        o.init_scale = parse_number<double>(value);
      } else if (key == "sweep") {
        o.sweep = parse_sweep_mode(value);
      } else if (key == "max_outer_cycles") {
        o.max_outer_cycles = parse_number<int>(value);
      } else if (key == "max_qn_iters") {
        o.max_quasi_newton_iters = parse_number<int>(value);
      } else if (key == "sweep_qn_iters") {
        o.sweep_quasi_newton_iters = parse_number<int>(value);
      } else if (key == "memory") {
        o.memory = parse_number<int>(value);
      } else if (key == "convergence_threshold") {
        o.convergence_threshold = parse_number<double>(value);
      } else if (key == "gradient_tolerance") {
        o.gradient_tolerance = parse_number<double>(value);
      } else if (key == "max_evaluations") {
        o.max_evaluations = parse_number<std::size_t>(value);
      } else {
        problems.push_back(key + ": unknown key");
      }
    } catch (const std::exception& e) {
      problems.push_back(key + ": " + e.what());
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.couplings.empty()) problems.push_back("coupling: list is empty");
  for (double g : cfg.couplings) {
    if (!std::isfinite(g)) problems.push_back("coupling: values must be finite");
  }
  if (cfg.sizes.empty()) problems.push_back("n: list is empty");
  for (int n : cfg.sizes) {
    if (n < 4 || n % 2 != 0 || n > StateVector::kMaxQubits) {
      problems.push_back("n: " + std::to_string(n) + " is not an even size in [4, " +
                         std::to_string(StateVector::kMaxQubits) + "]");
    }
  }
  if (cfg.depths.empty()) problems.push_back("l: list is empty");
  for (const auto& d : cfg.depths) {
    if (d.first < 0) problems.push_back("l: depths must be non-negative");
    for (int n : cfg.sizes) {
      if (d.last_for(n) < d.first) {
        problems.push_back("l: range " + depth_text(d) + " is empty for n=" + std::to_string(n));
      }
    }
  }
  if (cfg.seeds < 1) problems.push_back("seeds: must be >= 1");
  if (cfg.workers < 1) problems.push_back("workers: must be >= 1");
  if (cfg.aavqe_steps < 0) problems.push_back("aavqe_steps: must be >= 0");
  if (cfg.out.empty()) problems.push_back("out: empty path");
  try {
    validate(cfg.optimizer);
  } catch (const std::exception& e) {
    problems.push_back(e.what());
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::string format_config(const ExperimentConfig& cfg) {
  const OptimizerConfig& o = cfg.optimizer;
  std::ostringstream s;
  s << "model = " << model_name(cfg.model) << '\n'
    << "coupling = " << join(cfg.couplings, [](double g) { return format_double(g); }) << '\n'
    << "n = " << join(cfg.sizes, [](int n) { return std::to_string(n); }) << '\n'
    << "l = " << join(cfg.depths, depth_text) << '\n'
    << "seeds = " << cfg.seeds << '\n'
    << "seed = " << cfg.seed << '\n'
    << "wrap_cz = " << (cfg.wrap_cz ? "true" : "false") << '\n'
    << "periodic = " << (cfg.periodic ? "true" : "false") << '\n'
    << "workers = " << cfg.workers << '\n'
    << "out = " << cfg.out.string() << '\n'
    << "aavqe_steps = " << cfg.aavqe_steps << '\n'
    << "restarts = " << o.restarts << '\n'
    << "init = " << to_string(o.init) << '\n'
    << "init_scale = " << format_double(o.init_scale) << '\n'
    << "sweep = " << to_string(o.sweep) << '\n'
    << "max_outer_cycles = " << o.max_outer_cycles << '\n'
    << "max_qn_iters = " << o.max_quasi_newton_iters << '\n'
    << "sweep_qn_iters = " << o.sweep_quasi_newton_iters << '\n'
    << "memory = " << o.memory << '\n'
    << "convergence_threshold = " << format_double(o.convergence_threshold) << '\n'
    << "gradient_tolerance = " << format_double(o.gradient_tolerance) << '\n'
    << "max_evaluations = " << o.max_evaluations << '\n';
  return s.str();
}

std::vector<std::string> recipe_names() {
  return {"fig2", "fig3", "fig4-ising", "fig4-xxz", "fig5-ising", "fig5-xxz"};
}

std::string recipe_config(std::string_view name) {
  // Gapped chains: start near |-...->; critical chains: alternate both starts.
  const std::string gapped =
      "init = staggered\ninit_scale = 0.02\nrestarts = 2\nmemory = 100\nsweep = none\n"
      "max_qn_iters = 4000\nwrap_cz = true\n";
  const std::string critical =
      "init = alternate\ninit_scale = 0.1\nrestarts = 4\nmemory = 100\nsweep = layer\n"
      "max_qn_iters = 2000\nwrap_cz = true\n";
  if (name == "fig2") return "model = ising\ncoupling = 10\nn = 8,10,12\nl = 1..5\nout = results/fig2\n" + gapped;
  if (name == "fig3") return "model = ising\ncoupling = 2,3,5,10\nn = 12\nl = 1..5\nout = results/fig3\n" + gapped;
  if (name == "fig4-ising") {
    return "model = ising\ncoupling = 1\nn = 8,10,12\nl = 1..n/2+2\nout = results/fig4-ising\n" + critical;
  }
  if (name == "fig4-xxz") {
    return "model = xxz\ncoupling = 0.5\nn = 8,10,12\nl = 1..n/2+2\nout = results/fig4-xxz\n" + critical;
  }
  if (name == "fig5-ising") {
    return "model = ising\ncoupling = 1\nn = 6,8,10,12,14\nl = 1..n/2+2\nout = results/fig5-ising\n" + critical;
  }
  if (name == "fig5-xxz") {
    return "model = xxz\ncoupling = 0.5\nn = 6,8,10,12,14\nl = 1..n/2+2\nout = results/fig5-xxz\n" + critical;
  }
  throw std::invalid_argument("unknown recipe '" + std::string(name) + "'");
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::string run_id(Model model, double coupling, int n, int l, int replica) {
  return std::string(model_name(model)) + "_g" + format_double(coupling) + "_n" + std::to_string(n) + "_l" +
         std::to_string(l) + "_r" + std::to_string(replica);
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t base, Model model, double coupling, int n, int l, int replica) {
  std::uint64_t h = mix(base);
  h = mix(h ^ static_cast<std::uint64_t>(model));
  h = mix(h ^ std::hash<std::string>{}(format_double(coupling)));
  h = mix(h ^ static_cast<std::uint64_t>(n));
  h = mix(h ^ static_cast<std::uint64_t>(l));
  return mix(h ^ static_cast<std::uint64_t>(replica));
}

std::vector<Cell> expand_grid(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  std::set<std::string> ids;
  for (double g : cfg.couplings) {
    for (int n : cfg.sizes) {
      std::vector<int> ls;
      for (const auto& d : cfg.depths) {
        for (int l = d.first; l <= d.last_for(n); ++l) {
          if (std::find(ls.begin(), ls.end(), l) == ls.end()) ls.push_back(l);
        }
      }
      for (int l : ls) {
        for (int r = 0; r < cfg.seeds; ++r) {
          Cell c{g, n, l, r, cell_seed(cfg.seed, cfg.model, g, n, l, r), run_id(cfg.model, g, n, l, r)};
          if (ids.insert(c.run_id).second) cells.push_back(std::move(c));
        }
      }
    }
  }
  return cells;
}

int effective_workers(int configured) {
  if (const char* env = std::getenv("QDEPTH_WORKERS"); env != nullptr && *env != '\0') {
    try {
      const int v = parse_number<int>(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("QDEPTH_WORKERS must be a positive integer");
  }
  return configured;
}

namespace {

HamiltonianSpec make_hamiltonian(const ExperimentConfig& cfg, double g, int n) {
  switch (cfg.model) {
    case Model::Ising:
      return HamiltonianSpec::ising(g, n, cfg.periodic);
    case Model::Xxz:
      return HamiltonianSpec::xxz(g, n, cfg.periodic);
    case Model::TransverseField:
      return HamiltonianSpec::transverse_field(g, n, cfg.periodic);
  }
  throw std::logic_error("unreachable");
}

// Serializes checkpoint and sink writes from all workers.
class ResultSink {
 public:
  ResultSink(const fs::path& dir, std::ostream* log) : dir_(dir), log_(log) {
    const fs::path csv = dir / "results.csv";
    const bool fresh = !fs::exists(csv) || fs::file_size(csv) == 0;
    csv_.open(csv, std::ios::app);
    jsonl_.open(dir / "results.jsonl", std::ios::app);
    if (!csv_ || !jsonl_) throw std::runtime_error("cannot open result sinks in " + dir.string());
    if (fresh) csv_ << kCsvHeader << '\n' << std::flush;
  }

  void commit(const RunRecord& r, const nlohmann::json& checkpoint) {
    std::lock_guard lock(mutex_);
    const fs::path final_path = dir_ / "checkpoints" / (r.run_id + ".json");
    const fs::path tmp = final_path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << checkpoint.dump() << '\n';
      if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    }
    fs::rename(tmp, final_path);
    csv_ << to_csv_row(r) << '\n' << std::flush;
    jsonl_ << to_json(r).dump() << '\n' << std::flush;
    if (log_ != nullptr) {
      *log_ << r.run_id << " eps=" << r.epsilon << " S=" << r.entropy_half << " t=" << r.wall_time << "s\n"
            << std::flush;
    }
  }

 private:
  fs::path dir_;
  std::ostream* log_;
  std::ofstream csv_;
  std::ofstream jsonl_;
  std::mutex mutex_;
};

std::optional<RunRecord> load_checkpoint(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    return record_from_json(j.at("record"));
  } catch (const std::exception&) {
    return std::nullopt;  // torn or foreign file: recompute
  }
}

}  // namespace

RunSummary run_grid(const ExperimentConfig& cfg, const RunOptions& options) {
  validate(cfg);
  const fs::path ckpt_dir = cfg.out / "checkpoints";
  fs::create_directories(ckpt_dir);

  const std::vector<Cell> cells = expand_grid(cfg);
  std::vector<std::optional<RunRecord>> done(cells.size());
  std::vector<std::size_t> pending;
  RunSummary summary;
  summary.cells = cells.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (options.resume) done[i] = load_checkpoint(ckpt_dir / (cells[i].run_id + ".json"));
    if (done[i]) {
      ++summary.resumed;
    } else {
      pending.push_back(i);
    }
  }
  if (!options.resume) {
    // A fresh run starts its sinks from scratch.
    fs::remove(cfg.out / "results.csv");
    fs::remove(cfg.out / "results.jsonl");
  }
  if (options.max_new_runs != 0 && pending.size() > options.max_new_runs) pending.resize(options.max_new_runs);

  std::map<std::pair<double, int>, double> e0;
  for (std::size_t i : pending) {
    const auto key = std::make_pair(cells[i].coupling, cells[i].n);
    if (!e0.contains(key)) e0[key] = exact_ground(make_hamiltonian(cfg, key.first, key.second), false).e0;
  }

  ResultSink sink(cfg.out, options.log);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pending.size()) return;
      {
        std::lock_guard lock(error_mutex);
        if (error) return;
      }
      try {
        const Cell& c = cells[pending[k]];
        const auto start = std::chrono::steady_clock::now();
        const HamiltonianSpec h = make_hamiltonian(cfg, c.coupling, c.n);
        const CircuitSpec spec{c.n, c.l, cfg.wrap_cz};
        OptimizerConfig oc = cfg.optimizer;
        oc.seed = c.seed;
        const double ref = e0.at({c.coupling, c.n});
        const VqeResult res = cfg.aavqe_steps > 0
                                  ? aavqe(spec, h, AavqeSchedule::linear(cfg.aavqe_steps), oc, ref)
                                  : minimize(spec, Observable(h), oc, std::nullopt, ref);
        RunRecord r;
        r.run_id = c.run_id;
        r.model = cfg.model;
        r.coupling = c.coupling;
        r.n = c.n;
        r.l = c.l;
        r.wrap_cz = cfg.wrap_cz;
        r.seed = c.seed;
        r.energy = res.energy;
        r.e0 = ref;
        r.epsilon = res.epsilon;
        r.entropy_half = res.entropy_half;
        r.evaluations = res.evaluations;
        r.cycles = res.cycles_used;
        r.converged = res.converged;
        r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        nlohmann::json ck = checkpoint_to_json(spec, res);
        ck["record"] = to_json(r);
        sink.commit(r, ck);
        done[pending[k]] = std::move(r);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  const int wanted = options.workers > 0 ? options.workers : effective_workers(cfg.workers);
  const int workers = std::max(1, std::min<int>(wanted, static_cast<int>(pending.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  summary.executed = pending.size();
  std::vector<RunRecord> ordered;
  for (const auto& d : done) {
    if (d) ordered.push_back(*d);
  }
  summary.complete = ordered.size() == cells.size();
  write_csv(cfg.out / "results.csv", ordered);
  write_jsonl(cfg.out / "results.jsonl", ordered);
  return summary;
}

namespace {

nlohmann::json fit_json(const FitResult& f) {
  nlohmann::json j{{"kind", to_string(f.kind)},         {"slope", f.slope},
                   {"intercept", f.intercept},          {"residual", f.residual},
                   {"r_squared", f.r_squared},          {"points_used", f.points_used}};
  if (f.kind == FitKind::Exponential) {
    j["xi"] = std::isfinite(f.xi()) ? nlohmann::json(f.xi()) : nlohmann::json(nullptr);
    j["regime_failure"] = f.regime_failure;
  }
  return j;
}

std::string group_stem(Model m, double g) { return std::string(model_name(m)) + "_g" + format_double(g); }

void write_dat(const fs::path& path, const std::vector<std::pair<double, double>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(12);
  for (const auto& [x, y] : rows) out << x << ' ' << y << '\n';
}

}  // namespace

nlohmann::json analyze_records(const std::vector<RunRecord>& records, const fs::path& out,
                               const AnalysisOptions& options) {
  static const std::set<std::string> kinds{"all", "exponential", "crossover", "entropy"};
  if (!kinds.contains(options.kind)) throw std::invalid_argument("unknown analysis kind '" + options.kind + "'");
  if (records.empty()) throw std::invalid_argument("analyze: no records");
  fs::create_directories(out);
  const bool all = options.kind == "all";

  std::map<std::pair<Model, double>, std::set<int>> groups;
  for (const auto& r : records) groups[{r.model, r.coupling}].insert(r.n);

  nlohmann::json report{{"series", nlohmann::json::array()}, {"entropy", nlohmann::json::array()}};
  for (const auto& [key, sizes] : groups) {
    const auto [model, g] = key;
    std::vector<EntropyPoint> at_star;
    nlohmann::json per_n = nlohmann::json::array();
    for (int n : sizes) {
      const std::vector<DepthPoint> pts = best_by_depth(records, model, g, n);
      nlohmann::json s{{"model", model_name(model)}, {"coupling", g}, {"n", n}};
      std::vector<std::pair<double, double>> eps_rows, s_rows;
      nlohmann::json pj = nlohmann::json::array();
      for (const auto& p : pts) {
        const auto rec = *best_record(records, model, g, n, p.l);
        eps_rows.emplace_back(p.l, -log_epsilon(p.epsilon) / std::log(10.0));
        s_rows.emplace_back(p.l, rec.entropy_half);
        pj.push_back({{"l", p.l}, {"epsilon", p.epsilon}, {"entropy_half_nats", rec.entropy_half}});
      }
      s["points"] = pj;
      const std::string stem = group_stem(model, g) + "_n" + std::to_string(n);
      write_dat(out / (stem + "_eps.dat"), eps_rows);
      write_dat(out / (stem + "_entropy.dat"), s_rows);

      std::optional<CrossoverReport> cross;
      try {
        cross = detect_crossover(pts, n, options.crossover_threshold);
      } catch (const std::exception& e) {
        s["crossover_error"] = e.what();
      }
      if (cross && (all || options.kind == "crossover" || options.kind == "entropy")) {
        s["crossover"] = {{"l_star", cross->l_star}, {"jump_decades", cross->jump_magnitude}, {"found", cross->found}};
        const auto star = best_record(records, model, g, n, cross->l_star);
        const auto before = best_record(records, model, g, n, cross->l_star - 1);
        if (star) {
          at_star.push_back({static_cast<double>(cross->l_star), star->entropy_half});
          if (before) s["entropy_jump_nats"] = star->entropy_half - before->entropy_half;
        }
        std::vector<DepthPoint> plateau;
        for (const auto& p : pts) {
          if (p.l >= 1 && p.l < cross->l_star) plateau.push_back(p);
        }
        if (plateau.size() >= 3) s["power"] = fit_json(fit_power(plateau));
      }
      if (all || options.kind == "exponential") {
        std::vector<DepthPoint> tail;
        for (const auto& p : pts) {
          if (!cross || !cross->found || p.l >= cross->l_star) tail.push_back(p);
        }
        if (tail.size() < 3) tail = pts;
        if (tail.size() >= 3) s["exponential"] = fit_json(fit_exponential(tail));
        if (pts.size() >= 3) s["exponential_all"] = fit_json(fit_exponential(pts));
      }
      per_n.push_back(std::move(s));
    }
    for (auto& s : per_n) report["series"].push_back(std::move(s));

    if ((all || options.kind == "entropy") && at_star.size() >= 3) {
      std::vector<std::pair<double, double>> rows;
      for (const auto& p : at_star) rows.emplace_back(p.argument, p.entropy);
      write_dat(out / (group_stem(model, g) + "_entropy_lstar.dat"), rows);
      nlohmann::json e{{"model", model_name(model)}, {"coupling", g}};
      try {
        const FitResult f = fit_entropy_log(at_star);
        e["alpha"] = f.slope;
        e["beta"] = f.intercept;
        e["fit"] = fit_json(f);
      } catch (const std::exception& ex) {
        e["error"] = ex.what();
      }
      report["entropy"].push_back(std::move(e));
    }
  }

  std::ofstream rep(out / "report.json", std::ios::trunc);
  if (!rep) throw std::runtime_error("cannot write report in " + out.string());
  rep << report.dump(2) << '\n';
  return report;
}

}  // namespace qdepth
