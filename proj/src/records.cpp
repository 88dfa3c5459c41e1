#include "qdepth/records.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qdepth {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  }
  return v;
}

template <class Int>
Int parse_int(std::string_view s) {
  Int v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad integer '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw std::invalid_argument("bad flag '" + std::string(s) + "'");
}

}  // namespace

std::string to_csv_row(const RunRecord& r) {
  std::string out;
  out += r.run_id;
  out += ',';
  out += model_name(r.model);
  for (const std::string& f :
       {format_double(r.coupling), std::to_string(r.n), std::to_string(r.l), std::string(r.wrap_cz ? "1" : "0"),
        std::to_string(r.seed), format_double(r.energy), format_double(r.e0), format_double(r.epsilon),
        format_double(r.entropy_half), std::to_string(r.evaluations), std::to_string(r.cycles),
        std::string(r.converged ? "1" : "0"), format_double(r.wall_time)}) {
    out += ',';
    out += f;
  }
  return out;
}

RunRecord parse_csv_row(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    f.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (f.size() != 15) {
    throw std::invalid_argument("expected 15 fields, got " + std::to_string(f.size()));
  }
  RunRecord r;
  r.run_id = std::string(f[0]);
  if (r.run_id.empty()) throw std::invalid_argument("empty run_id");
  r.model = parse_model(f[1]);
  r.coupling = parse_double(f[2]);
  r.n = parse_int<int>(f[3]);
  r.l = parse_int<int>(f[4]);
  r.wrap_cz = parse_bool(f[5]);
  r.seed = parse_int<std::uint64_t>(f[6]);
  r.energy = parse_double(f[7]);
  r.e0 = parse_double(f[8]);
  r.epsilon = parse_double(f[9]);
  r.entropy_half = parse_double(f[10]);
  r.evaluations = parse_int<std::size_t>(f[11]);
  r.cycles = parse_int<int>(f[12]);
  r.converged = parse_bool(f[13]);
  r.wall_time = parse_double(f[14]);
  return r;
}

nlohmann::json to_json(const RunRecord& r) {
  return {{"run_id", r.run_id},
          {"model", model_name(r.model)},
          {"coupling", r.coupling},
          {"n", r.n},
          {"l", r.l},
          {"wrap_cz", r.wrap_cz},
          {"seed", r.seed},
          {"energy", r.energy},
          {"e0", r.e0},
          {"epsilon", r.epsilon},
          {"entropy_half_nats", r.entropy_half},
          {"evaluations", r.evaluations},
          {"cycles", r.cycles},
          {"converged", r.converged},
          {"wall_time_s", r.wall_time}};
}

RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.model = parse_model(j.at("model").get<std::string>());
  r.coupling = j.at("coupling").get<double>();
  r.n = j.at("n").get<int>();
  r.l = j.at("l").get<int>();
  r.wrap_cz = j.at("wrap_cz").get<bool>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.energy = j.at("energy").get<double>();
  r.e0 = j.at("e0").get<double>();
  r.epsilon = j.at("epsilon").get<double>();
  r.entropy_half = j.at("entropy_half_nats").get<double>();
  r.evaluations = j.at("evaluations").get<std::size_t>();
  r.cycles = j.at("cycles").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.wall_time = j.at("wall_time_s").get<double>();
  return r;
}

RecordParseError::RecordParseError(const std::string& path, std::size_t line, const std::string& what)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open records file " + path.string());
  const bool json = path.extension() == ".jsonl" || path.extension() == ".json";
  std::vector<RunRecord> out;
  std::string line;
  std::size_t number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      if (json) {
        out.push_back(record_from_json(nlohmann::json::parse(line)));
      } else if (!header_seen) {
        if (line != kCsvHeader) throw std::invalid_argument("unexpected header");
        header_seen = true;
      } else {
        out.push_back(parse_csv_row(line));
      }
    } catch (const std::exception& e) {
      throw RecordParseError(path.string(), number, e.what());
    }
  }
  if (out.empty()) throw std::runtime_error("records file " + path.string() + " holds no records");
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kCsvHeader << '\n';
  for (const auto& r : records) out << to_csv_row(r) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_jsonl(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace qdepth
