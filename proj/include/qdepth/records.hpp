#pragma once

#include "qdepth/analysis.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qdepth {

/// Fixed column order of the CSV sink.
inline constexpr std::string_view kCsvHeader =
    "run_id,model,coupling,n,l,wrap_cz,seed,energy,e0,epsilon,entropy_half_nats,evaluations,cycles,"
    "converged,wall_time_s";

std::string to_csv_row(const RunRecord& r);
RunRecord parse_csv_row(std::string_view line);

nlohmann::json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);

/// Malformed input, with the offending 1-based line number.
class RecordParseError : public std::runtime_error {
 public:
  RecordParseError(const std::string& path, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads a .csv (header required) or .jsonl file. Throws RecordParseError on
/// malformed lines and std::runtime_error on a missing or empty file.
std::vector<RunRecord> read_records(const std::filesystem::path& path);

/// Writes both sinks from scratch.
void write_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);
void write_jsonl(const std::filesystem::path& path, const std::vector<RunRecord>& records);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace qdepth
