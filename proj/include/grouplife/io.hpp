#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "grouplife/aft.hpp"
#include "grouplife/analytics.hpp"
#include "grouplife/sampler.hpp"

namespace grouplife {

/// Malformed input; `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
        line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip text for a double (17 significant digits).
std::string format_double(double value);

// Dataset CSV: header `group_id,time,event,x1,...,xp`, one row per unit.
// Groups are ordered by first appearance.
GroupedDataset read_dataset_csv(std::istream& in);
GroupedDataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& out, const GroupedDataset& data);
void write_dataset_csv(const std::filesystem::path& path, const GroupedDataset& data);

/// FNV-1a 64-bit hash of the canonical CSV rendering, as 16 hex digits.
std::string dataset_fingerprint(const GroupedDataset& data);

// Trace CSV: a header of column names and one row per retained sample.
void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);
/// Rebuild a trace from its CSV; the layout is recovered from the header.
Trace read_trace_csv(std::istream& in, ErrorKind error);
Trace read_trace_csv(const std::filesystem::path& path, ErrorKind error);

/// Two-column tab-separated curve with a header line.
void write_curve(std::ostream& out, const std::string& x_name, const std::string& y_name,
                 std::span<const double> x, std::span<const double> y);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace grouplife
