#pragma once

#include "dks/estimation.hpp"
#include "dks/simulation.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dks {

struct Dataset
{
  enum class Source
  {
    builtin,
    file
  };

  std::string name;
  Sample sample;
  Source source;
};

//! Malformed count data; line() is 1-based (0 when not tied to a line).
class ParseError : public std::runtime_error
{
public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

std::vector<std::string> builtin_dataset_names();

//! Whitefly pre-adult development times: "safou" (n = 60) and "hura" (n = 51).
Dataset builtin_dataset(std::string_view name);

//! FNV-1a over the "value:count;" rendering of the sample.
std::uint64_t sample_checksum(const Sample& sample);

enum class CountFormat
{
  raw_values,  // one non-negative integer per line
  value_count  // CSV with header `value,count`
};

Sample parse_counts(std::istream& in, CountFormat format);
Dataset load_counts(const std::filesystem::path& path, CountFormat format);
//! Picks value_count when the first non-blank line is the `value,count`
//! header, raw_values otherwise.
Dataset load_counts(const std::filesystem::path& path);
void write_counts(const Sample& sample, CountFormat format, std::ostream& out);

enum class ReportFormat
{
  csv,
  json
};

//! Significant-digit rendering used by every CSV writer ("%.*g").
std::string format_real(double value, int significant = 6);

void write_report(const StudyReport& report,
                  ReportFormat format,
                  std::ostream& out);
void write_report(const StudyReport& report,
                  ReportFormat format,
                  const std::filesystem::path& destination);
StudyReport read_report_json(std::istream& in);

} // namespace dks
