#include "dks/data_io.hpp"

#include <json.hpp>

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace dks {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

long long parse_integer(std::string_view field,
                        std::size_t line,
                        const char* what)
{
  field = trim(field);
  long long value = 0;
  const auto [ptr, ec] =
    std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError(line,
                     std::string(what) + " '" + std::string(field) +
                       "' is not an integer");
  return value;
}

int parse_value(std::string_view field, std::size_t line)
{
  const long long v = parse_integer(field, line, "value");
  if (v < 0)
    throw ParseError(line, "value " + std::to_string(v) + " is negative");
  if (v > 100'000'000)
    throw ParseError(line, "value " + std::to_string(v) + " is too large");
  return static_cast<int>(v);
}

Sample finish(const std::map<int, std::size_t>& counts)
{
  std::size_t total = 0;
  for (const auto& [value, count] : counts)
    total += count;
  if (total == 0)
    throw ParseError(0, "no observations in input");
  return Sample::from_counts(counts);
}

ordered_json cell_to_json(const StudyCell& c)
{
  ordered_json j;
  j["kernel"] = c.kernel.name();
  j["n"] = c.n;
  j["h_mean"] = c.h_mean;
  j["h_sd"] = c.h_sd;
  j["mean_mise"] = c.mean_mise;
  j["ibias"] = c.ibias;
  j["ivar"] = c.ivar;
  j["h_values"] = c.h_values;
  j["ise_values"] = c.ise_values;
  return j;
}

} // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
  : std::runtime_error(line == 0 ? what
                                 : "line " + std::to_string(line) + ": " + what)
  , line_(line)
{}

std::vector<std::string> builtin_dataset_names()
{
  return { "hura", "safou" };
}

Dataset builtin_dataset(std::string_view name)
{
  if (name == "safou")
    return { "safou",
             Sample::from_counts({ { 30, 28 }, { 31, 21 }, { 32, 11 } }),
             Dataset::Source::builtin };
  if (name == "hura")
    return { "hura",
             Sample::from_counts({ { 25, 5 },
                                   { 26, 5 },
                                   { 27, 7 },
                                   { 28, 8 },
                                   { 29, 11 },
                                   { 30, 2 },
                                   { 31, 1 },
                                   { 32, 4 },
                                   { 33, 4 },
                                   { 34, 2 },
                                   { 35, 2 } }),
             Dataset::Source::builtin };
  std::string available;
  for (const std::string& n : builtin_dataset_names())
    available += (available.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown dataset '" + std::string(name) +
                              "' (available: " + available + ")");
}

std::uint64_t sample_checksum(const Sample& sample)
{
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      hash ^= ch;
      hash *= 0x100000001b3ULL;
    }
  };
  for (const auto& [value, count] : sample.counts())
    feed(std::to_string(value) + ":" + std::to_string(count) + ";");
  return hash;
}

Sample parse_counts(std::istream& in, CountFormat format)
{
  std::map<int, std::size_t> counts;
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty())
      continue;
    if (format == CountFormat::raw_values) {
      ++counts[parse_value(text, line)];
      continue;
    }
    if (!header_seen) {
      if (text != "value,count")
        throw ParseError(line, "expected header 'value,count'");
      header_seen = true;
      continue;
    }
    const auto comma = text.find(',');
    if (comma == std::string_view::npos ||
        text.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(line, "expected two comma-separated fields");
    const int value = parse_value(text.substr(0, comma), line);
    const long long count =
      parse_integer(text.substr(comma + 1), line, "count");
    if (count < 0)
      throw ParseError(line, "count " + std::to_string(count) + " is negative");
    counts[value] += static_cast<std::size_t>(count);
  }
  if (format == CountFormat::value_count && !header_seen)
    throw ParseError(0, "empty input: missing 'value,count' header");
  return finish(counts);
}

Dataset load_counts(const std::filesystem::path& path, CountFormat format)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open '" + path.string() +
                             "': " + std::strerror(errno));
  return { path.filename().string(), parse_counts(in, format),
           Dataset::Source::file };
}

Dataset load_counts(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open '" + path.string() +
                             "': " + std::strerror(errno));
  CountFormat format = CountFormat::raw_values;
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string_view text = trim(raw);
    if (text.empty())
      continue;
    if (text == "value,count")
      format = CountFormat::value_count;
    break;
  }
  return load_counts(path, format);
}

void write_counts(const Sample& sample, CountFormat format, std::ostream& out)
{
  if (format == CountFormat::value_count) {
    out << "value,count\n";
    for (const auto& [value, count] : sample.counts())
      out << value << ',' << count << '\n';
    return;
  }
  for (int v : sample.values())
    out << v << '\n';
}

std::string format_real(double value, int significant)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, value);
  return buf;
}

void write_report(const StudyReport& report,
                  ReportFormat format,
                  std::ostream& out)
{
  if (format == ReportFormat::json) {
    ordered_json j;
    j["seed"] = report.seed;
    j["replicates"] = report.replicates;
    j["normalize"] = report.normalize;
    j["cells"] = ordered_json::array();
    for (const StudyCell& c : report.cells)
      j["cells"].push_back(cell_to_json(c));
    out << j.dump(2) << '\n';
  } else {
    out << "kernel,n,h_mean,h_sd,mean_mise,ibias,ivar,"
           "mise_x1e3,ibias_x1e3,ivar_x1e3\n";
    for (const StudyCell& c : report.cells) {
      out << c.kernel.name() << ',' << c.n << ',' << format_real(c.h_mean)
          << ',' << format_real(c.h_sd) << ',' << format_real(c.mean_mise)
          << ',' << format_real(c.ibias) << ',' << format_real(c.ivar) << ','
          << format_real(c.mean_mise * 1e3) << ','
          << format_real(c.ibias * 1e3) << ',' << format_real(c.ivar * 1e3)
          << '\n';
    }
  }
  if (!out)
    throw std::runtime_error("failed to write report");
}

void write_report(const StudyReport& report,
                  ReportFormat format,
                  const std::filesystem::path& destination)
{
  std::ofstream out(destination, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open '" + destination.string() +
                             "' for writing: " + std::strerror(errno));
  write_report(report, format, out);
}

StudyReport read_report_json(std::istream& in)
{
  const nlohmann::json j = nlohmann::json::parse(in);
  StudyReport report;
  report.seed = j.at("seed").get<std::uint64_t>();
  report.replicates = j.at("replicates").get<std::size_t>();
  report.normalize = j.at("normalize").get<bool>();
  for (const auto& c : j.at("cells")) {
    StudyCell cell;
    cell.kernel = KernelSpec::parse(c.at("kernel").get<std::string>());
    cell.n = c.at("n").get<std::size_t>();
    cell.h_mean = c.at("h_mean").get<double>();
    cell.h_sd = c.at("h_sd").get<double>();
    cell.mean_mise = c.at("mean_mise").get<double>();
    cell.ibias = c.at("ibias").get<double>();
    cell.ivar = c.at("ivar").get<double>();
    cell.h_values = c.at("h_values").get<std::vector<double>>();
    cell.ise_values = c.at("ise_values").get<std::vector<double>>();
    report.cells.push_back(std::move(cell));
  }
  return report;
}

} // namespace dks
