#include "csv_ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "wbary/errors.hpp"

namespace wbary::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

SampleTable read_samples_csv(std::istream& in, const std::string& source) {
  SampleTable t;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (lineno == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto cells = split(view);

    if (first) {
      first = false;
      double dummy;
      bool numeric = true;
      for (auto c : cells) numeric = numeric && parse_number(c, dummy);
      t.columns.resize(cells.size());
      if (!numeric) {
        for (auto c : cells) t.header.emplace_back(c);
        continue;
      }
    }
    if (cells.size() != t.columns.size())
      throw Error(ErrorCode::RaggedRows, source + ": row " + std::to_string(lineno) + " has " +
                                             std::to_string(cells.size()) + " fields, expected " +
                                             std::to_string(t.columns.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v;
      if (!parse_number(cells[c], v))
        throw Error(ErrorCode::NonNumeric, source + ": row " + std::to_string(lineno) + ", column " +
                                               std::to_string(c + 1) + ": '" + std::string(cells[c]) + "'");
      t.columns[c].push_back(v);
    }
  }
  if (t.rows() == 0) throw Error(ErrorCode::EmptyFile, source + ": no data rows");
  return t;
}

SampleTable read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_samples_csv(in, path.string());
}

}  // namespace wbary::cli
