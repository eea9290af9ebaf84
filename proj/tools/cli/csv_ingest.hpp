#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace wbary::cli {

// Column-major numeric table read from a comma-separated file.
struct SampleTable {
  std::vector<std::string> header;  // empty when the file has none
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  std::size_t cols() const { return columns.size(); }
};

// UTF-8 (optional BOM), one optional header row detected by a non-numeric
// first row, blank lines skipped. Rows and columns in errors are 1-based
// file lines. Throws EmptyFile, RaggedRows, NonNumeric.
SampleTable read_samples_csv(std::istream& in, const std::string& source = "<stream>");
SampleTable read_samples_csv(const std::filesystem::path& path);

}  // namespace wbary::cli
