#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace p2psim::util {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Plain comma-separated text without quoting. Blank lines are skipped.
CsvTable read_csv(const std::filesystem::path& path);

std::vector<std::string> split_csv_line(const std::string& line);

// Writes to a sibling temp file and renames, so a failed write leaves nothing behind.
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_text(const std::filesystem::path& path);

} // namespace p2psim::util
