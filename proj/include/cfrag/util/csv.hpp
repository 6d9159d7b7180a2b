#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace cfrag::csv {

using Row = std::vector<std::string>;

std::string escape(std::string_view field);

class Writer {
 public:
  Writer(const std::filesystem::path& path, const Row& header);
  void write(const Row& row);

 private:
  std::ofstream out_;
};

// RFC 4180 subset: quoted fields with doubled quotes, LF or CRLF rows.
std::vector<Row> parse(std::string_view content);
std::vector<Row> read_file(const std::filesystem::path& path);

}  // namespace cfrag::csv
