#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace lm05 {

// Locale-independent shortest-round-trip formatting (std::to_chars).
std::string format_double(double v);

// Minimal CSV emitter: comma separated, one header row, '.' decimals,
// LF line endings. Insecure cells carry the sentinel string instead of a
// number so that "no secure gain" is distinguishable from "gain 0".
class CsvWriter {
 public:
  static constexpr const char* kInsecure = "insecure";

  CsvWriter(std::ostream& out, std::vector<std::string> header);

  CsvWriter& cell(double v);
  CsvWriter& cell(std::uint64_t v);
  CsvWriter& cell(const std::string& v);
  CsvWriter& insecure() { return cell(std::string(kInsecure)); }
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace lm05
