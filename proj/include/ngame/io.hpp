#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace ngame {

namespace csv_schema {
inline constexpr const char* kTrajectory = "t,state,density";
inline constexpr const char* kSweep = "param,value,observable,value2,classification";
inline constexpr const char* kEnsemble = "P_A,opinion,mean_n,R";
inline constexpr const char* kRealization = "realization,sweep,opinion,n";
inline constexpr const char* kHeatmap = "m,avg_degree,critical";
}  // namespace csv_schema

/// Floats at 12 significant digits.
std::string format_number(double v);

/// Single-writer CSV file.  Failures throw Io naming the path.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const char* header);
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  /// Cells are joined verbatim; numbers should go through format_number.
  void row(const std::vector<std::string>& cells);
  void close();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

struct CsvTable {
  std::string header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable parse_csv(const std::string& text);

/// Renders a CSV in one of the known schemas as a standalone SVG document.
/// Returns warnings (empty input, skipped rows).  Unknown headers throw
/// SchemaMismatch.
std::string render_svg(const CsvTable& table, std::vector<std::string>& warnings);
std::vector<std::string> render_plot(const std::string& csv_path, const std::string& svg_path);

}  // namespace ngame
