#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace agh::plots {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const; // -1 if absent
  std::vector<double> numbers(const std::string& name) const;
};

// Throws InputError on an empty file, a missing data row, or rows whose
// width differs from the header.
Csv parse_csv(const std::string& text);

// Best value seen so far at every position.
std::vector<double> running_min(const std::vector<double>& v);

struct Series {
  std::string name;
  std::vector<double> y;
};

std::string line_svg(const std::string& title, const std::string& x_label,
                     const std::vector<double>& x, const std::vector<Series>& series);
std::string bar_svg(const std::string& title, const std::vector<std::string>& labels,
                    const std::vector<double>& values);

// Renders a training log (objective vs epoch) or a bench summary (gap
// bars) into `out_dir`. Returns the written files; writes nothing if the
// CSV is rejected.
std::vector<std::filesystem::path> render(const std::filesystem::path& csv,
                                          const std::filesystem::path& out_dir);

} // namespace agh::plots
