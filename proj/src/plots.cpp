#include "agh/plots.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "agh/io.h"
#include "agh/model.h"

namespace agh::plots {

namespace {

constexpr double kW = 640, kH = 400, kLeft = 80, kRight = 150, kTop = 40, kBottom = 50;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string header(const std::string& title) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(title) << "</text>\n";
  return o.str();
}

// Pads a degenerate range so single points and flat lines stay visible.
std::pair<double, double> range(double lo, double hi) {
  if (hi - lo < 1e-12) {
    const double pad = std::max(1.0, std::abs(lo) * 0.05);
    return {lo - pad, hi + pad};
  }
  return {lo, hi};
}

} // namespace

int Csv::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

std::vector<double> Csv::numbers(const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw InputError("CSV has no column '" + name + "'");
  std::vector<double> out;
  for (const auto& r : rows) {
    const auto& cell = r[static_cast<std::size_t>(c)];
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cell.size() || cell.empty()) {
      throw InputError("CSV column '" + name + "' holds non-numeric value '" + cell + "'");
    }
    out.push_back(v);
  }
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (csv.header.empty()) {
      csv.header = std::move(cells);
    } else if (cells.size() != csv.header.size()) {
      throw InputError("CSV row " + std::to_string(csv.rows.size() + 1) + " has " +
                       std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(csv.header.size()));
    } else {
      csv.rows.push_back(std::move(cells));
    }
  }
  if (csv.header.empty()) throw InputError("empty CSV");
  if (csv.rows.empty()) throw InputError("CSV has a header but no data rows");
  return csv;
}

std::vector<double> running_min(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) out.push_back(out.empty() ? x : std::min(out.back(), x));
  return out;
}

std::string line_svg(const std::string& title, const std::string& x_label,
                     const std::vector<double>& x, const std::vector<Series>& series) {
  double y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& s : series) {
    if (s.y.size() != x.size()) throw InputError("series '" + s.name + "' length differs from x");
    for (double v : s.y) {
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  }
  if (x.empty()) throw InputError("nothing to plot");
  const auto [x0, x1] = range(*std::min_element(x.begin(), x.end()), *std::max_element(x.begin(), x.end()));
  const auto [y0, y1] = range(y_lo, y_hi);
  auto sx = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * (kW - kLeft - kRight); };
  auto sy = [&](double v) { return kH - kBottom - (v - y0) / (y1 - y0) * (kH - kTop - kBottom); };

  std::ostringstream o;
  o << header(title);
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight << "\" y2=\""
    << kH - kBottom << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kH - kBottom
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double yv = y0 + (y1 - y0) * k / 4.0;
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << px(sy(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv)
      << "</text>\n";
    const double xv = x0 + (x1 - x0) * k / 4.0;
    o << "<text x=\"" << px(sx(xv)) << "\" y=\"" << kH - kBottom + 16 << "\" text-anchor=\"middle\">"
      << fmt(xv) << "</text>\n";
  }
  o << "<text x=\"" << (kLeft + kW - kRight) / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">"
    << escape(x_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < x.size(); ++k) {
      o << (k ? " " : "") << px(sx(x[k])) << ',' << px(sy(series[s].y[k]));
    }
    o << "\"/>\n";
    for (std::size_t k = 0; k < x.size(); ++k) {
      o << "<circle cx=\"" << px(sx(x[k])) << "\" cy=\"" << px(sy(series[s].y[k])) << "\" r=\"3\" fill=\""
        << color << "\"/>\n";
    }
    const double ly = kTop + 18.0 * static_cast<double>(s);
    o << "<rect x=\"" << kW - kRight + 12 << "\" y=\"" << px(ly) << "\" width=\"12\" height=\"12\" fill=\""
      << color << "\"/>\n";
    o << "<text x=\"" << kW - kRight + 30 << "\" y=\"" << px(ly + 10) << "\">" << escape(series[s].name)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string bar_svg(const std::string& title, const std::vector<std::string>& labels,
                    const std::vector<double>& values) {
  if (labels.empty() || labels.size() != values.size()) throw InputError("bar chart needs one value per label");
  const double hi = std::max(*std::max_element(values.begin(), values.end()), 1e-12);
  const double slot = (kW - kLeft - 20) / static_cast<double>(labels.size());
  const double base = kH - kBottom;
  std::ostringstream o;
  o << header(title);
  o << "<line x1=\"" << kLeft << "\" y1=\"" << base << "\" x2=\"" << kW - 20 << "\" y2=\"" << base
    << "\" stroke=\"black\"/>\n";
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const double h = std::max(0.0, values[k]) / hi * (base - kTop - 20);
    const double x = kLeft + slot * static_cast<double>(k) + slot * 0.15;
    o << "<rect x=\"" << px(x) << "\" y=\"" << px(base - h) << "\" width=\"" << px(slot * 0.7)
      << "\" height=\"" << px(h) << "\" fill=\"" << kColors[k % std::size(kColors)] << "\"/>\n";
    o << "<text x=\"" << px(x + slot * 0.35) << "\" y=\"" << px(base - h - 4)
      << "\" text-anchor=\"middle\">" << fmt(values[k]) << "</text>\n";
    o << "<text x=\"" << px(x + slot * 0.35) << "\" y=\"" << base + 16 << "\" text-anchor=\"middle\">"
      << escape(labels[k]) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::vector<std::filesystem::path> render(const std::filesystem::path& csv_path,
                                          const std::filesystem::path& out_dir) {
  const auto csv = parse_csv(io::read_text(csv_path));
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  if (csv.column("epoch") >= 0) {
    const auto epoch = csv.numbers("epoch");
    const auto val = csv.numbers("val_mean_cost");
    std::vector<Series> series{{"train (sampled)", csv.numbers("train_mean_cost")},
                               {"validation (greedy)", val},
                               {"validation, best so far", running_min(val)}};
    if (csv.column("baseline_mean_cost") >= 0) {
      series.push_back({"baseline", csv.numbers("baseline_mean_cost")});
    }
    files.emplace_back(out_dir / "objective_vs_epoch.svg",
                       line_svg("Mean cost per epoch", "epoch", epoch, series));
  } else if (csv.column("solver") >= 0 && csv.column("mean_gap") >= 0) {
    std::vector<std::string> labels;
    std::vector<double> gaps, objs;
    const int sc = csv.column("solver");
    const int gc = csv.column("mean_gap");
    const int oc = csv.column("mean_objective");
    for (const auto& r : csv.rows) {
      if (r[static_cast<std::size_t>(gc)] == "NA") continue; // solver failed everywhere
      labels.push_back(r[static_cast<std::size_t>(sc)]);
      gaps.push_back(std::stod(r[static_cast<std::size_t>(gc)]));
      objs.push_back(std::stod(r[static_cast<std::size_t>(oc)]));
    }
    if (labels.empty()) throw InputError("bench CSV has no solved rows");
    files.emplace_back(out_dir / "gap_bars.svg", bar_svg("Mean gap to best found", labels, gaps));
    files.emplace_back(out_dir / "objective_bars.svg", bar_svg("Mean objective", labels, objs));
  } else {
    throw InputError("unrecognized CSV: expected a training log (epoch, ...) or a bench summary "
                     "(solver, ..., mean_gap, ...)");
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [path, text] : files) {
    io::write_text(path, text);
    written.push_back(path);
  }
  return written;
}

} // namespace agh::plots
