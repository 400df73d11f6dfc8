#include "ngame/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include "ngame/error.hpp"

namespace ngame {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const char* header) : path_(path), out_(path) {
  if (!out_) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out_ << header << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) fail(ErrorCode::Io, "write to '" + path_ + "' failed");
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) fail(ErrorCode::Io, "closing '" + path_ + "' failed");
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (out.fail()) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) fail(ErrorCode::Io, "read from '" + path + "' failed");
  return os.str();
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      table.header = line;
      first = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

namespace {

constexpr double kWidth = 760, kHeight = 500;
constexpr double kLeft = 80, kRight = 190, kTop = 40, kBottom = 70;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// "P_A^(c)" becomes P with subscript A and superscript (c).
std::string symbol(const std::string& label) {
  std::string out;
  std::size_t i = 0;
  while (i < label.size()) {
    const char c = label[i];
    if ((c == '_' || c == '^') && i + 1 < label.size()) {
      std::size_t end = i + 1;
      if (label[end] == '(') {
        end = label.find(')', end);
        end = end == std::string::npos ? label.size() : end + 1;
      } else {
        while (end < label.size() && (std::isalnum(static_cast<unsigned char>(label[end])) || label[end] == '+'))
          ++end;
      }
      const std::string part = label.substr(i + 1, end - i - 1);
      const char* shift = c == '_' ? "sub" : "super";
      out += "<tspan baseline-shift=\"" + std::string(shift) + "\" font-size=\"75%\">" + escape(part) + "</tspan>";
      i = end;
    } else {
      out += escape(std::string(1, c));
      ++i;
    }
  }
  return out;
}

std::optional<double> number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) return std::nullopt;
  return v;
}

double nice_step(double span) {
  if (!(span > 0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return mag * (f < 1.5 ? 1 : f < 3 ? 2 : f < 7 ? 5 : 10);
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle(double default_lo, double default_hi) {
    if (!(lo <= hi)) lo = default_lo, hi = default_hi;
    if (hi - lo < 1e-12) {
      const double pad = std::max(std::abs(lo) * 0.05, 0.05);
      lo -= pad;
      hi += pad;
    }
  }
};

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  std::vector<std::string> classes;  // per point, may be empty
  std::string color;
  bool dashed = false;
  bool thin = false;
  bool legend = true;
};

class Svg {
 public:
  Svg() {
    os_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"13\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }
  std::ostringstream& out() { return os_; }
  std::string finish() {
    os_ << "</svg>\n";
    return os_.str();
  }

 private:
  std::ostringstream os_;
};

struct Frame {
  Range x, y;
  double px(double v) const { return kLeft + (v - x.lo) / (x.hi - x.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const { return kHeight - kBottom - (v - y.lo) / (y.hi - y.lo) * (kHeight - kTop - kBottom); }
};

void draw_axes(Svg& svg, const Frame& f, const std::string& xlabel, const std::string& ylabel,
               const std::string& title) {
  auto& os = svg.out();
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  os << "<g stroke=\"#333\" fill=\"none\"><rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0
     << "\" height=\"" << y0 - y1 << "\"/></g>\n";
  auto ticks = [](const Range& r) {
    std::vector<double> out;
    const double step = nice_step(r.hi - r.lo);
    for (double v = std::ceil(r.lo / step - 1e-9) * step; v <= r.hi + step * 1e-9; v += step)
      out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
    return out;
  };
  os << "<g font-size=\"11\" fill=\"#333\">\n";
  for (double v : ticks(f.x)) {
    const double p = f.px(v);
    os << "<line x1=\"" << p << "\" y1=\"" << y0 << "\" x2=\"" << p << "\" y2=\"" << y0 + 5
       << "\" stroke=\"#333\"/><text x=\"" << p << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\">"
       << format_number(v) << "</text>\n";
  }
  for (double v : ticks(f.y)) {
    const double p = f.py(v);
    os << "<line x1=\"" << x0 - 5 << "\" y1=\"" << p << "\" x2=\"" << x0 << "\" y2=\"" << p
       << "\" stroke=\"#333\"/><text x=\"" << x0 - 8 << "\" y=\"" << p + 4 << "\" text-anchor=\"end\">"
       << format_number(v) << "</text>\n";
  }
  os << "</g>\n";
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 25 << "\" text-anchor=\"middle\">" << symbol(xlabel)
     << "</text>\n";
  os << "<text transform=\"translate(22," << (y0 + y1) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << symbol(ylabel) << "</text>\n";
  if (!title.empty())
    os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"24\" text-anchor=\"middle\" font-weight=\"bold\">"
       << symbol(title) << "</text>\n";
}

void draw_marker(std::ostream& os, double x, double y, const std::string& cls, const std::string& color) {
  if (cls == "discontinuous") {
    os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"#1f4fd6\"/>\n";
  } else if (cls == "continuous") {
    os << "<rect x=\"" << x - 4 << "\" y=\"" << y - 4 << "\" width=\"8\" height=\"8\" fill=\"none\" stroke=\"#d62728\" "
       << "stroke-width=\"1.5\"/>\n";
  } else if (cls == "none") {
    os << "<path d=\"M" << x - 4 << ' ' << y - 4 << "L" << x + 4 << ' ' << y + 4 << "M" << x - 4 << ' ' << y + 4 << "L"
       << x + 4 << ' ' << y - 4 << "\" stroke=\"#777\" stroke-width=\"1.5\"/>\n";
  } else {
    os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
  }
}

std::string line_chart(std::vector<Series> series, const std::string& xlabel, const std::string& ylabel,
                       const std::string& title, bool markers) {
  Frame f;
  for (const auto& s : series)
    for (auto [x, y] : s.points) f.x.add(x), f.y.add(y);
  f.x.settle(0, 1);
  f.y.settle(0, 1);
  Svg svg;
  draw_axes(svg, f, xlabel, ylabel, title);
  auto& os = svg.out();
  int legend_row = 0;
  bool any_class = false;
  for (const auto& s : series) {
    if (s.points.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << (s.thin ? 0.6 : 1.6) << "\"";
      if (s.dashed) os << " stroke-dasharray=\"5,3\"";
      if (s.thin) os << " stroke-opacity=\"0.5\"";
      os << " points=\"";
      for (auto [x, y] : s.points) os << f.px(x) << ',' << f.py(y) << ' ';
      os << "\"/>\n";
    }
    if (markers || s.points.size() == 1)
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        const std::string cls = i < s.classes.size() ? s.classes[i] : "";
        any_class = any_class || !cls.empty();
        draw_marker(os, f.px(s.points[i].first), f.py(s.points[i].second), cls, s.color);
      }
    if (s.legend && legend_row < 20) {
      const double ly = kTop + 10 + 18 * legend_row++;
      const double lx = kWidth - kRight + 15;
      os << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 22 << "\" y2=\"" << ly << "\" stroke=\""
         << s.color << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
      os << "<text x=\"" << lx + 28 << "\" y=\"" << ly + 4 << "\">" << symbol(s.name) << "</text>\n";
    }
  }
  if (any_class) {
    const char* names[] = {"discontinuous", "continuous", "none"};
    for (const char* n : names) {
      const double ly = kTop + 10 + 18 * legend_row++;
      const double lx = kWidth - kRight + 26;
      draw_marker(os, lx, ly, n, "#000");
      os << "<text x=\"" << lx + 17 << "\" y=\"" << ly + 4 << "\">" << n << "</text>\n";
    }
  }
  return svg.finish();
}

std::string heatmap_chart(const CsvTable& table, std::vector<std::string>& warnings) {
  std::vector<double> rows, cols;
  std::map<std::pair<double, double>, std::optional<double>> cells;
  Range values;
  for (const auto& r : table.rows) {
    if (r.size() != 3) {
      warnings.push_back("skipped malformed heatmap row");
      continue;
    }
    const auto m = number(r[0]), k = number(r[1]);
    if (!m || !k) {
      warnings.push_back("skipped malformed heatmap row");
      continue;
    }
    const auto v = number(r[2]);
    if (v) values.add(*v);
    rows.push_back(*m);
    cols.push_back(*k);
    cells[{*m, *k}] = v;
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(rows);
  uniq(cols);
  // Degree 0 stands for the complete graph and goes last.
  if (!cols.empty() && cols.front() == 0.0) std::rotate(cols.begin(), cols.begin() + 1, cols.end());
  values.settle(0, 1);

  Svg svg;
  auto& os = svg.out();
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  os << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
     << "\" fill=\"none\" stroke=\"#333\"/>\n";
  os << "<defs><pattern id=\"na\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\"><path d=\"M0 6L6 0\" "
        "stroke=\"#999\"/></pattern></defs>\n";
  auto color = [&](double v) {
    const double t = std::clamp((v - values.lo) / (values.hi - values.lo), 0.0, 1.0);
    const int r = static_cast<int>(255 * t), g = static_cast<int>(80 + 120 * (1 - std::abs(2 * t - 1))),
              b = static_cast<int>(255 * (1 - t));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, std::min(g, 255), b);
    return std::string(buf);
  };
  const double cw = cols.empty() ? 0 : (x1 - x0) / static_cast<double>(cols.size());
  const double ch = rows.empty() ? 0 : (y0 - y1) / static_cast<double>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double y = y0 - (i + 1) * ch;
    os << "<text x=\"" << x0 - 8 << "\" y=\"" << y + ch / 2 + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
       << format_number(rows[i]) << "</text>\n";
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double x = x0 + j * cw;
      auto it = cells.find({rows[i], cols[j]});
      const bool have = it != cells.end() && it->second.has_value();
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch << "\" fill=\""
         << (have ? color(*it->second) : "url(#na)") << "\"><title>"
         << (have ? format_number(*it->second) : std::string("no transition")) << "</title></rect>\n";
    }
  }
  for (std::size_t j = 0; j < cols.size(); ++j)
    os << "<text x=\"" << x0 + (j + 0.5) * cw << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
       << (cols[j] == 0.0 ? std::string("complete") : format_number(cols[j])) << "</text>\n";
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 25 << "\" text-anchor=\"middle\">&lt;k&gt;</text>\n";
  os << "<text transform=\"translate(22," << (y0 + y1) / 2 << ") rotate(-90)\" text-anchor=\"middle\">m</text>\n";
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"24\" text-anchor=\"middle\" font-weight=\"bold\">"
     << symbol("P_A^(c)") << "</text>\n";
  // Colour bar.
  const double bx = x1 + 30, bh = y0 - y1;
  for (int s = 0; s < 50; ++s) {
    const double v = values.hi - (values.hi - values.lo) * (s + 0.5) / 50;
    os << "<rect x=\"" << bx << "\" y=\"" << y1 + bh * s / 50 << "\" width=\"18\" height=\"" << bh / 50 + 0.5
       << "\" fill=\"" << color(v) << "\"/>\n";
  }
  os << "<text x=\"" << bx + 24 << "\" y=\"" << y1 + 10 << "\" font-size=\"11\">" << format_number(values.hi)
     << "</text>\n<text x=\"" << bx + 24 << "\" y=\"" << y0 << "\" font-size=\"11\">" << format_number(values.lo)
     << "</text>\n";
  return svg.finish();
}

}  // namespace

std::string render_svg(const CsvTable& table, std::vector<std::string>& warnings) {
  using namespace csv_schema;
  if (table.header.empty() && table.rows.empty()) {
    warnings.push_back("empty CSV; rendered empty axes");
    return line_chart({}, "x", "y", "", false);
  }
  const std::string& h = table.header;
  const std::vector<std::string> known = {kTrajectory, kSweep, kEnsemble, kRealization, kHeatmap};
  if (std::find(known.begin(), known.end(), h) == known.end()) {
    std::string list;
    for (const auto& k : known) list += "\n  " + k;
    fail(ErrorCode::SchemaMismatch, "unrecognised CSV header '" + h + "'; expected one of:" + list);
  }
  if (table.rows.empty()) warnings.push_back("CSV has no data rows; rendered empty axes");
  if (h == kHeatmap) return heatmap_chart(table, warnings);

  std::map<std::string, Series> by_name;
  std::vector<std::string> order;
  std::size_t skipped = 0;
  auto add = [&](const std::string& name, double x, double y, const std::string& cls) -> Series& {
    auto [it, inserted] = by_name.try_emplace(name);
    if (inserted) {
      it->second.name = name;
      order.push_back(name);
    }
    it->second.points.emplace_back(x, y);
    it->second.classes.push_back(cls);
    return it->second;
  };
  std::string xlabel, ylabel, title;
  bool markers = false;
  const std::size_t width = std::count(h.begin(), h.end(), ',') + 1;
  for (const auto& r : table.rows) {
    if (r.size() != width) {
      ++skipped;
      continue;
    }
    if (h == kTrajectory) {
      const auto t = number(r[0]), d = number(r[2]);
      if (!t || !d) {
        ++skipped;
        continue;
      }
      add(r[1], *t, *d, "");
    } else if (h == kSweep) {
      const auto x = number(r[1]), y = number(r[3]);
      if (!x || !y) {
        ++skipped;
        continue;
      }
      if (xlabel.empty()) xlabel = r[0];
      add(r[2], *x, *y, r[4]);
    } else if (h == kEnsemble) {
      const auto x = number(r[0]), n = number(r[2]), R = number(r[3]);
      if (!x || !n || !R) {
        ++skipped;
        continue;
      }
      add("n_" + r[1], *x, *n, "");
      add("R_" + r[1], *x, *R, "").dashed = true;
    } else {
      const auto t = number(r[1]), n = number(r[3]);
      if (!t || !n) {
        ++skipped;
        continue;
      }
      add(r[0] + ":" + r[2], *t, *n, "");
    }
  }
  if (skipped) warnings.push_back("skipped " + std::to_string(skipped) + " malformed row(s)");

  std::vector<Series> series;
  std::map<std::string, std::string> colors;
  auto color_for = [&](const std::string& key) {
    auto [it, inserted] = colors.try_emplace(key, kPalette[colors.size() % std::size(kPalette)]);
    return it->second;
  };
  for (const auto& name : order) {
    Series s = std::move(by_name[name]);
    if (h == kRealization) {
      const std::string opinion = name.substr(name.find(':') + 1);
      s.color = color_for(opinion);
      s.thin = true;
      s.legend = false;
    } else if (h == kEnsemble) {
      s.color = color_for(name.substr(2));
    } else {
      s.color = color_for(name);
    }
    if (h == kSweep) {
      std::vector<std::size_t> idx(s.points.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.points[a].first < s.points[b].first; });
      Series sorted = s;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        sorted.points[i] = s.points[idx[i]];
        sorted.classes[i] = s.classes[idx[i]];
      }
      s = std::move(sorted);
    }
    series.push_back(std::move(s));
  }
  if (h == kRealization) {
    std::vector<std::string> opinions;
    for (const auto& [k, c] : colors) {
      Series legend;
      legend.name = "n_" + k;
      legend.color = c;
      series.push_back(legend);
    }
  }

  if (h == kTrajectory) {
    xlabel = "t";
    ylabel = "density";
  } else if (h == kSweep) {
    if (xlabel.empty()) xlabel = "P_A";
    ylabel = order.size() == 1 ? order.front() : "value";
    markers = true;
  } else if (h == kEnsemble) {
    xlabel = "P_A";
    ylabel = "<n_i>, R_i";
  } else {
    xlabel = "sweep";
    ylabel = "n_i";
  }
  return line_chart(std::move(series), xlabel, ylabel, title, markers);
}

std::vector<std::string> render_plot(const std::string& csv_path, const std::string& svg_path) {
  std::vector<std::string> warnings;
  const std::string svg = render_svg(parse_csv(read_text_file(csv_path)), warnings);
  write_text_file(svg_path, svg);
  return warnings;
}

}  // namespace ngame
