#include "ipclab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ipclab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("csv column '" + name + "' missing");
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(c < r.size() && !r[c].empty() ? std::stod(r[c]) : std::nan(""));
  return out;
}

namespace {
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}
}  // namespace

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty())
      t.header = split_line(line);
    else
      t.rows.push_back(split_line(line));
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

void write_file_atomic(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

namespace {

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ~n "nice" ticks covering [lo, hi]
std::vector<double> nice_ticks(double lo, double hi, int n) {
  std::vector<double> out;
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) out.push_back(v);
  return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};

}  // namespace

std::string svg_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  const double W = opt.width, H = opt.height;
  const double ml = 70, mr = 150, mt = 36, mb = 48;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (opt.log_y && s.y[i] <= 0)) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, ty(s.y[i]));
      yhi = std::max(yhi, ty(s.y[i]));
    }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (xhi == xlo) xhi = xlo + 1;
  if (yhi == ylo) yhi = ylo + 1;
  const double pad = 0.05 * (yhi - ylo);
  ylo -= pad;
  yhi += pad;
  auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << esc(opt.title) << "</text>\n";
  o << "<g stroke=\"#333\" stroke-width=\"1\"><line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
    << "\" y2=\"" << H - mb << "\"/><line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
    << "\"/></g>\n";
  o << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double t : nice_ticks(xlo, xhi, 6))
    o << "<text x=\"" << num(px(t)) << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\">" << tick_label(t)
      << "</text>\n";
  for (double t : nice_ticks(ylo, yhi, 5)) {
    const std::string lab = opt.log_y ? "1e" + tick_label(t) : tick_label(t);
    o << "<text x=\"" << ml - 6 << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">" << esc(lab)
      << "</text>\n";
    o << "<line x1=\"" << ml << "\" y1=\"" << num(py(t)) << "\" x2=\"" << W - mr << "\" y2=\"" << num(py(t))
      << "\" stroke=\"#eee\"/>\n";
  }
  o << "<text x=\"" << num((ml + W - mr) / 2) << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
    << esc(opt.x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << num((mt + H - mb) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << esc(opt.y_label) << "</text>\n</g>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (opt.log_y && s.y[i] <= 0)) continue;
      o << num(px(s.x[i])) << ',' << num(py(ty(s.y[i]))) << ' ';
    }
    o << "\"/>\n";
    const double ly = mt + 14 + 18.0 * si;
    o << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << num(ly) << "\" x2=\"" << W - mr + 30 << "\" y2=\"" << num(ly)
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    o << "<text x=\"" << W - mr + 34 << "\" y=\"" << num(ly + 4)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << esc(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string svg_stack(const std::vector<std::string>& charts, int width, int height_each) {
  std::ostringstream o;
  const int H = height_each * static_cast<int>(charts.size());
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << H << "\" viewBox=\"0 0 "
    << width << ' ' << H << "\">\n";
  for (std::size_t i = 0; i < charts.size(); ++i) {
    // nested svg elements keep each chart's own coordinate system
    std::string c = charts[i];
    const auto pos = c.find("<svg ");
    if (pos != std::string::npos) c.insert(pos + 5, "y=\"" + std::to_string(height_each * i) + "\" ");
    o << c;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace ipclab
