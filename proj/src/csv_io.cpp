#include "dynpanel/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "dynpanel/errors.hpp"

namespace dynpanel {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

[[noreturn]] void fail_row(std::size_t row, const std::string& what) {
  throw InputError("csv row " + std::to_string(row) + ": " + what);
}

double parse_double(const std::string& s, std::size_t row, const std::string& column) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) fail_row(row, "non-numeric value '" + s + "' in column " + column);
  return v;
}

long long parse_int(const std::string& s, std::size_t row, const std::string& column) {
  long long v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) fail_row(row, "non-integer value '" + s + "' in column " + column);
  return v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Record {
  double y = 0.0;
  std::vector<double> x;
  bool has_x = false;
};

}  // namespace

PanelData load_panel_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("csv: empty input");
  const std::vector<std::string> header = split(line);
  std::optional<std::size_t> col_i, col_t, col_y;
  std::map<long long, std::size_t> x_cols;  // regressor number -> column
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "i") col_i = c;
    else if (name == "t") col_t = c;
    else if (name == "y") col_y = c;
    else if (name.size() > 1 && name[0] == 'x') {
      const long long k = parse_int(name.substr(1), 1, name);
      if (k < 1 || !x_cols.emplace(k, c).second) fail_row(1, "bad or duplicate regressor column " + name);
    } else {
      fail_row(1, "unexpected column '" + name + "'");
    }
  }
  if (!col_i || !col_t || !col_y) throw InputError("csv row 1: header must contain i, t and y");
  const Index px = static_cast<Index>(x_cols.size());
  if (px > 0 && x_cols.rbegin()->first != px) throw InputError("csv row 1: regressor columns must be x1..xK");

  std::map<long long, std::map<long long, Record>> data;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) {
      fail_row(row, "expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));
    }
    const long long i = parse_int(cells[*col_i], row, "i");
    const long long t = parse_int(cells[*col_t], row, "t");
    Record rec;
    rec.y = parse_double(cells[*col_y], row, "y");
    rec.x.resize(static_cast<std::size_t>(px));
    std::size_t filled = 0;
    for (const auto& [k, c] : x_cols) {
      if (!cells[c].empty()) {
        rec.x[static_cast<std::size_t>(k - 1)] = parse_double(cells[c], row, header[c]);
        ++filled;
      }
    }
    if (t >= 1 && filled != static_cast<std::size_t>(px)) fail_row(row, "missing regressor value");
    rec.has_x = filled == static_cast<std::size_t>(px);
    if (!data[i].emplace(t, std::move(rec)).second) {
      fail_row(row, "duplicate observation for unit " + std::to_string(i) + " at t = " + std::to_string(t));
    }
  }
  if (data.empty()) throw InputError("csv: no observations");

  long long t_min = data.begin()->second.begin()->first, t_max = data.begin()->second.rbegin()->first;
  for (const auto& [i, series] : data) {
    t_min = std::min(t_min, series.begin()->first);
    t_max = std::max(t_max, series.rbegin()->first);
  }
  if (t_min > 1 || t_max < 1) throw InputError("csv: periods must cover t = 1");
  for (const auto& [i, series] : data) {
    for (long long t = t_min; t <= t_max; ++t) {
      if (!series.count(t)) {
        throw InputError("csv: missing observation (" + std::to_string(i) + "," + std::to_string(t) + ")");
      }
    }
  }

  PanelData p;
  p.N = static_cast<Index>(data.size());
  p.T = static_cast<Index>(t_max);
  p.L = static_cast<Index>(1 - t_min);
  p.p_x = px;
  p.y.resize(p.N, p.T);
  p.y_init.resize(p.N, p.L);
  p.x.resize(p.N * p.T, px);
  Index unit = 0;
  for (const auto& [i, series] : data) {
    for (const auto& [t, rec] : series) {
      if (t >= 1) {
        p.y(unit, t - 1) = rec.y;
        for (Index k = 0; k < px; ++k) p.x(unit * p.T + (t - 1), k) = rec.x[static_cast<std::size_t>(k)];
      } else {
        p.y_init(unit, -t) = rec.y;
      }
    }
    ++unit;
  }
  p.validate();
  return p;
}

PanelData load_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return load_panel_csv(in);
}

void save_panel_csv(const PanelData& panel, std::ostream& out) {
  out << "i,t,y";
  for (Index k = 1; k <= panel.p_x; ++k) out << ",x" << k;
  out << '\n';
  for (Index i = 0; i < panel.N; ++i) {
    for (Index t = 1 - panel.L; t <= panel.T; ++t) {
      out << (i + 1) << ',' << t << ',';
      if (t <= 0) {
        out << fmt17(panel.y_init(i, -t));
        for (Index k = 0; k < panel.p_x; ++k) out << ',';
      } else {
        out << fmt17(panel.y(i, t - 1));
        for (Index k = 0; k < panel.p_x; ++k) out << ',' << fmt17(panel.x(i * panel.T + t - 1, k));
      }
      out << '\n';
    }
  }
}

void save_panel_csv(const PanelData& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  save_panel_csv(panel, out);
}

void save_report_csv(const ExperimentReport& report, std::ostream& out) {
  const std::size_t h = report.config.hypothesis.size();
  out << "experiment,method,used,excluded,rmse_alpha,rmse_eta";
  for (std::size_t k = 0; k < h; ++k) out << ",coverage_g" << report.config.hypothesis[k] + 1;
  for (std::size_t k = 0; k < h; ++k) out << ",length_g" << report.config.hypothesis[k] + 1;
  out << ",size,power";
  for (std::size_t k = 0; k < h; ++k) out << ",coverage_mc_g" << report.config.hypothesis[k] + 1;
  out << ",size_mc,power_mc\n";
  for (Method m : kMethods) {
    const MethodSummary& s = report[m];
    out << report.config.name << ',' << to_string(m);
    if (!s.applicable) {
      out << ",,";
      for (std::size_t c = 0; c < 4 + 3 * h + 2; ++c) out << ',';
      out << '\n';
      continue;
    }
    out << ',' << s.used << ',' << s.excluded << ',' << fmt17(s.rmse_alpha) << ',' << fmt17(s.rmse_eta);
    for (double v : s.coverage) out << ',' << fmt17(v);
    for (double v : s.length) out << ',' << fmt17(v);
    out << ',' << fmt17(s.size) << ',' << fmt17(s.power);
    for (double v : s.coverage_mc) out << ',' << fmt17(v);
    out << ',' << fmt17(s.size_mc) << ',' << fmt17(s.power_mc) << '\n';
  }
}

}  // namespace dynpanel
