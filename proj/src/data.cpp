#include "vanish/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace vanish {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = mag * std::sin(ang);
  has_spare_ = true;
  return mag * std::cos(ang);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return x % n;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string s = trimmed(raw);
  double v = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto rc = std::from_chars(begin, end, v);
  if (rc.ec != std::errc{} || rc.ptr != end)
    throw std::runtime_error("csv: non-numeric cell at row " + std::to_string(row) + ", column " +
                             std::to_string(col + 1) + ": '" + s + "'");
  if (!std::isfinite(v))
    throw std::runtime_error("csv: non-finite value at row " + std::to_string(row) + ", column " +
                             std::to_string(col + 1));
  return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: " + path + " is empty");
  std::vector<std::string> header = split_line(line);
  for (std::string& h : header) h = trimmed(h);

  std::ptrdiff_t label_idx = -1;
  if (!label_column.empty()) {
    const auto it = std::find(header.begin(), header.end(), label_column);
    if (it == header.end())
      throw std::runtime_error("csv: label column '" + label_column + "' not found in " + path);
    label_idx = it - header.begin();
  }

  Dataset ds;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (static_cast<std::ptrdiff_t>(c) != label_idx) ds.feature_names.push_back(header[c]);

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::unordered_map<std::string, int> label_ids;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trimmed(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("csv: row " + std::to_string(row_no) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    std::vector<double> feats;
    feats.reserve(ds.feature_names.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == label_idx) {
        const std::string token = trimmed(cells[c]);
        auto [it, inserted] = label_ids.try_emplace(token, static_cast<int>(ds.label_names.size()));
        if (inserted) ds.label_names.push_back(token);
        labels.push_back(it->second);
      } else {
        feats.push_back(parse_cell(cells[c], row_no, c));
      }
    }
    rows.push_back(std::move(feats));
  }
  if (rows.empty()) throw std::runtime_error("csv: " + path + " has no data rows");

  ds.X.resize(static_cast<Index>(rows.size()), static_cast<Index>(ds.feature_names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      ds.X(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  if (label_idx >= 0) {
    ds.y.resize(static_cast<Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) ds.y[static_cast<Index>(i)] = labels[i];
  }
  return ds;
}

std::string format_double(double v) {
  char buf[64];
  const auto rc = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, rc.ptr);
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  for (std::size_t j = 0; j < ds.feature_names.size(); ++j) {
    if (j) out << ',';
    out << ds.feature_names[j];
  }
  if (ds.has_labels()) out << ",label";
  out << '\n';
  for (Index i = 0; i < ds.rows(); ++i) {
    for (Index j = 0; j < ds.X.cols(); ++j) {
      if (j) out << ',';
      out << format_double(ds.X(i, j));
    }
    if (ds.has_labels()) out << ',' << ds.label_names[static_cast<std::size_t>(ds.y[i])];
    out << '\n';
  }
  if (!out) throw std::runtime_error("csv: write failed for " + path);
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
    throw std::invalid_argument("split: fraction must lie in [0,1]");
  const Index m = ds.rows();
  std::vector<Index> order(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (Index i = m - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  const Index train_m = static_cast<Index>(std::floor(static_cast<double>(m) * train_fraction));

  auto take = [&](Index begin, Index count) {
    Dataset out;
    out.feature_names = ds.feature_names;
    out.label_names = ds.label_names;
    out.X.resize(count, ds.X.cols());
    if (ds.has_labels()) out.y.resize(count);
    for (Index i = 0; i < count; ++i) {
      const Index src = order[static_cast<std::size_t>(begin + i)];
      out.X.row(i) = ds.X.row(src);
      if (ds.has_labels()) out.y[i] = ds.y[src];
    }
    return out;
  };
  return {take(0, train_m), take(train_m, m - train_m)};
}

Dataset generate_synthetic(Index m_per_class, double noise_std, std::uint64_t seed) {
  if (m_per_class < 1) throw std::invalid_argument("generate_synthetic: need at least one point per class");
  if (noise_std < 0.0) throw std::invalid_argument("generate_synthetic: negative noise");

  Dataset ds;
  ds.feature_names = {"x1", "x2", "x3"};
  ds.label_names = {"0", "1"};
  ds.X.resize(2 * m_per_class, 3);
  ds.y.resize(2 * m_per_class);

  Rng rng(seed);
  const double root13 = std::sqrt(1.3);
  for (Index i = 0; i < m_per_class; ++i) {
    double x1, x2, s;
    do {
      x1 = rng.uniform(-1.0, 1.0);
      x2 = rng.uniform();
      s = 1.0 - x1 * x1 - 0.01 * x2;
    } while (s < 0.0);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double x3 = sign * std::sqrt(s);
    ds.X(i, 0) = x1 + noise_std * rng.normal();
    ds.X(i, 1) = x2 + noise_std * rng.normal();
    ds.X(i, 2) = x3 + noise_std * rng.normal();
    ds.y[i] = 0;
  }
  for (Index i = 0; i < m_per_class; ++i) {
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double x2 = rng.uniform();
    ds.X(m_per_class + i, 0) = root13 * std::cos(theta) + noise_std * rng.normal();
    ds.X(m_per_class + i, 1) = x2 + noise_std * rng.normal();
    ds.X(m_per_class + i, 2) = root13 * std::sin(theta) + noise_std * rng.normal();
    ds.y[m_per_class + i] = 1;
  }
  return ds;
}

}  // namespace vanish
