#include "bvtk/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bvtk/error.hpp"

namespace bvtk {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw ParameterError("a grid needs at least two points");
  if (points_.front() != 0.0 || points_.back() != 1.0) throw ParameterError("grid must start at 0 and end at 1");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) throw ParameterError("grid points must be strictly increasing");
  }
}

Grid Grid::uniform(std::size_t cells) {
  if (cells == 0) throw ParameterError("uniform grid needs at least one cell");
  std::vector<double> pts(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) pts[i] = static_cast<double>(i) / static_cast<double>(cells);
  pts.back() = 1.0;
  return Grid(std::move(pts));
}

Grid Grid::merge(const Grid& a, const Grid& b) {
  if (a == b) return a;
  std::vector<double> pts;
  pts.reserve(a.size() + b.size());
  std::set_union(a.points_.begin(), a.points_.end(), b.points_.begin(), b.points_.end(), std::back_inserter(pts));
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return Grid(std::move(pts));
}

std::optional<std::size_t> Grid::find(double t, double tol) const {
  const std::size_t i = nearest(t);
  if (std::abs(points_[i] - t) <= tol) return i;
  return std::nullopt;
}

std::size_t Grid::nearest(double t) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), t);
  if (it == points_.begin()) return 0;
  if (it == points_.end()) return points_.size() - 1;
  const auto i = static_cast<std::size_t>(it - points_.begin());
  return (t - points_[i - 1] <= points_[i] - t) ? i - 1 : i;
}

std::size_t Grid::cell_of(double t) const {
  if (t <= 0.0) return 0;
  if (t >= 1.0) return cells() - 1;
  const auto it = std::upper_bound(points_.begin(), points_.end(), t);
  return static_cast<std::size_t>(it - points_.begin()) - 1;
}

Grid Grid::refined(unsigned levels) const {
  if (levels == 0) return *this;
  const std::size_t sub = std::size_t{1} << levels;
  std::vector<double> pts;
  pts.reserve(cells() * sub + 1);
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const double a = points_[i];
    const double h = points_[i + 1] - a;
    for (std::size_t k = 0; k < sub; ++k) pts.push_back(a + h * static_cast<double>(k) / static_cast<double>(sub));
  }
  pts.push_back(1.0);
  return Grid(std::move(pts));
}

// ---------------------------------------------------------------------------

SampledFunction::SampledFunction(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ParameterError("sample count does not match grid size");
  for (double v : values_) {
    if (!std::isfinite(v)) throw ParameterError("sampled values must be finite");
  }
}

SampledFunction SampledFunction::sample(Grid grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
  return SampledFunction(std::move(grid), std::move(v));
}

SampledFunction SampledFunction::constant(Grid grid, double c) {
  const std::size_t n = grid.size();
  return SampledFunction(std::move(grid), std::vector<double>(n, c));
}

double SampledFunction::eval(double t, Extension ext) const {
  if (auto i = grid_.find(t, 0.0)) return values_[*i];
  const std::size_t j = grid_.cell_of(t);
  switch (ext) {
    case Extension::left_value:
      return values_[j];
    case Extension::right_value:
      return values_[j + 1];
    case Extension::linear:
      break;
  }
  const double a = grid_[j];
  const double b = grid_[j + 1];
  const double w = (t - a) / (b - a);
  return values_[j] + w * (values_[j + 1] - values_[j]);
}

SampledFunction SampledFunction::resample(const Grid& target, Extension ext) const {
  if (target == grid_) return *this;
  std::vector<double> v(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) v[i] = eval(target[i], ext);
  return SampledFunction(target, std::move(v));
}

SampledFunction SampledFunction::scaled(double factor) const {
  auto v = values_;
  for (auto& x : v) x *= factor;
  return SampledFunction(grid_, std::move(v));
}

SampledFunction SampledFunction::abs() const {
  auto v = values_;
  for (auto& x : v) x = std::abs(x);
  return SampledFunction(grid_, std::move(v));
}

double SampledFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SampledFunction::spread() const {
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  return *hi - *lo;
}

namespace {
SampledFunction combine(const SampledFunction& a, const SampledFunction& b, double sign) {
  if (!(a.grid() == b.grid())) throw ParameterError("sampled functions live on different grids");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + sign * b[i];
  return SampledFunction(a.grid(), std::move(v));
}
}  // namespace

SampledFunction operator+(const SampledFunction& a, const SampledFunction& b) { return combine(a, b, 1.0); }
SampledFunction operator-(const SampledFunction& a, const SampledFunction& b) { return combine(a, b, -1.0); }

// ---------------------------------------------------------------------------

StepFunction::StepFunction(Grid grid, std::vector<double> cell_values)
    : grid_(std::move(grid)), cells_(std::move(cell_values)) {
  if (cells_.size() != grid_.cells()) throw ParameterError("step function needs one value per grid cell");
}

double StepFunction::eval(double t) const { return cells_[grid_.cell_of(t)]; }

std::vector<GridInterval> all_grid_intervals(std::size_t points) {
  std::vector<GridInterval> out;
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t j = i + 1; j < points; ++j) out.push_back({i, j});
  }
  return out;
}

// ---------------------------------------------------------------------------

SampledFunction read_sampled_function(std::istream& in) {
  std::vector<double> t, x;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double a = 0.0;
    double b = 0.0;
    if (!(ls >> a)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) throw ParseError("expected '<t> <value>'", lineno);
      continue;
    }
    if (!(ls >> b)) throw ParseError("missing value column", lineno);
    std::string rest;
    if (ls >> rest) throw ParseError("unexpected trailing token '" + rest + "'", lineno);
    if (!std::isfinite(a) || !std::isfinite(b)) throw ParseError("non-finite number", lineno);
    if (t.empty() && a != 0.0) throw ParseError("first grid point must be 0", lineno);
    if (!t.empty() && !(a > t.back())) throw ParseError("grid points must be strictly increasing", lineno);
    t.push_back(a);
    x.push_back(b);
  }
  if (t.size() < 2) throw ParseError("need at least two samples", lineno);
  if (t.back() != 1.0) throw ParseError("last grid point must be 1", lineno);
  return SampledFunction(Grid(std::move(t)), std::move(x));
}

SampledFunction load_sampled_function(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  try {
    return read_sampled_function(in);
  } catch (const ParseError& e) {
    throw ParseError::in_file(path, e);
  }
}

void write_sampled_function(std::ostream& out, const SampledFunction& x) {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < x.size(); ++i) out << x.grid()[i] << ' ' << x[i] << '\n';
  out.precision(old);
}

}  // namespace bvtk
