#include "bvtk/young.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bvtk/error.hpp"
#include "text.hpp"

namespace bvtk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using text::fmt_real;
using text::parse_real;
using text::trim;

}  // namespace

// ---------------------------------------------------------------------------
// YoungFunction

YoungFunction YoungFunction::linear(double slope) {
  if (!(slope > 0.0) || !std::isfinite(slope)) throw ParameterError("linear Young function needs slope > 0");
  return YoungFunction(Linear{slope});
}

YoungFunction YoungFunction::power(double coeff, double exponent) {
  if (!(coeff > 0.0) || !std::isfinite(coeff)) throw ParameterError("power Young function needs c > 0");
  if (!(exponent >= 1.0) || !std::isfinite(exponent)) throw ParameterError("power Young function needs p >= 1");
  return YoungFunction(Power{coeff, exponent});
}

YoungFunction YoungFunction::piecewise(std::vector<double> breakpoints, std::vector<double> slopes) {
  if (breakpoints.empty() || breakpoints.size() != slopes.size()) {
    throw ParameterError("piecewise Young function needs one slope per breakpoint");
  }
  if (breakpoints.front() != 0.0) throw ParameterError("first breakpoint must be 0");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1]) || !std::isfinite(breakpoints[i])) {
      throw ParameterError("breakpoints must be strictly increasing");
    }
  }
  if (!(slopes.front() > 0.0)) throw ParameterError("first slope must be positive");
  for (std::size_t i = 1; i < slopes.size(); ++i) {
    if (!(slopes[i] >= slopes[i - 1]) || !std::isfinite(slopes[i])) {
      throw ParameterError("slopes must be non-decreasing (convexity)");
    }
  }
  std::vector<double> values(breakpoints.size(), 0.0);
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    values[i] = values[i - 1] + slopes[i - 1] * (breakpoints[i] - breakpoints[i - 1]);
  }
  return YoungFunction(Piecewise{std::move(breakpoints), std::move(slopes), std::move(values)});
}

double YoungFunction::operator()(double t) const {
  if (!(t >= 0.0)) throw DomainError("Young function evaluated at negative or NaN argument");
  return std::visit(overloaded{
                        [t](const Linear& f) { return f.slope * t; },
                        [t](const Power& f) { return f.coeff * std::pow(t, f.exponent); },
                        [t](const Piecewise& f) {
                          const auto it = std::upper_bound(f.breakpoints.begin(), f.breakpoints.end(), t);
                          const auto i = static_cast<std::size_t>(it - f.breakpoints.begin()) - 1;
                          return f.values[i] + f.slopes[i] * (t - f.breakpoints[i]);
                        },
                    },
                    form_);
}

double YoungFunction::inverse(double y, double tol) const {
  if (!(tol > 0.0)) throw ParameterError("inverse tolerance must be positive");
  if (!(y >= 0.0)) throw DomainError("inverse of a Young function at negative value");
  if (y == 0.0) return 0.0;
  if (const auto* f = std::get_if<Linear>(&form_)) return y / f->slope;
  if (const auto* f = std::get_if<Power>(&form_)) return std::pow(y / f->coeff, 1.0 / f->exponent);

  const double target_tol = tol * std::max(1.0, y);
  double lo = 0.0;
  double hi = 1.0;
  while ((*this)(hi) < y) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) return mid;  // bracket exhausted at double resolution
    const double v = (*this)(mid);
    if (std::abs(v - y) <= target_tol) return mid;
    if (v < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

YoungFunction YoungFunction::scaled(double factor) const {
  if (!(factor > 0.0)) throw ParameterError("Young function scale must be positive");
  return std::visit(overloaded{
                        [factor](const Linear& f) { return linear(f.slope * factor); },
                        [factor](const Power& f) { return power(f.coeff * factor, f.exponent); },
                        [factor](const Piecewise& f) {
                          auto s = f.slopes;
                          for (auto& v : s) v *= factor;
                          return piecewise(f.breakpoints, std::move(s));
                        },
                    },
                    form_);
}

std::string YoungFunction::describe() const {
  return std::visit(overloaded{
                        [](const Linear& f) { return fmt_real(f.slope) + "*t"; },
                        [](const Power& f) { return fmt_real(f.coeff) + "*t^" + fmt_real(f.exponent); },
                        [](const Piecewise& f) {
                          std::string s = "pwl(breaks";
                          for (double b : f.breakpoints) s += " " + fmt_real(b);
                          s += "; slopes";
                          for (double v : f.slopes) s += " " + fmt_real(v);
                          return s + ")";
                        },
                    },
                    form_);
}

// ---------------------------------------------------------------------------
// CoefficientRule

double CoefficientRule::operator()(std::size_t n) const {
  if (exponent == 0.0) return scale;
  if (exponent == 1.0) return scale * static_cast<double>(n);
  if (exponent == -1.0) return scale / static_cast<double>(n);
  return scale * std::pow(static_cast<double>(n), exponent);
}

std::string CoefficientRule::describe() const {
  if (exponent == 0.0) return fmt_real(scale);
  return fmt_real(scale) + "*n^" + fmt_real(exponent);
}

CoefficientRule parse_coefficient_rule(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw ParameterError("empty coefficient rule");
  CoefficientRule rule;
  // Optional leading scale: "<a>*" or "<a>/" before the n-term.
  const auto npos = s.find('n');
  if (npos == std::string::npos) {
    rule.scale = parse_real(s, "coefficient");
    return rule;
  }
  double sign = 1.0;
  std::string head = s.substr(0, npos);
  std::string tail = s.substr(npos + 1);
  if (!head.empty()) {
    const char op = head.back();
    if (op != '*' && op != '/') throw ParameterError("malformed coefficient rule '" + s + "'");
    head.pop_back();
    rule.scale = head.empty() ? 1.0 : parse_real(head, "coefficient scale");
    if (op == '/') sign = -1.0;
  }
  double q = 1.0;
  if (!tail.empty()) {
    if (tail.front() != '^') throw ParameterError("malformed coefficient rule '" + s + "'");
    q = parse_real(tail.substr(1), "coefficient exponent");
  }
  rule.exponent = sign * q;
  if (!(rule.scale > 0.0)) throw ParameterError("coefficient scale must be positive");
  return rule;
}

// ---------------------------------------------------------------------------
// YoungSequence

YoungSequence YoungSequence::jordan() {
  YoungSequence s;
  s.preset_ = SequencePreset::jordan;
  s.base_ = YoungFunction::linear(1.0);
  s.label_ = "jordan";
  return s;
}

YoungSequence YoungSequence::wiener(double p) {
  YoungSequence s;
  s.preset_ = SequencePreset::wiener;
  s.base_ = YoungFunction::power(1.0, p);
  s.label_ = "wiener:p=" + fmt_real(p);
  return s;
}

YoungSequence YoungSequence::waterman(CoefficientRule lambda) {
  if (!(lambda.scale > 0.0)) throw ParameterError("waterman lambda scale must be positive");
  if (lambda.exponent < 0.0) throw ParameterError("waterman lambda_n must be non-decreasing");
  if (lambda.exponent > 1.0) throw ParameterError("waterman needs sum 1/lambda_n = infinity (exponent <= 1)");
  YoungSequence s;
  s.preset_ = SequencePreset::waterman;
  s.base_ = YoungFunction::linear(1.0);
  s.rule_ = lambda;
  s.rule_is_reciprocal_ = true;
  s.label_ = "waterman:lambda=" + lambda.describe();
  return s;
}

YoungSequence YoungSequence::schramm(CoefficientRule c, double p) {
  if (!(c.scale > 0.0)) throw ParameterError("schramm c scale must be positive");
  if (c.exponent > 0.0) throw ParameterError("schramm c_n must be non-increasing");
  if (c.exponent < -1.0) throw ParameterError("schramm needs sum c_n = infinity (exponent >= -1)");
  YoungSequence s;
  s.preset_ = SequencePreset::schramm;
  s.base_ = YoungFunction::power(1.0, p);
  s.rule_ = c;
  s.label_ = "schramm:c=" + c.describe() + ",p=" + fmt_real(p);
  return s;
}

YoungSequence YoungSequence::custom(std::vector<YoungFunction> prefix, CustomTail tail, double ratio) {
  if (prefix.empty()) throw ParameterError("custom sequence needs at least one Young function");
  if (tail == CustomTail::geometric && !(ratio > 0.0 && ratio <= 1.0)) {
    throw ParameterError("geometric tail ratio must lie in (0, 1]");
  }
  YoungSequence s;
  s.preset_ = SequencePreset::custom;
  s.prefix_ = std::move(prefix);
  s.tail_ = tail;
  s.ratio_ = tail == CustomTail::geometric ? ratio : 1.0;
  s.label_ = "custom[" + std::to_string(s.prefix_.size()) + "]";
  return s;
}

double YoungSequence::coefficient(std::size_t n) const {
  if (n == 0) throw ParameterError("sequence index starts at 1");
  switch (preset_) {
    case SequencePreset::jordan:
    case SequencePreset::wiener:
      return 1.0;
    case SequencePreset::waterman:
      return 1.0 / rule_(n);
    case SequencePreset::schramm:
      return rule_(n);
    case SequencePreset::custom:
      break;
  }
  throw ParameterError("custom sequences carry no coefficient form");
}

const YoungFunction& YoungSequence::base() const {
  if (preset_ == SequencePreset::custom) throw ParameterError("custom sequences carry no base function");
  return base_;
}

YoungFunction YoungSequence::at(std::size_t n) const {
  if (n == 0) throw ParameterError("sequence index starts at 1");
  if (preset_ != SequencePreset::custom) {
    const double c = coefficient(n);
    return c == 1.0 ? base_ : base_.scaled(c);
  }
  if (n <= prefix_.size()) return prefix_[n - 1];
  const auto& last = prefix_.back();
  if (tail_ == CustomTail::repeat) return last;
  return last.scaled(std::pow(ratio_, static_cast<double>(n - prefix_.size())));
}

double YoungSequence::eval(std::size_t n, double t) const {
  if (preset_ != SequencePreset::custom) return coefficient(n) * base_(t);
  if (n == 0) throw ParameterError("sequence index starts at 1");
  if (n <= prefix_.size()) return prefix_[n - 1](t);
  const double v = prefix_.back()(t);
  if (tail_ == CustomTail::repeat) return v;
  return std::pow(ratio_, static_cast<double>(n - prefix_.size())) * v;
}

std::string YoungSequence::name() const { return label_; }

YoungSequence parse_sequence(std::string_view spec) {
  const std::string s = trim(spec);
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string args = colon == std::string::npos ? std::string{} : s.substr(colon + 1);

  auto keyvals = [&](std::string_view body) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    while (pos <= body.size()) {
      const auto comma = body.find(',', pos);
      const auto item = trim(body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      if (!item.empty()) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ParameterError("expected key=value in '" + std::string(body) + "'");
        out.emplace_back(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
      }
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return out;
  };

  if (head == "jordan") {
    if (!args.empty()) throw ParameterError("jordan takes no arguments");
    return YoungSequence::jordan();
  }
  if (head == "wiener") {
    double p = 0.0;
    bool have_p = false;
    for (const auto& [k, v] : keyvals(args)) {
      if (k != "p") throw ParameterError("wiener: unknown key '" + k + "'");
      p = parse_real(v, "p");
      have_p = true;
    }
    if (!have_p) throw ParameterError("wiener needs p=<real>");
    return YoungSequence::wiener(p);
  }
  if (head == "waterman") {
    CoefficientRule lambda{1.0, 1.0};
    for (const auto& [k, v] : keyvals(args)) {
      if (k != "lambda") throw ParameterError("waterman: unknown key '" + k + "'");
      lambda = parse_coefficient_rule(v);
    }
    return YoungSequence::waterman(lambda);
  }
  if (head == "schramm") {
    CoefficientRule c{1.0, -1.0};
    double p = 1.0;
    for (const auto& [k, v] : keyvals(args)) {
      if (k == "c") {
        c = parse_coefficient_rule(v);
      } else if (k == "p") {
        p = parse_real(v, "p");
      } else {
        throw ParameterError("schramm: unknown key '" + k + "'");
      }
    }
    return YoungSequence::schramm(c, p);
  }
  if (head == "custom") {
    if (args.empty()) throw ParameterError("custom needs a file path: custom:<file>");
    return load_custom_sequence(args);
  }
  throw ParameterError("unknown sequence preset '" + s + "'");
}

YoungSequence read_custom_sequence(std::istream& in) {
  std::vector<YoungFunction> prefix;
  CustomTail tail = CustomTail::repeat;
  double ratio = 1.0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;

    auto expect_index = [&] {
      std::size_t n = 0;
      if (!(ls >> n)) throw ParseError("missing sequence index", lineno);
      if (n != prefix.size() + 1) {
        throw ParseError("expected index " + std::to_string(prefix.size() + 1) + ", got " + std::to_string(n), lineno);
      }
    };
    auto read_real = [&](const char* what) {
      std::string tok;
      if (!(ls >> tok)) throw ParseError(std::string("missing ") + what, lineno);
      try {
        return parse_real(tok, what);
      } catch (const ParameterError& e) {
        throw ParseError(e.what(), lineno);
      }
    };

    try {
      if (kind == "phi") {
        expect_index();
        std::string tok;
        if (!(ls >> tok) || tok != "breaks") throw ParseError("expected 'breaks'", lineno);
        std::vector<double> breaks, slopes;
        std::vector<double>* target = &breaks;
        while (ls >> tok) {
          if (tok == "slopes") {
            target = &slopes;
            continue;
          }
          target->push_back(parse_real(tok, "number"));
        }
        prefix.push_back(YoungFunction::piecewise(std::move(breaks), std::move(slopes)));
      } else if (kind == "linear") {
        expect_index();
        prefix.push_back(YoungFunction::linear(read_real("slope")));
      } else if (kind == "power") {
        expect_index();
        const double c = read_real("coefficient");
        prefix.push_back(YoungFunction::power(c, read_real("exponent")));
      } else if (kind == "tail") {
        std::string mode;
        ls >> mode;
        if (mode == "repeat") {
          tail = CustomTail::repeat;
        } else if (mode == "geometric") {
          tail = CustomTail::geometric;
          ratio = read_real("ratio");
        } else {
          throw ParseError("unknown tail rule '" + mode + "'", lineno);
        }
      } else {
        throw ParseError("unknown directive '" + kind + "'", lineno);
      }
    } catch (const ParameterError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (prefix.empty()) throw ParseError("custom sequence file defines no Young functions", 0);
  return YoungSequence::custom(std::move(prefix), tail, ratio);
}

YoungSequence load_custom_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open custom sequence file '" + path + "'", 0);
  return read_custom_sequence(in);
}

SequenceValidation validate_sequence(const YoungSequence& seq, std::size_t n_max, std::span<const double> t_samples,
                                     double growth_threshold) {
  if (n_max < 2) throw ParameterError("validate_sequence needs n_max >= 2");
  if (t_samples.empty()) throw ParameterError("validate_sequence needs at least one sample point");
  SequenceValidation report;
  for (double t : t_samples) {
    if (!(t > 0.0)) throw DomainError("sample points must be positive");
    for (std::size_t n = 1; n < n_max; ++n) {
      const double a = seq.eval(n, t);
      const double b = seq.eval(n + 1, t);
      // pow() may be off by an ulp between neighbouring indices
      if (b > a * (1.0 + 4 * std::numeric_limits<double>::epsilon())) report.violations.push_back({n, t, a, b});
    }
  }
  if (seq.has_dominance_certificate()) {
    // Presets are rejected at construction unless sum c_n diverges.
    report.divergence = DivergenceStatus::certified;
    return report;
  }
  bool growing = true;
  for (double t : t_samples) {
    double partial = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) partial += seq.eval(n, t);
    if (partial < growth_threshold * seq.eval(1, t)) growing = false;
  }
  report.divergence = growing ? DivergenceStatus::empirically_growing : DivergenceStatus::unverified;
  return report;
}

std::string to_string(DivergenceStatus s) {
  switch (s) {
    case DivergenceStatus::certified:
      return "certified";
    case DivergenceStatus::empirically_growing:
      return "empirically-growing";
    case DivergenceStatus::unverified:
      return "unverified";
  }
  return "unknown";
}

}  // namespace bvtk
