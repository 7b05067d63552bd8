#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bvtk {

/// A convex Young function phi: [0, inf) -> [0, inf) with phi(0) = 0 and
/// phi(t) > 0 for t > 0. Only three closed forms are representable so that
/// convexity is checked at construction rather than assumed.
class YoungFunction {
 public:
  struct Linear {
    double slope;
  };
  struct Power {
    double coeff;
    double exponent;
  };
  /// Breakpoints 0 = b_0 < b_1 < ... with slope s_i on [b_{i-1}, b_i); the last
  /// slope continues past the last breakpoint.
  struct Piecewise {
    std::vector<double> breakpoints;
    std::vector<double> slopes;
    std::vector<double> values;  // phi(b_i), cached
  };

  static YoungFunction linear(double slope);
  static YoungFunction power(double coeff, double exponent);
  static YoungFunction piecewise(std::vector<double> breakpoints, std::vector<double> slopes);

  /// phi(t); throws DomainError for t < 0.
  double operator()(double t) const;

  /// Returns t with |phi(t) - y| <= tol * max(1, y). Closed form for the linear
  /// and power forms, bracketing plus bisection for the piecewise form.
  double inverse(double y, double tol = 1e-14) const;

  YoungFunction scaled(double factor) const;

  const auto& form() const noexcept { return form_; }
  std::string describe() const;

 private:
  using Form = std::variant<Linear, Power, Piecewise>;
  explicit YoungFunction(Form f) : form_(std::move(f)) {}

  Form form_;
};

/// a * n^q, evaluated at n >= 1.
struct CoefficientRule {
  double scale = 1.0;
  double exponent = 0.0;

  double operator()(std::size_t n) const;
  std::string describe() const;
};

/// Parses "n", "1/n", "n^0.5", "2*n^0.5", "3", "2/n^0.5".
CoefficientRule parse_coefficient_rule(std::string_view text);

enum class SequencePreset { jordan, wiener, waterman, schramm, custom };

enum class CustomTail {
  repeat,     ///< phi_{r+j} = phi_r
  geometric,  ///< phi_{r+j} = ratio^j * phi_r
};

/// An admissible sequence (phi_n), pointwise non-increasing in n with
/// divergent sums. Presets are of the form phi_n = c_n * psi with c_n
/// non-increasing, which is what makes sorting an exact assignment rule.
class YoungSequence {
 public:
  static YoungSequence jordan();
  static YoungSequence wiener(double p);
  /// phi_n(t) = t / lambda_n; lambda must be non-decreasing with sum 1/lambda_n = inf.
  static YoungSequence waterman(CoefficientRule lambda);
  /// phi_n(t) = c_n t^p; c must be non-increasing with sum c_n = inf.
  static YoungSequence schramm(CoefficientRule c, double p);
  static YoungSequence custom(std::vector<YoungFunction> prefix, CustomTail tail = CustomTail::repeat,
                              double ratio = 1.0);

  /// phi_n for n >= 1, materialized on demand.
  YoungFunction at(std::size_t n) const;
  double eval(std::size_t n, double t) const;

  /// True when phi_n = c_n * psi with c_n non-increasing (all presets but `custom`).
  bool has_dominance_certificate() const noexcept { return preset_ != SequencePreset::custom; }
  /// c_n for dominance sequences.
  double coefficient(std::size_t n) const;
  /// psi for dominance sequences.
  const YoungFunction& base() const;

  SequencePreset preset() const noexcept { return preset_; }
  std::string name() const;

 private:
  YoungSequence() = default;

  SequencePreset preset_ = SequencePreset::jordan;
  YoungFunction base_ = YoungFunction::linear(1.0);
  CoefficientRule rule_{};
  bool rule_is_reciprocal_ = false;  // waterman stores lambda_n, coefficient is 1/lambda_n
  std::vector<YoungFunction> prefix_;
  CustomTail tail_ = CustomTail::repeat;
  double ratio_ = 1.0;
  std::string label_;
};

/// Parses `jordan`, `wiener:p=<real>`, `waterman:lambda=<rule>`,
/// `schramm:c=<rule>,p=<real>` or `custom:<file>`.
YoungSequence parse_sequence(std::string_view spec);

/// Custom sequence text format. Blank lines and '#' comments are ignored;
/// every other line is one of
///   phi <n> breaks <b_0> <b_1> ... slopes <s_1> <s_2> ...
///   linear <n> <slope>
///   power <n> <coeff> <exponent>
///   tail repeat | tail geometric <ratio>
/// Indices must be 1, 2, ... in order.
YoungSequence read_custom_sequence(std::istream& in);
YoungSequence load_custom_sequence(const std::string& path);

enum class DivergenceStatus { certified, empirically_growing, unverified };

struct OrderingViolation {
  std::size_t n;  ///< phi_{n+1}(t) > phi_n(t)
  double t;
  double phi_n;
  double phi_next;
};

struct SequenceValidation {
  std::vector<OrderingViolation> violations;
  DivergenceStatus divergence = DivergenceStatus::unverified;

  bool ordered() const noexcept { return violations.empty(); }
};

/// Checks phi_{n+1}(t) <= phi_n(t) for n < n_max at every sample and reports the
/// divergence status. Presets are certified analytically; custom sequences
/// count as empirically growing when sum_{n<=n_max} phi_n(t) >= growth_threshold * phi_1(t)
/// at every sample, unverified otherwise.
SequenceValidation validate_sequence(const YoungSequence& seq, std::size_t n_max,
                                     std::span<const double> t_samples,
                                     double growth_threshold = 4.0);

std::string to_string(DivergenceStatus s);

}  // namespace bvtk
