#pragma once

#include <complex>
#include <vector>

namespace netident {

using Complex = std::complex<double>;

/// Scalar rational transfer operator in the delay operator q^-1:
///
///   tf(q) = (b0 + b1 q^-1 + ... ) / (1 + a1 q^-1 + ... )
///
/// The denominator is normalized so that its leading coefficient is 1, which
/// makes every representable transfer proper. It is strictly proper when b0 == 0.
class RationalTF {
 public:
  RationalTF() : num_{0.0}, den_{1.0} {}

  /// Throws std::invalid_argument if den is empty or den[0] == 0 (improper).
  RationalTF(std::vector<double> num, std::vector<double> den);

  static RationalTF constant(double gain) { return RationalTF({gain}, {1.0}); }
  static RationalTF fir(std::vector<double> taps) { return RationalTF(std::move(taps), {1.0}); }

  const std::vector<double>& numerator() const noexcept { return num_; }
  const std::vector<double>& denominator() const noexcept { return den_; }

  /// Value at a point z of the complex plane (q -> z).
  Complex operator()(Complex z) const;

  /// lim_{z -> inf} tf(z).
  double feedthrough() const noexcept { return num_.empty() ? 0.0 : num_.front(); }
  bool is_strictly_proper() const noexcept { return feedthrough() == 0.0; }
  bool is_zero() const noexcept;
  /// All poles strictly inside the unit circle.
  bool is_stable() const;

  friend bool operator==(const RationalTF&, const RationalTF&) = default;

 private:
  std::vector<double> num_;
  std::vector<double> den_;
};

}  // namespace netident
