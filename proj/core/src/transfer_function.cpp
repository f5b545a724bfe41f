#include "netident/transfer_function.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

namespace netident {

namespace {

// Evaluates sum_k c[k] * x^k by Horner's rule with x = z^-1.
Complex poly_in_inverse(const std::vector<double>& c, Complex x) {
  Complex acc{0.0, 0.0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

RationalTF::RationalTF(std::vector<double> num, std::vector<double> den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.empty()) throw std::invalid_argument("transfer function has an empty denominator");
  if (den_.front() == 0.0)
    throw std::invalid_argument("transfer function is improper: leading denominator coefficient is 0");
  if (num_.empty()) num_.push_back(0.0);
  const double lead = den_.front();
  if (lead != 1.0) {
    for (double& c : num_) c /= lead;
    for (double& c : den_) c /= lead;
  }
}

Complex RationalTF::operator()(Complex z) const {
  const Complex x = 1.0 / z;
  return poly_in_inverse(num_, x) / poly_in_inverse(den_, x);
}

bool RationalTF::is_zero() const noexcept {
  return std::all_of(num_.begin(), num_.end(), [](double c) { return c == 0.0; });
}

bool RationalTF::is_stable() const {
  // Poles are the roots of z^n + a1 z^(n-1) + ... + an.
  std::size_t n = den_.size() - 1;
  while (n > 0 && den_[n] == 0.0) --n;
  if (n == 0) return true;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                    static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) companion(0, static_cast<Eigen::Index>(k)) = -den_[k + 1];
  for (std::size_t k = 1; k < n; ++k)
    companion(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = 1.0;
  const Eigen::VectorXcd poles = companion.eigenvalues();
  return (poles.array().abs() < 1.0).all();
}

}  // namespace netident
