#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace nehari_lab {

/// Exact rational number with normalized sign and reduced terms.
class Rational {
 public:
  constexpr Rational(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ == 0) throw std::domain_error("Rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }
  constexpr double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend constexpr Rational operator+(Rational x, Rational y) {
    return {x.num_ * y.den_ + y.num_ * x.den_, x.den_ * y.den_};
  }
  friend constexpr Rational operator-(Rational x, Rational y) {
    return {x.num_ * y.den_ - y.num_ * x.den_, x.den_ * y.den_};
  }
  friend constexpr Rational operator*(Rational x, Rational y) {
    return {x.num_ * y.num_, x.den_ * y.den_};
  }
  friend constexpr Rational operator/(Rational x, Rational y) {
    return {x.num_ * y.den_, x.den_ * y.num_};
  }
  friend constexpr bool operator==(Rational x, Rational y) {
    return x.num_ == y.num_ && x.den_ == y.den_;
  }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace nehari_lab
