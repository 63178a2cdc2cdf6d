#pragma once

#include <cmath>
#include <complex>

namespace csdyn {

using cplx = std::complex<double>;

// Kahan-compensated accumulator. Works for double and std::complex<double>.
template <typename T>
class KahanSum {
public:
  KahanSum() = default;
  explicit KahanSum(T init) : sum_(init) {}

  KahanSum& operator+=(T x) {
    const T y = x - comp_;
    const T t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
    return *this;
  }

  T value() const { return sum_; }

private:
  T sum_{};
  T comp_{};
};

inline constexpr double pi = 3.14159265358979323846;

} // namespace csdyn
