#include "cfdyn/gauss_measure.hpp"

namespace cfdyn {

double gauss_density(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("gauss_density: s must lie in [0, 1]");
  return 1.0 / ((1.0 + s) * std::numbers::ln2);
}

double measure_interval(const Interval& i) {
  if (!(0.0 <= i.a && i.a <= i.b && i.b <= 1.0)) throw std::domain_error("measure_interval: need 0 <= a <= b <= 1");
  return std::log1p((i.b - i.a) / (1.0 + i.a)) / std::numbers::ln2;
}

double digit_probability(std::int64_t k) {
  if (k < 1) throw std::domain_error("digit_probability: k must be >= 1");
  const long double kk = static_cast<long double>(k);
  return static_cast<double>(std::log1p(1.0L / (kk * (kk + 2.0L))) / std::numbers::ln2_v<long double>);
}

}  // namespace cfdyn
