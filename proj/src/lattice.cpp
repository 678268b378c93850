#include "cfdyn/lattice.hpp"

#include <numbers>

namespace cfdyn {

LatticeBasis<double> basis_from_point(double x, double y, double theta) {
  if (!(y > 0.0)) throw std::domain_error("basis_from_point: y must be positive");
  const double sy = std::sqrt(y);
  Matrix2<double> g;
  g << sy, x / sy, 0.0, 1.0 / sy;
  Matrix2<double> rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return LatticeBasis<double>(Matrix2<double>(g * rot));
}

HaarDraw haar_draw(std::mt19937_64& rng) {
  const double y0 = std::numbers::sqrt3 / 2.0;
  std::uint64_t proposals = 0;
  double x = 0.0, y = 0.0;
  for (;;) {
    ++proposals;
    x = uniform01(rng) - 0.5;
    y = y0 / (1.0 - uniform01(rng));
    if (x * x + y * y >= 1.0) break;
  }
  const double theta = 2.0 * std::numbers::pi * uniform01(rng);
  return {basis_from_point(x, y, theta), x, y, theta, proposals};
}

OrbitTrack::OrbitTrack(std::int64_t p, std::int64_t q) : q_(q) {
  if (!(p > 0 && p < q) || std::gcd(p, q) != 1) throw std::domain_error("OrbitTrack: need reduced 0 < p/q < 1");
  rows_ << 1, p, 0, q;
  set_time(0.0);
}

void OrbitTrack::set_time(double t) {
  t_ = t;
  s1_ = std::exp(-t / 2);
  s2_ = std::exp(t / 2) / static_cast<double>(q_);
  detail::lagrange_reduce(rows_, s1_, s2_);
}

double OrbitTrack::height() const {
  const double n = detail::shadow_dot(rows_, 0, 0, s1_ * s1_, s2_ * s2_);
  return 1.0 / std::sqrt(n);
}

void OrbitTrack::fd_point(double& x, double& y) const {
  const double a = s1_ * s1_, b = s2_ * s2_;
  const double n1 = detail::shadow_dot(rows_, 0, 0, a, b);
  const double n2 = detail::shadow_dot(rows_, 1, 1, a, b);
  double dot = detail::shadow_dot(rows_, 0, 1, a, b);
  // g = [v2; v1] with det +1
  const std::int64_t d = rows_(1, 0) * rows_(0, 1) - rows_(1, 1) * rows_(0, 0);
  if (d < 0) dot = -dot;
  x = dot / n1;
  y = 1.0 / n1;
  if (x >= 0.5) x -= 1.0;
  if (n1 == n2 && x > 0.0) x = -x;
}

}  // namespace cfdyn
