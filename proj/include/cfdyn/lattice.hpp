#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfdyn/arith.hpp"
#include "cfdyn/cfe.hpp"
#include "cfdyn/types.hpp"

namespace cfdyn {

/// Rows of an integer matrix times diag(s1, s2): basis = rows * diag(scales).
/// Orbit points of rationals keep this form under flow, reduction and duality,
/// so lengths are computed from exact integer coordinates.
template <class Scalar>
struct IntegerShadow {
  Matrix2i rows;
  Scalar s1;
  Scalar s2;
};

/// Basis of a unimodular lattice in R^2 (rows are the basis vectors).
/// Determinant -1 representatives are allowed; the lattice is what matters.
template <class Scalar = double>
class LatticeBasis {
 public:
  explicit LatticeBasis(const Matrix2<Scalar>& rows) : m_(rows) { check_det(); }

  LatticeBasis(const Matrix2i& rows, Scalar s1, Scalar s2) : shadow_(IntegerShadow<Scalar>{rows, s1, s2}) {
    materialize();
    check_det();
  }

  const Matrix2<Scalar>& matrix() const { return m_; }
  Vector2<Scalar> row(int i) const { return m_.row(i); }
  const std::optional<IntegerShadow<Scalar>>& shadow() const { return shadow_; }

  Scalar det() const {
    if (shadow_) {
      const auto& r = shadow_->rows;
      const std::int64_t d = r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0);
      return Scalar(d) * shadow_->s1 * shadow_->s2;
    }
    return m_.determinant();
  }

  /// Distance of |det| from 1.
  Scalar det_error() const {
    using std::abs;
    return abs(abs(det()) - Scalar(1));
  }

 private:
  void materialize() {
    const auto& r = shadow_->rows;
    m_ << Scalar(r(0, 0)) * shadow_->s1, Scalar(r(0, 1)) * shadow_->s2, Scalar(r(1, 0)) * shadow_->s1,
        Scalar(r(1, 1)) * shadow_->s2;
  }
  void check_det() const {
    if (!(det_error() <= Scalar(1e-6))) throw std::domain_error("LatticeBasis: |det| is not 1 (near-singular input)");
  }

  Matrix2<Scalar> m_;
  std::optional<IntegerShadow<Scalar>> shadow_;
};

/// Z^2 u_{p/q} a(t): rows (e^{-t/2}, (p/q) e^{t/2}) and (0, e^{t/2}).
template <class Scalar = double>
LatticeBasis<Scalar> orbit_point(const ReducedFraction<std::int64_t>& x, Scalar t) {
  using std::exp;
  Matrix2i rows;
  rows << 1, x.p(), 0, x.q();
  return LatticeBasis<Scalar>(rows, exp(-t / 2), exp(t / 2) / Scalar(x.q()));
}

/// Right multiplication by a(t) = diag(e^{-t/2}, e^{t/2}).
template <class Scalar>
LatticeBasis<Scalar> flow(const LatticeBasis<Scalar>& b, Scalar t) {
  using std::exp;
  const Scalar l = exp(-t / 2), r = exp(t / 2);
  if (b.shadow()) return LatticeBasis<Scalar>(b.shadow()->rows, b.shadow()->s1 * l, b.shadow()->s2 * r);
  Matrix2<Scalar> m = b.matrix();
  m.col(0) *= l;
  m.col(1) *= r;
  return LatticeBasis<Scalar>(m);
}

namespace detail {

inline constexpr int kReductionCap = 10000;
// |<v1, v2>| / |v1|^2 up to this is accepted as reduced; rounding near exact
// ties at 1/2 would otherwise flip v2 back and forth.
inline constexpr double kReducedRatio = 0.5 + 1e-9;

template <class Scalar>
Scalar shadow_dot(const Matrix2i& r, int i, int j, Scalar s1sq, Scalar s2sq) {
  return Scalar(r(i, 0)) * Scalar(r(j, 0)) * s1sq + Scalar(r(i, 1)) * Scalar(r(j, 1)) * s2sq;
}

/// Lagrange-Gauss reduction of integer rows under the diagonal quadratic form
/// diag(s1^2, s2^2). Afterwards row 0 is a shortest vector.
template <class Scalar>
void lagrange_reduce(Matrix2i& r, Scalar s1, Scalar s2) {
  using std::abs;
  using std::llround;
  const Scalar s1sq = s1 * s1, s2sq = s2 * s2;
  for (int it = 0; it < kReductionCap; ++it) {
    Scalar n0 = shadow_dot(r, 0, 0, s1sq, s2sq);
    Scalar n1 = shadow_dot(r, 1, 1, s1sq, s2sq);
    if (n1 < n0) {
      r.row(0).swap(r.row(1));
      std::swap(n0, n1);
    }
    const Scalar ratio = shadow_dot(r, 0, 1, s1sq, s2sq) / n0;
    if (!(abs(ratio) > Scalar(kReducedRatio))) return;
    const auto mu = static_cast<std::int64_t>(llround(static_cast<double>(ratio)));
    r.row(1) -= mu * r.row(0);
  }
  throw std::runtime_error("lagrange_reduce: iteration cap reached");
}

template <class Scalar>
void lagrange_reduce(Matrix2<Scalar>& m) {
  using std::abs;
  using std::round;
  for (int it = 0; it < kReductionCap; ++it) {
    Scalar n0 = m.row(0).squaredNorm();
    Scalar n1 = m.row(1).squaredNorm();
    if (n1 < n0) {
      m.row(0).swap(m.row(1));
      std::swap(n0, n1);
    }
    const Scalar ratio = Scalar(m.row(0).dot(m.row(1))) / n0;
    if (!(abs(ratio) > Scalar(kReducedRatio))) return;
    const Scalar mu = round(ratio);
    m.row(1) -= mu * m.row(0);
  }
  throw std::runtime_error("lagrange_reduce: iteration cap reached");
}

}  // namespace detail

/// Same lattice, basis (v1, v2) with |v1| = lambda_1, |v2| = lambda_2 and
/// |<v1, v2>| <= |v1|^2 / 2.
template <class Scalar>
LatticeBasis<Scalar> reduce_basis(const LatticeBasis<Scalar>& b) {
  if (b.det_error() > Scalar(1e-6)) throw std::domain_error("reduce_basis: near-singular input");
  if (b.shadow()) {
    Matrix2i r = b.shadow()->rows;
    detail::lagrange_reduce(r, b.shadow()->s1, b.shadow()->s2);
    return LatticeBasis<Scalar>(r, b.shadow()->s1, b.shadow()->s2);
  }
  Matrix2<Scalar> m = b.matrix();
  detail::lagrange_reduce(m);
  return LatticeBasis<Scalar>(m);
}

/// Length of a shortest nonzero vector.
template <class Scalar>
Scalar shortest_length(const LatticeBasis<Scalar>& b) {
  using std::sqrt;
  const auto r = reduce_basis(b);
  if (r.shadow()) {
    const auto& s = *r.shadow();
    return sqrt(detail::shadow_dot(s.rows, 0, 0, s.s1 * s.s1, s.s2 * s.s2));
  }
  return sqrt(Scalar(r.matrix().row(0).squaredNorm()));
}

/// ht(x) = 1 / lambda_1(x) with the Euclidean norm.
template <class Scalar>
Scalar height(const LatticeBasis<Scalar>& b) {
  return Scalar(1) / shortest_length(b);
}

/// tau(x): the dual lattice, basis (B^{-1})^T.
template <class Scalar>
LatticeBasis<Scalar> dual_point(const LatticeBasis<Scalar>& b) {
  if (b.shadow()) {
    const auto& s = *b.shadow();
    const auto& r = s.rows;
    const std::int64_t d = r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0);
    Matrix2i adj_t;
    adj_t << r(1, 1), -r(1, 0), -r(0, 1), r(0, 0);
    return LatticeBasis<Scalar>(adj_t, Scalar(1) / (Scalar(d) * s.s1), Scalar(1) / (Scalar(d) * s.s2));
  }
  return LatticeBasis<Scalar>(Matrix2<Scalar>(b.matrix().inverse().transpose()));
}

/// One generator step of the reducing word: z -> z + shift, or z -> -1/z.
struct FdMove {
  enum Kind { kTranslate, kInvert } kind;
  std::int64_t shift = 0;
  friend bool operator==(const FdMove&, const FdMove&) = default;
};

template <class Scalar>
struct FundamentalDomainPoint {
  Scalar x;
  Scalar y;
  std::vector<FdMove> word;
};

/// Maps the lattice to z = x + iy in {|x| <= 1/2, |z| >= 1} by alternating
/// translations and inversions. Boundary ties go to x = -1/2 and to the left
/// half of the unit arc. ht^2 = y on return.
template <class Scalar>
FundamentalDomainPoint<Scalar> to_fundamental_domain(const LatticeBasis<Scalar>& b) {
  using std::floor;
  FundamentalDomainPoint<Scalar> out{};
  const bool exact = b.shadow().has_value();
  Matrix2i r = Matrix2i::Zero();
  Matrix2<Scalar> m;
  Scalar s1sq{}, s2sq{};
  if (exact) {
    r = b.shadow()->rows;
    s1sq = b.shadow()->s1 * b.shadow()->s1;
    s2sq = b.shadow()->s2 * b.shadow()->s2;
    if (r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0) < 0) r.row(0) *= -1;
  } else {
    m = b.matrix();
    if (m.determinant() < Scalar(0)) m.row(0) *= Scalar(-1);
  }
  auto gram = [&](Scalar& n1, Scalar& n2, Scalar& dot) {
    if (exact) {
      n1 = detail::shadow_dot(r, 0, 0, s1sq, s2sq);
      n2 = detail::shadow_dot(r, 1, 1, s1sq, s2sq);
      dot = detail::shadow_dot(r, 0, 1, s1sq, s2sq);
    } else {
      n1 = m.row(0).squaredNorm();
      n2 = m.row(1).squaredNorm();
      dot = m.row(0).dot(m.row(1));
    }
  };
  auto translate = [&](std::int64_t n) {  // z -> z + n
    if (exact)
      r.row(0) += n * r.row(1);
    else
      m.row(0) += Scalar(n) * m.row(1);
    out.word.push_back({FdMove::kTranslate, n});
  };
  auto invert = [&]() {  // z -> -1/z
    if (exact) {
      const Eigen::Matrix<std::int64_t, 1, 2> r0 = r.row(0);
      r.row(0) = -r.row(1);
      r.row(1) = r0;
    } else {
      const Vector2<Scalar> m0 = m.row(0);
      m.row(0) = -m.row(1);
      m.row(1) = m0;
    }
    out.word.push_back({FdMove::kInvert, 0});
  };

  Scalar n1, n2, dot;
  // z = g.i for g = [r1; r2] with det +1
  auto set_point = [&]() {
    out.x = dot / n2;
    out.y = Scalar(1) / n2;
  };
  for (int it = 0;; ++it) {
    if (it >= detail::kReductionCap) throw std::runtime_error("to_fundamental_domain: iteration cap reached");
    gram(n1, n2, dot);
    const Scalar x = dot / n2;
    const auto shift = static_cast<std::int64_t>(floor(static_cast<double>(x) + 0.5));
    if (shift != 0) {
      translate(-shift);
      gram(n1, n2, dot);
    }
    // |z|^2 = n1 / n2
    if (n1 < n2) {
      invert();
      continue;
    }
    break;
  }
  set_point();
  if (out.x >= Scalar(0.5)) {
    translate(-1);
    gram(n1, n2, dot);
    set_point();
  }
  if (n1 == n2 && out.x > Scalar(0)) {
    invert();
    gram(n1, n2, dot);
    set_point();
  }
  return out;
}

/// Uniform double in [0, 1) from the top 53 bits of the generator.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct HaarDraw {
  LatticeBasis<double> basis;
  double x;
  double y;
  double theta;
  std::uint64_t proposals;
};

/// Haar-random unimodular lattice: z in the fundamental domain with density
/// (3/pi) dx dy / y^2 by rejection from the strip y >= sqrt(3)/2, frame
/// angle uniform.
HaarDraw haar_draw(std::mt19937_64& rng);

inline LatticeBasis<double> haar_sample(std::mt19937_64& rng) { return haar_draw(rng).basis; }

/// Lattice basis whose base point is z = x + iy, rotated by theta.
LatticeBasis<double> basis_from_point(double x, double y, double theta = 0.0);

/// Proof that x0 u_{p/q} a(2 ln q) = tau(x0 u_{p'/q}): gamma in SL2(Z) with
/// gamma [[1/q, p], [0, q]] = [[1, 0], [-p'/q, 1]].
template <class Int>
struct SymmetryWitness {
  Int p_dual;
  Int q_dual;
  Matrix2<Int> gamma;
};

template <class Int>
SymmetryWitness<Int> verify_symmetry(const Int& p, const Int& q) {
  using R = Rational<Int>;
  const auto m = factorize<Int>(q);
  const Int pd = dual_residue(p, m);
  // (-p) p' + q q' = 1
  const Int num = Int(1) + p * pd;
  if (num % q != 0) throw std::logic_error("verify_symmetry: p p' + 1 not divisible by q");
  const Int qd = num / q;

  Matrix2<Int> gamma;
  gamma << q, -p, -pd, qd;
  if (gamma(0, 0) * gamma(1, 1) - gamma(0, 1) * gamma(1, 0) != 1)
    throw std::logic_error("verify_symmetry: gamma is not in SL2(Z)");

  Matrix2<R> g, lhs_factor, rhs;
  g << R(gamma(0, 0)), R(gamma(0, 1)), R(gamma(1, 0)), R(gamma(1, 1));
  lhs_factor << R(Int(1), q), R(p), R(0), R(q);
  rhs << R(1), R(0), R(-pd, q), R(1);
  const Matrix2<R> lhs = g * lhs_factor;
  if (lhs != rhs) {
    std::ostringstream os;
    os << "verify_symmetry failed for p=" << p << " q=" << q << ": residual";
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) os << ' ' << (lhs(i, j) - rhs(i, j));
    throw std::logic_error(os.str());
  }
  return {pd, qd, gamma};
}

/// Incremental walk along t -> Z^2 u_{p/q} a(t). The reduced integer basis
/// from the previous time seeds the next reduction, so each step costs O(1)
/// row operations on a near-reduced basis.
class OrbitTrack {
 public:
  OrbitTrack(std::int64_t p, std::int64_t q);

  void set_time(double t);
  double time() const { return t_; }

  /// 1 / lambda_1 at the current time.
  double height() const;
  /// Point of the standard fundamental domain (same conventions as to_fundamental_domain).
  void fd_point(double& x, double& y) const;

  const Matrix2i& rows() const { return rows_; }

 private:
  std::int64_t q_;
  Matrix2i rows_;
  double t_ = 0.0;
  double s1_ = 1.0;
  double s2_ = 1.0;
};

}  // namespace cfdyn
