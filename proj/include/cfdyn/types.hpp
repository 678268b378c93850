#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace cfdyn {

using BigInt = boost::multiprecision::cpp_int;

// Software float with a 128-bit mantissa, used when double entries lose
// too much relative precision along long orbits.
using Extended = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<128, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

// 50 decimal digits; reference evaluations in tests and margin escalation.
using Float50 = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<50>, boost::multiprecision::et_off>;

template <class Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <class Scalar>
using Vector2 = Eigen::Matrix<Scalar, 1, 2>;

using Matrix2i = Eigen::Matrix<std::int64_t, 2, 2>;

}  // namespace cfdyn
