#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace emtopo {

using cd = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using IVec3 = std::array<int, 3>;
using Mat3cd = Eigen::Matrix<cd, 3, 3>;
using Mat6cd = Eigen::Matrix<cd, 6, 6>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline IVec3 negate(const IVec3& n) { return {-n[0], -n[1], -n[2]}; }
inline IVec3 operator-(const IVec3& a, const IVec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline IVec3 operator+(const IVec3& a, const IVec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

}  // namespace emtopo
