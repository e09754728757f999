#pragma once

#include <Eigen/Dense>
#include <array>

namespace qgeo {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec10 = Eigen::Matrix<double, 10, 1>;
using Mat10 = Eigen::Matrix<double, 10, 10>;

/// The ten second-order moments in the fixed order
/// (xx, xpx, pxpx, yy, ypy, pypy, xy, xpy, pxy, pxpy).
using MomentVector = std::array<double, 10>;

enum class MomentIndex : int {
  XX = 0, XPx = 1, PxPx = 2,
  YY = 3, YPy = 4, PyPy = 5,
  XY = 6, XPy = 7, PxY = 8, PxPy = 9,
};

/// Slots of the extended momentum covector
/// (p_t, p_x, p_y, p_z, p_sx, p_sy, p_alpha, p_beta, C1, C2).
enum ExtSlot : int {
  PT = 0, PX = 1, PY = 2, PZ = 3,
  PSX = 4, PSY = 5, PALPHA = 6, PBETA = 7, C1 = 8, C2 = 9,
};

/// Coordinate indices of the two quantized spatial directions.
inline constexpr int kQuantX = 1;
inline constexpr int kQuantY = 2;

}  // namespace qgeo
