#include "govo/geometry.hpp"

namespace govo {

Eigen::Matrix3d Homography2DoF::matrix() const {
  Eigen::Matrix3d H;
  H << h1, h2, h3, h4, h5, h6, 0.0, 0.0, 1.0;
  return H;
}

std::pair<Eigen::Matrix3d, Eigen::Vector3d> pose_from_motion(const MotionParams& m) {
  const double c = std::cos(2.0 * m.phi);
  const double s = std::sin(2.0 * m.phi);
  Eigen::Matrix3d R;
  R << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  const Eigen::Vector3d t(m.rho * std::sin(m.phi), -m.rho * std::cos(m.phi), 0.0);
  return {R, t};
}

Homography2DoF homography_from_motion(const MotionParams& m, const CameraModel& cam) {
  Homography2DoF H;
  const double s = cam.scale();
  const double u0 = cam.principal_u;
  const double v0 = cam.principal_v;
  H.cos2phi = std::cos(2.0 * m.phi);
  H.sin2phi = std::sin(2.0 * m.phi);
  H.cosphi = std::cos(m.phi);
  H.sinphi = std::sin(m.phi);
  H.h1 = H.cos2phi;
  H.h2 = -H.sin2phi;
  H.h3 = u0 - u0 * H.cos2phi + v0 * H.sin2phi + s * (m.rho * H.sinphi);
  H.h4 = H.sin2phi;
  H.h5 = H.cos2phi;
  H.h6 = v0 - v0 * H.cos2phi - u0 * H.sin2phi - s * (m.rho * H.cosphi);
  return H;
}

}  // namespace govo
