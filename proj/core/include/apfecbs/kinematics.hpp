#pragma once

#include <Eigen/Geometry>

#include <cstddef>
#include <vector>

namespace apfecbs {

using Vec3 = Eigen::Vector3d;
using Configuration = Eigen::VectorXd;
using Transform = Eigen::Isometry3d;

/// Builds a rigid transform from a translation and roll/pitch/yaw (fixed-axis XYZ).
Transform make_transform(const Vec3& xyz, const Vec3& rpy = Vec3::Zero());

struct RevoluteJoint {
  Vec3 axis = Vec3::UnitZ();               // unit axis in the joint frame
  Transform offset = Transform::Identity();  // parent link frame -> joint frame
  double lower = -EIGEN_PI;
  double upper = EIGEN_PI;
};

/// A collision sphere rigidly attached to a link. `position` is the
/// parametric location along the link segment (0 = joint origin, 1 = next
/// joint origin or tool point).
struct LinkSphere {
  double position = 1.0;
  double radius = 0.05;
};

struct WorldSphere {
  Vec3 center;
  double radius = 0.0;
  std::size_t link = 0;
};

/// Serial chain of revolute joints with a sphere-approximated body.
///
/// Frame convention: F_k = F_{k-1} * joints[k].offset * Rot(axis_k, q_k), with
/// F_{-1} = base. Link k spans from the origin of F_k to the origin of the next
/// joint (joints[k+1].offset translation) or, for the last link, to `tool`.
/// Immutable after construction.
class SerialChain {
 public:
  SerialChain(Transform base, std::vector<RevoluteJoint> joints, Transform tool,
              std::vector<std::vector<LinkSphere>> sphere_layout);

  /// Planar chain in the XY plane: all axes +z, links along local +x.
  static SerialChain planar(const Transform& base, const std::vector<double>& link_lengths,
                            std::size_t spheres_per_link, double radius,
                            double joint_limit = EIGEN_PI);

  /// Evenly spaced layout: positions (j+1)/n for j = 0..n-1 on every link.
  static std::vector<std::vector<LinkSphere>> uniform_layout(std::size_t links, std::size_t per_link,
                                                             double radius);

  std::size_t dof() const { return joints_.size(); }
  std::size_t sphere_count() const { return sphere_count_; }
  const Transform& base() const { return base_; }
  const Transform& tool() const { return tool_; }
  const std::vector<RevoluteJoint>& joints() const { return joints_; }
  const std::vector<std::vector<LinkSphere>>& sphere_layout() const { return layout_; }

  /// Link-local end point of link k (where the next joint or the tool sits).
  Vec3 link_end(std::size_t k) const;

  bool within_limits(const Configuration& q) const;
  Configuration lower_limits() const;
  Configuration upper_limits() const;

  /// Same chain with a different base pose.
  SerialChain with_base(const Transform& base) const;

 private:
  Transform base_;
  std::vector<RevoluteJoint> joints_;
  Transform tool_;
  std::vector<std::vector<LinkSphere>> layout_;
  std::size_t sphere_count_ = 0;
};

/// World-frame joint frames for one configuration. Cached so that sphere
/// centres and Jacobian columns can share a single forward pass.
struct ChainPose {
  std::vector<Transform> frames;  // F_k, k = 0..dof-1
  std::vector<Vec3> axes;         // world-frame joint axes
  std::vector<Vec3> origins;      // world-frame joint origins
  Vec3 tip;
};

ChainPose compute_pose(const SerialChain& chain, const Configuration& q);

/// Sphere centres in world frame, in layout order (link-major).
std::vector<WorldSphere> forward_kinematics(const SerialChain& chain, const Configuration& q);
std::vector<WorldSphere> sphere_centers(const SerialChain& chain, const ChainPose& pose);

/// 3 x dof linear-velocity Jacobian of a world point rigidly attached to `link`.
Eigen::Matrix3Xd point_jacobian(const SerialChain& chain, const Configuration& q, std::size_t link,
                                const Vec3& point);
Eigen::Matrix3Xd point_jacobian(const ChainPose& pose, std::size_t link, const Vec3& point);

}  // namespace apfecbs
