#include "apfecbs/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace apfecbs {

Transform make_transform(const Vec3& xyz, const Vec3& rpy) {
  Transform t = Transform::Identity();
  t.translation() = xyz;
  t.linear() = (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
                Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
                   .toRotationMatrix();
  return t;
}

SerialChain::SerialChain(Transform base, std::vector<RevoluteJoint> joints, Transform tool,
                         std::vector<std::vector<LinkSphere>> sphere_layout)
    : base_(std::move(base)), joints_(std::move(joints)), tool_(std::move(tool)), layout_(std::move(sphere_layout)) {
  if (joints_.empty()) {
    throw std::invalid_argument("SerialChain: at least one joint is required");
  }
  for (std::size_t k = 0; k < joints_.size(); ++k) {
    if (std::abs(joints_[k].axis.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("SerialChain: joint " + std::to_string(k) + " axis is not unit length");
    }
    if (!(joints_[k].lower < joints_[k].upper)) {
      throw std::invalid_argument("SerialChain: joint " + std::to_string(k) + " has min >= max");
    }
  }
  if (layout_.size() != joints_.size()) {
    throw std::invalid_argument("SerialChain: sphere layout needs one entry per link");
  }
  for (const auto& link : layout_) {
    for (const auto& s : link) {
      if (!(s.radius > 0.0)) {
        throw std::invalid_argument("SerialChain: sphere radius must be positive");
      }
    }
    sphere_count_ += link.size();
  }
}

SerialChain SerialChain::planar(const Transform& base, const std::vector<double>& link_lengths,
                                std::size_t spheres_per_link, double radius, double joint_limit) {
  std::vector<RevoluteJoint> joints;
  double previous = 0.0;
  for (double length : link_lengths) {
    RevoluteJoint j;
    j.offset = make_transform(Vec3(previous, 0.0, 0.0));
    j.lower = -joint_limit;
    j.upper = joint_limit;
    joints.push_back(j);
    previous = length;
  }
  Transform tool = make_transform(Vec3(link_lengths.empty() ? 0.0 : link_lengths.back(), 0.0, 0.0));
  return SerialChain(base, std::move(joints), tool, uniform_layout(link_lengths.size(), spheres_per_link, radius));
}

std::vector<std::vector<LinkSphere>> SerialChain::uniform_layout(std::size_t links, std::size_t per_link,
                                                                 double radius) {
  std::vector<std::vector<LinkSphere>> layout(links);
  for (auto& link : layout) {
    for (std::size_t j = 0; j < per_link; ++j) {
      link.push_back({static_cast<double>(j + 1) / static_cast<double>(per_link), radius});
    }
  }
  return layout;
}

Vec3 SerialChain::link_end(std::size_t k) const {
  return k + 1 < joints_.size() ? Vec3(joints_[k + 1].offset.translation()) : Vec3(tool_.translation());
}

bool SerialChain::within_limits(const Configuration& q) const {
  if (static_cast<std::size_t>(q.size()) != dof()) return false;
  for (std::size_t k = 0; k < dof(); ++k) {
    if (!(q[k] >= joints_[k].lower && q[k] <= joints_[k].upper)) return false;
  }
  return true;
}

Configuration SerialChain::lower_limits() const {
  Configuration q(dof());
  for (std::size_t k = 0; k < dof(); ++k) q[k] = joints_[k].lower;
  return q;
}

Configuration SerialChain::upper_limits() const {
  Configuration q(dof());
  for (std::size_t k = 0; k < dof(); ++k) q[k] = joints_[k].upper;
  return q;
}

SerialChain SerialChain::with_base(const Transform& base) const {
  return SerialChain(base, joints_, tool_, layout_);
}

ChainPose compute_pose(const SerialChain& chain, const Configuration& q) {
  if (static_cast<std::size_t>(q.size()) != chain.dof()) {
    throw std::invalid_argument("forward kinematics: configuration has " + std::to_string(q.size()) +
                                " entries, chain has " + std::to_string(chain.dof()) + " joints");
  }
  ChainPose pose;
  const std::size_t n = chain.dof();
  pose.frames.reserve(n);
  pose.axes.reserve(n);
  pose.origins.reserve(n);
  Transform current = chain.base();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& joint = chain.joints()[k];
    current = current * joint.offset;
    pose.axes.push_back(current.linear() * joint.axis);
    pose.origins.push_back(current.translation());
    current = current * Eigen::AngleAxisd(q[k], joint.axis);
    pose.frames.push_back(current);
  }
  pose.tip = current * chain.tool().translation();
  return pose;
}

std::vector<WorldSphere> sphere_centers(const SerialChain& chain, const ChainPose& pose) {
  std::vector<WorldSphere> out;
  out.reserve(chain.sphere_count());
  for (std::size_t k = 0; k < chain.dof(); ++k) {
    const Vec3 end = chain.link_end(k);
    for (const auto& s : chain.sphere_layout()[k]) {
      out.push_back({pose.frames[k] * (s.position * end), s.radius, k});
    }
  }
  return out;
}

std::vector<WorldSphere> forward_kinematics(const SerialChain& chain, const Configuration& q) {
  return sphere_centers(chain, compute_pose(chain, q));
}

Eigen::Matrix3Xd point_jacobian(const ChainPose& pose, std::size_t link, const Vec3& point) {
  const std::size_t n = pose.axes.size();
  if (link >= n) {
    throw std::out_of_range("point_jacobian: link index " + std::to_string(link) + " out of range");
  }
  Eigen::Matrix3Xd jac = Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j <= link; ++j) {
    jac.col(static_cast<Eigen::Index>(j)) = pose.axes[j].cross(point - pose.origins[j]);
  }
  return jac;
}

Eigen::Matrix3Xd point_jacobian(const SerialChain& chain, const Configuration& q, std::size_t link,
                                const Vec3& point) {
  if (link >= chain.dof()) {
    throw std::out_of_range("point_jacobian: link index " + std::to_string(link) + " out of range");
  }
  return point_jacobian(compute_pose(chain, q), link, point);
}

}  // namespace apfecbs
