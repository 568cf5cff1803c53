#pragma once

#include <vector>

#include <Eigen/Core>

#include "egad/mesh.hpp"

namespace egad {

using Wrench = Eigen::Matrix<double, 6, 1>;

/// A point contact: location on the surface and outward unit normal.
struct Contact {
    Vec3 point = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
};

/// Contact wrenches: force in the first three components, torque (scaled by
/// torque_scale) in the last three.
struct WrenchSet {
    std::vector<Wrench> wrenches;
    double friction = 0.5;
    int cone_edges = 8;
    double torque_scale = 1.0;
};

/// Two unit vectors completing `n` to a right-handed orthonormal frame.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& n);

/// m force edges evenly spaced on each contact's friction cone boundary,
/// pushing into the surface; torque = torque_scale * (c - centroid) x f.
/// Produces contacts.size() * m wrenches.
WrenchSet contact_wrenches(const std::vector<Contact>& contacts, double friction, int cone_edges, double torque_scale, const Vec3& centroid);

/// Soft-finger torsion: per contact a pair of pure torques +-torque_scale *
/// friction * finger_radius * n about the contact normal.
void add_torsional_wrenches(WrenchSet& set, const std::vector<Contact>& contacts, double finger_radius);

/// Epsilon quality: distance from the origin to the boundary of the convex
/// hull of the wrenches when the origin is strictly inside, else 0. Rank
/// deficient wrench sets score 0.
double ferrari_canny(const WrenchSet& set);
double ferrari_canny(const std::vector<Wrench>& wrenches);

} // namespace egad
