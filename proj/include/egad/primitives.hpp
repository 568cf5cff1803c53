#pragma once

#include "egad/mesh.hpp"

namespace egad {

/// Closed, outward-oriented reference shapes.
TriMesh make_box(const Vec3& size, int subdivisions = 1);
TriMesh make_icosphere(double radius, int subdivisions);
TriMesh make_uv_sphere(double radius, int rings, int segments);
TriMesh make_ellipsoid(const Vec3& radii, int subdivisions);
TriMesh make_torus(double major_radius, double minor_radius, int major_segments, int minor_segments);
/// Capped cylinder along z, centred at the origin.
TriMesh make_cylinder(double radius, double height, int segments, int stacks = 1);
/// Open tube (no caps): a non-watertight fixture.
TriMesh make_open_cylinder(double radius, double height, int segments);
TriMesh make_tetrahedron(double edge);

} // namespace egad
