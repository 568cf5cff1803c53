#pragma once

#include <vector>

#include "egad/mesh.hpp"

namespace egad {

struct RayHit {
    double t = 0.0;
    int face = -1;
    Vec3 point = Vec3::Zero();
};

/// Bounding-volume hierarchy over a mesh's triangles. Holds a reference to
/// the mesh, which must outlive it.
class MeshBvh {
public:
    explicit MeshBvh(const TriMesh& mesh);

    /// Every intersection of the ray origin + t*dir (t >= 0), sorted by t.
    std::vector<RayHit> intersect_all(const Vec3& origin, const Vec3& dir) const;

    const TriMesh& mesh() const { return *mesh_; }

private:
    struct Node {
        Eigen::AlignedBox3d box;
        int left = -1, right = -1; // children, or -1 for a leaf
        int first = 0, count = 0;  // range in order_ for leaves
    };
    int build(int first, int count, int depth);

    const TriMesh* mesh_;
    std::vector<int> order_;
    std::vector<Eigen::AlignedBox3d> face_box_;
    std::vector<Vec3> face_center_;
    std::vector<Node> nodes_;
};

} // namespace egad
