#include "egad/raycast.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace egad {
namespace {

constexpr int kLeafSize = 4;

bool ray_box(const Eigen::AlignedBox3d& box, const Vec3& origin, const Vec3& inv_dir)
{
    double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        double lo = (box.min()[a] - origin[a]) * inv_dir[a];
        double hi = (box.max()[a] - origin[a]) * inv_dir[a];
        if (lo > hi)
            std::swap(lo, hi);
        // NaN from 0 * inf means the ray lies in the slab plane; keep it.
        if (lo == lo)
            t0 = std::max(t0, lo);
        if (hi == hi)
            t1 = std::min(t1, hi);
        if (t0 > t1 * (1.0 + 1e-12) + 1e-12)
            return false;
    }
    return true;
}

} // namespace

MeshBvh::MeshBvh(const TriMesh& mesh) : mesh_(&mesh)
{
    const std::size_t nf = mesh.faces.size();
    order_.resize(nf);
    std::iota(order_.begin(), order_.end(), 0);
    face_box_.resize(nf);
    face_center_.resize(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        Eigen::AlignedBox3d box;
        Vec3 c = Vec3::Zero();
        for (int v : mesh.faces[i]) {
            box.extend(mesh.vertices[static_cast<std::size_t>(v)]);
            c += mesh.vertices[static_cast<std::size_t>(v)];
        }
        face_box_[i] = box;
        face_center_[i] = c / 3.0;
    }
    nodes_.reserve(2 * nf / kLeafSize + 2);
    if (nf > 0)
        build(0, static_cast<int>(nf), 0);
}

int MeshBvh::build(int first, int count, int depth)
{
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    Eigen::AlignedBox3d box;
    Eigen::AlignedBox3d centers;
    for (int i = first; i < first + count; ++i) {
        box.extend(face_box_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])]);
        centers.extend(face_center_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])]);
    }
    nodes_[static_cast<std::size_t>(id)].box = box;
    if (count <= kLeafSize || depth > 48) {
        nodes_[static_cast<std::size_t>(id)].first = first;
        nodes_[static_cast<std::size_t>(id)].count = count;
        return id;
    }
    int axis = 0;
    centers.sizes().maxCoeff(&axis);
    const int mid = first + count / 2;
    std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count, [&](int a, int b) {
        return face_center_[static_cast<std::size_t>(a)][axis] < face_center_[static_cast<std::size_t>(b)][axis];
    });
    const int left = build(first, mid - first, depth + 1);
    const int right = build(mid, first + count - mid, depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
}

std::vector<RayHit> MeshBvh::intersect_all(const Vec3& origin, const Vec3& dir) const
{
    std::vector<RayHit> hits;
    if (nodes_.empty())
        return hits;
    const Vec3 inv_dir = dir.cwiseInverse();
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
        stack.pop_back();
        if (!ray_box(node.box, origin, inv_dir))
            continue;
        if (node.left >= 0) {
            stack.push_back(node.left);
            stack.push_back(node.right);
            continue;
        }
        for (int i = node.first; i < node.first + node.count; ++i) {
            const int fi = order_[static_cast<std::size_t>(i)];
            const auto& f = mesh_->faces[static_cast<std::size_t>(fi)];
            const Vec3& a = mesh_->vertices[static_cast<std::size_t>(f[0])];
            const Vec3 e1 = mesh_->vertices[static_cast<std::size_t>(f[1])] - a;
            const Vec3 e2 = mesh_->vertices[static_cast<std::size_t>(f[2])] - a;
            // Moller-Trumbore, both facings.
            const Vec3 p = dir.cross(e2);
            const double det = e1.dot(p);
            if (std::abs(det) < 1e-300)
                continue;
            const double inv = 1.0 / det;
            const Vec3 s = origin - a;
            const double u = s.dot(p) * inv;
            if (u < 0.0 || u > 1.0)
                continue;
            const Vec3 q = s.cross(e1);
            const double v = dir.dot(q) * inv;
            if (v < 0.0 || u + v > 1.0)
                continue;
            const double t = e2.dot(q) * inv;
            if (t < 0.0)
                continue;
            hits.push_back({t, fi, origin + t * dir});
        }
    }
    std::sort(hits.begin(), hits.end(), [](const RayHit& x, const RayHit& y) { return x.t != y.t ? x.t < y.t : x.face < y.face; });
    return hits;
}

} // namespace egad
