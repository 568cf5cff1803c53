#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace egad {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

struct Provenance {
    long long object_id = -1;
    int row = -1;
    int col = -1;
};

/// Indexed triangle mesh. Unitless in [-1,1]^3 straight out of the
/// morphology pipeline, millimetres once rescaled to a gripper.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::optional<Provenance> provenance;
};

struct BoundingBox {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();
    Vec3 extent() const { return max - min; }
    double min_extent() const { return extent().minCoeff(); }
};

Vec3 face_normal(const TriMesh& mesh, std::size_t face); // unit; zero for degenerate faces
double face_area(const TriMesh& mesh, std::size_t face);
double surface_area(const TriMesh& mesh);
double signed_volume(const TriMesh& mesh);
Vec3 volume_centroid(const TriMesh& mesh);
BoundingBox bounding_box(const TriMesh& mesh);

/// One third of the incident face area per vertex.
std::vector<double> vertex_areas(const TriMesh& mesh);
std::vector<std::vector<int>> vertex_neighbors(const TriMesh& mesh);

/// Connected components over shared vertices; returns the component label
/// per vertex and the component count.
std::pair<std::vector<int>, int> vertex_components(const TriMesh& mesh);

int euler_characteristic(const TriMesh& mesh);

TriMesh transformed(const TriMesh& mesh, const Eigen::Affine3d& xf);
TriMesh scaled(const TriMesh& mesh, double factor);

/// Flips faces so that every edge is traversed in opposite directions by its
/// two faces and each closed component has positive volume. Requires a
/// manifold mesh.
void orient_consistently(TriMesh& mesh);

/// Removes vertices not referenced by any face and renumbers.
void compact(TriMesh& mesh);

struct ValidationReport {
    bool watertight = false;       // every edge has exactly two incident faces
    bool manifold = false;         // edges have <= 2 faces and vertex links are single fans
    bool consistently_oriented = false;
    int boundary_edges = 0;        // edges with one incident face
    int nonmanifold_edges = 0;     // edges with three or more incident faces
    int nonmanifold_vertices = 0;
    int components = 0;
    int degenerate_faces = 0;
    int isolated_vertices = 0;
    int euler_characteristic = 0;
    double volume = 0.0;
    double area = 0.0;
    BoundingBox bbox;

    bool ok() const
    {
        return watertight && manifold && consistently_oriented && components == 1 && degenerate_faces == 0 && isolated_vertices == 0;
    }
    std::string summary() const;
};

ValidationReport validate(const TriMesh& mesh);

} // namespace egad
