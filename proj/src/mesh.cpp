#include "egad/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace egad {
namespace {

std::uint64_t edge_key(int a, int b)
{
    if (a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x)
    {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

} // namespace

Vec3 face_normal(const TriMesh& mesh, std::size_t face)
{
    const auto& f = mesh.faces[face];
    const Vec3 n = (mesh.vertices[f[1]] - mesh.vertices[f[0]]).cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]);
    const double len = n.norm();
    return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double face_area(const TriMesh& mesh, std::size_t face)
{
    const auto& f = mesh.faces[face];
    return 0.5 * (mesh.vertices[f[1]] - mesh.vertices[f[0]]).cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]).norm();
}

double surface_area(const TriMesh& mesh)
{
    double a = 0.0;
    for (std::size_t i = 0; i < mesh.faces.size(); ++i)
        a += face_area(mesh, i);
    return a;
}

double signed_volume(const TriMesh& mesh)
{
    double v = 0.0;
    for (const auto& f : mesh.faces)
        v += mesh.vertices[f[0]].dot(mesh.vertices[f[1]].cross(mesh.vertices[f[2]]));
    return v / 6.0;
}

Vec3 volume_centroid(const TriMesh& mesh)
{
    // Signed tetrahedra against the origin.
    Vec3 c = Vec3::Zero();
    double vol = 0.0;
    for (const auto& f : mesh.faces) {
        const Vec3& a = mesh.vertices[f[0]];
        const Vec3& b = mesh.vertices[f[1]];
        const Vec3& d = mesh.vertices[f[2]];
        const double v = a.dot(b.cross(d)) / 6.0;
        vol += v;
        c += v * (a + b + d) / 4.0;
    }
    if (std::abs(vol) < 1e-300) {
        Vec3 mean = Vec3::Zero();
        for (const auto& p : mesh.vertices)
            mean += p;
        return mesh.vertices.empty() ? mean : Vec3(mean / static_cast<double>(mesh.vertices.size()));
    }
    return c / vol;
}

BoundingBox bounding_box(const TriMesh& mesh)
{
    BoundingBox box;
    if (mesh.vertices.empty())
        return box;
    box.min = box.max = mesh.vertices.front();
    for (const auto& p : mesh.vertices) {
        box.min = box.min.cwiseMin(p);
        box.max = box.max.cwiseMax(p);
    }
    return box;
}

std::vector<double> vertex_areas(const TriMesh& mesh)
{
    std::vector<double> areas(mesh.vertices.size(), 0.0);
    for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
        const double a = face_area(mesh, i) / 3.0;
        for (int v : mesh.faces[i])
            areas[static_cast<std::size_t>(v)] += a;
    }
    return areas;
}

std::vector<std::vector<int>> vertex_neighbors(const TriMesh& mesh)
{
    std::vector<std::vector<int>> nbrs(mesh.vertices.size());
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k) {
            nbrs[static_cast<std::size_t>(f[k])].push_back(f[(k + 1) % 3]);
            nbrs[static_cast<std::size_t>(f[k])].push_back(f[(k + 2) % 3]);
        }
    for (auto& n : nbrs) {
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
    }
    return nbrs;
}

std::pair<std::vector<int>, int> vertex_components(const TriMesh& mesh)
{
    DisjointSet ds(mesh.vertices.size());
    for (const auto& f : mesh.faces) {
        ds.unite(f[0], f[1]);
        ds.unite(f[0], f[2]);
    }
    std::vector<int> label(mesh.vertices.size(), -1);
    std::unordered_map<int, int> remap;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const int root = ds.find(static_cast<int>(v));
        auto [it, inserted] = remap.emplace(root, static_cast<int>(remap.size()));
        label[v] = it->second;
    }
    return {label, static_cast<int>(remap.size())};
}

int euler_characteristic(const TriMesh& mesh)
{
    std::unordered_map<std::uint64_t, int> edges;
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k)
            ++edges[edge_key(f[k], f[(k + 1) % 3])];
    return static_cast<int>(mesh.vertices.size()) - static_cast<int>(edges.size()) + static_cast<int>(mesh.faces.size());
}

TriMesh transformed(const TriMesh& mesh, const Eigen::Affine3d& xf)
{
    TriMesh out = mesh;
    for (auto& p : out.vertices)
        p = xf * p;
    if (xf.linear().determinant() < 0.0)
        for (auto& f : out.faces)
            std::swap(f[1], f[2]);
    return out;
}

TriMesh scaled(const TriMesh& mesh, double factor)
{
    TriMesh out = mesh;
    for (auto& p : out.vertices)
        p *= factor;
    return out;
}

void orient_consistently(TriMesh& mesh)
{
    const std::size_t nf = mesh.faces.size();
    std::unordered_map<std::uint64_t, std::vector<int>> edge_faces;
    for (std::size_t i = 0; i < nf; ++i)
        for (int k = 0; k < 3; ++k)
            edge_faces[edge_key(mesh.faces[i][k], mesh.faces[i][(k + 1) % 3])].push_back(static_cast<int>(i));

    auto has_directed = [&](const Face& f, int a, int b) {
        for (int k = 0; k < 3; ++k)
            if (f[k] == a && f[(k + 1) % 3] == b)
                return true;
        return false;
    };

    std::vector<int> component(nf, -1);
    int ncomp = 0;
    for (std::size_t seed = 0; seed < nf; ++seed) {
        if (component[seed] >= 0)
            continue;
        std::vector<int> stack{static_cast<int>(seed)};
        component[seed] = ncomp;
        while (!stack.empty()) {
            const int fi = stack.back();
            stack.pop_back();
            const Face f = mesh.faces[static_cast<std::size_t>(fi)];
            for (int k = 0; k < 3; ++k) {
                const int a = f[k], b = f[(k + 1) % 3];
                for (int g : edge_faces[edge_key(a, b)]) {
                    if (g == fi || component[static_cast<std::size_t>(g)] >= 0)
                        continue;
                    auto& gf = mesh.faces[static_cast<std::size_t>(g)];
                    // A consistent neighbour traverses the shared edge as b->a.
                    if (has_directed(gf, a, b))
                        std::swap(gf[1], gf[2]);
                    component[static_cast<std::size_t>(g)] = ncomp;
                    stack.push_back(g);
                }
            }
        }
        ++ncomp;
    }

    std::vector<double> volume(static_cast<std::size_t>(ncomp), 0.0);
    for (std::size_t i = 0; i < nf; ++i) {
        const auto& f = mesh.faces[i];
        volume[static_cast<std::size_t>(component[i])] += mesh.vertices[f[0]].dot(mesh.vertices[f[1]].cross(mesh.vertices[f[2]]));
    }
    for (std::size_t i = 0; i < nf; ++i)
        if (volume[static_cast<std::size_t>(component[i])] < 0.0)
            std::swap(mesh.faces[i][1], mesh.faces[i][2]);
}

void compact(TriMesh& mesh)
{
    std::vector<int> remap(mesh.vertices.size(), -1);
    std::vector<Vec3> kept;
    for (auto& f : mesh.faces)
        for (int& v : f) {
            auto& r = remap[static_cast<std::size_t>(v)];
            if (r < 0) {
                r = static_cast<int>(kept.size());
                kept.push_back(mesh.vertices[static_cast<std::size_t>(v)]);
            }
            v = r;
        }
    mesh.vertices = std::move(kept);
}

std::string ValidationReport::summary() const
{
    std::ostringstream os;
    os << "watertight=" << watertight << " manifold=" << manifold << " oriented=" << consistently_oriented << " components=" << components
       << " boundary_edges=" << boundary_edges << " nonmanifold_edges=" << nonmanifold_edges << " nonmanifold_vertices=" << nonmanifold_vertices
       << " degenerate_faces=" << degenerate_faces << " isolated_vertices=" << isolated_vertices << " euler=" << euler_characteristic
       << " volume=" << volume << " area=" << area;
    return os.str();
}

ValidationReport validate(const TriMesh& mesh)
{
    ValidationReport r;
    r.bbox = bounding_box(mesh);
    r.volume = signed_volume(mesh);
    r.area = surface_area(mesh);
    r.euler_characteristic = euler_characteristic(mesh);

    std::unordered_map<std::uint64_t, int> undirected;
    std::unordered_map<std::uint64_t, int> directed;
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k) {
            const int a = f[k], b = f[(k + 1) % 3];
            ++undirected[edge_key(a, b)];
            ++directed[(static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b)];
        }
    for (const auto& [key, count] : undirected) {
        if (count == 1)
            ++r.boundary_edges;
        else if (count > 2)
            ++r.nonmanifold_edges;
    }
    r.consistently_oriented = std::all_of(directed.begin(), directed.end(), [](const auto& kv) { return kv.second == 1; });
    r.watertight = !mesh.faces.empty() && r.boundary_edges == 0 && r.nonmanifold_edges == 0;

    // Vertex links: the opposite edges of the faces around a vertex must form
    // one connected chain.
    std::vector<std::vector<std::pair<int, int>>> link(mesh.vertices.size());
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k)
            link[static_cast<std::size_t>(f[k])].emplace_back(f[(k + 1) % 3], f[(k + 2) % 3]);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const auto& l = link[v];
        if (l.empty()) {
            ++r.isolated_vertices;
            continue;
        }
        std::map<int, int> id;
        for (const auto& [a, b] : l) {
            id.emplace(a, static_cast<int>(id.size()));
            id.emplace(b, static_cast<int>(id.size()));
        }
        DisjointSet ds(id.size());
        for (const auto& [a, b] : l)
            ds.unite(id[a], id[b]);
        int roots = 0;
        for (std::size_t i = 0; i < id.size(); ++i)
            roots += ds.find(static_cast<int>(i)) == static_cast<int>(i);
        if (roots != 1)
            ++r.nonmanifold_vertices;
    }
    r.manifold = r.nonmanifold_edges == 0 && r.nonmanifold_vertices == 0;

    const double diag = r.bbox.extent().norm();
    const double eps = 1e-12 * diag * diag;
    for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
        const auto& f = mesh.faces[i];
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2] || face_area(mesh, i) <= eps)
            ++r.degenerate_faces;
    }

    // Components counted over referenced vertices only.
    auto [labels, count] = vertex_components(mesh);
    std::vector<char> used(static_cast<std::size_t>(count), 0);
    for (const auto& f : mesh.faces)
        used[static_cast<std::size_t>(labels[static_cast<std::size_t>(f[0])])] = 1;
    r.components = static_cast<int>(std::count(used.begin(), used.end(), 1));
    return r;
}

} // namespace egad
