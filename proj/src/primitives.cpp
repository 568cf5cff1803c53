#include "egad/primitives.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace egad {
namespace {

constexpr double kPi = std::numbers::pi;

// Quad (a,b,c,d) counter-clockwise seen from outside.
void add_quad(TriMesh& m, int a, int b, int c, int d)
{
    m.faces.push_back({a, b, c});
    m.faces.push_back({a, c, d});
}

} // namespace

TriMesh make_box(const Vec3& size, int subdivisions)
{
    const int n = std::max(1, subdivisions);
    TriMesh m;
    std::map<std::array<int, 3>, int> index;
    auto vertex = [&](int i, int j, int k) {
        auto [it, inserted] = index.emplace(std::array<int, 3>{i, j, k}, static_cast<int>(m.vertices.size()));
        if (inserted)
            m.vertices.emplace_back(size.x() * (static_cast<double>(i) / n - 0.5), size.y() * (static_cast<double>(j) / n - 0.5),
                                    size.z() * (static_cast<double>(k) / n - 0.5));
        return it->second;
    };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            add_quad(m, vertex(a, b, 0), vertex(a, b + 1, 0), vertex(a + 1, b + 1, 0), vertex(a + 1, b, 0)); // z-
            add_quad(m, vertex(a, b, n), vertex(a + 1, b, n), vertex(a + 1, b + 1, n), vertex(a, b + 1, n)); // z+
            add_quad(m, vertex(a, 0, b), vertex(a + 1, 0, b), vertex(a + 1, 0, b + 1), vertex(a, 0, b + 1)); // y-
            add_quad(m, vertex(a, n, b), vertex(a, n, b + 1), vertex(a + 1, n, b + 1), vertex(a + 1, n, b)); // y+
            add_quad(m, vertex(0, a, b), vertex(0, a, b + 1), vertex(0, a + 1, b + 1), vertex(0, a + 1, b)); // x-
            add_quad(m, vertex(n, a, b), vertex(n, a + 1, b), vertex(n, a + 1, b + 1), vertex(n, a, b + 1)); // x+
        }
    return m;
}

TriMesh make_icosphere(double radius, int subdivisions)
{
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh m;
    m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    m.faces = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
               {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (auto& v : m.vertices)
        v.normalize();
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto [it, inserted] = mid.emplace(key, static_cast<int>(m.vertices.size()));
            if (inserted)
                m.vertices.push_back((m.vertices[static_cast<std::size_t>(a)] + m.vertices[static_cast<std::size_t>(b)]).normalized());
            return it->second;
        };
        std::vector<Face> faces;
        for (const auto& f : m.faces) {
            const int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
            faces.push_back({f[0], ab, ca});
            faces.push_back({f[1], bc, ab});
            faces.push_back({f[2], ca, bc});
            faces.push_back({ab, bc, ca});
        }
        m.faces = std::move(faces);
    }
    for (auto& v : m.vertices)
        v *= radius;
    return m;
}

TriMesh make_uv_sphere(double radius, int rings, int segments)
{
    TriMesh m;
    m.vertices.emplace_back(0, 0, radius);
    for (int r = 1; r < rings; ++r) {
        const double theta = kPi * r / rings;
        for (int s = 0; s < segments; ++s) {
            const double phi = 2.0 * kPi * s / segments;
            m.vertices.emplace_back(radius * std::sin(theta) * std::cos(phi), radius * std::sin(theta) * std::sin(phi), radius * std::cos(theta));
        }
    }
    m.vertices.emplace_back(0, 0, -radius);
    const int south = static_cast<int>(m.vertices.size()) - 1;
    auto ring = [&](int r, int s) { return 1 + (r - 1) * segments + ((s % segments) + segments) % segments; };
    for (int s = 0; s < segments; ++s)
        m.faces.push_back({0, ring(1, s), ring(1, s + 1)});
    for (int r = 1; r < rings - 1; ++r)
        for (int s = 0; s < segments; ++s)
            add_quad(m, ring(r, s), ring(r + 1, s), ring(r + 1, s + 1), ring(r, s + 1));
    for (int s = 0; s < segments; ++s)
        m.faces.push_back({south, ring(rings - 1, s + 1), ring(rings - 1, s)});
    return m;
}

TriMesh make_ellipsoid(const Vec3& radii, int subdivisions)
{
    TriMesh m = make_icosphere(1.0, subdivisions);
    for (auto& v : m.vertices)
        v = v.cwiseProduct(radii);
    return m;
}

TriMesh make_torus(double major_radius, double minor_radius, int major_segments, int minor_segments)
{
    TriMesh m;
    for (int i = 0; i < major_segments; ++i) {
        const double u = 2.0 * kPi * i / major_segments;
        for (int j = 0; j < minor_segments; ++j) {
            const double v = 2.0 * kPi * j / minor_segments;
            const double r = major_radius + minor_radius * std::cos(v);
            m.vertices.emplace_back(r * std::cos(u), r * std::sin(u), minor_radius * std::sin(v));
        }
    }
    auto id = [&](int i, int j) { return (i % major_segments) * minor_segments + (j % minor_segments); };
    for (int i = 0; i < major_segments; ++i)
        for (int j = 0; j < minor_segments; ++j)
            add_quad(m, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
    return m;
}

TriMesh make_cylinder(double radius, double height, int segments, int stacks)
{
    TriMesh m;
    stacks = std::max(1, stacks);
    for (int k = 0; k <= stacks; ++k)
        for (int s = 0; s < segments; ++s) {
            const double phi = 2.0 * kPi * s / segments;
            m.vertices.emplace_back(radius * std::cos(phi), radius * std::sin(phi), height * (static_cast<double>(k) / stacks - 0.5));
        }
    auto id = [&](int k, int s) { return k * segments + (s % segments); };
    for (int k = 0; k < stacks; ++k)
        for (int s = 0; s < segments; ++s)
            add_quad(m, id(k, s), id(k, s + 1), id(k + 1, s + 1), id(k + 1, s));
    const int bottom = static_cast<int>(m.vertices.size());
    m.vertices.emplace_back(0, 0, -height / 2);
    const int top = bottom + 1;
    m.vertices.emplace_back(0, 0, height / 2);
    for (int s = 0; s < segments; ++s) {
        m.faces.push_back({bottom, id(0, s + 1), id(0, s)});
        m.faces.push_back({top, id(stacks, s), id(stacks, s + 1)});
    }
    return m;
}

TriMesh make_open_cylinder(double radius, double height, int segments)
{
    TriMesh m = make_cylinder(radius, height, segments, 1);
    m.faces.resize(static_cast<std::size_t>(2 * segments));
    compact(m);
    return m;
}

TriMesh make_tetrahedron(double edge)
{
    const double s = edge / (2.0 * std::sqrt(2.0));
    TriMesh m;
    m.vertices = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
    m.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    orient_consistently(m);
    return m;
}

} // namespace egad
