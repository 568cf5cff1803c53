#include "egad/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "egad/errors.hpp"

namespace egad {

VoxelGrid::VoxelGrid(int nx, int ny, int nz) : dims_{nx, ny, nz}
{
    if (nx <= 0 || ny <= 0 || nz <= 0)
        throw std::invalid_argument("voxel grid dimensions must be positive");
    cells_.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz), 0);
}

std::size_t VoxelGrid::count() const
{
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

VoxelGrid render_voxels(const CppnGenome& genome, std::array<int, 3> resolution, double threshold)
{
    if (resolution[0] < 3 || resolution[1] < 3 || resolution[2] < 3)
        throw std::invalid_argument("voxel resolution must be at least 3 per axis");
    const CompiledCppn cppn(genome);
    VoxelGrid grid(resolution[0], resolution[1], resolution[2]);
    for (int k = 0; k < grid.nz(); ++k)
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) {
                const auto in = cppn_input(VoxelGrid::center(i, grid.nx()), VoxelGrid::center(j, grid.ny()), VoxelGrid::center(k, grid.nz()));
                grid.set(i, j, k, cppn(in) > threshold);
            }
    return grid;
}

namespace {

constexpr std::array<std::array<int, 3>, 6> kFaceNeighbors{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

template <typename Visit>
void for_each_cell(const VoxelGrid& g, Visit&& visit)
{
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                visit(i, j, k);
}

// 1D running min (erode) or max (dilate) of half-width r along one axis.
VoxelGrid box_filter(const VoxelGrid& in, int radius, int axis, bool take_min)
{
    VoxelGrid out(in.nx(), in.ny(), in.nz());
    const auto dims = in.dims();
    for_each_cell(in, [&](int i, int j, int k) {
        std::array<int, 3> p{i, j, k};
        bool result = take_min;
        for (int d = -radius; d <= radius; ++d) {
            std::array<int, 3> q = p;
            q[static_cast<std::size_t>(axis)] += d;
            const bool v = q[static_cast<std::size_t>(axis)] >= 0 && q[static_cast<std::size_t>(axis)] < dims[static_cast<std::size_t>(axis)] &&
                           in.at(q[0], q[1], q[2]);
            if (take_min && !v) {
                result = false;
                break;
            }
            if (!take_min && v) {
                result = true;
                break;
            }
        }
        out.set(i, j, k, result);
    });
    return out;
}

} // namespace

VoxelGrid largest_component(const VoxelGrid& grid)
{
    std::vector<int> label(grid.size(), -1);
    int best_label = -1;
    std::size_t best_size = 0;
    int next_label = 0;
    for_each_cell(grid, [&](int i, int j, int k) {
        const std::size_t seed = grid.index(i, j, k);
        if (!grid.at(i, j, k) || label[seed] >= 0)
            return;
        const int id = next_label++;
        std::size_t size = 0;
        std::deque<std::array<int, 3>> queue{{i, j, k}};
        label[seed] = id;
        while (!queue.empty()) {
            const auto [a, b, c] = queue.front();
            queue.pop_front();
            ++size;
            for (const auto& d : kFaceNeighbors) {
                const int x = a + d[0], y = b + d[1], z = c + d[2];
                if (grid.at(x, y, z) && label[grid.index(x, y, z)] < 0) {
                    label[grid.index(x, y, z)] = id;
                    queue.push_back({x, y, z});
                }
            }
        }
        if (size > best_size) {
            best_size = size;
            best_label = id;
        }
    });
    if (best_label < 0)
        throw RejectIndividual("empty voxel grid");
    VoxelGrid out(grid.nx(), grid.ny(), grid.nz());
    for_each_cell(grid, [&](int i, int j, int k) { out.set(i, j, k, label[grid.index(i, j, k)] == best_label); });
    return out;
}

VoxelGrid erode(const VoxelGrid& grid, int radius)
{
    VoxelGrid g = grid;
    for (int axis = 0; axis < 3; ++axis)
        g = box_filter(g, radius, axis, true);
    return g;
}

VoxelGrid dilate(const VoxelGrid& grid, int radius)
{
    VoxelGrid g = grid;
    for (int axis = 0; axis < 3; ++axis)
        g = box_filter(g, radius, axis, false);
    return g;
}

VoxelGrid morphological_open(const VoxelGrid& grid, int radius)
{
    if (radius < 1)
        throw std::invalid_argument("opening radius must be >= 1");
    VoxelGrid out = dilate(erode(grid, radius), radius);
    if (out.empty())
        throw RejectIndividual("opening removed the whole shape");
    return out;
}

VoxelGrid fill_cavities(const VoxelGrid& grid)
{
    std::vector<char> outside(grid.size(), 0);
    std::deque<std::array<int, 3>> queue;
    for_each_cell(grid, [&](int i, int j, int k) {
        const bool border = i == 0 || j == 0 || k == 0 || i == grid.nx() - 1 || j == grid.ny() - 1 || k == grid.nz() - 1;
        if (border && !grid.at(i, j, k)) {
            outside[grid.index(i, j, k)] = 1;
            queue.push_back({i, j, k});
        }
    });
    while (!queue.empty()) {
        const auto [a, b, c] = queue.front();
        queue.pop_front();
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int x = a + dx, y = b + dy, z = c + dz;
                    if (!grid.in_bounds(x, y, z) || grid.at(x, y, z) || outside[grid.index(x, y, z)])
                        continue;
                    outside[grid.index(x, y, z)] = 1;
                    queue.push_back({x, y, z});
                }
    }
    VoxelGrid out(grid.nx(), grid.ny(), grid.nz());
    for_each_cell(grid, [&](int i, int j, int k) { out.set(i, j, k, !outside[grid.index(i, j, k)]); });
    return out;
}

// ---------------------------------------------------------------------------
// Marching cubes

namespace {

constexpr std::array<std::array<int, 3>, 8> kCorner{{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}};
constexpr std::array<std::array<int, 2>, 12> kEdge{{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}}};
constexpr std::array<std::array<int, 4>, 6> kCubeFace{{{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 5, 4}, {3, 2, 6, 7}, {0, 3, 7, 4}, {1, 2, 6, 5}}};

constexpr int kCentroidBase = 12; // triangle entries >= 12 name a loop centroid

int edge_between(int a, int b)
{
    for (int e = 0; e < 12; ++e)
        if ((kEdge[e][0] == a && kEdge[e][1] == b) || (kEdge[e][0] == b && kEdge[e][1] == a))
            return e;
    return -1;
}

bool edges_share_face(int e1, int e2)
{
    for (const auto& f : kCubeFace) {
        int hits = 0;
        for (int i = 0; i < 4; ++i) {
            const int e = edge_between(f[i], f[(i + 1) % 4]);
            hits += (e == e1) + (e == e2);
        }
        if (hits == 2)
            return true;
    }
    return false;
}

Vec3 edge_midpoint(int e)
{
    Vec3 p = Vec3::Zero();
    for (int c : kEdge[e])
        p += Vec3(kCorner[c][0], kCorner[c][1], kCorner[c][2]);
    return p / 2.0;
}

struct CaseTable {
    std::array<std::vector<std::array<int, 3>>, 256> triangles;
    std::array<std::vector<std::vector<int>>, 256> loops;
};

CaseTable build_case_table()
{
    CaseTable table;
    for (int config = 1; config < 255; ++config) {
        auto inside = [&](int c) { return (config >> c) & 1; };
        std::array<std::vector<int>, 12> adj;
        for (const auto& f : kCubeFace) {
            std::array<int, 4> fe{};
            std::vector<int> crossing;
            for (int i = 0; i < 4; ++i) {
                fe[i] = edge_between(f[i], f[(i + 1) % 4]);
                if (inside(f[i]) != inside(f[(i + 1) % 4]))
                    crossing.push_back(fe[i]);
            }
            auto link = [&](int a, int b) {
                adj[a].push_back(b);
                adj[b].push_back(a);
            };
            if (crossing.size() == 2) {
                link(crossing[0], crossing[1]);
            } else if (crossing.size() == 4) {
                // Saddle face: cut each occupied corner off on its own.
                for (int i = 0; i < 4; ++i)
                    if (inside(f[i]))
                        link(fe[(i + 3) % 4], fe[i]);
            }
        }

        std::array<bool, 12> used{};
        for (int start = 0; start < 12; ++start) {
            if (adj[start].empty() || used[start])
                continue;
            std::vector<int> loop{start};
            used[start] = true;
            int prev = start, cur = adj[start][0];
            while (cur != start) {
                loop.push_back(cur);
                used[cur] = true;
                const int next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
                prev = cur;
                cur = next;
            }

            Vec3 newell = Vec3::Zero();
            Vec3 outward = Vec3::Zero();
            for (std::size_t i = 0; i < loop.size(); ++i) {
                const Vec3 a = edge_midpoint(loop[i]);
                const Vec3 b = edge_midpoint(loop[(i + 1) % loop.size()]);
                newell += a.cross(b);
                const int c0 = kEdge[loop[i]][0], c1 = kEdge[loop[i]][1];
                const Vec3 p0(kCorner[c0][0], kCorner[c0][1], kCorner[c0][2]);
                const Vec3 p1(kCorner[c1][0], kCorner[c1][1], kCorner[c1][2]);
                outward += inside(c0) ? Vec3(p1 - p0) : Vec3(p0 - p1);
            }
            if (newell.dot(outward) < 0.0)
                std::reverse(loop.begin(), loop.end());

            const int n = static_cast<int>(loop.size());
            auto& tris = table.triangles[config];
            if (n == 3) {
                tris.push_back({loop[0], loop[1], loop[2]});
            } else {
                // Fan from an apex whose chords never join two points on one
                // cube face; such chords could coincide with a chord of the
                // neighbouring cube and break manifoldness.
                int apex = -1;
                for (int s = 0; s < n && apex < 0; ++s) {
                    bool ok = true;
                    for (int j = 2; j < n - 1 && ok; ++j)
                        ok = !edges_share_face(loop[s], loop[(s + j) % n]);
                    if (ok)
                        apex = s;
                }
                if (apex >= 0) {
                    for (int j = 1; j < n - 1; ++j)
                        tris.push_back({loop[apex], loop[(apex + j) % n], loop[(apex + j + 1) % n]});
                } else {
                    const int centroid = kCentroidBase + static_cast<int>(table.loops[config].size());
                    for (int j = 0; j < n; ++j)
                        tris.push_back({centroid, loop[j], loop[(j + 1) % n]});
                }
            }
            table.loops[config].push_back(loop);
        }
    }
    return table;
}

const CaseTable& case_table()
{
    static const CaseTable table = build_case_table();
    return table;
}

} // namespace

TriMesh marching_cubes(const VoxelGrid& grid)
{
    const auto& table = case_table();
    TriMesh mesh;
    const auto dims = grid.dims();
    // Lattice edges keyed by lower sample (shifted by one for the padding) and axis.
    std::unordered_map<std::uint64_t, int> edge_vertex;
    auto sample_pos = [&](int i, int j, int k) {
        return Vec3(VoxelGrid::center(i, dims[0]), VoxelGrid::center(j, dims[1]), VoxelGrid::center(k, dims[2]));
    };

    for (int k = -1; k < dims[2]; ++k)
        for (int j = -1; j < dims[1]; ++j)
            for (int i = -1; i < dims[0]; ++i) {
                int config = 0;
                for (int c = 0; c < 8; ++c)
                    if (grid.at(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]))
                        config |= 1 << c;
                if (config == 0 || config == 255)
                    continue;

                auto vertex_for_edge = [&](int e) {
                    const auto& a = kCorner[kEdge[e][0]];
                    const auto& b = kCorner[kEdge[e][1]];
                    const int lx = i + std::min(a[0], b[0]) + 1, ly = j + std::min(a[1], b[1]) + 1, lz = k + std::min(a[2], b[2]) + 1;
                    const int axis = a[0] != b[0] ? 0 : (a[1] != b[1] ? 1 : 2);
                    const std::uint64_t key = ((static_cast<std::uint64_t>(lz) * 4096 + static_cast<std::uint64_t>(ly)) * 4096 + static_cast<std::uint64_t>(lx)) * 3 +
                                              static_cast<std::uint64_t>(axis);
                    auto [it, inserted] = edge_vertex.emplace(key, static_cast<int>(mesh.vertices.size()));
                    if (inserted)
                        mesh.vertices.push_back(0.5 * (sample_pos(i + a[0], j + a[1], k + a[2]) + sample_pos(i + b[0], j + b[1], k + b[2])));
                    return it->second;
                };

                std::vector<int> centroid_vertex(table.loops[config].size(), -1);
                for (const auto& tri : table.triangles[config]) {
                    Face f{};
                    for (int t = 0; t < 3; ++t) {
                        const int entry = tri[t];
                        if (entry < kCentroidBase) {
                            f[t] = vertex_for_edge(entry);
                            continue;
                        }
                        auto& cv = centroid_vertex[static_cast<std::size_t>(entry - kCentroidBase)];
                        if (cv < 0) {
                            Vec3 c = Vec3::Zero();
                            const auto& loop = table.loops[config][static_cast<std::size_t>(entry - kCentroidBase)];
                            for (int e : loop)
                                c += mesh.vertices[static_cast<std::size_t>(vertex_for_edge(e))];
                            cv = static_cast<int>(mesh.vertices.size());
                            mesh.vertices.push_back(c / static_cast<double>(loop.size()));
                        }
                        f[t] = cv;
                    }
                    mesh.faces.push_back(f);
                }
            }
    orient_consistently(mesh);
    return mesh;
}

TriMesh smooth(const TriMesh& mesh, const TaubinParams& params)
{
    TriMesh out = mesh;
    if (params.iterations <= 0)
        return out;
    const auto nbrs = vertex_neighbors(mesh);
    std::vector<Vec3> next(out.vertices.size());
    auto pass = [&](double factor) {
        for (std::size_t v = 0; v < out.vertices.size(); ++v) {
            if (nbrs[v].empty()) {
                next[v] = out.vertices[v];
                continue;
            }
            Vec3 avg = Vec3::Zero();
            for (int n : nbrs[v])
                avg += out.vertices[static_cast<std::size_t>(n)];
            avg /= static_cast<double>(nbrs[v].size());
            next[v] = out.vertices[v] + factor * (avg - out.vertices[v]);
        }
        out.vertices.swap(next);
    };
    for (int it = 0; it < params.iterations; ++it) {
        pass(params.lambda);
        pass(params.mu);
    }
    return out;
}

TriMesh scale_min_extent(const TriMesh& mesh, double target_min_extent)
{
    if (!(target_min_extent > 0.0))
        throw std::invalid_argument("target extent must be positive");
    const BoundingBox box = bounding_box(mesh);
    const double min_dim = box.min_extent();
    if (!(min_dim > 0.0) || !std::isfinite(min_dim))
        throw StructuralError("mesh has zero extent along an axis");
    const double factor = target_min_extent / min_dim;
    const Vec3 center = 0.5 * (box.min + box.max);
    TriMesh out = mesh;
    for (auto& p : out.vertices)
        p = center + factor * (p - center);
    return out;
}

TriMesh rescale_to_gripper(const TriMesh& mesh, double gripper_width, double fraction)
{
    if (!(gripper_width > 0.0))
        throw std::invalid_argument("gripper width must be positive");
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("fraction must lie in (0, 1]");
    return scale_min_extent(mesh, fraction * gripper_width);
}

TriMesh build_morphology(const CppnGenome& genome, const MorphologyParams& params)
{
    VoxelGrid grid = render_voxels(genome, params.resolution, params.threshold);
    grid = largest_component(grid);
    grid = morphological_open(grid, params.open_radius);
    grid = largest_component(grid);
    grid = fill_cavities(grid);
    TriMesh mesh = smooth(marching_cubes(grid), params.smoothing);
    const auto report = validate(mesh);
    if (!report.ok() || !(report.volume > 0.0))
        throw RejectIndividual("mesh failed validation: " + report.summary());
    return mesh;
}

} // namespace egad
