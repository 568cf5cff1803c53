#include "egad/wrench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <numbers>


#include "egad/rng.hpp"

namespace egad {

std::pair<Vec3, Vec3> tangent_basis(const Vec3& n)
{
    const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    Vec3 t1 = n.cross(helper).normalized();
    Vec3 t2 = n.cross(t1);
    return {t1, t2};
}

WrenchSet contact_wrenches(const std::vector<Contact>& contacts, double friction, int cone_edges, double torque_scale, const Vec3& centroid)
{
    WrenchSet set;
    set.friction = friction;
    set.cone_edges = cone_edges;
    set.torque_scale = torque_scale;
    for (const auto& c : contacts) {
        const Vec3 inward = -c.normal.normalized();
        const auto [t1, t2] = tangent_basis(inward);
        const Vec3 arm = c.point - centroid;
        for (int j = 0; j < cone_edges; ++j) {
            const double theta = 2.0 * std::numbers::pi * j / cone_edges;
            const Vec3 f = inward + friction * (std::cos(theta) * t1 + std::sin(theta) * t2);
            Wrench w;
            w << f, torque_scale * arm.cross(f);
            set.wrenches.push_back(w);
        }
    }
    return set;
}

void add_torsional_wrenches(WrenchSet& set, const std::vector<Contact>& contacts, double finger_radius)
{
    const double magnitude = set.torque_scale * set.friction * finger_radius;
    if (!(magnitude > 0.0))
        return;
    for (const auto& c : contacts)
        for (double sign : {1.0, -1.0}) {
            Wrench w;
            w << Vec3::Zero(), sign * magnitude * c.normal.normalized();
            set.wrenches.push_back(w);
        }
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

struct Facet {
    std::array<int, 6> v; // sorted point indices
    std::array<int, 6> nb; // nb[k]: facet across the ridge opposite v[k]
    Vec6 normal;
    double offset; // normal . x <= offset inside the hull
    bool alive = true;
    bool visible = false;
};

// Unit normal of the hyperplane through six points: null vector of the 5x6
// difference matrix by Gauss-Jordan elimination with full pivoting.
bool hyperplane(const std::vector<Vec6>& pts, const std::array<int, 6>& v, Vec6& normal, double& offset)
{
    double m[5][6];
    const Vec6& base = pts[static_cast<std::size_t>(v[0])];
    for (int r = 0; r < 5; ++r) {
        const Vec6 d = pts[static_cast<std::size_t>(v[static_cast<std::size_t>(r + 1)])] - base;
        for (int c = 0; c < 6; ++c)
            m[r][c] = d[c];
    }
    int pivot_col[5];
    bool used_col[6] = {false, false, false, false, false, false};
    for (int r = 0; r < 5; ++r) {
        // Full pivoting over remaining rows and unused columns.
        int br = -1, bc = -1;
        double best = 0.0;
        for (int i = r; i < 5; ++i)
            for (int c = 0; c < 6; ++c)
                if (!used_col[c] && std::abs(m[i][c]) > best) {
                    best = std::abs(m[i][c]);
                    br = i;
                    bc = c;
                }
        if (br < 0 || !(best > 0.0))
            return false;
        if (br != r)
            for (int c = 0; c < 6; ++c)
                std::swap(m[r][c], m[br][c]);
        used_col[bc] = true;
        pivot_col[r] = bc;
        for (int i = 0; i < 5; ++i) {
            if (i == r)
                continue;
            const double f = m[i][bc] / m[r][bc];
            if (f == 0.0)
                continue;
            for (int c = 0; c < 6; ++c)
                m[i][c] -= f * m[r][c];
        }
    }
    int free_col = 0;
    while (used_col[free_col])
        ++free_col;
    normal.setZero();
    normal[free_col] = 1.0;
    for (int r = 0; r < 5; ++r)
        normal[pivot_col[r]] = -m[r][free_col] / m[r][pivot_col[r]];
    const double len = normal.norm();
    if (!(len > 0.0) || !std::isfinite(len))
        return false;
    normal /= len;
    offset = normal.dot(base);
    return true;
}

// Each point plus a small fixed pseudo-random combination of all points.
std::vector<Vec6> joggled(const std::vector<Vec6>& raw, double joggle)
{
    std::vector<Vec6> pts(raw.size(), Vec6::Zero());
    const double delta = joggle / static_cast<double>(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        Vec6 mix = Vec6::Zero();
        for (std::size_t j = 0; j < raw.size(); ++j) {
            const double u = static_cast<double>(detail::splitmix64((i + 1) * 0x9e3779b97f4a7c15ULL + j) >> 11) * 0x1.0p-53;
            mix += (2.0 * u - 1.0) * raw[j];
        }
        pts[i] = raw[i] + delta * mix;
    }
    return pts;
}

// Minimum facet offset of the hull of the joggled points, or nothing when
// the incremental construction comes out inconsistent.
std::optional<double> hull_min_offset(const std::vector<Vec6>& raw, double joggle, double scale)
{
    std::vector<Vec6> pts = joggled(raw, joggle);

    // Initial simplex by greedy Gram-Schmidt.
    std::vector<int> simplex;
    {
        Vec6 centroid = Vec6::Zero();
        for (const auto& p : pts)
            centroid += p;
        centroid /= static_cast<double>(pts.size());
        int first = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if ((pts[i] - centroid).norm() > best) {
                best = (pts[i] - centroid).norm();
                first = static_cast<int>(i);
            }
        simplex.push_back(first);
        std::vector<Vec6> basis;
        for (int d = 0; d < 6; ++d) {
            int pick = -1;
            double far = 0.0;
            Vec6 pick_residual;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                Vec6 r = pts[i] - pts[static_cast<std::size_t>(first)];
                for (const auto& b : basis)
                    r -= b.dot(r) * b;
                if (r.norm() > far) {
                    far = r.norm();
                    pick = static_cast<int>(i);
                    pick_residual = r;
                }
            }
            if (pick < 0 || far <= 1e-9 * scale)
                return 0.0;
            simplex.push_back(pick);
            basis.push_back(pick_residual / far);
        }
    }
    Vec6 interior = Vec6::Zero();
    for (int i : simplex)
        interior += pts[static_cast<std::size_t>(i)];
    interior /= 7.0;

    std::vector<Facet> facets;
    facets.reserve(1024);
    auto exact_plane = [&](Facet& f) {
        if (!hyperplane(pts, f.v, f.normal, f.offset))
            return false;
        if (f.normal.dot(interior) > f.offset) {
            f.normal = -f.normal;
            f.offset = -f.offset;
        }
        return true;
    };

    std::vector<int> sorted_simplex(simplex.begin(), simplex.end());
    std::sort(sorted_simplex.begin(), sorted_simplex.end());
    for (int skip = 0; skip < 7; ++skip) {
        Facet f{};
        for (int k = 0, m = 0; k < 7; ++k)
            if (k != skip)
                f.v[static_cast<std::size_t>(m++)] = sorted_simplex[static_cast<std::size_t>(k)];
        // The neighbour opposite v[m] is the facet that omits v[m].
        for (int m = 0; m < 6; ++m) {
            const int k = static_cast<int>(std::find(sorted_simplex.begin(), sorted_simplex.end(), f.v[static_cast<std::size_t>(m)]) - sorted_simplex.begin());
            f.nb[static_cast<std::size_t>(m)] = k;
        }
        if (!exact_plane(f))
            return std::nullopt;
        facets.push_back(f);
    }

    const double eps = 1e-12 * scale;
    std::vector<char> in_simplex(pts.size(), 0);
    for (int i : simplex)
        in_simplex[static_cast<std::size_t>(i)] = 1;

    // A ridge through the new apex is identified by its other four points.
    struct OpenRidge {
        std::uint64_t key;
        int facet;
        int slot;
    };
    std::vector<int> visible;
    std::vector<int> created;
    std::vector<OpenRidge> open;
    for (std::size_t pi = 0; pi < pts.size(); ++pi) {
        if (in_simplex[pi])
            continue;
        const Vec6& p = pts[pi];
        const int pid = static_cast<int>(pi);
        // Visible region grown from the farthest facet through neighbours,
        // so it stays connected even when rounding disagrees elsewhere.
        visible.clear();
        int seed = -1;
        double far = eps;
        for (std::size_t fi = 0; fi < facets.size(); ++fi) {
            const Facet& f = facets[fi];
            if (!f.alive)
                continue;
            const double d = f.normal.dot(p) - f.offset;
            if (d > far) {
                far = d;
                seed = static_cast<int>(fi);
            }
        }
        if (seed >= 0) {
            facets[static_cast<std::size_t>(seed)].visible = true;
            visible.push_back(seed);
            for (std::size_t q = 0; q < visible.size(); ++q)
                for (int gi : facets[static_cast<std::size_t>(visible[q])].nb) {
                    Facet& g = facets[static_cast<std::size_t>(gi)];
                    if (!g.visible && g.normal.dot(p) - g.offset > eps) {
                        g.visible = true;
                        visible.push_back(gi);
                    }
                }
        }
        if (visible.empty())
            continue;

        // New facets over the horizon. The plane through a horizon ridge
        // and p lies in the pencil spanned by the two facets on that ridge.
        created.clear();
        for (int fi : visible) {
            for (int m = 0; m < 6; ++m) {
                const int gi = facets[static_cast<std::size_t>(fi)].nb[static_cast<std::size_t>(m)];
                if (facets[static_cast<std::size_t>(gi)].visible)
                    continue;
                const Facet& f = facets[static_cast<std::size_t>(fi)];
                const Facet& g = facets[static_cast<std::size_t>(gi)];
                Facet nf{};
                int w = 0;
                bool placed = false;
                for (int k = 0; k < 6; ++k) {
                    if (k == m)
                        continue;
                    const int vk = f.v[static_cast<std::size_t>(k)];
                    if (!placed && pid < vk) {
                        nf.v[static_cast<std::size_t>(w++)] = pid;
                        placed = true;
                    }
                    nf.v[static_cast<std::size_t>(w++)] = vk;
                }
                if (!placed)
                    nf.v[5] = pid;
                const double a = f.normal.dot(p) - f.offset;
                const double b = g.normal.dot(p) - g.offset;
                nf.normal = a * g.normal - b * f.normal;
                nf.offset = a * g.offset - b * f.offset;
                const double len = nf.normal.norm();
                if (len > 0.0) {
                    nf.normal /= len;
                    nf.offset /= len;
                } else if (!exact_plane(nf)) {
                    return std::nullopt;
                }
                nf.nb.fill(-1);
                const int ni = static_cast<int>(facets.size());
                const int pslot = static_cast<int>(std::find(nf.v.begin(), nf.v.end(), pid) - nf.v.begin());
                nf.nb[static_cast<std::size_t>(pslot)] = gi;
                // g now sees the new facet across that ridge.
                Facet& gm = facets[static_cast<std::size_t>(gi)];
                for (auto& slot : gm.nb)
                    if (slot == fi) {
                        slot = ni;
                        break;
                    }
                facets.push_back(nf);
                created.push_back(ni);
            }
        }
        for (int fi : visible)
            facets[static_cast<std::size_t>(fi)].alive = false;

        // Stitch new facets to each other along ridges through p.
        std::size_t buckets = 64;
        while (buckets < 10 * created.size())
            buckets *= 2;
        open.assign(buckets, OpenRidge{0, -1, 0});
        std::size_t pending = 0;
        for (int ni : created) {
            const Facet& f = facets[static_cast<std::size_t>(ni)];
            for (int m = 0; m < 6; ++m) {
                if (f.v[static_cast<std::size_t>(m)] == pid)
                    continue;
                std::uint64_t key = 0;
                for (int k = 0; k < 6; ++k)
                    if (k != m && f.v[static_cast<std::size_t>(k)] != pid)
                        key = (key << 16) | static_cast<std::uint64_t>(f.v[static_cast<std::size_t>(k)]);
                std::size_t h = static_cast<std::size_t>(detail::splitmix64(key)) & (buckets - 1);
                while (open[h].facet >= 0 && open[h].key != key)
                    h = (h + 1) & (buckets - 1);
                OpenRidge& slot = open[h];
                if (slot.facet < 0) {
                    slot = {key, ni, m};
                    ++pending;
                } else if (slot.slot >= 0) {
                    facets[static_cast<std::size_t>(slot.facet)].nb[static_cast<std::size_t>(slot.slot)] = ni;
                    facets[static_cast<std::size_t>(ni)].nb[static_cast<std::size_t>(m)] = slot.facet;
                    slot.slot = -1;
                    --pending;
                } else {
                    return std::nullopt;
                }
            }
        }
        if (pending != 0)
            return std::nullopt;
    }

    std::erase_if(facets, [](const Facet& f) { return !f.alive; });
    // Every point must lie beneath every facet; otherwise rounding broke
    // the construction and the caller retries with a larger joggle.
    double eps_quality = std::numeric_limits<double>::infinity();
    for (const auto& f : facets) {
        for (const auto& p : pts)
            if (f.normal.dot(p) - f.offset > 1e-9 * scale)
                return std::nullopt;
        eps_quality = std::min(eps_quality, f.offset);
    }
    if (!std::isfinite(eps_quality))
        return std::nullopt;
    return eps_quality;
}

// Slow path: try every 6-subset as a supporting hyperplane.
double exhaustive_min_offset(const std::vector<Vec6>& raw, double joggle, double scale)
{
    const std::vector<Vec6> pts = joggled(raw, joggle);
    const int n = static_cast<int>(pts.size());
    double best = std::numeric_limits<double>::infinity();
    std::array<int, 6> v{};
    std::function<void(int, int)> choose = [&](int start, int depth) {
        if (depth == 6) {
            Vec6 normal;
            double offset = 0.0;
            if (!hyperplane(pts, v, normal, offset))
                return;
            int above = 0, below = 0;
            for (const auto& p : pts) {
                const double d = normal.dot(p) - offset;
                above += d > 1e-9 * scale;
                below += d < -1e-9 * scale;
            }
            if (above > 0 && below > 0)
                return;
            best = std::min(best, above > 0 ? -offset : offset);
            return;
        }
        for (int i = start; i < n; ++i) {
            v[static_cast<std::size_t>(depth)] = i;
            choose(i + 1, depth + 1);
        }
    };
    choose(0, 0);
    return std::isfinite(best) ? best : 0.0;
}

} // namespace

double ferrari_canny(const std::vector<Wrench>& input)
{
    if (input.size() < 7)
        return 0.0;
    double scale = 0.0;
    for (const auto& w : input)
        scale = std::max(scale, w.norm());
    if (!(scale > 0.0))
        return 0.0;

    // Affine rank test on the raw wrenches, by greedy Gram-Schmidt.
    {
        std::vector<Vec6> basis;
        const Vec6& origin = input.front();
        for (int d = 0; d < 6; ++d) {
            double far = 0.0;
            Vec6 pick = Vec6::Zero();
            for (const auto& w : input) {
                Vec6 r = w - origin;
                for (const auto& b : basis)
                    r -= b.dot(r) * b;
                if (r.norm() > far) {
                    far = r.norm();
                    pick = r;
                }
            }
            if (far <= 1e-9 * scale)
                return 0.0;
            basis.push_back(pick / far);
        }
    }

    // Drop exact repeats, then nudge every point by a tiny fixed pseudo-random
    // combination of all points. Cone edges of one contact are coplanar and
    // whole contact sets share hyperplanes through the origin; mixing points
    // breaks those ties and, being built from the points themselves,
    // commutes with any linear map of wrench space (rotations included).
    std::vector<Vec6> raw;
    for (const auto& w : input) {
        const bool repeat = std::any_of(raw.begin(), raw.end(), [&](const Vec6& p) { return (p - w).norm() <= 1e-12 * scale; });
        if (!repeat)
            raw.push_back(w);
    }
    if (raw.size() < 7 || raw.size() > 0xffff)
        return 0.0;
    for (const double joggle : {1e-6, 1e-5, 1e-4})
        if (const auto q = hull_min_offset(raw, joggle, scale))
            return *q > 2.0 * joggle * scale ? *q : 0.0;
    const double q = exhaustive_min_offset(raw, 1e-6, scale);
    return q > 2e-6 * scale ? q : 0.0;
}

double ferrari_canny(const WrenchSet& set) { return ferrari_canny(set.wrenches); }

} // namespace egad
