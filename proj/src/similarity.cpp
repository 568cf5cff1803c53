#include "egad/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "egad/errors.hpp"

namespace egad {

namespace {

struct Edge {
    int to;
    double length;
};

std::vector<std::vector<Edge>> edge_graph(const TriMesh& mesh)
{
    const auto nbrs = vertex_neighbors(mesh);
    std::vector<std::vector<Edge>> graph(nbrs.size());
    for (std::size_t v = 0; v < nbrs.size(); ++v)
        for (int u : nbrs[v])
            graph[v].push_back({u, (mesh.vertices[v] - mesh.vertices[static_cast<std::size_t>(u)]).norm()});
    return graph;
}

void dijkstra(const std::vector<std::vector<Edge>>& graph, int source, std::vector<double>& out)
{
    out.assign(graph.size(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    out[static_cast<std::size_t>(source)] = 0.0;
    heap.push({0.0, source});
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > out[static_cast<std::size_t>(v)])
            continue;
        for (const Edge& e : graph[static_cast<std::size_t>(v)]) {
            const double nd = d + e.length;
            if (nd < out[static_cast<std::size_t>(e.to)]) {
                out[static_cast<std::size_t>(e.to)] = nd;
                heap.push({nd, e.to});
            }
        }
    }
}

int find_root(std::vector<int>& parent, int x)
{
    while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
    }
    return x;
}

double node_similarity(const ReebNode& m, const ReebNode& n, double w)
{
    return w * std::min(m.area, n.area) + (1.0 - w) * std::min(m.length, n.length);
}

} // namespace

std::vector<double> geodesic_integral(const TriMesh& mesh, int base_count, Rng& rng)
{
    if (mesh.vertices.empty() || base_count < 1)
        throw std::invalid_argument("geodesic_mu: empty mesh or no bases");
    const auto areas = vertex_areas(mesh);
    const double total = std::accumulate(areas.begin(), areas.end(), 0.0);
    if (!(total > 0.0))
        throw StructuralError("geodesic_mu: mesh has no area");

    // Systematic sampling: one random offset, then evenly spaced positions
    // along the cumulative area.
    const double step = total / base_count;
    std::vector<int> bases;
    double position = rng.uniform() * step;
    double cumulative = 0.0;
    for (std::size_t v = 0; v < areas.size() && static_cast<int>(bases.size()) < base_count; ++v) {
        cumulative += areas[v];
        while (position < cumulative && static_cast<int>(bases.size()) < base_count) {
            bases.push_back(static_cast<int>(v));
            position += step;
        }
    }
    while (static_cast<int>(bases.size()) < base_count)
        bases.push_back(static_cast<int>(areas.size()) - 1);

    const auto graph = edge_graph(mesh);
    std::vector<double> mu(mesh.vertices.size(), 0.0);
    std::vector<double> d;
    int previous = -1;
    for (int b : bases) {
        if (b != previous)
            dijkstra(graph, b, d);
        previous = b;
        for (std::size_t v = 0; v < mu.size(); ++v) {
            if (!std::isfinite(d[v]))
                throw StructuralError("geodesic_mu: mesh is not connected");
            mu[v] += d[v] * step;
        }
    }

    return mu;
}

std::vector<double> geodesic_mu(const TriMesh& mesh, int base_count, Rng& rng)
{
    std::vector<double> mu = geodesic_integral(mesh, base_count, rng);
    const auto [lo, hi] = std::minmax_element(mu.begin(), mu.end());
    const double min = *lo, max = *hi;
    for (double& m : mu)
        m = max > 0.0 ? (m - min) / max : 0.0;
    return mu;
}

ReebSignature build_mrg(const TriMesh& mesh, const std::vector<double>& mu, int levels)
{
    if (levels < 1)
        throw std::invalid_argument("build_mrg: levels must be >= 1");
    if (mu.size() != mesh.vertices.size())
        throw std::invalid_argument("build_mrg: mu size does not match vertex count");

    const std::size_t nf = mesh.faces.size();
    std::vector<double> face_mu(nf), face_lo(nf), face_hi(nf), area(nf);
    double total_area = 0.0;
    for (std::size_t f = 0; f < nf; ++f) {
        const auto& t = mesh.faces[f];
        const double a = mu[static_cast<std::size_t>(t[0])], b = mu[static_cast<std::size_t>(t[1])], c = mu[static_cast<std::size_t>(t[2])];
        face_mu[f] = (a + b + c) / 3.0;
        face_lo[f] = std::min({a, b, c});
        face_hi[f] = std::max({a, b, c});
        area[f] = face_area(mesh, f);
        total_area += area[f];
    }
    if (!(total_area > 0.0))
        throw StructuralError("build_mrg: mesh has no area");

    // Faces sharing an edge.
    std::vector<std::pair<int, int>> face_pairs;
    {
        std::map<std::pair<int, int>, int> first_face;
        for (std::size_t f = 0; f < nf; ++f)
            for (int k = 0; k < 3; ++k) {
                int u = mesh.faces[f][static_cast<std::size_t>(k)], v = mesh.faces[f][static_cast<std::size_t>((k + 1) % 3)];
                if (u > v)
                    std::swap(u, v);
                auto [it, fresh] = first_face.try_emplace({u, v}, static_cast<int>(f));
                if (!fresh)
                    face_pairs.push_back({it->second, static_cast<int>(f)});
            }
    }

    ReebSignature sig;
    std::vector<int> coarser_region;
    for (int level = 0; level < levels; ++level) {
        const int intervals = 1 << level;
        std::vector<int> interval(nf);
        for (std::size_t f = 0; f < nf; ++f)
            interval[f] = std::clamp(static_cast<int>(std::floor(face_mu[f] * intervals)), 0, intervals - 1);

        std::vector<int> uf(nf);
        std::iota(uf.begin(), uf.end(), 0);
        for (const auto& [f, g] : face_pairs)
            if (interval[static_cast<std::size_t>(f)] == interval[static_cast<std::size_t>(g)]) {
                const int rf = find_root(uf, f), rg = find_root(uf, g);
                if (rf != rg)
                    uf[static_cast<std::size_t>(std::max(rf, rg))] = std::min(rf, rg);
            }

        ReebLevel lv;
        lv.intervals = intervals;
        std::vector<int> region(nf, -1);
        std::vector<int> root_to_node(nf, -1);
        std::vector<double> lo, hi;
        for (std::size_t f = 0; f < nf; ++f) {
            const int r = find_root(uf, static_cast<int>(f));
            int& id = root_to_node[static_cast<std::size_t>(r)];
            if (id < 0) {
                id = static_cast<int>(lv.nodes.size());
                ReebNode node;
                node.interval = interval[f];
                node.parent = level == 0 ? -1 : coarser_region[f];
                lv.nodes.push_back(node);
                lo.push_back(std::numeric_limits<double>::infinity());
                hi.push_back(-std::numeric_limits<double>::infinity());
            }
            region[f] = id;
            ReebNode& node = lv.nodes[static_cast<std::size_t>(id)];
            node.area += area[f] / total_area;
            lo[static_cast<std::size_t>(id)] = std::min(lo[static_cast<std::size_t>(id)], face_lo[f]);
            hi[static_cast<std::size_t>(id)] = std::max(hi[static_cast<std::size_t>(id)], face_hi[f]);
            if (level > 0 && node.parent != coarser_region[f])
                throw std::logic_error("build_mrg: region straddles two parents");
        }

        // mu extent clipped to the node's interval.
        double total_length = 0.0;
        for (std::size_t i = 0; i < lv.nodes.size(); ++i) {
            const double a = static_cast<double>(lv.nodes[i].interval) / intervals;
            const double b = static_cast<double>(lv.nodes[i].interval + 1) / intervals;
            lv.nodes[i].length = std::max(0.0, std::min(hi[i], b) - std::max(lo[i], a));
            total_length += lv.nodes[i].length;
        }
        for (auto& node : lv.nodes)
            node.length = total_length > 0.0 ? node.length / total_length : 1.0 / static_cast<double>(lv.nodes.size());

        for (const auto& [f, g] : face_pairs) {
            const int a = region[static_cast<std::size_t>(f)], b = region[static_cast<std::size_t>(g)];
            if (a == b)
                continue;
            lv.nodes[static_cast<std::size_t>(a)].adjacent.push_back(b);
            lv.nodes[static_cast<std::size_t>(b)].adjacent.push_back(a);
        }
        for (auto& node : lv.nodes) {
            std::sort(node.adjacent.begin(), node.adjacent.end());
            node.adjacent.erase(std::unique(node.adjacent.begin(), node.adjacent.end()), node.adjacent.end());
        }

        sig.levels.push_back(std::move(lv));
        coarser_region = std::move(region);
    }
    return sig;
}

ReebSignature build_signature(const TriMesh& mesh, const SimilarityParams& params, Rng& rng)
{
    return build_mrg(mesh, geodesic_mu(mesh, params.base_count, rng), params.levels);
}

double match_score(const ReebSignature& a, const ReebSignature& b, double area_weight)
{
    if (a.levels.size() != b.levels.size() || a.levels.empty())
        throw std::invalid_argument("similarity: signatures have different level counts");

    double total = 0.0;
    std::vector<int> prev_a;
    for (std::size_t level = 0; level < a.levels.size(); ++level) {
        const auto& na = a.levels[level].nodes;
        const auto& nb = b.levels[level].nodes;
        std::vector<int> match_a(na.size(), -1), match_b(nb.size(), -1);

        struct Candidate {
            int i, j;
            double sim, gap;
        };
        std::vector<Candidate> candidates;
        for (std::size_t i = 0; i < na.size(); ++i)
            for (std::size_t j = 0; j < nb.size(); ++j) {
                if (na[i].interval != nb[j].interval)
                    continue;
                if (level > 0 && (na[i].parent < 0 || prev_a[static_cast<std::size_t>(na[i].parent)] != nb[j].parent))
                    continue;
                candidates.push_back({static_cast<int>(i), static_cast<int>(j), node_similarity(na[i], nb[j], area_weight),
                    std::abs(na[i].area - nb[j].area) + std::abs(na[i].length - nb[j].length)});
            }

        // Greedy: pairs extending an existing match along the graph first,
        // then by similarity, then by attribute gap, then by index.
        auto consistent = [&](const Candidate& c) {
            for (int x : na[static_cast<std::size_t>(c.i)].adjacent) {
                const int y = match_a[static_cast<std::size_t>(x)];
                if (y >= 0 && std::binary_search(nb[static_cast<std::size_t>(c.j)].adjacent.begin(), nb[static_cast<std::size_t>(c.j)].adjacent.end(), y))
                    return true;
            }
            return false;
        };
        while (true) {
            const Candidate* best = nullptr;
            bool best_consistent = false;
            for (const auto& c : candidates) {
                if (match_a[static_cast<std::size_t>(c.i)] >= 0 || match_b[static_cast<std::size_t>(c.j)] >= 0)
                    continue;
                const bool cc = consistent(c);
                if (!best || std::make_tuple(cc, c.sim, -c.gap, -c.i, -c.j) > std::make_tuple(best_consistent, best->sim, -best->gap, -best->i, -best->j)) {
                    best = &c;
                    best_consistent = cc;
                }
            }
            if (!best)
                break;
            match_a[static_cast<std::size_t>(best->i)] = best->j;
            match_b[static_cast<std::size_t>(best->j)] = best->i;
            total += best->sim;
        }
        prev_a = std::move(match_a);
    }
    return std::clamp(total / static_cast<double>(a.levels.size()), 0.0, 1.0);
}

double similarity(const ReebSignature& a, const ReebSignature& b, double area_weight)
{
    return 0.5 * (match_score(a, b, area_weight) + match_score(b, a, area_weight));
}

double k_nearest_mean(std::vector<double> distances, int k)
{
    if (distances.empty())
        return 1.0;
    const std::size_t kk = std::min(distances.size(), static_cast<std::size_t>(std::max(k, 1)));
    std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(kk - 1), distances.end());
    std::sort(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(kk));
    double sum = 0.0;
    for (std::size_t i = 0; i < kk; ++i)
        sum += distances[i];
    return sum / static_cast<double>(kk);
}

double diversity(const ReebSignature& target, const std::vector<const ReebSignature*>& population, int k, double area_weight)
{
    std::vector<double> d;
    d.reserve(population.size());
    for (const auto* other : population)
        d.push_back(dist(target, *other, area_weight));
    return k_nearest_mean(std::move(d), k);
}

} // namespace egad
