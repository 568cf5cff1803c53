#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "egad/errors.hpp"
#include "egad/morphology.hpp"
#include "egad/primitives.hpp"
#include "oracles.hpp"

using namespace egad;

namespace {

VoxelGrid random_grid(Rng& rng, int n, double density)
{
    VoxelGrid g(n, n, n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                g.set(i, j, k, rng.bernoulli(density));
    return g;
}

VoxelGrid block(int n, int lo, int hi)
{
    VoxelGrid g(n, n, n);
    for (int k = lo; k < hi; ++k)
        for (int j = lo; j < hi; ++j)
            for (int i = lo; i < hi; ++i)
                g.set(i, j, k, true);
    return g;
}

// 1 - |p| on the output: positive inside the ball of radius 0.5 after
// the sigmoid-free identity threshold at 0.5.
CppnGenome ball_genome()
{
    return CppnGenome({{CppnGenome::kOutputId, Activation::Identity, 1.0, 1.0}}, {{6, CppnGenome::kOutputId, -1.0, true}}, CppnGenome::kFirstHiddenId);
}

std::vector<TriMesh> cppn_meshes(int count, std::uint64_t seed)
{
    std::vector<TriMesh> out;
    Rng rng(seed);
    while (static_cast<int>(out.size()) < count) {
        CppnGenome g = random_genome(rng);
        const int rounds = static_cast<int>(rng.index(12));
        for (int i = 0; i < rounds; ++i)
            g = mutate(g, EvolutionRates{}, rng);
        try {
            out.push_back(build_morphology(g, MorphologyParams{}));
        } catch (const RejectIndividual&) {
        }
    }
    return out;
}

} // namespace

TEST_CASE("render thresholds the network on the cell-centre lattice")
{
    const CppnGenome zero({{CppnGenome::kOutputId, Activation::Identity, 0.0, 1.0}}, {}, CppnGenome::kFirstHiddenId);
    CHECK(render_voxels(zero, {25, 25, 25}, 0.5).empty());

    const VoxelGrid ball = render_voxels(ball_genome(), {25, 25, 25}, 0.5);
    CHECK(ball.size() == 15625);
    std::size_t expect = 0;
    for (int k = 0; k < 25; ++k)
        for (int j = 0; j < 25; ++j)
            for (int i = 0; i < 25; ++i) {
                const double x = VoxelGrid::center(i, 25), y = VoxelGrid::center(j, 25), z = VoxelGrid::center(k, 25);
                const bool inside = 1.0 - std::sqrt(x * x + y * y + z * z) > 0.5;
                expect += inside;
                REQUIRE(ball.at(i, j, k) == inside);
            }
    CHECK(ball.count() == expect);
}

TEST_CASE("largest component keeps one face-connected blob")
{
    VoxelGrid g(12, 12, 12);
    for (int i = 0; i < 10; ++i)
        g.set(i, 0, 0, true);
    for (int i = 0; i < 3; ++i)
        g.set(i, 5, 5, true);
    const VoxelGrid kept = largest_component(g);
    CHECK(kept.count() == 10);
    CHECK(kept.at(9, 0, 0));
    CHECK_THROWS_AS(largest_component(VoxelGrid(4, 4, 4)), RejectIndividual);

    Rng rng(4);
    for (int t = 0; t < 30; ++t) {
        const VoxelGrid r = random_grid(rng, 10, 0.3);
        const auto sizes = oracle::component_sizes(r);
        const VoxelGrid out = largest_component(r);
        const auto after = oracle::component_sizes(out);
        REQUIRE(after.size() == 1);
        CHECK(after[0] == *std::max_element(sizes.begin(), sizes.end()));
    }
}

TEST_CASE("opening")
{
    const VoxelGrid cube = block(9, 2, 7);
    CHECK(morphological_open(cube, 1) == cube);

    VoxelGrid speck = block(9, 1, 5);
    speck.set(7, 7, 7, true);
    const VoxelGrid opened = morphological_open(speck, 1);
    CHECK_FALSE(opened.at(7, 7, 7));
    CHECK(opened == block(9, 1, 5));

    VoxelGrid lone(5, 5, 5);
    lone.set(2, 2, 2, true);
    CHECK_THROWS_AS(morphological_open(lone, 1), RejectIndividual);

    Rng rng(8);
    int checked = 0;
    for (int t = 0; t < 40; ++t) {
        // Union of random boxes plus salt, so something survives the opening.
        VoxelGrid g = random_grid(rng, 12, 0.1);
        for (int b = 0; b < 4; ++b) {
            const int x0 = static_cast<int>(rng.index(9)), y0 = static_cast<int>(rng.index(9)), z0 = static_cast<int>(rng.index(9));
            const int w = 3 + static_cast<int>(rng.index(3));
            for (int k = z0; k < std::min(12, z0 + w); ++k)
                for (int j = y0; j < std::min(12, y0 + w); ++j)
                    for (int i = x0; i < std::min(12, x0 + w); ++i)
                        g.set(i, j, k, true);
        }
        try {
            const VoxelGrid once = morphological_open(g, 1);
            CHECK(once.count() <= g.count());
            CHECK(morphological_open(once, 1) == once);
            ++checked;
        } catch (const RejectIndividual&) {
        }
    }
    CHECK(checked > 10);
}

TEST_CASE("cavities are filled")
{
    VoxelGrid shell = block(9, 1, 8);
    shell.set(4, 4, 4, false);
    const VoxelGrid filled = fill_cavities(shell);
    CHECK(filled.at(4, 4, 4));
    CHECK(filled == block(9, 1, 8));
}

TEST_CASE("marching cubes closes small solids")
{
    VoxelGrid one(3, 3, 3);
    one.set(1, 1, 1, true);
    const auto r1 = validate(marching_cubes(one));
    CHECK(r1.ok());
    CHECK(r1.euler_characteristic == 2);

    const VoxelGrid two = block(4, 1, 3);
    const double cell = 2.0 / 4.0;
    const auto r2 = validate(marching_cubes(two));
    CHECK(r2.ok());
    CHECK(r2.volume > cell * cell * cell);
    CHECK(r2.volume < 8 * cell * cell * cell);
}

TEST_CASE("smoothing")
{
    const TriMesh sphere = make_icosphere(1.0, 3);
    const TriMesh same = smooth(sphere, {0, 0.5, -0.53});
    CHECK(same.vertices == sphere.vertices);

    const TriMesh s = smooth(sphere, TaubinParams{});
    CHECK(s.faces == sphere.faces);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.vertices.size(); ++i)
        worst = std::max(worst, (s.vertices[i] - sphere.vertices[i]).norm());
    CHECK(worst < 0.05);
}

TEST_CASE("pipeline meshes are closed single-component manifolds")
{
    for (const TriMesh& m : cppn_meshes(40, 21)) {
        const auto r = validate(m);
        REQUIRE(r.ok());
        CHECK(r.volume > 0.0);
        CHECK(r.volume <= 8.0);
    }
}

TEST_CASE("rescale to gripper")
{
    const TriMesh box = make_box({200, 300, 250});
    const TriMesh s = rescale_to_gripper(box, 75.0, 0.8);
    CHECK(bounding_box(s).min_extent() == doctest::Approx(60.0).epsilon(1e-12));
    const TriMesh again = rescale_to_gripper(s, 75.0, 0.8);
    CHECK(bounding_box(again).extent().isApprox(bounding_box(s).extent(), 1e-12));

    for (const TriMesh& m : cppn_meshes(20, 5)) {
        const double got = bounding_box(rescale_to_gripper(m, 75.0, 0.8)).min_extent();
        CHECK(std::abs(got - 60.0) / 60.0 < 1e-9);
    }
    CHECK_THROWS_AS(rescale_to_gripper(box, -1.0, 0.8), std::invalid_argument);
    CHECK_THROWS_AS(rescale_to_gripper(box, 75.0, 1.5), std::invalid_argument);
    TriMesh flat = box;
    for (auto& v : flat.vertices)
        v.z() = 0.0;
    CHECK_THROWS_AS(rescale_to_gripper(flat, 75.0, 0.8), StructuralError);
}

TEST_CASE("validation flags open surfaces")
{
    TriMesh m = make_icosphere(1.0, 1);
    m.faces.pop_back();
    const auto r = validate(m);
    CHECK_FALSE(r.watertight);
    CHECK(r.boundary_edges == 3);

    const auto tube = validate(make_open_cylinder(1.0, 2.0, 16));
    CHECK_FALSE(tube.watertight);
    CHECK(tube.boundary_edges > 0);
}
