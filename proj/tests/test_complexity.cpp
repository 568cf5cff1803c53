#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "egad/complexity.hpp"
#include "egad/errors.hpp"
#include "egad/morphology.hpp"
#include "egad/primitives.hpp"

using namespace egad;

namespace {

int euler_from_counts(const TriMesh& m)
{
    std::set<std::pair<int, int>> edges;
    for (const auto& f : m.faces)
        for (int k = 0; k < 3; ++k) {
            const int a = f[static_cast<std::size_t>(k)], b = f[static_cast<std::size_t>((k + 1) % 3)];
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    return static_cast<int>(m.vertices.size()) - static_cast<int>(edges.size()) + static_cast<int>(m.faces.size());
}

Eigen::Affine3d random_similarity(Rng& rng)
{
    const Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    Eigen::Affine3d xf = Eigen::Affine3d::Identity();
    xf.translate(Vec3(rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)));
    xf.rotate(q.normalized().toRotationMatrix());
    xf.scale(rng.uniform(0.1, 40.0));
    return xf;
}

} // namespace

TEST_CASE("cube corners and tetrahedron vertices")
{
    const TriMesh box = make_box({2, 3, 4});
    const auto d = angular_deficits(box);
    REQUIRE(d.size() == 8);
    for (double v : d)
        CHECK(std::abs(v - std::numbers::pi / 2) < 1e-12);

    const auto t = angular_deficits(make_tetrahedron(1.0));
    REQUIRE(t.size() == 4);
    for (double v : t)
        CHECK(std::abs(v - std::numbers::pi) < 1e-12);
}

TEST_CASE("isolated vertex is a structural error")
{
    TriMesh m = make_tetrahedron(1.0);
    m.vertices.emplace_back(5, 5, 5);
    CHECK_THROWS_AS(angular_deficits(m), StructuralError);
}

TEST_CASE("deficits obey Gauss-Bonnet")
{
    std::vector<TriMesh> meshes{make_icosphere(1, 3), make_torus(2, 0.6, 32, 16), make_box({1, 2, 3}, 3), make_cylinder(1, 3, 24, 3)};
    Rng rng(12);
    while (meshes.size() < 24) {
        CppnGenome g = random_genome(rng);
        for (int i = 0; i < 6; ++i)
            g = mutate(g, EvolutionRates{}, rng);
        try {
            meshes.push_back(build_morphology(g, MorphologyParams{}));
        } catch (const RejectIndividual&) {
        }
    }
    for (const auto& m : meshes) {
        double total = 0.0;
        for (double v : angular_deficits(m))
            total += v;
        CHECK(std::abs(total - 2 * std::numbers::pi * euler_from_counts(m)) < 1e-6);
    }
}

TEST_CASE("histogram and entropy")
{
    const auto h = deficit_histogram({0.1, 0.1, 0.1}, 512);
    double sum = 0.0;
    int support = 0;
    for (double p : h.probabilities) {
        CHECK(p >= 0.0);
        sum += p;
        support += p > 0;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(support == 1);
    CHECK(entropy(h.probabilities) == 0.0);

    CHECK(entropy(std::vector<double>(512, 1.0 / 512)) == doctest::Approx(std::log(512.0)).epsilon(1e-12));

    const auto wide = deficit_histogram({-7.0, 0.0, 7.0}, 512);
    CHECK(wide.clamped == 2);
    CHECK(wide.probabilities.front() > 0);
    CHECK(wide.probabilities.back() > 0);
}

TEST_CASE("complexity is similarity invariant and bounded")
{
    Rng rng(31);
    std::vector<TriMesh> meshes{make_icosphere(1, 3), make_torus(2, 0.6, 32, 16)};
    while (meshes.size() < 12) {
        CppnGenome g = random_genome(rng);
        for (int i = 0; i < 6; ++i)
            g = mutate(g, EvolutionRates{}, rng);
        try {
            meshes.push_back(build_morphology(g, MorphologyParams{}));
        } catch (const RejectIndividual&) {
        }
    }
    for (const auto& m : meshes) {
        const double h = shape_complexity(m);
        CHECK(h >= 0.0);
        CHECK(h <= std::log(512.0));
        for (int t = 0; t < 5; ++t)
            CHECK(std::abs(shape_complexity(transformed(m, random_similarity(rng))) - h) < 1e-9);
    }
}

TEST_CASE("noise raises complexity")
{
    const TriMesh smooth_sphere = make_icosphere(1.0, 3);
    TriMesh noisy = smooth_sphere;
    Rng rng(2);
    for (auto& v : noisy.vertices)
        v *= 1.0 + 0.05 * rng.uniform(-1, 1);
    CHECK(shape_complexity(noisy) > shape_complexity(smooth_sphere));
}
