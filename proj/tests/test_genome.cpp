#include <doctest.h>

#include <cmath>

#include "egad/errors.hpp"
#include "egad/genome.hpp"

using namespace egad;

namespace {

CppnGenome single_link(int source, double weight, Activation act = Activation::Identity)
{
    return CppnGenome({{CppnGenome::kOutputId, act, 0.0, 1.0}}, {{source, CppnGenome::kOutputId, weight, true}}, CppnGenome::kFirstHiddenId);
}

// Straightforward recursive forward pass over enabled connections.
double forward(const CppnGenome& g, const CppnInput& in, int node)
{
    if (CppnGenome::is_input(node))
        return in[static_cast<std::size_t>(node)];
    const NodeGene* n = g.find_node(node);
    double sum = 0.0;
    for (const auto& c : g.connections())
        if (c.enabled && c.target == node)
            sum += c.weight * forward(g, in, c.source);
    return apply_activation(n->activation, n->bias + n->response * sum);
}

CppnGenome evolved(std::uint64_t seed, int rounds)
{
    Rng rng(seed);
    CppnGenome g = random_genome(rng);
    EvolutionRates rates;
    rates.node_add = 0.5;
    rates.connection_add = 0.5;
    for (int i = 0; i < rounds; ++i)
        g = mutate(g, rates, rng);
    return g;
}

} // namespace

TEST_CASE("random genome is the minimal topology")
{
    Rng rng(0);
    const CppnGenome g = random_genome(rng);
    CHECK(g.connections().size() == 7);
    CHECK(g.enabled_count() == 7);
    CHECK(g.nodes().size() == 1);
    for (const auto& c : g.connections()) {
        CHECK(c.target == CppnGenome::kOutputId);
        CHECK(c.weight >= -1.0);
        CHECK(c.weight <= 1.0);
    }
    Rng again(0);
    CHECK(random_genome(again) == g);
}

TEST_CASE("random genomes are acyclic")
{
    for (std::uint64_t s = 0; s < 1000; ++s) {
        Rng rng(s);
        REQUIRE(is_acyclic(random_genome(rng).connections()));
    }
}

TEST_CASE("evaluate: zero and identity networks")
{
    const CppnGenome zero({{CppnGenome::kOutputId, Activation::Identity, 0.0, 1.0}}, {}, CppnGenome::kFirstHiddenId);
    CHECK(evaluate(zero, cppn_input(0.3, -0.2, 0.9)) == 0.0);
    CHECK(evaluate(single_link(0, 1.0), cppn_input(0.5, 0.1, 0.2)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("radial inputs")
{
    const CppnInput in = cppn_input(0.3, 0.4, 1.2);
    CHECK(in[3] == doctest::Approx(0.5));
    CHECK(in[4] == doctest::Approx(std::sqrt(0.09 + 1.44)));
    CHECK(in[5] == doctest::Approx(std::sqrt(0.16 + 1.44)));
    CHECK(in[6] == doctest::Approx(1.3));
}

TEST_CASE("compiled evaluation matches a recursive forward pass")
{
    for (std::uint64_t s = 40; s < 60; ++s) {
        const CppnGenome g = evolved(s, 30);
        const CompiledCppn net(g);
        Rng rng(s);
        for (int t = 0; t < 20; ++t) {
            const CppnInput in = cppn_input(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
            CHECK(net(in) == doctest::Approx(forward(g, in, CppnGenome::kOutputId)).epsilon(1e-12));
        }
    }
}

TEST_CASE("evaluate is even in x without direct x links")
{
    for (std::uint64_t s = 0; s < 20; ++s) {
        const CppnGenome base = evolved(s, 15);
        std::vector<ConnectionGene> links = base.connections();
        for (auto& c : links)
            if (c.source == 0)
                c.weight = 0.0;
        const CppnGenome g(base.nodes(), links, base.next_node_id());
        CHECK(evaluate(g, cppn_input(0.4, -0.3, 0.7)) == evaluate(g, cppn_input(-0.4, -0.3, 0.7)));
    }
}

TEST_CASE("constructor rejects cycles")
{
    std::vector<NodeGene> nodes{{7, Activation::Identity, 0, 1}, {8, Activation::Sin, 0, 1}, {9, Activation::Sin, 0, 1}};
    std::vector<ConnectionGene> links{{0, 8, 1, true}, {8, 9, 1, true}, {9, 8, 1, false}, {9, 7, 1, true}};
    CHECK_THROWS_AS(CppnGenome(nodes, links, 10), StructuralError);
}

TEST_CASE("mutate with zero rates copies the parent")
{
    Rng rng(5);
    const CppnGenome g = evolved(3, 20);
    CHECK(mutate(g, EvolutionRates::none(), rng) == g);
}

TEST_CASE("node add splits one connection")
{
    Rng rng(11);
    const CppnGenome g = random_genome(rng);
    EvolutionRates r = EvolutionRates::none();
    r.node_add = 1.0;
    const CppnGenome child = mutate(g, r, rng);
    CHECK(child.hidden_count() == 1);
    CHECK(child.connections().size() == 9);
    CHECK(child.enabled_count() == 8);
    const int hidden = CppnGenome::kFirstHiddenId;
    int in = 0, out = 0;
    for (const auto& c : child.connections()) {
        in += c.target == hidden;
        out += c.source == hidden;
    }
    CHECK(in == 1);
    CHECK(out == 1);
    CHECK(g.connections().size() == 7);
}

TEST_CASE("long mutation chains stay acyclic")
{
    Rng rng(99);
    CppnGenome g = random_genome(rng);
    EvolutionRates r;
    for (int i = 0; i < 10000; ++i) {
        g = mutate(g, r, rng);
        REQUIRE(is_acyclic(g.connections()));
    }
}

TEST_CASE("crossover")
{
    const CppnGenome a = evolved(1, 25), b = evolved(2, 25);
    Rng rng(7);
    CHECK(crossover(a, a, rng) == a);

    for (int t = 0; t < 1000; ++t) {
        const CppnGenome x = evolved(static_cast<std::uint64_t>(t), 8);
        const CppnGenome y = evolved(static_cast<std::uint64_t>(t + 5000), 8);
        const CppnGenome child = crossover(x, y, rng);
        REQUIRE(is_acyclic(child.connections()));
        for (const auto& c : child.connections())
            REQUIRE((x.find_connection(c.source, c.target) || y.find_connection(c.source, c.target)));
        for (const auto& n : child.nodes())
            REQUIRE((x.find_node(n.id) || y.find_node(n.id)));
        CHECK(std::isfinite(evaluate(child, cppn_input(0.1, 0.2, 0.3))));
    }
}

TEST_CASE("json round trip")
{
    const CppnGenome g = evolved(17, 40);
    CHECK(genome_from_json(to_json(g)) == g);
    CHECK(genome_from_json(nlohmann::json::parse(to_json(g).dump())) == g);
}
