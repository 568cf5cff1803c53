#include "egad/genome.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "egad/errors.hpp"

namespace egad {
namespace {

constexpr double kWeightLimit = 30.0;
constexpr std::array kActivations{Activation::Sin, Activation::Sigmoid, Activation::Gaussian, Activation::Identity};

Activation random_activation(Rng& rng) { return kActivations[rng.index(kActivations.size())]; }

bool connection_less(const ConnectionGene& a, const ConnectionGene& b)
{
    return a.source != b.source ? a.source < b.source : a.target < b.target;
}

// Kahn's algorithm over the given connections; returns the node order or an
// empty vector when a cycle exists.
std::vector<int> topological_order(std::span<const ConnectionGene> connections, bool enabled_only, const std::vector<int>& node_ids)
{
    std::map<int, int> indegree;
    std::map<int, std::vector<int>> out;
    for (int id : node_ids)
        indegree[id] = 0;
    for (const auto& c : connections) {
        if (enabled_only && !c.enabled)
            continue;
        indegree[c.source];
        ++indegree[c.target];
        out[c.source].push_back(c.target);
    }
    std::vector<int> ready;
    for (auto& [id, d] : indegree)
        if (d == 0)
            ready.push_back(id);
    std::vector<int> order;
    // Lowest id first keeps evaluation order canonical.
    std::sort(ready.begin(), ready.end(), std::greater<>());
    while (!ready.empty()) {
        const int id = ready.back();
        ready.pop_back();
        order.push_back(id);
        for (int t : out[id])
            if (--indegree[t] == 0) {
                ready.push_back(t);
                std::sort(ready.begin(), ready.end(), std::greater<>());
            }
    }
    if (order.size() != indegree.size())
        return {};
    return order;
}

bool reaches(const std::vector<ConnectionGene>& connections, int from, int to)
{
    std::vector<int> stack{from};
    std::vector<int> seen;
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        if (n == to)
            return true;
        if (std::find(seen.begin(), seen.end(), n) != seen.end())
            continue;
        seen.push_back(n);
        for (const auto& c : connections)
            if (c.source == n)
                stack.push_back(c.target);
    }
    return false;
}

double clamp_weight(double w) { return std::clamp(w, -kWeightLimit, kWeightLimit); }

} // namespace

const char* activation_name(Activation a)
{
    switch (a) {
    case Activation::Sin: return "sin";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Gaussian: return "gaussian";
    case Activation::Identity: return "identity";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name)
{
    for (Activation a : kActivations)
        if (name == activation_name(a))
            return a;
    throw StructuralError("unknown activation '" + name + "'");
}

double apply_activation(Activation a, double z)
{
    switch (a) {
    case Activation::Sin: return std::sin(z);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::Gaussian: return std::exp(-z * z);
    case Activation::Identity: return z;
    }
    return z;
}

CppnInput cppn_input(double x, double y, double z)
{
    return {x, y, z, std::sqrt(x * x + y * y), std::sqrt(x * x + z * z), std::sqrt(y * y + z * z), std::sqrt(x * x + y * y + z * z)};
}

bool is_acyclic(std::span<const ConnectionGene> connections)
{
    return !topological_order(connections, false, {}).empty() || connections.empty();
}

CppnGenome::CppnGenome(std::vector<NodeGene> nodes, std::vector<ConnectionGene> connections, int next_node_id)
    : nodes_(std::move(nodes)), connections_(std::move(connections)), next_node_id_(next_node_id)
{
    std::sort(nodes_.begin(), nodes_.end(), [](const NodeGene& a, const NodeGene& b) { return a.id < b.id; });
    std::sort(connections_.begin(), connections_.end(), connection_less);

    if (nodes_.empty() || nodes_.front().id != kOutputId)
        throw StructuralError("genome must contain the output node");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (nodes_[i].id < kFirstHiddenId)
            throw StructuralError("hidden node id below the reserved range");
        if (nodes_[i].id == nodes_[i - 1].id)
            throw StructuralError("duplicate node id");
    }
    if (next_node_id_ <= nodes_.back().id)
        next_node_id_ = std::max(nodes_.back().id + 1, kFirstHiddenId);
    for (std::size_t i = 0; i < connections_.size(); ++i) {
        const auto& c = connections_[i];
        if (i > 0 && !connection_less(connections_[i - 1], c))
            throw StructuralError("duplicate connection");
        if (!is_input(c.source) && !find_node(c.source))
            throw StructuralError("connection from unknown node");
        if (c.source == kOutputId)
            throw StructuralError("output node cannot be a connection source");
        if (is_input(c.target) || !find_node(c.target))
            throw StructuralError("connection into an input or unknown node");
        if (!std::isfinite(c.weight))
            throw StructuralError("non-finite weight");
    }
    if (!is_acyclic(connections_))
        throw StructuralError("cycle detected in connection graph");
}

const NodeGene* CppnGenome::find_node(int id) const
{
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id, [](const NodeGene& n, int v) { return n.id < v; });
    return it != nodes_.end() && it->id == id ? &*it : nullptr;
}

const ConnectionGene* CppnGenome::find_connection(int source, int target) const
{
    ConnectionGene key{source, target};
    auto it = std::lower_bound(connections_.begin(), connections_.end(), key, connection_less);
    return it != connections_.end() && it->source == source && it->target == target ? &*it : nullptr;
}

std::size_t CppnGenome::enabled_count() const
{
    return static_cast<std::size_t>(std::count_if(connections_.begin(), connections_.end(), [](const auto& c) { return c.enabled; }));
}

CompiledCppn::CompiledCppn(const CppnGenome& genome)
{
    std::vector<int> ids;
    for (int i = 0; i < CppnGenome::kInputCount; ++i)
        ids.push_back(i);
    for (const auto& n : genome.nodes())
        ids.push_back(n.id);
    const auto order = topological_order(genome.connections(), true, ids);
    if (order.empty())
        throw StructuralError("cycle detected while compiling CPPN");

    std::unordered_map<int, int> slot;
    for (int i = 0; i < CppnGenome::kInputCount; ++i)
        slot[i] = i;
    int next = CppnGenome::kInputCount;
    for (int id : order)
        if (!CppnGenome::is_input(id))
            slot[id] = next++;
    slot_count_ = next;

    for (int id : order) {
        if (CppnGenome::is_input(id))
            continue;
        const NodeGene* node = genome.find_node(id);
        Step step{slot[id], node->activation, node->bias, node->response, {}};
        for (const auto& c : genome.connections())
            if (c.enabled && c.target == id)
                step.inputs.push_back({slot[c.source], c.weight});
        steps_.push_back(std::move(step));
    }
    output_slot_ = slot[CppnGenome::kOutputId];
}

double CompiledCppn::operator()(const CppnInput& in) const
{
    // Small networks: a stack buffer would do, but slot counts are unbounded.
    std::vector<double> values(static_cast<std::size_t>(slot_count_), 0.0);
    std::copy(in.begin(), in.end(), values.begin());
    for (const auto& s : steps_) {
        double sum = 0.0;
        for (const auto& l : s.inputs)
            sum += l.weight * values[static_cast<std::size_t>(l.source_slot)];
        values[static_cast<std::size_t>(s.slot)] = apply_activation(s.activation, s.bias + s.response * sum);
    }
    return values[static_cast<std::size_t>(output_slot_)];
}

double evaluate(const CppnGenome& genome, const CppnInput& point)
{
    return CompiledCppn(genome)(point);
}

EvolutionRates EvolutionRates::none()
{
    EvolutionRates r;
    r.crossover = r.node_add = r.node_delete = r.connection_add = r.connection_delete = 0.0;
    r.weight_perturb = r.weight_replace = r.bias_perturb = r.activation_swap = 0.0;
    return r;
}

CppnGenome random_genome(Rng& rng)
{
    std::vector<NodeGene> nodes{{CppnGenome::kOutputId, random_activation(rng), 0.0, 1.0}};
    std::vector<ConnectionGene> connections;
    for (int i = 0; i < CppnGenome::kInputCount; ++i)
        connections.push_back({i, CppnGenome::kOutputId, rng.uniform(-1.0, 1.0), true});
    return CppnGenome(std::move(nodes), std::move(connections), CppnGenome::kFirstHiddenId);
}

CppnGenome mutate(const CppnGenome& genome, const EvolutionRates& rates, Rng& rng)
{
    auto nodes = genome.nodes();
    auto connections = genome.connections();
    int next_id = genome.next_node_id();

    if (rng.bernoulli(rates.node_add)) {
        std::vector<std::size_t> enabled;
        for (std::size_t i = 0; i < connections.size(); ++i)
            if (connections[i].enabled)
                enabled.push_back(i);
        if (!enabled.empty()) {
            auto& split = connections[enabled[rng.index(enabled.size())]];
            split.enabled = false;
            const int id = next_id++;
            nodes.push_back({id, random_activation(rng), 0.0, 1.0});
            const ConnectionGene old = split;
            connections.push_back({old.source, id, 1.0, true});
            connections.push_back({id, old.target, old.weight, true});
        }
    }

    if (rng.bernoulli(rates.node_delete) && nodes.size() > 1) {
        const int victim = nodes[1 + rng.index(nodes.size() - 1)].id;
        std::erase_if(nodes, [&](const NodeGene& n) { return n.id == victim; });
        std::erase_if(connections, [&](const ConnectionGene& c) { return c.source == victim || c.target == victim; });
    }

    if (rng.bernoulli(rates.connection_add)) {
        std::vector<int> sources, targets;
        for (int i = 0; i < CppnGenome::kInputCount; ++i)
            sources.push_back(i);
        for (const auto& n : nodes) {
            targets.push_back(n.id);
            if (n.id != CppnGenome::kOutputId)
                sources.push_back(n.id);
        }
        const int s = sources[rng.index(sources.size())];
        const int t = targets[rng.index(targets.size())];
        auto existing = std::find_if(connections.begin(), connections.end(), [&](const auto& c) { return c.source == s && c.target == t; });
        if (existing != connections.end())
            existing->enabled = true;
        else if (s != t && !reaches(connections, t, s))
            connections.push_back({s, t, rng.uniform(-1.0, 1.0), true});
    }

    if (rng.bernoulli(rates.connection_delete) && !connections.empty())
        connections.erase(connections.begin() + static_cast<std::ptrdiff_t>(rng.index(connections.size())));

    for (auto& c : connections) {
        const double r = rng.uniform();
        if (r < rates.weight_perturb)
            c.weight = clamp_weight(c.weight + rng.normal(0.0, rates.weight_stddev));
        else if (r < rates.weight_perturb + rates.weight_replace)
            c.weight = rng.uniform(-1.0, 1.0);
    }
    for (auto& n : nodes) {
        if (rng.bernoulli(rates.bias_perturb))
            n.bias = clamp_weight(n.bias + rng.normal(0.0, rates.bias_stddev));
        if (rng.bernoulli(rates.activation_swap))
            n.activation = random_activation(rng);
    }
    return CppnGenome(std::move(nodes), std::move(connections), next_id);
}

CppnGenome crossover(const CppnGenome& a, const CppnGenome& b, Rng& rng)
{
    // No per-individual fitness exists across archive cells, so the parent
    // supplying disjoint and excess genes is chosen uniformly.
    const bool a_primary = rng.bernoulli(0.5);
    const CppnGenome& primary = a_primary ? a : b;
    const CppnGenome& other = a_primary ? b : a;

    std::vector<NodeGene> nodes;
    for (const auto& n : primary.nodes()) {
        const NodeGene* match = other.find_node(n.id);
        nodes.push_back(match && rng.bernoulli(0.5) ? *match : n);
    }
    std::vector<ConnectionGene> connections;
    for (const auto& c : primary.connections()) {
        const ConnectionGene* match = other.find_connection(c.source, c.target);
        connections.push_back(match && rng.bernoulli(0.5) ? *match : c);
    }
    return CppnGenome(std::move(nodes), std::move(connections), std::max(a.next_node_id(), b.next_node_id()));
}

nlohmann::json to_json(const CppnGenome& genome)
{
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : genome.nodes())
        nodes.push_back({{"id", n.id}, {"activation", activation_name(n.activation)}, {"bias", n.bias}, {"response", n.response}});
    nlohmann::json connections = nlohmann::json::array();
    for (const auto& c : genome.connections())
        connections.push_back({{"source", c.source}, {"target", c.target}, {"weight", c.weight}, {"enabled", c.enabled}});
    return {{"inputs", CppnGenome::kInputCount}, {"outputs", 1}, {"next_node_id", genome.next_node_id()}, {"nodes", nodes}, {"connections", connections}};
}

CppnGenome genome_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("inputs").get<int>() != CppnGenome::kInputCount || j.at("outputs").get<int>() != 1)
            throw StructuralError("genome arity mismatch");
        std::vector<NodeGene> nodes;
        for (const auto& n : j.at("nodes"))
            nodes.push_back({n.at("id").get<int>(), activation_from_name(n.at("activation").get<std::string>()), n.at("bias").get<double>(),
                             n.at("response").get<double>()});
        std::vector<ConnectionGene> connections;
        for (const auto& c : j.at("connections"))
            connections.push_back({c.at("source").get<int>(), c.at("target").get<int>(), c.at("weight").get<double>(), c.at("enabled").get<bool>()});
        return CppnGenome(std::move(nodes), std::move(connections), j.at("next_node_id").get<int>());
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(std::string("malformed genome record: ") + e.what());
    }
}

} // namespace egad
