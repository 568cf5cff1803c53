#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "egad/rng.hpp"

namespace egad {

enum class Activation { Sin, Sigmoid, Gaussian, Identity };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);
double apply_activation(Activation a, double z);

struct NodeGene {
    int id = 0;
    Activation activation = Activation::Identity;
    double bias = 0.0;
    double response = 1.0;

    bool operator==(const NodeGene&) const = default;
};

/// A connection is identified by its (source, target) pair; that pair is the
/// innovation key used to align genes during crossover.
struct ConnectionGene {
    int source = 0;
    int target = 0;
    double weight = 0.0;
    bool enabled = true;

    bool operator==(const ConnectionGene&) const = default;
};

/// CPPN query point: x, y, z followed by the four radial distances.
using CppnInput = std::array<double, 7>;

CppnInput cppn_input(double x, double y, double z);

/// Evolvable CPPN. Node ids 0..6 are the fixed inputs (x, y, z, rxy, rxz,
/// ryz, rxyz), id 7 is the single output, hidden nodes start at 8.
///
/// The graph over *all* connections (enabled or not) is kept acyclic, so
/// re-enabling a gene during crossover or mutation can never form a cycle.
class CppnGenome {
public:
    static constexpr int kInputCount = 7;
    static constexpr int kOutputId = 7;
    static constexpr int kFirstHiddenId = 8;

    /// Validates ids and acyclicity; throws StructuralError.
    CppnGenome(std::vector<NodeGene> nodes, std::vector<ConnectionGene> connections, int next_node_id);

    const std::vector<NodeGene>& nodes() const { return nodes_; }
    const std::vector<ConnectionGene>& connections() const { return connections_; }
    int next_node_id() const { return next_node_id_; }

    const NodeGene* find_node(int id) const;
    const ConnectionGene* find_connection(int source, int target) const;
    std::size_t hidden_count() const { return nodes_.size() - 1; }
    std::size_t enabled_count() const;

    static bool is_input(int id) { return id >= 0 && id < kInputCount; }

    bool operator==(const CppnGenome&) const = default;

private:
    std::vector<NodeGene> nodes_;             // output + hidden, sorted by id
    std::vector<ConnectionGene> connections_; // sorted by (source, target)
    int next_node_id_;
};

/// True when the connection set (enabled and disabled) has no directed cycle.
bool is_acyclic(std::span<const ConnectionGene> connections);

/// Feed-forward program compiled from a genome for repeated queries.
class CompiledCppn {
public:
    explicit CompiledCppn(const CppnGenome& genome);
    double operator()(const CppnInput& in) const;

private:
    struct Link {
        int source_slot;
        double weight;
    };
    struct Step {
        int slot;
        Activation activation;
        double bias;
        double response;
        std::vector<Link> inputs;
    };
    std::vector<Step> steps_; // topological order; output is last
    int slot_count_ = 0;
    int output_slot_ = 0;
};

double evaluate(const CppnGenome& genome, const CppnInput& point);

struct EvolutionRates {
    double crossover = 0.5;
    double node_add = 0.15;
    double node_delete = 0.1;
    double connection_add = 0.2;
    double connection_delete = 0.1;
    double weight_perturb = 0.8;
    double weight_replace = 0.1;
    double weight_stddev = 0.5;
    double bias_perturb = 0.7;
    double bias_stddev = 0.5;
    double activation_swap = 0.1;

    static EvolutionRates none();
};

CppnGenome random_genome(Rng& rng);
CppnGenome mutate(const CppnGenome& genome, const EvolutionRates& rates, Rng& rng);
CppnGenome crossover(const CppnGenome& a, const CppnGenome& b, Rng& rng);

nlohmann::json to_json(const CppnGenome& genome);
CppnGenome genome_from_json(const nlohmann::json& j);

} // namespace egad
