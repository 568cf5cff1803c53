#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "egad/archive.hpp"
#include "egad/config.hpp"

namespace egad {

/// Features and cached shape data of one evaluated genome.
struct Evaluation {
    std::shared_ptr<const TriMesh> mesh; // unit scale
    std::shared_ptr<const ReebSignature> signature;
    double complexity = 0.0;
    double quality = 0.0;
    int grasp_count = 0;
};

/// Morphology, complexity, grasp quality at gripper scale and the shape
/// signature. Noise streams derive from (seed, generation, index). Empty
/// when the genome yields no usable shape.
std::optional<Evaluation> evaluate_genome(const CppnGenome& genome, const RunConfig& config, int generation, int index);

/// Rebuilds mesh and signature for a stored occupant; features are kept.
void rebuild_shape(Occupant& occupant, const RunConfig& config);

struct GenerationReport {
    int generation = 0;
    int offspring = 0;
    int rejects = 0;
    int inserted = 0; // still present after the batch
    int evictions = 0;
    double cell_coverage = 0.0;
    double capacity_coverage = 0.0;
};

struct CheckpointStats {
    int generation = 0;
    std::size_t occupants = 0;
    double cell_coverage = 0.0;
    double capacity_coverage = 0.0;
    long long rejects = 0;
    int violations = 0;
};

/// Calls fn(i) for i in [0, n) on up to `threads` workers. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

class Evolution {
public:
    explicit Evolution(RunConfig config);

    /// Restores from <dir>/manifest.json, recomputing meshes and signatures.
    static Evolution resume(const std::string& dir);
    /// Without rebuilding, occupants carry no mesh or signature; enough for
    /// statistics and heatmaps.
    static Evolution load(const std::string& dir, bool rebuild_shapes);

    const RunConfig& config() const { return config_; }
    RunConfig& mutable_config() { return config_; }
    const Archive& archive() const { return archive_; }
    int generation() const { return generation_; }
    long long next_id() const { return next_id_; }
    long long rejects() const { return rejects_; }
    const std::vector<CheckpointStats>& history() const { return history_; }

    /// Seeds the archive with `population` random genomes that survive the
    /// morphology pipeline, within init_attempt_factor * population tries.
    /// Throws std::runtime_error if not a single genome survives.
    GenerationReport initialize();

    GenerationReport step();

    /// Initializes if needed, then steps to `config.steps` (or `stop_at`,
    /// whichever is smaller), checkpointing into `dir`. Objects are exported
    /// once the configured step count is reached. Returns false when stopped
    /// early by request_stop().
    bool run(const std::string& dir, std::optional<int> stop_at = std::nullopt,
             const std::function<void(const GenerationReport&)>& on_step = {});

    nlohmann::json manifest() const;
    /// Refreshes diversity, records stats, and writes manifest.json atomically.
    void checkpoint(const std::string& dir);
    /// Rescaled meshes under meshes/ and genome records under genomes/.
    void export_objects(const std::string& dir) const;

    static void request_stop() { stop_requested().store(true); }
    static void clear_stop() { stop_requested().store(false); }

private:
    static std::atomic<bool>& stop_requested();
    Occupant make_occupant(CppnGenome genome, Evaluation eval, int generation, int index);

    RunConfig config_;
    Archive archive_;
    int generation_ = 0;
    long long next_id_ = 0;
    long long rejects_ = 0;
    std::vector<CheckpointStats> history_;
};

} // namespace egad
