#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "egad/config.hpp"
#include "egad/genome.hpp"
#include "egad/mesh.hpp"
#include "egad/rng.hpp"
#include "egad/similarity.hpp"

namespace egad {

struct Cell {
    int row = 0; // difficulty: 0 is easiest (highest quality)
    int col = 0; // complexity: 0 is simplest
    bool operator==(const Cell&) const = default;
};

/// Column from complexity, row from quality with the axis inverted so low
/// quality lands in high (difficult) rows. Out-of-range values clamp.
Cell feature_to_cell(double complexity, double quality, const FeatureRanges& ranges, int grid);

struct Occupant {
    long long id = -1;
    int generation = 0; // origin, used to re-derive evaluation streams
    int index = 0;
    CppnGenome genome{{NodeGene{CppnGenome::kOutputId}}, {}, CppnGenome::kFirstHiddenId};
    std::shared_ptr<const TriMesh> mesh; // unit scale, as built
    std::shared_ptr<const ReebSignature> signature;
    double complexity = 0.0;
    double quality = 0.0;
    int grasp_count = 0;
    double diversity = 1.0;
    Cell cell;
};

struct InsertionOutcome {
    long long id = -1;
    Cell cell;
    bool accepted = false; // the candidate is still present afterwards
    std::vector<long long> evicted;
};

class Archive {
public:
    Archive() = default;
    Archive(int grid, int capacity, FeatureRanges ranges, int diversity_k, double area_weight);

    int grid() const { return grid_; }
    int capacity() const { return capacity_; }
    const FeatureRanges& ranges() const { return ranges_; }
    int diversity_k() const { return k_; }

    const std::vector<Occupant>& cell(int row, int col) const { return cells_[index(row, col)]; }
    std::size_t size() const;
    bool empty() const { return size() == 0; }

    /// Row-major over cells, insertion order within a cell.
    std::vector<const Occupant*> occupants() const;

    /// Places the candidate by its features (the stored cell is
    /// overwritten), then evicts minimal-diversity occupants while the cell
    /// is over capacity. Ties evict the larger id.
    InsertionOutcome insert(Occupant candidate);

    /// Adds without evicting or recomputing anything; for restoring
    /// checkpoints.
    void restore(Occupant occupant);

    double distance(const Occupant& a, const Occupant& b) const;
    /// Mean distance to the k nearest other occupants of the whole archive.
    double diversity_of(const Occupant& target) const;
    void refresh_diversity();

    /// Uniform over occupants, or over occupied cells then occupants.
    std::vector<const Occupant*> sample_parents(int count, Rng& rng, ParentSampling mode = ParentSampling::Occupant) const;

    double cell_coverage() const;     // occupied cells / cells
    double capacity_coverage() const; // occupants / (cells * capacity)

    /// Occupants over capacity plus occupants whose features map elsewhere.
    int invariant_violations() const;

private:
    std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_) + static_cast<std::size_t>(col); }

    int grid_ = 25;
    int capacity_ = 4;
    FeatureRanges ranges_;
    int k_ = 10;
    double area_weight_ = 0.5;
    std::vector<std::vector<Occupant>> cells_;
    mutable std::unordered_map<std::uint64_t, double> distance_cache_;
};

struct EvalPick {
    std::string label; // letter: difficulty band A..G, digit: complexity band 0..6
    int band_row = 0;
    int band_col = 0;
    const Occupant* occupant = nullptr; // null for a vacant coarse cell
};

/// Coarse band of a fine index: floor(7 * index / grid).
int coarse_band(int index, int grid, int bands = 7);

/// One occupant per non-vacant coarse cell, chosen greedily in label order
/// to keep the set's minimum pairwise distance high, then refined twice.
std::vector<EvalPick> select_eval_set(const Archive& archive);

/// Minimum pairwise distance of the picked (non-vacant) occupants.
double min_pairwise_distance(const Archive& archive, const std::vector<const Occupant*>& chosen);

std::string label_for(int band_row, int band_col);

/// Occupancy counts and mean diversity per cell as CSV, rows = difficulty.
std::string heatmap_counts_csv(const Archive& archive);
std::string heatmap_diversity_csv(const Archive& archive);

/// "<rr><cc>_<idx>" with zero-padded row and column.
std::string object_stem(const Cell& cell, int index, int grid);

} // namespace egad
