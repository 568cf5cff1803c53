#include "egad/archive.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace egad {

Cell feature_to_cell(double complexity, double quality, const FeatureRanges& r, int grid)
{
    auto bin = [grid](double t) {
        if (std::isnan(t))
            return 0;
        const double scaled = std::floor(static_cast<double>(grid) * t);
        if (scaled <= 0.0)
            return 0;
        if (scaled >= grid - 1)
            return grid - 1;
        return static_cast<int>(scaled);
    };
    Cell c;
    c.col = bin((complexity - r.complexity_min) / (r.complexity_max - r.complexity_min));
    c.row = bin((r.quality_max - quality) / (r.quality_max - r.quality_min));
    return c;
}

Archive::Archive(int grid, int capacity, FeatureRanges ranges, int diversity_k, double area_weight)
    : grid_(grid), capacity_(capacity), ranges_(ranges), k_(diversity_k), area_weight_(area_weight),
      cells_(static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid))
{
    if (grid < 1 || capacity < 1 || diversity_k < 1)
        throw std::invalid_argument("Archive: grid, capacity and k must be positive");
}

std::size_t Archive::size() const
{
    std::size_t n = 0;
    for (const auto& c : cells_)
        n += c.size();
    return n;
}

std::vector<const Occupant*> Archive::occupants() const
{
    std::vector<const Occupant*> out;
    for (const auto& c : cells_)
        for (const auto& o : c)
            out.push_back(&o);
    return out;
}

double Archive::distance(const Occupant& a, const Occupant& b) const
{
    if (a.id == b.id)
        return 0.0;
    const auto lo = static_cast<std::uint64_t>(std::min(a.id, b.id));
    const auto hi = static_cast<std::uint64_t>(std::max(a.id, b.id));
    const std::uint64_t key = (lo << 32) | (hi & 0xffffffffULL);
    if (auto it = distance_cache_.find(key); it != distance_cache_.end())
        return it->second;
    const double d = dist(*a.signature, *b.signature, area_weight_);
    distance_cache_.emplace(key, d);
    return d;
}

double Archive::diversity_of(const Occupant& target) const
{
    std::vector<double> d;
    for (const auto& c : cells_)
        for (const auto& o : c)
            if (o.id != target.id)
                d.push_back(distance(target, o));
    return k_nearest_mean(std::move(d), k_);
}

void Archive::refresh_diversity()
{
    for (auto& c : cells_)
        for (auto& o : c)
            o.diversity = diversity_of(o);
}

InsertionOutcome Archive::insert(Occupant candidate)
{
    if (!candidate.signature)
        throw std::invalid_argument("Archive::insert: candidate has no signature");
    candidate.cell = feature_to_cell(candidate.complexity, candidate.quality, ranges_, grid_);
    InsertionOutcome out;
    out.id = candidate.id;
    out.cell = candidate.cell;
    auto& cell = cells_[index(candidate.cell.row, candidate.cell.col)];
    cell.push_back(std::move(candidate));
    cell.back().diversity = diversity_of(cell.back());

    while (static_cast<int>(cell.size()) > capacity_) {
        for (auto& o : cell)
            o.diversity = diversity_of(o);
        std::size_t victim = 0;
        for (std::size_t i = 1; i < cell.size(); ++i) {
            const auto& o = cell[i];
            const auto& v = cell[victim];
            if (o.diversity < v.diversity || (o.diversity == v.diversity && o.id > v.id))
                victim = i;
        }
        out.evicted.push_back(cell[victim].id);
        cell.erase(cell.begin() + static_cast<std::ptrdiff_t>(victim));
    }
    out.accepted = std::find(out.evicted.begin(), out.evicted.end(), out.id) == out.evicted.end();
    return out;
}

void Archive::restore(Occupant occupant)
{
    cells_[index(occupant.cell.row, occupant.cell.col)].push_back(std::move(occupant));
}

std::vector<const Occupant*> Archive::sample_parents(int count, Rng& rng, ParentSampling mode) const
{
    const auto all = occupants();
    if (all.empty())
        throw std::logic_error("sample_parents: archive is empty");
    std::vector<const Occupant*> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    if (mode == ParentSampling::Occupant) {
        for (int i = 0; i < count; ++i)
            out.push_back(all[rng.index(all.size())]);
        return out;
    }
    std::vector<const std::vector<Occupant>*> occupied;
    for (const auto& c : cells_)
        if (!c.empty())
            occupied.push_back(&c);
    for (int i = 0; i < count; ++i) {
        const auto& c = *occupied[rng.index(occupied.size())];
        out.push_back(&c[rng.index(c.size())]);
    }
    return out;
}

double Archive::cell_coverage() const
{
    std::size_t occupied = 0;
    for (const auto& c : cells_)
        occupied += c.empty() ? 0 : 1;
    return static_cast<double>(occupied) / static_cast<double>(cells_.size());
}

double Archive::capacity_coverage() const
{
    return static_cast<double>(size()) / (static_cast<double>(cells_.size()) * capacity_);
}

int Archive::invariant_violations() const
{
    int bad = 0;
    for (int r = 0; r < grid_; ++r)
        for (int c = 0; c < grid_; ++c) {
            const auto& cell = cells_[index(r, c)];
            bad += std::max(0, static_cast<int>(cell.size()) - capacity_);
            for (const auto& o : cell) {
                const Cell placed = feature_to_cell(o.complexity, o.quality, ranges_, grid_);
                if (!(placed == Cell{r, c}) || !(o.cell == Cell{r, c}))
                    ++bad;
            }
        }
    return bad;
}

int coarse_band(int index, int grid, int bands)
{
    return std::min(bands - 1, bands * index / grid);
}

std::string label_for(int band_row, int band_col)
{
    return std::string(1, static_cast<char>('A' + band_row)) + std::to_string(band_col);
}

double min_pairwise_distance(const Archive& archive, const std::vector<const Occupant*>& chosen)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < chosen.size(); ++i)
        for (std::size_t j = i + 1; j < chosen.size(); ++j)
            best = std::min(best, archive.distance(*chosen[i], *chosen[j]));
    return best;
}

std::vector<EvalPick> select_eval_set(const Archive& archive)
{
    constexpr int bands = 7;
    std::vector<std::vector<const Occupant*>> candidates(bands * bands);
    for (const Occupant* o : archive.occupants()) {
        const int br = coarse_band(o->cell.row, archive.grid(), bands);
        const int bc = coarse_band(o->cell.col, archive.grid(), bands);
        candidates[static_cast<std::size_t>(br * bands + bc)].push_back(o);
    }
    for (auto& list : candidates)
        std::sort(list.begin(), list.end(), [](const Occupant* a, const Occupant* b) { return a->id < b->id; });

    std::vector<const Occupant*> chosen(bands * bands, nullptr);
    // Min distance from a candidate to the chosen set, ignoring one slot.
    auto score = [&](const Occupant* c, std::size_t skip) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < chosen.size(); ++s)
            if (s != skip && chosen[s])
                m = std::min(m, archive.distance(*c, *chosen[s]));
        return m;
    };
    auto pick = [&](std::size_t slot) {
        const Occupant* best = nullptr;
        double best_score = -1.0;
        for (const Occupant* c : candidates[slot]) {
            double s = score(c, slot);
            // Nothing chosen yet: prefer the most diverse candidate.
            if (!std::isfinite(s))
                s = 1.0 + c->diversity;
            if (s > best_score) {
                best = c;
                best_score = s;
            }
        }
        chosen[slot] = best;
    };
    for (std::size_t slot = 0; slot < chosen.size(); ++slot)
        pick(slot);
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t slot = 0; slot < chosen.size(); ++slot)
            pick(slot);

    std::vector<EvalPick> out;
    for (int br = 0; br < bands; ++br)
        for (int bc = 0; bc < bands; ++bc)
            out.push_back({label_for(br, bc), br, bc, chosen[static_cast<std::size_t>(br * bands + bc)]});
    return out;
}

namespace {

std::string heatmap_header(int grid)
{
    std::string s = "difficulty_row\\complexity_col";
    for (int c = 0; c < grid; ++c)
        s += "," + std::to_string(c);
    return s + "\n";
}

} // namespace

std::string heatmap_counts_csv(const Archive& archive)
{
    std::string s = heatmap_header(archive.grid());
    for (int r = 0; r < archive.grid(); ++r) {
        s += std::to_string(r);
        for (int c = 0; c < archive.grid(); ++c)
            s += "," + std::to_string(archive.cell(r, c).size());
        s += "\n";
    }
    return s;
}

std::string heatmap_diversity_csv(const Archive& archive)
{
    std::string s = heatmap_header(archive.grid());
    char buf[32];
    for (int r = 0; r < archive.grid(); ++r) {
        s += std::to_string(r);
        for (int c = 0; c < archive.grid(); ++c) {
            const auto& cell = archive.cell(r, c);
            double mean = 0.0;
            for (const auto& o : cell)
                mean += o.diversity;
            if (!cell.empty())
                mean /= static_cast<double>(cell.size());
            std::snprintf(buf, sizeof buf, ",%.6f", mean);
            s += buf;
        }
        s += "\n";
    }
    return s;
}

std::string object_stem(const Cell& cell, int index, int grid)
{
    const int width = grid > 10 ? static_cast<int>(std::to_string(grid - 1).size()) : 1;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%0*d%0*d_%d", std::max(width, 2), cell.row, std::max(width, 2), cell.col, index);
    return buf;
}

} // namespace egad
