#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "egad/genome.hpp"
#include "egad/mesh.hpp"

namespace egad {

/// Dense occupancy lattice over the cube [-1,1]^3; cell (i,j,k) covers the
/// i-th slab along x and so on.
class VoxelGrid {
public:
    VoxelGrid() = default;
    VoxelGrid(int nx, int ny, int nz);

    int nx() const { return dims_[0]; }
    int ny() const { return dims_[1]; }
    int nz() const { return dims_[2]; }
    std::array<int, 3> dims() const { return dims_; }
    std::size_t size() const { return cells_.size(); }

    bool in_bounds(int i, int j, int k) const { return i >= 0 && j >= 0 && k >= 0 && i < dims_[0] && j < dims_[1] && k < dims_[2]; }
    std::size_t index(int i, int j, int k) const
    {
        return (static_cast<std::size_t>(k) * static_cast<std::size_t>(dims_[1]) + static_cast<std::size_t>(j)) * static_cast<std::size_t>(dims_[0]) +
               static_cast<std::size_t>(i);
    }
    /// Out-of-bounds cells read as empty.
    bool at(int i, int j, int k) const { return in_bounds(i, j, k) && cells_[index(i, j, k)] != 0; }
    void set(int i, int j, int k, bool v) { cells_[index(i, j, k)] = v ? 1 : 0; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }

    /// Cell-centre coordinate along an axis of n cells spanning [-1,1].
    static double center(int i, int n) { return -1.0 + (static_cast<double>(i) + 0.5) * 2.0 / static_cast<double>(n); }

    bool operator==(const VoxelGrid&) const = default;

private:
    std::array<int, 3> dims_{0, 0, 0};
    std::vector<std::uint8_t> cells_;
};

/// Occupied iff the CPPN output exceeds `threshold` at the cell centre.
VoxelGrid render_voxels(const CppnGenome& genome, std::array<int, 3> resolution, double threshold);

/// Keeps the largest face-connected (6-neighbourhood) component; ties go to
/// the component whose first voxel in storage order comes first. Throws
/// RejectIndividual on an empty grid.
VoxelGrid largest_component(const VoxelGrid& grid);

VoxelGrid erode(const VoxelGrid& grid, int radius);
VoxelGrid dilate(const VoxelGrid& grid, int radius);

/// Erosion then dilation with a (2r+1)^3 box element. Throws
/// RejectIndividual when nothing survives.
VoxelGrid morphological_open(const VoxelGrid& grid, int radius);

/// Fills empty cells that cannot reach the grid border through empty cells
/// (26-neighbourhood), so the solid has no internal voids.
VoxelGrid fill_cavities(const VoxelGrid& grid);

/// Surface of the occupied cells, the grid implicitly padded by one empty
/// layer. Vertices sit on lattice edge midpoints. Ambiguous faces separate
/// occupied corners, which pairs 6-connected solids with 26-connected
/// background and yields a closed, manifold, outward-oriented surface.
TriMesh marching_cubes(const VoxelGrid& grid);

struct TaubinParams {
    int iterations = 10;
    double lambda = 0.5;
    double mu = -0.53;
};

TriMesh smooth(const TriMesh& mesh, const TaubinParams& params);

/// Uniformly scales about the bounding-box centre so the smallest box
/// dimension equals fraction * gripper_width. Throws std::invalid_argument
/// for bad parameters and StructuralError for a flat mesh.
TriMesh rescale_to_gripper(const TriMesh& mesh, double gripper_width, double fraction = 0.8);

/// Same rule without the fraction <= 1 restriction; used by size sweeps.
TriMesh scale_min_extent(const TriMesh& mesh, double target_min_extent);

struct MorphologyParams {
    std::array<int, 3> resolution{25, 25, 25};
    double threshold = 0.5;
    int open_radius = 1;
    TaubinParams smoothing;
};

/// render -> largest component -> open -> largest component -> fill voids
/// -> marching cubes -> smooth. Returns a mesh passing validate().ok() or
/// throws RejectIndividual.
TriMesh build_morphology(const CppnGenome& genome, const MorphologyParams& params);

} // namespace egad
