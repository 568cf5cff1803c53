#pragma once

#include <string>

#include "egad/mesh.hpp"

namespace egad {

/// Binary STL. Coordinates are stored as 32-bit floats.
void write_stl(const TriMesh& mesh, const std::string& path);
void write_obj(const TriMesh& mesh, const std::string& path);

/// Binary or ASCII STL; coincident corners are welded into shared vertices.
/// Throws InputError on unreadable or malformed files.
TriMesh read_stl(const std::string& path);
TriMesh read_obj(const std::string& path);

/// Dispatches on the extension (.stl or .obj, case-insensitive).
TriMesh read_mesh(const std::string& path);
void write_mesh(const TriMesh& mesh, const std::string& path);

} // namespace egad
