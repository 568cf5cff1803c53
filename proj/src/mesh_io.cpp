#include "egad/mesh_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "egad/errors.hpp"

namespace egad {

namespace {

std::string extension(const std::string& path)
{
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos)
        return {};
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

class Welder {
public:
    int add(const std::array<float, 3>& p)
    {
        auto [it, fresh] = index_.try_emplace(p, static_cast<int>(mesh.vertices.size()));
        if (fresh)
            mesh.vertices.emplace_back(p[0], p[1], p[2]);
        return it->second;
    }
    void face(int a, int b, int c)
    {
        if (a != b && b != c && a != c)
            mesh.faces.push_back({a, b, c});
    }
    TriMesh mesh;

private:
    std::map<std::array<float, 3>, int> index_;
};

TriMesh read_binary_stl(const std::string& bytes, const std::string& path)
{
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 80, 4);
    Welder w;
    for (std::uint32_t t = 0; t < count; ++t) {
        const char* rec = bytes.data() + 84 + 50 * static_cast<std::size_t>(t);
        int idx[3];
        for (int k = 0; k < 3; ++k) {
            std::array<float, 3> p;
            std::memcpy(p.data(), rec + 12 + 12 * k, 12);
            for (float v : p)
                if (!std::isfinite(v))
                    throw InputError(path + ": non-finite coordinate");
            idx[k] = w.add(p);
        }
        w.face(idx[0], idx[1], idx[2]);
    }
    return std::move(w.mesh);
}

TriMesh read_ascii_stl(const std::string& text, const std::string& path)
{
    std::istringstream in(text);
    std::string word;
    Welder w;
    std::vector<int> loop;
    bool solid = false;
    while (in >> word) {
        if (word == "solid") {
            solid = true;
            std::string rest;
            std::getline(in, rest);
        } else if (word == "vertex") {
            std::array<float, 3> p;
            if (!(in >> p[0] >> p[1] >> p[2]))
                throw InputError(path + ": malformed vertex line");
            loop.push_back(w.add(p));
        } else if (word == "endloop") {
            if (loop.size() != 3)
                throw InputError(path + ": facet without exactly three vertices");
            w.face(loop[0], loop[1], loop[2]);
            loop.clear();
        }
    }
    if (!solid)
        throw InputError(path + ": not an STL file");
    return std::move(w.mesh);
}

} // namespace

void write_stl(const TriMesh& mesh, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path);
    char header[80] = {};
    std::snprintf(header, sizeof header, "egad binary stl");
    out.write(header, 80);
    const std::uint32_t count = static_cast<std::uint32_t>(mesh.faces.size());
    out.write(reinterpret_cast<const char*>(&count), 4);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        float rec[12];
        const Vec3 n = face_normal(mesh, f);
        for (int k = 0; k < 3; ++k)
            rec[k] = static_cast<float>(n[k]);
        for (int c = 0; c < 3; ++c) {
            const Vec3& p = mesh.vertices[static_cast<std::size_t>(mesh.faces[f][static_cast<std::size_t>(c)])];
            for (int k = 0; k < 3; ++k)
                rec[3 + 3 * c + k] = static_cast<float>(p[k]);
        }
        out.write(reinterpret_cast<const char*>(rec), sizeof rec);
        const std::uint16_t attr = 0;
        out.write(reinterpret_cast<const char*>(&attr), 2);
    }
    if (!out)
        throw InputError("failed writing " + path);
}

TriMesh read_stl(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    TriMesh mesh;
    if (bytes.size() >= 84) {
        std::uint32_t count = 0;
        std::memcpy(&count, bytes.data() + 80, 4);
        if (bytes.size() == 84 + 50 * static_cast<std::size_t>(count))
            mesh = read_binary_stl(bytes, path);
        else
            mesh = read_ascii_stl(bytes, path);
    } else {
        mesh = read_ascii_stl(bytes, path);
    }
    if (mesh.faces.empty())
        throw InputError(path + ": no triangles");
    return mesh;
}

void write_obj(const TriMesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path);
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    if (!out)
        throw InputError("failed writing " + path);
}

TriMesh read_obj(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot read " + path);
    TriMesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag))
            continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw InputError(path + ":" + std::to_string(line_no) + ": malformed vertex");
            mesh.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                int i = 0;
                try {
                    i = std::stoi(tok.substr(0, tok.find('/')));
                } catch (const std::exception&) {
                    throw InputError(path + ":" + std::to_string(line_no) + ": malformed face");
                }
                if (i < 0)
                    i = static_cast<int>(mesh.vertices.size()) + i + 1;
                if (i < 1 || i > static_cast<int>(mesh.vertices.size()))
                    throw InputError(path + ":" + std::to_string(line_no) + ": face index out of range");
                idx.push_back(i - 1);
            }
            if (idx.size() < 3)
                throw InputError(path + ":" + std::to_string(line_no) + ": face with fewer than three vertices");
            for (std::size_t k = 1; k + 1 < idx.size(); ++k)
                mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
        }
    }
    if (mesh.faces.empty())
        throw InputError(path + ": no faces");
    return mesh;
}

TriMesh read_mesh(const std::string& path)
{
    const std::string ext = extension(path);
    if (ext == "stl")
        return read_stl(path);
    if (ext == "obj")
        return read_obj(path);
    throw InputError(path + ": unsupported mesh format");
}

void write_mesh(const TriMesh& mesh, const std::string& path)
{
    const std::string ext = extension(path);
    if (ext == "stl")
        write_stl(mesh, path);
    else if (ext == "obj")
        write_obj(mesh, path);
    else
        throw InputError(path + ": unsupported mesh format");
}

} // namespace egad
