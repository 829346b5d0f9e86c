#include "igr/mesh.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>

#include "igr/error.hpp"

namespace igr {

Eigen::Vector3d ProxyMesh::triangle_normal(std::size_t t) const {
  const auto& tri = triangles[t];
  const Eigen::Vector3d n = (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
  const double len = n.norm();
  return len > 0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::Zero();
}

double ProxyMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  return 0.5 * (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]).norm();
}

Eigen::Vector3d ProxyMesh::triangle_centroid(std::size_t t) const {
  const auto& tri = triangles[t];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

Bounds ProxyMesh::bounds() const {
  Bounds b;
  if (vertices.empty()) return b;
  b.min = b.max = vertices.front();
  for (const auto& v : vertices) {
    b.min = b.min.cwiseMin(v);
    b.max = b.max.cwiseMax(v);
  }
  return b;
}

void ProxyMesh::append(const ProxyMesh& other) {
  const bool keep_colors = (vertices.empty() || has_colors()) && other.has_colors();
  const int offset = static_cast<int>(vertices.size());
  if (!keep_colors) colors.clear();
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  if (keep_colors) colors.insert(colors.end(), other.colors.begin(), other.colors.end());
  for (auto tri : other.triangles) {
    for (int& i : tri) i += offset;
    triangles.push_back(tri);
  }
}

void validate_mesh(const ProxyMesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.size());
  require(mesh.colors.empty() || mesh.colors.size() == mesh.vertices.size(), ErrorKind::DegenerateMesh,
          "per-vertex color count differs from vertex count");
  bool any_area = false;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (int i : mesh.triangles[t])
      require(i >= 0 && i < n, ErrorKind::DegenerateMesh, "triangle index out of range");
    any_area = any_area || mesh.triangle_area(t) > 0.0;
  }
  require(any_area, ErrorKind::DegenerateMesh, "mesh has no triangle with positive area");
}

ProxyMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::MissingFile, "cannot open " + path.string());
  ProxyMesh mesh;
  bool all_colored = true;
  std::string line;
  std::vector<Eigen::Vector3f> colors;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      double x, y, z;
      ss >> x >> y >> z;
      require(!ss.fail(), ErrorKind::Io, "malformed vertex line in " + path.string());
      mesh.vertices.emplace_back(x, y, z);
      float r, g, b;
      if (ss >> r >> g >> b) {
        colors.emplace_back(r, g, b);
      } else {
        all_colored = false;
      }
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        const int i = std::stoi(tok.substr(0, tok.find('/')));
        idx.push_back(i > 0 ? i - 1 : static_cast<int>(mesh.vertices.size()) + i);
      }
      require(idx.size() >= 3, ErrorKind::Io, "face with fewer than 3 vertices in " + path.string());
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  if (all_colored && !colors.empty()) mesh.colors = std::move(colors);
  return mesh;
}

void write_obj(const ProxyMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Io, "cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& v = mesh.vertices[i];
    out << "v " << v.x() << ' ' << v.y() << ' ' << v.z();
    if (mesh.has_colors()) {
      out << std::setprecision(9) << ' ' << mesh.colors[i].x() << ' ' << mesh.colors[i].y() << ' '
          << mesh.colors[i].z() << std::setprecision(17);
    }
    out << '\n';
  }
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

ProxyMesh make_uv_sphere(const Eigen::Vector3d& center, double radius, int slices, int stacks) {
  ProxyMesh mesh;
  for (int j = 0; j <= stacks; ++j) {
    const double theta = std::numbers::pi * j / stacks;
    for (int i = 0; i <= slices; ++i) {
      const double phi = 2.0 * std::numbers::pi * i / slices;
      mesh.vertices.emplace_back(center + radius * Eigen::Vector3d(std::sin(theta) * std::cos(phi), std::cos(theta),
                                                                   std::sin(theta) * std::sin(phi)));
    }
  }
  const int row = slices + 1;
  for (int j = 0; j < stacks; ++j) {
    for (int i = 0; i < slices; ++i) {
      const int a = j * row + i, b = a + 1, c = a + row, d = c + 1;
      if (j != 0) mesh.triangles.push_back({a, b, c});
      if (j != stacks - 1) mesh.triangles.push_back({b, d, c});
    }
  }
  return mesh;
}

ProxyMesh make_cube(const Eigen::Vector3d& center, double size, int subdiv) {
  ProxyMesh mesh;
  const double h = 0.5 * size;
  // axis, sign: face normal; (u, v) span the face so that u x v = normal.
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign : {1, -1}) {
      Eigen::Vector3d n = Eigen::Vector3d::Zero();
      n[axis] = sign;
      Eigen::Vector3d u = Eigen::Vector3d::Zero();
      u[(axis + 1) % 3] = 1.0;
      Eigen::Vector3d v = n.cross(u);
      const int base = static_cast<int>(mesh.vertices.size());
      for (int j = 0; j <= subdiv; ++j)
        for (int i = 0; i <= subdiv; ++i) {
          const double s = -h + size * i / subdiv, t = -h + size * j / subdiv;
          mesh.vertices.emplace_back(center + h * n + s * u + t * v);
        }
      for (int j = 0; j < subdiv; ++j)
        for (int i = 0; i < subdiv; ++i) {
          const int a = base + j * (subdiv + 1) + i, b = a + 1, c = a + subdiv + 1, d = c + 1;
          mesh.triangles.push_back({a, b, d});
          mesh.triangles.push_back({a, d, c});
        }
    }
  }
  return mesh;
}

ProxyMesh make_quad_z(double x0, double x1, double y0, double y1, double z) {
  ProxyMesh mesh;
  mesh.vertices = {{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}};
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
  return mesh;
}

}  // namespace igr
