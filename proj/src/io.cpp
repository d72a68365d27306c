#include "fcfv/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>

#include "json.hpp"

#include "fcfv/errors.hpp"

namespace fcfv {

namespace {

using nlohmann::json;

std::vector<Index> sorted(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  return v;
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) throw MeshError(what + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
        allowed.end()) {
      throw MeshError("unknown key '" + key + "' in " + what);
    }
  }
}

}  // namespace

void write_mesh_json(std::ostream& out, const Mesh& mesh) {
  json j;
  j["version"] = 1;
  j["nsd"] = mesh.nsd();
  json verts = json::array();
  for (const Point& p : mesh.vertices()) {
    json row = json::array();
    for (int a = 0; a < mesh.nsd(); ++a) row.push_back(p[a]);
    verts.push_back(std::move(row));
  }
  j["vertices"] = std::move(verts);
  json cells = json::array();
  for (const Cell& c : mesh.cells()) {
    cells.push_back({{"type", std::string(to_string(c.type))}, {"verts", c.verts}});
  }
  j["cells"] = std::move(cells);
  json boundary = json::array();
  for (const Face& f : mesh.faces()) {
    if (!f.is_boundary()) continue;
    boundary.push_back({{"verts", f.verts}, {"tag", std::string(to_string(f.tag))}});
  }
  j["boundary"] = std::move(boundary);
  out << j.dump() << '\n';
}

Mesh read_mesh_json(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw MeshError(std::string("mesh JSON: ") + ex.what());
  }
  require_keys(j, {"version", "nsd", "vertices", "cells", "boundary"}, "mesh");
  try {
    if (j.at("version").get<int>() != 1) throw MeshError("unsupported mesh version");
    const int nsd = j.at("nsd").get<int>();
    if (nsd != 2 && nsd != 3) throw MeshError("nsd must be 2 or 3");
    std::vector<Point> verts;
    for (const json& v : j.at("vertices")) {
      if (static_cast<int>(v.size()) != nsd) throw MeshError("vertex with wrong coordinate count");
      Point p = Point::Zero();
      for (int a = 0; a < nsd; ++a) p[a] = v[static_cast<std::size_t>(a)].get<double>();
      verts.push_back(p);
    }
    std::vector<Cell> cells;
    for (const json& c : j.at("cells")) {
      require_keys(c, {"type", "verts"}, "cell");
      cells.push_back({cell_type_from_string(c.at("type").get<std::string>()),
                       c.at("verts").get<std::vector<Index>>()});
    }
    std::map<std::vector<Index>, BoundaryTag> tags;
    for (const json& b : j.at("boundary")) {
      require_keys(b, {"verts", "tag"}, "boundary entry");
      tags[sorted(b.at("verts").get<std::vector<Index>>())] =
          boundary_tag_from_string(b.at("tag").get<std::string>());
    }
    std::size_t used = 0;
    auto rule = [&](const BoundaryFaceInfo& f) {
      const auto it = tags.find(sorted(std::vector<Index>(f.verts.begin(), f.verts.end())));
      if (it == tags.end()) throw MeshError("boundary face without a tag in mesh JSON");
      ++used;
      return it->second;
    };
    Mesh m(nsd, std::move(verts), std::move(cells), rule);
    if (used != tags.size()) throw MeshError("mesh JSON lists faces that are not on the boundary");
    return m;
  } catch (const json::exception& ex) {
    throw MeshError(std::string("mesh JSON: ") + ex.what());
  }
}

Mesh read_mesh_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path);
  return read_mesh_json(in);
}

void write_mesh_json_file(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_mesh_json(out, mesh);
}

int vtk_cell_type(CellType type) {
  switch (type) {
    case CellType::Tri: return 5;
    case CellType::Qua: return 9;
    case CellType::Tet: return 10;
    case CellType::Hex: return 12;
    case CellType::Pri: return 13;
    case CellType::Pyr: return 14;
  }
  throw MeshError("cell type without a VTK equivalent");
}

void write_vtk(std::ostream& out, const Mesh& mesh, const std::vector<VtkCellField>& fields,
               const std::string& title) {
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << std::setprecision(17);
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Point& p : mesh.vertices()) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  std::size_t size = 0;
  for (const Cell& c : mesh.cells()) size += c.verts.size() + 1;
  out << "CELLS " << mesh.num_cells() << ' ' << size << '\n';
  for (const Cell& c : mesh.cells()) {
    std::vector<Index> v = c.verts;
    // VTK wedges list the base triangle clockwise seen from the top.
    if (c.type == CellType::Pri) v = {c.verts[0], c.verts[2], c.verts[1], c.verts[3], c.verts[5], c.verts[4]};
    out << v.size();
    for (Index k : v) out << ' ' << k;
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (const Cell& c : mesh.cells()) out << vtk_cell_type(c.type) << '\n';
  if (fields.empty()) return;
  out << "CELL_DATA " << mesh.num_cells() << '\n';
  for (const VtkCellField& f : fields) {
    if (f.values.size() != static_cast<std::size_t>(mesh.num_cells() * f.components)) {
      throw std::invalid_argument("VTK field '" + f.name + "' has the wrong size");
    }
    if (f.components == 1) {
      out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    } else if (f.components == 3) {
      out << "VECTORS " << f.name << " double\n";
    } else {
      throw std::invalid_argument("VTK fields must have 1 or 3 components");
    }
    for (Index e = 0; e < mesh.num_cells(); ++e) {
      for (int k = 0; k < f.components; ++k) {
        out << (k ? " " : "") << f.values[static_cast<std::size_t>(e * f.components + k)];
      }
      out << '\n';
    }
  }
}

void write_vtk_file(const std::string& path, const Mesh& mesh,
                    const std::vector<VtkCellField>& fields) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_vtk(out, mesh, fields);
}

std::vector<VtkCellField> solution_fields(const PoissonSolution& s,
                                          const std::vector<double>* indicator) {
  VtkCellField u{"u", 1, {}}, us{"u_star", 1, {}}, q{"q_magnitude", 1, {}};
  for (std::size_t e = 0; e < s.c.size(); ++e) {
    u.values.push_back(s.c[e][0]);
    us.values.push_back(s.u_star[e]);
    q.values.push_back(s.q[e].norm());
  }
  std::vector<VtkCellField> out{u, us, q};
  if (indicator) out.push_back({"E", 1, *indicator});
  return out;
}

std::vector<VtkCellField> solution_fields(const StokesSolution& s, int nsd,
                                          const std::vector<double>* indicator) {
  const int m = basis_size(nsd);
  VtkCellField u{"velocity", 3, {}}, us{"velocity_star", 3, {}}, p{"p", 1, {}};
  for (std::size_t e = 0; e < s.c.size(); ++e) {
    for (int a = 0; a < 3; ++a) {
      u.values.push_back(a < nsd ? s.c[e][a * m] : 0.0);
      us.values.push_back(s.u_star[e][a]);
    }
    p.values.push_back(s.p[e]);
  }
  std::vector<VtkCellField> out{u, us, p};
  if (indicator) out.push_back({"E", 1, *indicator});
  return out;
}

}  // namespace fcfv
