#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fcfv/mesh.hpp"
#include "fcfv/poisson.hpp"
#include "fcfv/stokes.hpp"

namespace fcfv {

/// Mesh JSON, version 1:
/// {"version": 1, "nsd": 2, "vertices": [[x, y], ...],
///  "cells": [{"type": "TRI", "verts": [...]}, ...],
///  "boundary": [{"verts": [...], "tag": "DIRICHLET"}, ...]}
/// Interior faces are derived. Every boundary face must be listed.
void write_mesh_json(std::ostream& out, const Mesh& mesh);
Mesh read_mesh_json(std::istream& in);
Mesh read_mesh_json_file(const std::string& path);
void write_mesh_json_file(const std::string& path, const Mesh& mesh);

/// VTK cell type id: 5 TRI, 9 QUA, 10 TET, 12 HEX, 13 WEDGE, 14 PYR.
int vtk_cell_type(CellType type);

struct VtkCellField {
  std::string name;
  /// 1 for scalars, 3 for vectors.
  int components = 1;
  /// n_cells * components values, cell-major.
  std::vector<double> values;
};

/// Legacy ASCII UNSTRUCTURED_GRID with 17 significant digits.
void write_vtk(std::ostream& out, const Mesh& mesh, const std::vector<VtkCellField>& fields,
               const std::string& title = "fcfv");
void write_vtk_file(const std::string& path, const Mesh& mesh,
                    const std::vector<VtkCellField>& fields);

/// u (centroid value), u_star and |q|; E when given.
std::vector<VtkCellField> solution_fields(const PoissonSolution& s,
                                          const std::vector<double>* indicator = nullptr);
/// velocity (centroid values), velocity_star, p; E when given.
std::vector<VtkCellField> solution_fields(const StokesSolution& s, int nsd,
                                          const std::vector<double>* indicator = nullptr);

}  // namespace fcfv
