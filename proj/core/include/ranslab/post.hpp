#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ranslab/function_space.hpp"

namespace ranslab {

struct CouplingRecord;

/// Streamfunction of a 2D velocity field in a scalar space of the same degree,
/// pinned to zero at the lowest wall dof.
FieldFunction streamfunction(const FieldFunction& u, int wall_marker = markers::wall);

/// Legacy ASCII VTK unstructured grid. Fields are written at the mesh vertices;
/// vectors get a zero z component, symmetric tensors become full 3x3 tensors.
void write_vtk(const Mesh& mesh, const std::vector<FieldFunction>& fields, std::ostream& out);
void write_vtk(const Mesh& mesh, const std::vector<FieldFunction>& fields, const std::filesystem::path& path);

struct VtkData {
  std::vector<std::array<double, 3>> points;
  std::vector<std::array<int, 3>> cells;
  /// Point data by name, flattened with `components` values per point.
  std::map<std::string, std::vector<double>> point_data;
  std::map<std::string, int> components;
};

/// Reader for the subset produced by write_vtk.
VtkData read_vtk(std::istream& in);
VtkData read_vtk(const std::filesystem::path& path);

void write_convergence_csv(const std::vector<CouplingRecord>& history, std::ostream& out);
void write_convergence_csv(const std::vector<CouplingRecord>& history, const std::filesystem::path& path);

}  // namespace ranslab
