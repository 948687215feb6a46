#include "ranslab/post.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ranslab/assembly.hpp"
#include "ranslab/error.hpp"
#include "ranslab/turbulence.hpp"

namespace ranslab {

FieldFunction streamfunction(const FieldFunction& u, int wall_marker) {
  if (!u.valid() || u.space()->num_blocks() != 1 || u.space()->block(0)->element().shape != ValueShape::Vector)
    throw InvalidArgument("streamfunction needs a single-block vector field");
  const auto& Vu = *u.space()->block(0);
  auto S = make_space(Vu.mesh(), Element{Vu.element().degree, ValueShape::Scalar});

  const Expr psi = trial_function(S), q = test_function(S);
  const Expr w = coefficient(u), n = facet_normal();
  const Expr vort = Dx(component(w, 1), 0) - Dx(component(w, 0), 1);
  const Expr flux = component(n, 1) * component(w, 0) - component(n, 0) * component(w, 1);
  CSRMatrix A = assemble_matrix(inner(grad(psi), grad(q)) * dx, S, S);
  DenseVector b = assemble_vector(q * vort * dx + q * flux * ds, S);

  auto wall = S->block(0)->marked_dofs(wall_marker);
  if (wall.empty()) throw InvalidArgument("streamfunction: marker " + std::to_string(wall_marker) + " has no dofs");
  std::vector<DirichletBC> pin{DirichletBC::at_dofs(S, {wall.front()}, {0.0})};
  apply_dirichlet(A, b, pin);

  FieldFunction out(S, "psi");
  out.assign(sparse_lu_solve(A, b));
  return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f.exceptions(std::ios::badbit | std::ios::failbit);
  return f;
}

}  // namespace

void write_vtk(const Mesh& mesh, const std::vector<FieldFunction>& fields, std::ostream& out) {
  const int nv = mesh.num_vertices();
  for (const auto& f : fields) {
    if (!f.valid() || f.space()->num_blocks() != 1) throw InvalidArgument("write_vtk: fields must be single-block");
    if (f.space()->mesh().get() != &mesh) throw InvalidArgument("write_vtk: field '" + f.name() + "' lives on another mesh");
    if (f.name().empty() || f.name().find_first_of(" \t\n") != std::string::npos)
      throw InvalidArgument("write_vtk: field names must be non-empty and contain no whitespace");
  }
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\nranslab\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const auto& p : mesh.vertices()) out << p[0] << ' ' << p[1] << " 0\n";
  out << "CELLS " << mesh.num_cells() << ' ' << 4 * mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells()) out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) out << "5\n";
  if (fields.empty()) return;
  out << "POINT_DATA " << nv << '\n';
  for (const auto& f : fields) {
    const auto& V = *f.space()->block(0);
    switch (V.element().shape) {
      case ValueShape::Scalar:
        out << "SCALARS " << f.name() << " double 1\nLOOKUP_TABLE default\n";
        for (int i = 0; i < nv; ++i) out << f[V.dof(i, 0)] << '\n';
        break;
      case ValueShape::Vector:
        out << "VECTORS " << f.name() << " double\n";
        for (int i = 0; i < nv; ++i) out << f[V.dof(i, 0)] << ' ' << f[V.dof(i, 1)] << " 0\n";
        break;
      case ValueShape::SymTensor:
        out << "TENSORS " << f.name() << " double\n";
        for (int i = 0; i < nv; ++i) {
          const double xx = f[V.dof(i, 0)], xy = f[V.dof(i, 1)], yy = f[V.dof(i, 2)];
          out << xx << ' ' << xy << " 0\n" << xy << ' ' << yy << " 0\n0 0 0\n";
        }
        break;
    }
  }
}

void write_vtk(const Mesh& mesh, const std::vector<FieldFunction>& fields, const std::filesystem::path& path) {
  auto f = open_out(path);
  write_vtk(mesh, fields, f);
}

VtkData read_vtk(std::istream& in) {
  VtkData d;
  std::string line, word;
  auto fail = [](const std::string& m) -> void { throw ParseError("read_vtk: " + m); };
  for (int i = 0; i < 4; ++i)
    if (!std::getline(in, line)) fail("truncated header");
  if (line.find("UNSTRUCTURED_GRID") == std::string::npos) fail("only unstructured grids are supported");
  int npoints = -1;
  while (in >> word) {
    if (word == "POINTS") {
      std::string type;
      in >> npoints >> type;
      d.points.resize(npoints);
      for (auto& p : d.points) in >> p[0] >> p[1] >> p[2];
    } else if (word == "CELLS") {
      int n = 0, total = 0;
      in >> n >> total;
      d.cells.resize(n);
      for (auto& c : d.cells) {
        int k = 0;
        in >> k;
        if (k != 3) fail("only triangles are supported");
        in >> c[0] >> c[1] >> c[2];
      }
    } else if (word == "CELL_TYPES") {
      int n = 0, t = 0;
      in >> n;
      for (int i = 0; i < n; ++i) in >> t;
    } else if (word == "POINT_DATA") {
      int n = 0;
      in >> n;
      if (n != npoints) fail("POINT_DATA size differs from POINTS");
    } else if (word == "SCALARS" || word == "VECTORS" || word == "TENSORS") {
      std::string name, type;
      in >> name >> type;
      int nc = word == "SCALARS" ? 1 : word == "VECTORS" ? 3 : 9;
      if (word == "SCALARS") {
        std::getline(in, line);
        std::istringstream rest(line);
        if (int c = 0; rest >> c) nc = c;
        in >> word >> word;  // LOOKUP_TABLE default
      }
      auto& v = d.point_data[name];
      v.resize(static_cast<std::size_t>(npoints) * nc);
      for (auto& x : v) in >> x;
      d.components[name] = nc;
    } else {
      fail("unexpected keyword '" + word + "'");
    }
    if (in.fail()) fail("malformed section '" + word + "'");
  }
  return d;
}

VtkData read_vtk(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "'");
  return read_vtk(f);
}

void write_convergence_csv(const std::vector<CouplingRecord>& history, std::ostream& out) {
  out << "iter,ns_residual,ns_dx,turb_residual,turb_dx\n" << std::setprecision(17);
  for (const auto& r : history)
    out << r.iter << ',' << r.ns_residual << ',' << r.ns_dx << ',' << r.turb_residual << ',' << r.turb_dx << '\n';
}

void write_convergence_csv(const std::vector<CouplingRecord>& history, const std::filesystem::path& path) {
  auto f = open_out(path);
  write_convergence_csv(history, f);
}

}  // namespace ranslab
