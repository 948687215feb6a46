#include "ranslab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>

#include "ranslab/error.hpp"

namespace ranslab {

namespace {

std::array<int, 2> sorted_pair(int a, int b) { return a < b ? std::array<int, 2>{a, b} : std::array<int, 2>{b, a}; }

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

}  // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
           std::vector<std::pair<std::array<int, 2>, int>> facets)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  const int nv = num_vertices();
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& t = cells_[c];
    for (int v : t)
      if (v < 0 || v >= nv) throw InvalidMesh("cell " + std::to_string(c) + " references a missing vertex");
    if (signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]) <= 0.0)
      throw InvalidMesh("cell " + std::to_string(c) + " has non-positive signed area");
  }

  std::map<std::array<int, 2>, std::vector<std::pair<int, int>>> incidence;
  for (int c = 0; c < num_cells(); ++c)
    for (int k = 0; k < 3; ++k)
      incidence[sorted_pair(cells_[c][(k + 1) % 3], cells_[c][(k + 2) % 3])].push_back({c, k});

  edges_.reserve(incidence.size());
  cell_edges_.assign(cells_.size(), {-1, -1, -1});
  std::map<std::array<int, 2>, int> edge_id;
  for (const auto& [key, inc] : incidence) {
    if (inc.size() > 2) throw InvalidMesh("edge shared by more than two cells");
    const int id = static_cast<int>(edges_.size());
    edges_.push_back(key);
    edge_id[key] = id;
    for (auto [c, k] : inc) cell_edges_[c][k] = id;
  }

  std::vector<char> covered(edges_.size(), 0);
  facets_.reserve(facets.size());
  for (const auto& [fv, marker] : facets) {
    auto key = sorted_pair(fv[0], fv[1]);
    auto it = incidence.find(key);
    if (it == incidence.end() || it->second.size() != 1)
      throw InvalidMesh("facet (" + std::to_string(fv[0]) + "," + std::to_string(fv[1]) +
                        ") is not a boundary edge");
    const int e = edge_id[key];
    if (covered[e]) throw InvalidMesh("boundary edge carries more than one marker");
    covered[e] = 1;
    Facet f;
    f.vertices = fv;
    f.marker = marker;
    f.cell = it->second[0].first;
    f.local_edge = it->second[0].second;
    f.edge = e;
    facets_.push_back(f);
  }
  for (const auto& [key, inc] : incidence)
    if (inc.size() == 1 && !covered[edge_id[key]]) throw InvalidMesh("boundary edge without marker");
}

std::vector<int> Mesh::marked_vertices(int marker) const {
  std::vector<int> out;
  for (const auto& f : facets_)
    if (f.marker == marker) out.insert(out.end(), f.vertices.begin(), f.vertices.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> Mesh::marked_edges(int marker) const {
  std::vector<int> out;
  for (const auto& f : facets_)
    if (f.marker == marker) out.push_back(f.edge);
  std::sort(out.begin(), out.end());
  return out;
}

bool Mesh::has_marker(int marker) const {
  return std::any_of(facets_.begin(), facets_.end(), [&](const Facet& f) { return f.marker == marker; });
}

std::array<Point, 2> Mesh::bounding_box() const {
  Point lo{0, 0}, hi{0, 0};
  if (!vertices_.empty()) lo = hi = vertices_[0];
  for (const auto& p : vertices_)
    for (int d = 0; d < 2; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  return {lo, hi};
}

double Mesh::extent() const {
  auto [lo, hi] = bounding_box();
  return std::max(hi[0] - lo[0], hi[1] - lo[1]);
}

std::vector<double> channel_ordinates(int ny, double height, double grading) {
  std::vector<double> y(ny + 1, 0.0);
  const double r = ny > 1 ? std::pow(grading, 1.0 / (ny - 1)) : 1.0;
  double total = 0.0, dy = 1.0;
  for (int j = 0; j < ny; ++j, dy *= r) total += dy;
  dy = height / total;
  for (int j = 0; j < ny; ++j, dy *= r) y[j + 1] = y[j] + dy;
  y[ny] = height;
  return y;
}

Mesh generate_channel_mesh(int nx, int ny, double length, double height, double grading) {
  if (nx < 1 || ny < 1) throw InvalidArgument("channel mesh needs nx >= 1 and ny >= 1");
  if (!(length > 0.0) || !(height > 0.0)) throw InvalidArgument("channel dimensions must be positive");
  if (!(grading >= 1.0)) throw InvalidArgument("grading must be >= 1");

  const auto ys = channel_ordinates(ny, height, grading);
  std::vector<Point> verts;
  verts.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) verts.push_back({i == nx ? length : length * i / nx, ys[j]});

  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> cells;
  cells.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
      cells.push_back({v00, v10, v11});
      cells.push_back({v00, v11, v01});
    }

  std::vector<std::pair<std::array<int, 2>, int>> facets;
  for (int i = 0; i < nx; ++i) {
    facets.push_back({{id(i, 0), id(i + 1, 0)}, markers::wall});
    facets.push_back({{id(i + 1, ny), id(i, ny)}, markers::symmetry});
  }
  for (int j = 0; j < ny; ++j) {
    facets.push_back({{id(0, j + 1), id(0, j)}, markers::inlet});
    facets.push_back({{id(nx, j), id(nx, j + 1)}, markers::outlet});
  }
  return Mesh(std::move(verts), std::move(cells), std::move(facets));
}

PeriodicMap build_periodic_map(const Mesh& mesh, int inlet_marker, int outlet_marker) {
  auto in = mesh.marked_vertices(inlet_marker);
  auto out = mesh.marked_vertices(outlet_marker);
  if (in.empty() || out.empty()) throw MappingFailure("periodic marker set is empty");
  if (in.size() != out.size()) throw MappingFailure("periodic marker sets have different vertex counts");
  const auto& X = mesh.vertices();
  auto by_y = [&](int a, int b) { return X[a][1] < X[b][1]; };
  std::sort(in.begin(), in.end(), by_y);
  std::sort(out.begin(), out.end(), by_y);

  PeriodicMap map;
  map.translation = {X[out[0]][0] - X[in[0]][0], X[out[0]][1] - X[in[0]][1]};
  const double tol = 1e-12 * std::max(1.0, mesh.extent());
  if (std::abs(map.translation[1]) > tol) throw MappingFailure("periodic sets are not related by an x-translation");
  for (std::size_t n = 0; n < in.size(); ++n) {
    const auto& a = X[in[n]];
    const auto& b = X[out[n]];
    if (std::abs(b[0] - a[0] - map.translation[0]) > tol || std::abs(b[1] - a[1]) > tol)
      throw MappingFailure("no periodic partner for vertex " + std::to_string(in[n]));
    map.pairs.push_back({in[n], out[n]});
  }
  return map;
}

CellGeometry cell_geometry(const Mesh& mesh, int cell) {
  if (cell < 0 || cell >= mesh.num_cells()) throw InvalidArgument("cell index out of range");
  const auto& t = mesh.cells()[cell];
  const auto& p0 = mesh.vertices()[t[0]];
  const auto& p1 = mesh.vertices()[t[1]];
  const auto& p2 = mesh.vertices()[t[2]];
  CellGeometry g;
  g.J = {{{p1[0] - p0[0], p2[0] - p0[0]}, {p1[1] - p0[1], p2[1] - p0[1]}}};
  g.detJ = g.J[0][0] * g.J[1][1] - g.J[0][1] * g.J[1][0];
  if (!(g.detJ > 0.0)) throw InvalidMesh("degenerate cell " + std::to_string(cell));
  g.Jinv = {{{g.J[1][1] / g.detJ, -g.J[0][1] / g.detJ}, {-g.J[1][0] / g.detJ, g.J[0][0] / g.detJ}}};
  auto len = [](const Point& a, const Point& b) { return std::hypot(b[0] - a[0], b[1] - a[1]); };
  g.h = std::max({len(p0, p1), len(p1, p2), len(p2, p0)});
  return g;
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << std::setprecision(17);
  out << "vertices " << mesh.num_vertices() << '\n';
  for (const auto& p : mesh.vertices()) out << p[0] << ' ' << p[1] << '\n';
  out << "cells " << mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells()) out << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  out << "facets " << mesh.facets().size() << '\n';
  for (const auto& f : mesh.facets()) out << f.vertices[0] << ' ' << f.vertices[1] << ' ' << f.marker << '\n';
}

Mesh read_mesh(std::istream& in) {
  auto header = [&](const char* want) {
    std::string word;
    std::size_t n = 0;
    if (!(in >> word >> n) || word != want) throw InvalidMesh(std::string("expected section '") + want + "'");
    return n;
  };
  std::vector<Point> verts(header("vertices"));
  for (auto& p : verts)
    if (!(in >> p[0] >> p[1])) throw InvalidMesh("truncated vertex section");
  std::vector<std::array<int, 3>> cells(header("cells"));
  for (auto& c : cells)
    if (!(in >> c[0] >> c[1] >> c[2])) throw InvalidMesh("truncated cell section");
  std::vector<std::pair<std::array<int, 2>, int>> facets(header("facets"));
  for (auto& f : facets)
    if (!(in >> f.first[0] >> f.first[1] >> f.second)) throw InvalidMesh("truncated facet section");
  return Mesh(std::move(verts), std::move(cells), std::move(facets));
}

}  // namespace ranslab
