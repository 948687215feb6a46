#include "ranslab/function_space.hpp"

#include <algorithm>

#include "ranslab/error.hpp"

namespace ranslab {

BasisTable evaluate_basis(int degree, double x, double y) {
  BasisTable t;
  const double l[3] = {1.0 - x - y, x, y};
  const double dl[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
  if (degree == 1) {
    t.n = 3;
    for (int i = 0; i < 3; ++i) {
      t.phi[i] = l[i];
      t.dphi[i] = {dl[i][0], dl[i][1]};
      t.d2phi[i] = {0.0, 0.0, 0.0};
    }
    return t;
  }
  if (degree != 2) throw InvalidArgument("unsupported element degree " + std::to_string(degree));
  t.n = 6;
  for (int i = 0; i < 3; ++i) {
    t.phi[i] = l[i] * (2.0 * l[i] - 1.0);
    const double s = 4.0 * l[i] - 1.0;
    t.dphi[i] = {s * dl[i][0], s * dl[i][1]};
    t.d2phi[i] = {4.0 * dl[i][0] * dl[i][0], 4.0 * dl[i][0] * dl[i][1], 4.0 * dl[i][1] * dl[i][1]};
  }
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3, b = (k + 2) % 3;
    t.phi[3 + k] = 4.0 * l[a] * l[b];
    t.dphi[3 + k] = {4.0 * (l[b] * dl[a][0] + l[a] * dl[b][0]), 4.0 * (l[b] * dl[a][1] + l[a] * dl[b][1])};
    t.d2phi[3 + k] = {8.0 * dl[a][0] * dl[b][0], 4.0 * (dl[a][0] * dl[b][1] + dl[b][0] * dl[a][1]),
                      8.0 * dl[a][1] * dl[b][1]};
  }
  return t;
}

std::vector<std::array<double, 2>> reference_nodes(int degree) {
  if (degree == 1) return {{0, 0}, {1, 0}, {0, 1}};
  if (degree == 2) return {{0, 0}, {1, 0}, {0, 1}, {0.5, 0.5}, {0, 0.5}, {0.5, 0}};
  throw InvalidArgument("unsupported element degree " + std::to_string(degree));
}

FunctionSpace::FunctionSpace(MeshPtr mesh, Element element) : mesh_(std::move(mesh)), element_(element) {
  if (!mesh_) throw InvalidArgument("function space needs a mesh");
  if (element_.degree != 1 && element_.degree != 2)
    throw InvalidArgument("unsupported element degree " + std::to_string(element_.degree));
  const int nv = mesh_->num_vertices();
  const int npc = element_.nodes_per_cell();
  num_nodes_ = element_.degree == 1 ? nv : nv + mesh_->num_edges();
  cell_nodes_.resize(static_cast<std::size_t>(mesh_->num_cells()) * npc);
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    int* out = cell_nodes_.data() + static_cast<std::size_t>(c) * npc;
    for (int k = 0; k < 3; ++k) out[k] = mesh_->cells()[c][k];
    if (element_.degree == 2)
      for (int k = 0; k < 3; ++k) out[3 + k] = nv + mesh_->cell_edges(c)[k];
  }
  node_coords_ = mesh_->vertices();
  if (element_.degree == 2)
    for (const auto& e : mesh_->edges()) {
      const auto& a = mesh_->vertices()[e[0]];
      const auto& b = mesh_->vertices()[e[1]];
      node_coords_.push_back({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])});
    }
}

std::vector<int> FunctionSpace::cell_dofs(int c) const {
  const int vs = element_.value_size();
  std::vector<int> d;
  d.reserve(static_cast<std::size_t>(element_.nodes_per_cell()) * vs);
  for (int n : cell_nodes(c))
    for (int k = 0; k < vs; ++k) d.push_back(n * vs + k);
  return d;
}

std::vector<int> FunctionSpace::marked_nodes(int marker) const {
  auto nodes = mesh_->marked_vertices(marker);
  if (element_.degree == 2)
    for (int e : mesh_->marked_edges(marker)) nodes.push_back(mesh_->num_vertices() + e);
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

std::vector<int> FunctionSpace::marked_dofs(int marker, int component) const {
  const int vs = element_.value_size();
  if (component >= vs) throw InvalidArgument("component out of range");
  std::vector<int> out;
  for (int n : marked_nodes(marker)) {
    if (component >= 0)
      out.push_back(dof(n, component));
    else
      for (int k = 0; k < vs; ++k) out.push_back(dof(n, k));
  }
  return out;
}

FunctionSpacePtr build_dofmap(MeshPtr mesh, Element element) {
  return std::make_shared<const FunctionSpace>(std::move(mesh), element);
}

MixedSpace::MixedSpace(std::vector<FunctionSpacePtr> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw InvalidArgument("mixed space needs at least one block");
  for (const auto& b : blocks_) {
    if (!b) throw InvalidArgument("null subspace");
    if (b->mesh() != blocks_.front()->mesh()) throw InvalidArgument("subspaces live on different meshes");
    offsets_.push_back(ndofs_);
    ndofs_ += b->ndofs();
  }
}

std::shared_ptr<const MixedSpace> MixedSpace::create(std::vector<FunctionSpacePtr> blocks) {
  auto s = std::make_shared<MixedSpace>(std::move(blocks));
  if (s->num_blocks() > 1)
    for (const auto& b : s->blocks_) s->subs_.push_back(std::make_shared<MixedSpace>(std::vector{b}));
  return s;
}

std::shared_ptr<const MixedSpace> MixedSpace::sub(int b) const {
  if (b < 0 || b >= num_blocks()) throw InvalidArgument("block index out of range");
  if (num_blocks() == 1) return shared_from_this();
  return subs_[b];
}

SpacePtr make_space(MeshPtr mesh, Element element) {
  return MixedSpace::create({build_dofmap(std::move(mesh), element)});
}

SpacePtr mixed_space(const std::vector<SpacePtr>& subspaces) {
  std::vector<FunctionSpacePtr> blocks;
  for (const auto& s : subspaces) {
    if (!s) throw InvalidArgument("null subspace");
    for (int b = 0; b < s->num_blocks(); ++b) blocks.push_back(s->block(b));
  }
  if (blocks.size() == 1 && subspaces.size() == 1) return subspaces.front();
  return MixedSpace::create(std::move(blocks));
}

FieldFunction::FieldFunction(SpacePtr space, std::string name)
    : space_(std::move(space)), name_(std::move(name)) {
  if (!space_) throw InvalidArgument("field needs a space");
  storage_ = std::make_shared<std::vector<double>>(space_->ndofs(), 0.0);
}

FieldFunction::FieldFunction(SpacePtr space, std::shared_ptr<std::vector<double>> storage, std::size_t offset,
                             std::string name)
    : space_(std::move(space)), storage_(std::move(storage)), offset_(offset), name_(std::move(name)) {
  if (!space_ || !storage_) throw InvalidArgument("field view needs a space and storage");
  if (offset_ + space_->ndofs() > storage_->size()) throw InvalidArgument("field view exceeds its storage");
}

FieldFunction FieldFunction::sub(int b) const {
  return FieldFunction(space_->sub(b), storage_, offset_ + space_->offset(b),
                       name_.empty() ? std::string{} : name_ + "[" + std::to_string(b) + "]");
}

std::vector<FieldFunction> FieldFunction::split() const {
  if (!space_ || space_->num_blocks() < 2) throw InvalidArgument("split() needs a field on a mixed space");
  std::vector<FieldFunction> out;
  for (int b = 0; b < space_->num_blocks(); ++b) out.push_back(sub(b));
  return out;
}

void FieldFunction::interpolate(const std::function<std::array<double, 3>(const Point&)>& f) {
  for (int b = 0; b < space_->num_blocks(); ++b) {
    const auto& V = *space_->block(b);
    const int vs = V.element().value_size();
    const int off = space_->offset(b);
    for (int n = 0; n < V.num_nodes(); ++n) {
      const auto v = f(V.node_coordinates()[n]);
      for (int k = 0; k < vs; ++k) (*this)[off + V.dof(n, k)] = v[k];
    }
  }
}

void FieldFunction::assign(std::span<const double> v) {
  if (v.size() != size()) throw InvalidArgument("assign: length mismatch");
  std::copy(v.begin(), v.end(), values().begin());
}

void FieldFunction::fill(double v) { std::fill(values().begin(), values().end(), v); }

}  // namespace ranslab
