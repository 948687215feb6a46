#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ranslab/mesh.hpp"

namespace ranslab {

enum class ValueShape { Scalar, Vector, SymTensor };

struct Element {
  int degree = 1;
  ValueShape shape = ValueShape::Scalar;

  /// Number of stored components per node (1, 2 or 3).
  int value_size() const { return shape == ValueShape::Scalar ? 1 : shape == ValueShape::Vector ? 2 : 3; }
  /// Tensor rank of the represented value.
  int rank() const { return shape == ValueShape::Scalar ? 0 : shape == ValueShape::Vector ? 1 : 2; }
  int nodes_per_cell() const { return degree == 1 ? 3 : 6; }
  bool operator==(const Element&) const = default;
};

/// Reference basis values and derivatives at one point.
struct BasisTable {
  int n = 0;
  std::array<double, 6> phi{};
  std::array<std::array<double, 2>, 6> dphi{};
  std::array<std::array<double, 3>, 6> d2phi{};  // (xx, xy, yy)
};

/// Lagrange basis on the reference triangle. P2 nodes: vertices, then the
/// midpoints of the edges opposite vertex 0, 1, 2.
BasisTable evaluate_basis(int degree, double x, double y);
std::vector<std::array<double, 2>> reference_nodes(int degree);

/// Scalar/vector/tensor Lagrange space with a deterministic dof map.
class FunctionSpace {
 public:
  FunctionSpace(MeshPtr mesh, Element element);

  const MeshPtr& mesh() const { return mesh_; }
  const Element& element() const { return element_; }
  int num_nodes() const { return num_nodes_; }
  int ndofs() const { return num_nodes_ * element_.value_size(); }
  int dof(int node, int comp) const { return node * element_.value_size() + comp; }
  /// Global node ids of a cell in reference-node order.
  std::span<const int> cell_nodes(int c) const {
    return {cell_nodes_.data() + static_cast<std::size_t>(c) * element_.nodes_per_cell(),
            static_cast<std::size_t>(element_.nodes_per_cell())};
  }
  std::vector<int> cell_dofs(int c) const;
  const std::vector<Point>& node_coordinates() const { return node_coords_; }
  /// Nodes lying on facets with `marker`, sorted.
  std::vector<int> marked_nodes(int marker) const;
  /// Dofs of `component` (all components when -1) on facets with `marker`.
  std::vector<int> marked_dofs(int marker, int component = -1) const;

 private:
  MeshPtr mesh_;
  Element element_;
  int num_nodes_ = 0;
  std::vector<int> cell_nodes_;
  std::vector<Point> node_coords_;
};

using FunctionSpacePtr = std::shared_ptr<const FunctionSpace>;

FunctionSpacePtr build_dofmap(MeshPtr mesh, Element element);

/// Block-concatenated space. A plain space is represented as a one-block MixedSpace.
class MixedSpace : public std::enable_shared_from_this<MixedSpace> {
 public:
  static std::shared_ptr<const MixedSpace> create(std::vector<FunctionSpacePtr> blocks);

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const FunctionSpacePtr& block(int b) const { return blocks_[b]; }
  int offset(int b) const { return offsets_[b]; }
  int ndofs() const { return ndofs_; }
  const MeshPtr& mesh() const { return blocks_.front()->mesh(); }
  /// One-block space wrapping block b (this space itself when it has one block).
  std::shared_ptr<const MixedSpace> sub(int b) const;

  explicit MixedSpace(std::vector<FunctionSpacePtr> blocks);

 private:
  std::vector<FunctionSpacePtr> blocks_;
  std::vector<int> offsets_;
  int ndofs_ = 0;
  std::vector<std::shared_ptr<const MixedSpace>> subs_;
};

using SpacePtr = std::shared_ptr<const MixedSpace>;

SpacePtr make_space(MeshPtr mesh, Element element);
SpacePtr mixed_space(const std::vector<SpacePtr>& subspaces);

/// A space plus a coefficient vector. Views created by split() share storage
/// with the parent.
class FieldFunction {
 public:
  FieldFunction() = default;
  explicit FieldFunction(SpacePtr space, std::string name = {});
  FieldFunction(SpacePtr space, std::shared_ptr<std::vector<double>> storage, std::size_t offset,
                std::string name = {});

  const SpacePtr& space() const { return space_; }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  std::size_t size() const { return static_cast<std::size_t>(space_->ndofs()); }
  std::span<double> values() { return {storage_->data() + offset_, size()}; }
  std::span<const double> values() const { return {storage_->data() + offset_, size()}; }
  double& operator[](std::size_t i) { return (*storage_)[offset_ + i]; }
  double operator[](std::size_t i) const { return (*storage_)[offset_ + i]; }
  const std::shared_ptr<std::vector<double>>& storage() const { return storage_; }
  std::size_t offset() const { return offset_; }
  bool valid() const { return static_cast<bool>(space_); }

  std::vector<FieldFunction> split() const;
  FieldFunction sub(int b) const;
  /// Set every dof from a nodal function of position (component-wise).
  void interpolate(const std::function<std::array<double, 3>(const Point&)>& f);
  void assign(std::span<const double> v);
  void fill(double v);

 private:
  SpacePtr space_;
  std::shared_ptr<std::vector<double>> storage_;
  std::size_t offset_ = 0;
  std::string name_;
};

}  // namespace ranslab
