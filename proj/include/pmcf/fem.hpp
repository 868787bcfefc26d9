#ifndef PMCF_FEM_HPP
#define PMCF_FEM_HPP

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include <pmcf/linalg.hpp>
#include <pmcf/mesh.hpp>

namespace pmcf {

//! Continuous piecewise-linear field: one value per mesh vertex. The mesh is
//! referenced, not owned, and must outlive the function.
class FeFunction
{
public:
  explicit FeFunction(const Mesh& mesh)
    : mesh_(&mesh)
    , values_(mesh.num_vertices(), 0.0)
  {}
  FeFunction(const Mesh& mesh, std::vector<double> values);
  explicit FeFunction(const Mesh&&) = delete;
  FeFunction(const Mesh&&, std::vector<double>) = delete;

  const Mesh& mesh() const { return *mesh_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t v) const { return values_[v]; }
  double& operator[](std::size_t v) { return values_[v]; }

  //! Zero at every boundary vertex.
  bool is_admissible() const;
  //! Value at an arbitrary point; 0 outside the mesh.
  double evaluate(const PointLocator& locator, Vec2 p) const;

private:
  const Mesh* mesh_;
  std::vector<double> values_;
};

/**
 * Regularization parameters of the elliptic problem
 *
 *   div(Du / sqrt(eps^2 + |Du|^2)) = -(eps^2 + |Du|^2)^(-1/(2k)).
 *
 * Theory covers k >= 1; 1/3 < k < 1 is accepted and reported by `low_k()`.
 */
struct RegularizationParams
{
  double k = 1.0;
  double eps = 1.0;

  RegularizationParams() = default;
  RegularizationParams(double k_, double eps_);
  bool low_k() const { return k < 1.0; }
};

using ScalarField = std::function<double(Vec2)>;

//! Constant gradient of the linear interpolant of f on triangle t.
Vec2 element_gradient(const Mesh& mesh, const FeFunction& f, std::size_t t);

//! Gradients of the three hat functions of triangle t.
std::array<Vec2, 3> hat_gradients(const Mesh& mesh, std::size_t t);

FeFunction interpolate_nodal(const Mesh& mesh, const ScalarField& g, bool admissible = false);
FeFunction interpolate_nodal(const Mesh&&, const ScalarField&, bool = false) = delete;

//! a^{ij}(z) = D^2 f_eps(z) with f_eps(z) = sqrt(eps^2 + |z|^2), row-major.
std::array<double, 4> diffusion_tensor(Vec2 z, double eps);

enum class BoundaryCheck { Enforce, Relaxed };

/**
 * Residual and Jacobian of the P1 discretization with homogeneous Dirichlet
 * data. Unknowns are the interior vertices; the dof numbering follows vertex
 * order. All element integrals are exact for P1 data.
 */
class Discretization
{
public:
  explicit Discretization(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  std::size_t num_dofs() const { return dof_to_vertex_.size(); }
  //! Interior dof of vertex v, or -1 for boundary vertices.
  int dof(std::size_t v) const { return vertex_to_dof_[v]; }
  int vertex(std::size_t d) const { return dof_to_vertex_[d]; }
  const std::vector<int>& interior_index() const { return vertex_to_dof_; }

  std::vector<double> residual(const FeFunction& u, const RegularizationParams& p,
                               BoundaryCheck check = BoundaryCheck::Enforce) const;
  SparseMatrix jacobian(const FeFunction& u, const RegularizationParams& p,
                        BoundaryCheck check = BoundaryCheck::Enforce) const;

  //! Plain P1 stiffness matrix on interior dofs (the Jacobian pattern).
  SparseMatrix stiffness() const;

  std::vector<double> restrict_to_dofs(const FeFunction& u) const;
  //! Adds `step * delta` (over dofs) to u.
  void add_to(FeFunction& u, const std::vector<double>& delta, double step) const;

private:
  void require(const FeFunction& u, BoundaryCheck check) const;
  SparseMatrix empty_pattern() const;

  const Mesh* mesh_;
  std::vector<int> vertex_to_dof_;
  std::vector<int> dof_to_vertex_;
  std::vector<std::array<Vec2, 3>> gradients_;
  std::vector<double> areas_;
  // CSR positions of the 3x3 element blocks, -1 where a row or column is a boundary vertex
  std::vector<std::array<int, 9>> block_positions_;
  std::vector<std::size_t> row_offsets_;
  std::vector<int> col_indices_;
};

struct AssembledSystem
{
  std::vector<double> residual;
  SparseMatrix jacobian;
  std::vector<int> interior_index;
};

std::vector<double> assemble_residual(const Mesh& mesh, const FeFunction& u,
                                      const RegularizationParams& p);
SparseMatrix assemble_jacobian(const Mesh& mesh, const FeFunction& u,
                               const RegularizationParams& p);
AssembledSystem assemble_system(const Mesh& mesh, const FeFunction& u,
                                const RegularizationParams& p);

//! CSV "vertex,value" dump paired with the native mesh dump.
void write_function_csv(const FeFunction& f, std::ostream& out);
FeFunction read_function_csv(const Mesh& mesh, std::istream& in);

} // namespace pmcf

#endif
