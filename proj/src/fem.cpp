#include <pmcf/fem.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <pmcf/errors.hpp>

namespace pmcf {

FeFunction::FeFunction(const Mesh& mesh, std::vector<double> values)
  : mesh_(&mesh)
  , values_(std::move(values))
{
  if (values_.size() != mesh.num_vertices())
    throw DimensionMismatch("FeFunction needs one value per vertex");
}

bool FeFunction::is_admissible() const
{
  for (std::size_t v = 0; v < values_.size(); ++v)
    if (mesh_->boundary[v] && values_[v] != 0.0)
      return false;
  return true;
}

double FeFunction::evaluate(const PointLocator& locator, Vec2 p) const
{
  const auto loc = locator.locate(p);
  if (!loc)
    return 0.0;
  const Triangle& tri = mesh_->triangles[loc->triangle];
  return loc->barycentric[0] * values_[tri[0]] + loc->barycentric[1] * values_[tri[1]] +
         loc->barycentric[2] * values_[tri[2]];
}

RegularizationParams::RegularizationParams(double k_, double eps_)
  : k(k_)
  , eps(eps_)
{
  if (!(eps > 0.0))
    throw InvalidArgument("regularization parameter eps must be positive");
  if (!(k > 1.0 / 3.0))
    throw InvalidArgument("exponent k must exceed 1/3");
}

std::array<Vec2, 3> hat_gradients(const Mesh& mesh, std::size_t t)
{
  const Triangle& tri = mesh.triangles[t];
  const Vec2 a = mesh.vertices[tri[0]];
  const Vec2 b = mesh.vertices[tri[1]];
  const Vec2 c = mesh.vertices[tri[2]];
  const double twice_area = orient(a, b, c);
  return {Vec2{b.y - c.y, c.x - b.x} * (1.0 / twice_area),
          Vec2{c.y - a.y, a.x - c.x} * (1.0 / twice_area),
          Vec2{a.y - b.y, b.x - a.x} * (1.0 / twice_area)};
}

Vec2 element_gradient(const Mesh& mesh, const FeFunction& f, std::size_t t)
{
  const auto g = hat_gradients(mesh, t);
  const Triangle& tri = mesh.triangles[t];
  return f[tri[0]] * g[0] + f[tri[1]] * g[1] + f[tri[2]] * g[2];
}

FeFunction interpolate_nodal(const Mesh& mesh, const ScalarField& g, bool admissible)
{
  FeFunction f(mesh);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    f[v] = (admissible && mesh.boundary[v]) ? 0.0 : g(mesh.vertices[v]);
  return f;
}

std::array<double, 4> diffusion_tensor(Vec2 z, double eps)
{
  const double fe = std::sqrt(eps * eps + dot(z, z));
  const double inv = 1.0 / fe;
  const double inv3 = inv * inv * inv;
  return {inv - z.x * z.x * inv3, -z.x * z.y * inv3, -z.y * z.x * inv3, inv - z.y * z.y * inv3};
}

Discretization::Discretization(const Mesh& mesh)
  : mesh_(&mesh)
  , vertex_to_dof_(mesh.num_vertices(), -1)
{
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    if (!mesh.boundary[v]) {
      vertex_to_dof_[v] = static_cast<int>(dof_to_vertex_.size());
      dof_to_vertex_.push_back(static_cast<int>(v));
    }

  gradients_.reserve(mesh.num_triangles());
  areas_.reserve(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    gradients_.push_back(hat_gradients(mesh, t));
    areas_.push_back(mesh.area(t));
  }

  // pattern: interior neighbours plus the diagonal
  const std::size_t n = dof_to_vertex_.size();
  std::vector<std::vector<int>> rows(n);
  for (const Triangle& tri : mesh.triangles)
    for (int a : tri)
      for (int b : tri)
        if (vertex_to_dof_[a] >= 0 && vertex_to_dof_[b] >= 0)
          rows[vertex_to_dof_[a]].push_back(vertex_to_dof_[b]);
  row_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = rows[i];
    r.push_back(static_cast<int>(i));
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    row_offsets_[i + 1] = row_offsets_[i] + r.size();
    col_indices_.insert(col_indices_.end(), r.begin(), r.end());
  }

  block_positions_.resize(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const int i = vertex_to_dof_[tri[a]];
        const int j = vertex_to_dof_[tri[b]];
        int pos = -1;
        if (i >= 0 && j >= 0) {
          const auto first = col_indices_.begin() + static_cast<long>(row_offsets_[i]);
          const auto last = col_indices_.begin() + static_cast<long>(row_offsets_[i + 1]);
          pos = static_cast<int>(std::lower_bound(first, last, j) - col_indices_.begin());
        }
        block_positions_[t][3 * a + b] = pos;
      }
  }
}

void Discretization::require(const FeFunction& u, BoundaryCheck check) const
{
  if (&u.mesh() != mesh_)
    throw InvalidArgument("function lives on a different mesh");
  if (check == BoundaryCheck::Enforce && !u.is_admissible())
    throw NonAdmissibleFunction("function does not vanish on the boundary");
}

SparseMatrix Discretization::empty_pattern() const
{
  return SparseMatrix(num_dofs(), row_offsets_, col_indices_,
                      std::vector<double>(col_indices_.size(), 0.0));
}

std::vector<double> Discretization::residual(const FeFunction& u, const RegularizationParams& p,
                                             BoundaryCheck check) const
{
  require(u, check);
  const double eps2 = p.eps * p.eps;
  const double source_power = -1.0 / (2.0 * p.k);
  std::vector<double> r(num_dofs(), 0.0);
  for (std::size_t t = 0; t < mesh_->num_triangles(); ++t) {
    const Triangle& tri = mesh_->triangles[t];
    const auto& g = gradients_[t];
    const Vec2 z = u[tri[0]] * g[0] + u[tri[1]] * g[1] + u[tri[2]] * g[2];
    const double z2 = dot(z, z);
    const double fe = std::sqrt(eps2 + z2);
    const double area = areas_[t];
    const double source = std::pow(eps2 + z2, source_power) * area / 3.0;
    for (int a = 0; a < 3; ++a) {
      const int i = vertex_to_dof_[tri[a]];
      if (i >= 0)
        r[i] += area * dot(z, g[a]) / fe - source;
    }
  }
  return r;
}

SparseMatrix Discretization::jacobian(const FeFunction& u, const RegularizationParams& p,
                                      BoundaryCheck check) const
{
  require(u, check);
  SparseMatrix J = empty_pattern();
  auto& values = J.values();
  const double eps = p.eps;
  for (std::size_t t = 0; t < mesh_->num_triangles(); ++t) {
    const Triangle& tri = mesh_->triangles[t];
    const auto& g = gradients_[t];
    const Vec2 z = u[tri[0]] * g[0] + u[tri[1]] * g[1] + u[tri[2]] * g[2];
    const double fe = std::sqrt(eps * eps + dot(z, z));
    const auto a = diffusion_tensor(z, eps);
    // transport coefficient b = (1/k) f^{-1/k-1} Df(z), Df(z) = z / f
    const double bscale = std::pow(fe, -1.0 / p.k - 1.0) / (p.k * fe);
    const Vec2 bvec = bscale * z;
    const double area = areas_[t];
    for (int row = 0; row < 3; ++row)
      for (int col = 0; col < 3; ++col) {
        const int pos = block_positions_[t][3 * row + col];
        if (pos < 0)
          continue;
        const Vec2 ag{a[0] * g[col].x + a[1] * g[col].y, a[2] * g[col].x + a[3] * g[col].y};
        values[pos] += area * dot(g[row], ag) + dot(bvec, g[col]) * area / 3.0;
      }
  }
  return J;
}

SparseMatrix Discretization::stiffness() const
{
  SparseMatrix K = empty_pattern();
  for (std::size_t t = 0; t < mesh_->num_triangles(); ++t) {
    const auto& g = gradients_[t];
    for (int row = 0; row < 3; ++row)
      for (int col = 0; col < 3; ++col) {
        const int pos = block_positions_[t][3 * row + col];
        if (pos >= 0)
          K.values()[pos] += areas_[t] * dot(g[row], g[col]);
      }
  }
  return K;
}

std::vector<double> Discretization::restrict_to_dofs(const FeFunction& u) const
{
  std::vector<double> out(num_dofs());
  for (std::size_t d = 0; d < num_dofs(); ++d)
    out[d] = u[dof_to_vertex_[d]];
  return out;
}

void Discretization::add_to(FeFunction& u, const std::vector<double>& delta, double step) const
{
  if (delta.size() != num_dofs())
    throw DimensionMismatch("update vector length differs from dof count");
  for (std::size_t d = 0; d < num_dofs(); ++d)
    u[dof_to_vertex_[d]] += step * delta[d];
}

std::vector<double> assemble_residual(const Mesh& mesh, const FeFunction& u,
                                      const RegularizationParams& p)
{
  return Discretization(mesh).residual(u, p);
}

SparseMatrix assemble_jacobian(const Mesh& mesh, const FeFunction& u,
                               const RegularizationParams& p)
{
  return Discretization(mesh).jacobian(u, p);
}

AssembledSystem assemble_system(const Mesh& mesh, const FeFunction& u,
                                const RegularizationParams& p)
{
  const Discretization disc(mesh);
  return {disc.residual(u, p), disc.jacobian(u, p), disc.interior_index()};
}

void write_function_csv(const FeFunction& f, std::ostream& out)
{
  out << std::setprecision(17) << "vertex,value\n";
  for (std::size_t v = 0; v < f.values().size(); ++v)
    out << v << "," << f[v] << "\n";
}

FeFunction read_function_csv(const Mesh& mesh, std::istream& in)
{
  FeFunction f(mesh);
  std::vector<bool> seen(mesh.num_vertices(), false);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty())
      continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    long v = -1;
    double value = 0.0;
    if (!(is >> v >> value) || v < 0 || static_cast<std::size_t>(v) >= mesh.num_vertices())
      throw MalformedSection("function csv", lineno, "expected vertex,value");
    f[v] = value;
    seen[v] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw InvalidArgument("function csv does not cover every vertex");
  return f;
}

} // namespace pmcf
