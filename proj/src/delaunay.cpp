// Incremental Delaunay triangulation with Lawson flips.
//
// The boundary polygon is strictly convex and its edges are never flipped,
// so the result triangulates exactly the polygon. Interior points are
// inserted one at a time by a visibility walk from the previous insertion.

#include <pmcf/mesh.hpp>

#include <cmath>
#include <utility>

#include <pmcf/errors.hpp>

namespace pmcf {

namespace {

struct DTri
{
  std::array<int, 3> v;
  std::array<int, 3> nb; // nb[i] lies across the edge opposite v[i]; -1 on the boundary
};

// True when d lies strictly inside the circumcircle of the CCW triangle abc.
// Near-cocircular configurations (within a rounding bound on the
// determinant) count as outside, so no pair of flips can undo each other.
bool in_circle(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
  const long double adx = a.x - d.x, ady = a.y - d.y;
  const long double bdx = b.x - d.x, bdy = b.y - d.y;
  const long double cdx = c.x - d.x, cdy = c.y - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  const long double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                          ad * (bdx * cdy - bdy * cdx);
  const long double permanent = (std::abs(bdx * cdy) + std::abs(bdy * cdx)) * ad +
                                (std::abs(cdx * ady) + std::abs(cdy * adx)) * bd +
                                (std::abs(adx * bdy) + std::abs(ady * bdx)) * cd;
  return det > 1e-12L * permanent;
}

class Triangulator
{
public:
  Triangulator(const std::vector<Vec2>& points, int polygon_size)
    : p_(points)
  {
    const int n = polygon_size;
    if (n < 3)
      throw InvalidArgument("polygon needs at least 3 vertices");
    tris_.reserve(2 * points.size());
    for (int k = 0; k + 2 < n; ++k) {
      DTri t;
      t.v = {0, k + 1, k + 2};
      t.nb = {-1, (k + 1 < n - 2) ? k + 1 : -1, (k > 0) ? k - 1 : -1};
      tris_.push_back(t);
    }
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      for (int e = 0; e < 3; ++e)
        queue_edge(t, e);
    flush();
  }

  void insert(int p)
  {
    auto [t, on_edge] = walk(p);
    if (on_edge >= 0)
      split_edge(t, on_edge, p);
    else
      split_triangle(t, p);
    flush();
  }

  std::vector<Triangle> triangles() const
  {
    std::vector<Triangle> out;
    out.reserve(tris_.size());
    for (const DTri& t : tris_)
      out.push_back({t.v[0], t.v[1], t.v[2]});
    return out;
  }

private:
  std::pair<int, int> walk(int p) const
  {
    const Vec2 q = p_[p];
    int t = hint_;
    const std::size_t limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const DTri& tri = tris_[t];
      int next = -2;
      int zero_edge = -1;
      for (int k = 0; k < 3; ++k) {
        const int e = (k + static_cast<int>(step)) % 3;
        const Vec2 a = p_[tri.v[(e + 1) % 3]];
        const Vec2 b = p_[tri.v[(e + 2) % 3]];
        const double o = orient(a, b, q);
        const Vec2 d = b - a;
        const double tol = 1e-12 * dot(d, d);
        if (o < -tol) {
          next = tri.nb[e];
          if (next < 0)
            throw InvalidArgument("point outside the convex boundary polygon");
          break;
        }
        if (o <= tol)
          zero_edge = e;
      }
      if (next == -2)
        return {t, zero_edge};
      t = next;
    }
    throw InvalidArgument("point location walk did not terminate");
  }

  void replace_neighbour(int t, int old_nb, int new_nb)
  {
    if (t < 0)
      return;
    for (int& n : tris_[t].nb)
      if (n == old_nb) {
        n = new_nb;
        return;
      }
  }

  void rotate_to(int t, int e)
  {
    DTri& tri = tris_[t];
    std::array<int, 3> v, nb;
    for (int i = 0; i < 3; ++i) {
      v[i] = tri.v[(e + i) % 3];
      nb[i] = tri.nb[(e + i) % 3];
    }
    tri.v = v;
    tri.nb = nb;
  }

  void split_triangle(int t, int p)
  {
    const DTri old = tris_[t];
    const int a = old.v[0], b = old.v[1], c = old.v[2];
    const int t0 = t;
    const int t1 = static_cast<int>(tris_.size());
    const int t2 = t1 + 1;
    tris_[t0] = {{p, b, c}, {old.nb[0], t1, t2}};
    tris_.push_back({{p, c, a}, {old.nb[1], t2, t0}});
    tris_.push_back({{p, a, b}, {old.nb[2], t0, t1}});
    replace_neighbour(old.nb[1], t, t1);
    replace_neighbour(old.nb[2], t, t2);
    queue_edge(t0, 0);
    queue_edge(t1, 0);
    queue_edge(t2, 0);
    hint_ = t0;
  }

  void split_edge(int t, int e, int p)
  {
    rotate_to(t, e);
    const DTri tri = tris_[t];
    const int o = tri.nb[0];
    if (o < 0)
      throw InvalidArgument("interior point lies on the boundary polygon");
    int f = 0;
    while (tris_[o].nb[f] != t)
      ++f;
    rotate_to(o, f);
    const DTri other = tris_[o];
    const int a = tri.v[0], b = tri.v[1], c = tri.v[2];
    const int d = other.v[0];
    const int t_ca = tri.nb[1], t_ab = tri.nb[2];
    const int o_bd = other.nb[1], o_dc = other.nb[2];

    const int t1 = t, o1 = o;
    const int t2 = static_cast<int>(tris_.size());
    const int o2 = t2 + 1;
    tris_[t1] = {{a, b, p}, {o2, t2, t_ab}};
    tris_[o1] = {{d, c, p}, {t2, o2, o_dc}};
    tris_.push_back({{a, p, c}, {o1, t_ca, t1}});
    tris_.push_back({{d, p, b}, {t1, o_bd, o1}});
    replace_neighbour(t_ca, t, t2);
    replace_neighbour(o_bd, o, o2);
    queue_edge(t1, 2);
    queue_edge(t2, 1);
    queue_edge(o1, 2);
    queue_edge(o2, 1);
    hint_ = t1;
  }

  // Edges are queued by their endpoints because flips rotate vertex order.
  void queue_edge(int t, int e)
  {
    const DTri& tri = tris_[t];
    pending_.push_back({t, tri.v[(e + 1) % 3], tri.v[(e + 2) % 3]});
  }

  int find_edge(int t, int a, int b) const
  {
    const DTri& tri = tris_[t];
    for (int e = 0; e < 3; ++e) {
      const int x = tri.v[(e + 1) % 3];
      const int y = tri.v[(e + 2) % 3];
      if ((x == a && y == b) || (x == b && y == a))
        return e;
    }
    return -1;
  }

  // Lawson flips: an edge opposite vertex e of t is flipped when the apex of
  // the neighbour lies strictly inside the circumcircle of t.
  void flush()
  {
    while (!pending_.empty()) {
      const auto [t, va, vb] = pending_.back();
      pending_.pop_back();
      const int e = find_edge(t, va, vb);
      if (e < 0)
        continue;
      const int o = tris_[t].nb[e];
      if (o < 0)
        continue;
      rotate_to(t, e);
      int f = 0;
      while (tris_[o].nb[f] != t)
        ++f;
      const DTri& tri = tris_[t];
      const int d = tris_[o].v[f];
      if (!in_circle(p_[tri.v[0]], p_[tri.v[1]], p_[tri.v[2]], p_[d]))
        continue;
      if (!(orient(p_[tri.v[0]], p_[tri.v[1]], p_[d]) > 0.0) ||
          !(orient(p_[tri.v[0]], p_[d], p_[tri.v[2]]) > 0.0))
        continue;
      rotate_to(o, f);
      const DTri a = tris_[t];
      const DTri b = tris_[o];
      const int pv = a.v[0], bv = a.v[1], cv = a.v[2];
      const int t_cp = a.nb[1], t_pb = a.nb[2];
      const int o_bd = b.nb[1], o_dc = b.nb[2];
      tris_[t] = {{pv, bv, d}, {o_bd, o, t_pb}};
      tris_[o] = {{pv, d, cv}, {o_dc, t_cp, t}};
      replace_neighbour(o_bd, o, t);
      replace_neighbour(t_cp, t, o);
      queue_edge(t, 0);
      queue_edge(o, 0);
      queue_edge(t, 2);
      queue_edge(o, 1);
    }
  }

  const std::vector<Vec2>& p_;
  std::vector<DTri> tris_;
  std::vector<std::array<int, 3>> pending_; // (triangle, edge endpoints)
  int hint_ = 0;
};

} // namespace

std::vector<Triangle> delaunay_convex(const std::vector<Vec2>& points, int polygon_size)
{
  Triangulator tri(points, polygon_size);
  for (int p = polygon_size; p < static_cast<int>(points.size()); ++p)
    tri.insert(p);
  return tri.triangles();
}

} // namespace pmcf
