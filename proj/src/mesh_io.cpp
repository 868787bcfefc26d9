#include <pmcf/mesh.hpp>

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <pmcf/errors.hpp>

namespace pmcf {

void export_gmsh(const Mesh& mesh, std::ostream& out)
{
  out << std::setprecision(17);
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n" << mesh.num_vertices() << "\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    out << v + 1 << " " << mesh.vertices[v].x << " " << mesh.vertices[v].y << " 0\n";
  out << "$EndNodes\n";

  std::vector<Edge> boundary_edges;
  for (const Triangle& tri : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i], b = tri[(i + 1) % 3];
      boundary_edges.push_back({a, b});
    }
  // keep directed edges whose reverse is absent
  std::vector<Edge> sorted_rev;
  for (const Edge& e : boundary_edges)
    sorted_rev.push_back({e[1], e[0]});
  std::sort(sorted_rev.begin(), sorted_rev.end());
  std::vector<Edge> lines;
  for (const Edge& e : boundary_edges)
    if (!std::binary_search(sorted_rev.begin(), sorted_rev.end(), e))
      lines.push_back(e);
  std::sort(lines.begin(), lines.end());

  out << "$Elements\n" << lines.size() + mesh.num_triangles() << "\n";
  std::size_t id = 1;
  for (const Edge& e : lines)
    out << id++ << " 1 2 1 1 " << e[0] + 1 << " " << e[1] + 1 << "\n";
  for (const Triangle& tri : mesh.triangles)
    out << id++ << " 2 2 2 1 " << tri[0] + 1 << " " << tri[1] + 1 << " " << tri[2] + 1 << "\n";
  out << "$EndElements\n";
}

namespace {

template <class T>
std::vector<T> parse_fields(const std::string& line, const std::string& section, int lineno)
{
  std::istringstream is(line);
  std::vector<T> fields;
  T value;
  while (is >> value)
    fields.push_back(value);
  if (!is.eof())
    throw MalformedSection(section, lineno, "cannot parse '" + line + "'");
  return fields;
}

class LineReader
{
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line)
  {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos)
        return true;
    }
    return false;
  }

  std::string expect(const std::string& section)
  {
    std::string line;
    if (!next(line))
      throw MalformedSection(section, number_, "unexpected end of file");
    return line;
  }

  int number() const { return number_; }

  //! Next line of `section` split into numeric fields.
  template <class T>
  std::vector<T> fields(const std::string& section)
  {
    const std::string line = expect(section);
    return parse_fields<T>(line, section, number_);
  }

private:
  std::istream& in_;
  int number_ = 0;
};

} // namespace

Mesh import_gmsh(std::istream& in)
{
  LineReader reader(in);
  std::string line;
  bool have_format = false;
  std::unordered_map<long, int> node_index;
  Mesh mesh;
  std::vector<std::array<long, 3>> raw_triangles;

  while (reader.next(line)) {
    if (line == "$MeshFormat") {
      const std::string header = reader.expect("$MeshFormat");
      std::istringstream is(header);
      std::string version;
      int file_type = -1;
      is >> version >> file_type;
      if (version.empty() || version[0] != '2')
        throw UnsupportedVersion("unsupported MSH version " + version + " (expected 2.2)");
      if (file_type != 0)
        throw UnsupportedVersion("binary MSH files are not supported");
      if (reader.expect("$MeshFormat") != "$EndMeshFormat")
        throw MalformedSection("$MeshFormat", reader.number(), "missing $EndMeshFormat");
      have_format = true;
    } else if (line == "$Nodes") {
      if (!have_format)
        throw MalformedSection("$Nodes", reader.number(), "$MeshFormat must come first");
      const auto count = reader.fields<long>("$Nodes");
      if (count.size() != 1 || count[0] < 0)
        throw MalformedSection("$Nodes", reader.number(), "bad node count");
      for (long i = 0; i < count[0]; ++i) {
        const auto f = reader.fields<double>("$Nodes");
        if (f.size() != 4)
          throw MalformedSection("$Nodes", reader.number(), "node needs id x y z");
        const long id = static_cast<long>(f[0]);
        if (!node_index.emplace(id, static_cast<int>(mesh.vertices.size())).second)
          throw MalformedSection("$Nodes", reader.number(), "duplicate node id");
        mesh.vertices.push_back({f[1], f[2]});
      }
      if (reader.expect("$Nodes") != "$EndNodes")
        throw MalformedSection("$Nodes", reader.number(), "node count mismatch or missing $EndNodes");
    } else if (line == "$Elements") {
      if (!have_format)
        throw MalformedSection("$Elements", reader.number(), "$MeshFormat must come first");
      const auto count =
        reader.fields<long>("$Elements");
      if (count.size() != 1 || count[0] < 0)
        throw MalformedSection("$Elements", reader.number(), "bad element count");
      for (long i = 0; i < count[0]; ++i) {
        const auto f = reader.fields<long>("$Elements");
        if (f.size() < 3)
          throw MalformedSection("$Elements", reader.number(), "element needs id type ntags");
        const long type = f[1];
        const long ntags = f[2];
        const std::size_t first_node = 3 + static_cast<std::size_t>(ntags);
        const std::size_t nodes = type == 1 ? 2 : type == 2 ? 3 : type == 15 ? 1 : 0;
        if (nodes == 0)
          throw MalformedSection("$Elements", reader.number(),
                                 "unsupported element type " + std::to_string(type));
        if (ntags < 0 || f.size() != first_node + nodes)
          throw MalformedSection("$Elements", reader.number(), "wrong number of fields");
        for (std::size_t k = first_node; k < f.size(); ++k)
          if (!node_index.count(f[k]))
            throw DanglingVertexReference("element " + std::to_string(f[0]) +
                                          " references unknown node " + std::to_string(f[k]));
        if (type == 2)
          raw_triangles.push_back({f[first_node], f[first_node + 1], f[first_node + 2]});
      }
      if (reader.expect("$Elements") != "$EndElements")
        throw MalformedSection("$Elements", reader.number(),
                               "element count mismatch or missing $EndElements");
    } else if (line.size() > 1 && line[0] == '$') {
      const std::string name = line.substr(1);
      while (true) {
        const std::string inner = reader.expect(line);
        if (inner == "$End" + name)
          break;
      }
    } else {
      throw MalformedSection("top level", reader.number(), "unexpected line '" + line + "'");
    }
  }
  if (!have_format)
    throw MalformedSection("$MeshFormat", reader.number(), "missing section");

  for (const auto& raw : raw_triangles) {
    Triangle tri{node_index.at(raw[0]), node_index.at(raw[1]), node_index.at(raw[2])};
    if (orient(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]) < 0.0)
      std::swap(tri[1], tri[2]);
    mesh.triangles.push_back(tri);
  }
  mesh.boundary.assign(mesh.vertices.size(), false);
  for (const EdgeInfo& e : collect_edges(mesh))
    if (e.triangle_count == 1)
      mesh.boundary[e.vertices[0]] = mesh.boundary[e.vertices[1]] = true;
  update_mesh_size(mesh);
  mesh.h_target = mesh.h_actual;
  return mesh;
}

void write_mesh_csv(const Mesh& mesh, std::ostream& vertices, std::ostream& triangles)
{
  vertices << std::setprecision(17) << "id,x,y,boundary\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    vertices << v << "," << mesh.vertices[v].x << "," << mesh.vertices[v].y << ","
             << (mesh.boundary[v] ? 1 : 0) << "\n";
  triangles << "id,v0,v1,v2\n";
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    triangles << t << "," << mesh.triangles[t][0] << "," << mesh.triangles[t][1] << ","
              << mesh.triangles[t][2] << "\n";
}

Mesh read_mesh_csv(std::istream& vertices, std::istream& triangles)
{
  auto rows = [](std::istream& in, const std::string& what) {
    std::vector<std::vector<double>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (lineno == 1 || line.empty())
        continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      out.push_back(parse_fields<double>(line, what, lineno));
    }
    return out;
  };
  Mesh mesh;
  for (const auto& r : rows(vertices, "vertices.csv")) {
    if (r.size() != 4 || static_cast<std::size_t>(r[0]) != mesh.vertices.size())
      throw MalformedSection("vertices.csv", static_cast<int>(mesh.vertices.size()) + 2,
                             "expected id,x,y,boundary with consecutive ids");
    mesh.vertices.push_back({r[1], r[2]});
    mesh.boundary.push_back(r[3] != 0.0);
  }
  for (const auto& r : rows(triangles, "triangles.csv")) {
    if (r.size() != 4)
      throw MalformedSection("triangles.csv", static_cast<int>(mesh.triangles.size()) + 2,
                             "expected id,v0,v1,v2");
    Triangle tri{static_cast<int>(r[1]), static_cast<int>(r[2]), static_cast<int>(r[3])};
    for (int v : tri)
      if (v < 0 || static_cast<std::size_t>(v) >= mesh.vertices.size())
        throw DanglingVertexReference("triangle references unknown vertex " + std::to_string(v));
    mesh.triangles.push_back(tri);
  }
  update_mesh_size(mesh);
  mesh.h_target = mesh.h_actual;
  return mesh;
}

} // namespace pmcf
