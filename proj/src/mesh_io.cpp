#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "qgfv/mesh.hpp"

namespace qgfv {

namespace {

const char* cell_class_token(CellClass c) {
  switch (c) {
    case CellClass::Interior: return "IC";
    case CellClass::Boundary: return "BC";
    case CellClass::BoundaryAdjacent: return "BC1";
  }
  return "IC";
}

long long one_based(Index i) { return i == kNoIndex ? -1 : static_cast<long long>(i) + 1; }

/// Line-oriented tokenizer that drops comments and blank lines.
class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ss(line);
      tokens.clear();
      for (std::string tok; ss >> tok;) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    return false;
  }
  std::size_t line() const { return line_no_; }

 private:
  std::istream& is_;
  std::size_t line_no_ = 0;
};

bool looks_numeric(const std::string& s) {
  return !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-' || s[0] == '+' || s[0] == '.');
}

struct Parser {
  Reader reader;
  std::vector<std::string> tok;
  std::string section = "header";
  std::string previous;

  explicit Parser(std::istream& is) : reader(is) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw MeshFormatError(section, reader.line(), what);
  }

  double real(std::size_t k) const {
    const char* s = tok[k].c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0' || errno == ERANGE) fail("expected a real number, got '" + tok[k] + "'");
    return v;
  }

  long long integer(std::size_t k) const {
    const char* s = tok[k].c_str();
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s, &end, 10);
    if (end == s || *end != '\0' || errno == ERANGE) fail("expected an integer, got '" + tok[k] + "'");
    return v;
  }

  /// Reads "name N" and returns N.
  std::size_t header(const std::string& name) {
    previous = section;
    if (!reader.next(tok)) {
      section = name;
      fail("missing section header '" + name + " N'");
    }
    if (looks_numeric(tok[0])) {
      section = previous;
      fail("more rows than the declared count");
    }
    section = name;
    if (tok.size() != 2 || tok[0] != name) fail("malformed section header, expected '" + name + " N'");
    const long long n = integer(1);
    if (n < 0) fail("negative count");
    return static_cast<std::size_t>(n);
  }

  void row(std::size_t expected_tokens, std::size_t k, std::size_t n) {
    if (!reader.next(tok)) fail("unexpected end of file after " + std::to_string(k) + " of " + std::to_string(n) + " rows");
    if (!looks_numeric(tok[0]))
      fail("found '" + tok[0] + "' after " + std::to_string(k) + " of " + std::to_string(n) + " declared rows");
    if (tok.size() != expected_tokens)
      fail("expected " + std::to_string(expected_tokens) + " fields, got " + std::to_string(tok.size()));
  }

  void expect_id(std::size_t k) const {
    if (integer(0) != static_cast<long long>(k) + 1) fail("row id " + tok[0] + " out of sequence");
  }

  Index index(std::size_t k, std::size_t count, bool optional) const {
    const long long v = integer(k);
    if (optional && v == -1) return kNoIndex;
    if (v < 1 || static_cast<std::size_t>(v) > count) fail("index " + tok[k] + " out of range [1, " + std::to_string(count) + "]");
    return static_cast<Index>(v - 1);
  }
};

}  // namespace

void write_mesh(std::ostream& os, const PrimalDualMesh& mesh) {
  const auto& t = mesh.tables();
  os << std::setprecision(17);
  os << "qgmesh 1\n";
  os << "# cells: id x y area class\n";
  os << "cells " << t.cell_centers.size() << '\n';
  for (std::size_t i = 0; i < t.cell_centers.size(); ++i)
    os << i + 1 << ' ' << t.cell_centers[i].x << ' ' << t.cell_centers[i].y << ' ' << t.cell_areas[i] << ' '
       << cell_class_token(t.cell_class[i]) << '\n';
  os << "# vertices: id x y area\n";
  os << "vertices " << t.vertex_positions.size() << '\n';
  for (std::size_t v = 0; v < t.vertex_positions.size(); ++v)
    os << v + 1 << ' ' << t.vertex_positions[v].x << ' ' << t.vertex_positions[v].y << ' ' << t.vertex_areas[v]
       << '\n';
  os << "# edges: id d_e l_e nx ny cell1 cell2 vertex1 vertex2 class\n";
  os << "edges " << t.d_e.size() << '\n';
  for (std::size_t e = 0; e < t.d_e.size(); ++e)
    os << e + 1 << ' ' << t.d_e[e] << ' ' << t.l_e[e] << ' ' << t.normals[e].x << ' ' << t.normals[e].y << ' '
       << one_based(t.cells_on_edge[e][0]) << ' ' << one_based(t.cells_on_edge[e][1]) << ' '
       << one_based(t.vertices_on_edge[e][0]) << ' ' << one_based(t.vertices_on_edge[e][1]) << ' '
       << (t.edge_class[e] == EdgeClass::Boundary ? "BE" : "IE") << '\n';
  os << "# kites: cell vertex area\n";
  os << "kites " << t.kites.size() << '\n';
  for (const auto& k : t.kites) os << k.cell + 1 << ' ' << k.vertex + 1 << ' ' << k.area << '\n';
}

PrimalDualMesh read_mesh(std::istream& is) {
  Parser p(is);
  if (!p.reader.next(p.tok)) p.fail("empty file");
  if (p.tok.size() != 2 || p.tok[0] != "qgmesh") p.fail("expected 'qgmesh 1'");
  if (p.tok[1] != "1") p.fail("unsupported version '" + p.tok[1] + "'");

  MeshTables t;
  const std::size_t nc = p.header("cells");
  t.cell_centers.resize(nc);
  t.cell_areas.resize(nc);
  t.cell_class.resize(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    p.row(5, i, nc);
    p.expect_id(i);
    t.cell_centers[i] = {p.real(1), p.real(2)};
    t.cell_areas[i] = p.real(3);
    const std::string& c = p.tok[4];
    if (c == "IC") t.cell_class[i] = CellClass::Interior;
    else if (c == "BC") t.cell_class[i] = CellClass::Boundary;
    else if (c == "BC1") t.cell_class[i] = CellClass::BoundaryAdjacent;
    else p.fail("unknown cell class '" + c + "'");
  }

  const std::size_t nv = p.header("vertices");
  t.vertex_positions.resize(nv);
  t.vertex_areas.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    p.row(4, v, nv);
    p.expect_id(v);
    t.vertex_positions[v] = {p.real(1), p.real(2)};
    t.vertex_areas[v] = p.real(3);
  }

  const std::size_t ne = p.header("edges");
  t.d_e.resize(ne);
  t.l_e.resize(ne);
  t.normals.resize(ne);
  t.cells_on_edge.resize(ne);
  t.vertices_on_edge.resize(ne);
  t.edge_class.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    p.row(10, e, ne);
    p.expect_id(e);
    t.d_e[e] = p.real(1);
    t.l_e[e] = p.real(2);
    t.normals[e] = {p.real(3), p.real(4)};
    t.cells_on_edge[e] = {p.index(5, nc, false), p.index(6, nc, true)};
    t.vertices_on_edge[e] = {p.index(7, nv, false), p.index(8, nv, true)};
    const std::string& c = p.tok[9];
    if (c == "IE") t.edge_class[e] = EdgeClass::Interior;
    else if (c == "BE") t.edge_class[e] = EdgeClass::Boundary;
    else p.fail("unknown edge class '" + c + "'");
  }

  const std::size_t nk = p.header("kites");
  t.kites.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    p.row(3, k, nk);
    t.kites[k] = {p.index(0, nc, false), p.index(1, nv, false), p.real(2)};
  }
  if (p.reader.next(p.tok)) p.fail("trailing content after the last declared row");

  if (nc + nv != ne + 1) {
    p.section = "cells/vertices/edges";
    p.fail("counts violate the Euler relation: cells " + std::to_string(nc) + " + vertices " + std::to_string(nv) +
           " != edges " + std::to_string(ne) + " + 1");
  }
  t.apply_sign_conventions();
  return PrimalDualMesh(std::move(t));
}

void save_mesh(const PrimalDualMesh& mesh, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  write_mesh(os, mesh);
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

PrimalDualMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  return read_mesh(is);
}

std::uint64_t mesh_checksum(const PrimalDualMesh& mesh) {
  std::ostringstream os;
  write_mesh(os, mesh);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace qgfv
