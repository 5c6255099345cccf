#include "hdgem/gmsh_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hdgem/quadrature.hpp"

namespace hdgem {

namespace {

// gmsh hex8 corner order -> tensor order
const int kHexGmshToTensor[8] = {0, 1, 3, 2, 4, 5, 7, 6};

struct LineReader {
  std::ifstream in;
  int lineno = 0;

  explicit LineReader(const std::string& path) : in(path) {}

  bool next(std::string& line) {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::string expect() {
    std::string line;
    if (!next(line)) throw ParseError("unexpected end of file");
    return line;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("line " + std::to_string(lineno) + ": " + what);
  }
};

}  // namespace

Mesh read_gmsh(const std::string& path) {
  LineReader rd(path);
  if (!rd.in) throw ParseError("cannot open " + path);

  std::map<std::pair<int, int>, std::string> phys_names;  // (dim,tag)->name
  std::map<std::pair<int, int>, int> entity_phys;  // (dim,entityTag)->phys tag
  std::map<long long, Vec3> nodes;                 // tag -> coord
  std::vector<long long> node_order;
  struct RawElem { int type; int entity_dim; int entity_tag; std::vector<long long> nodes; };
  std::vector<RawElem> raw;

  std::string line;
  while (rd.next(line)) {
    if (line == "$MeshFormat") {
      std::istringstream ss(rd.expect());
      double version; int filetype;
      if (!(ss >> version >> filetype)) rd.fail("malformed $MeshFormat");
      if (filetype != 0) rd.fail("binary MSH not supported");
      if (version < 4.0 || version >= 5.0)
        rd.fail("unsupported MSH version (need 4.x ASCII)");
      if (rd.expect() != "$EndMeshFormat") rd.fail("expected $EndMeshFormat");
    } else if (line == "$PhysicalNames") {
      int count;
      {
        std::istringstream ss(rd.expect());
        if (!(ss >> count)) rd.fail("malformed $PhysicalNames header");
      }
      for (int i = 0; i < count; ++i) {
        std::istringstream ss(rd.expect());
        int dim, tag; std::string name;
        if (!(ss >> dim >> tag)) rd.fail("malformed physical name entry");
        std::getline(ss, name);
        auto a = name.find('"');
        auto b = name.rfind('"');
        if (a == std::string::npos || b <= a) rd.fail("physical name not quoted");
        phys_names[{dim, tag}] = name.substr(a + 1, b - a - 1);
      }
      if (rd.expect() != "$EndPhysicalNames") rd.fail("expected $EndPhysicalNames");
    } else if (line == "$Entities") {
      long np, nc, ns, nv;
      {
        std::istringstream ss(rd.expect());
        if (!(ss >> np >> nc >> ns >> nv)) rd.fail("malformed $Entities header");
      }
      for (long i = 0; i < np; ++i) rd.expect();
      for (long i = 0; i < nc; ++i) rd.expect();
      auto read_ent = [&](int dim) {
        std::istringstream ss(rd.expect());
        int tag; double b[6]; long nphys;
        if (!(ss >> tag >> b[0] >> b[1] >> b[2] >> b[3] >> b[4] >> b[5] >> nphys))
          rd.fail("malformed entity");
        if (nphys > 0) {
          int ptag;
          ss >> ptag;
          entity_phys[{dim, tag}] = ptag;
        }
      };
      for (long i = 0; i < ns; ++i) read_ent(2);
      for (long i = 0; i < nv; ++i) read_ent(3);
      if (rd.expect() != "$EndEntities") rd.fail("expected $EndEntities");
    } else if (line == "$Nodes") {
      long nblocks, nnodes, mn, mx;
      {
        std::istringstream ss(rd.expect());
        if (!(ss >> nblocks >> nnodes >> mn >> mx)) rd.fail("malformed $Nodes header");
      }
      for (long b = 0; b < nblocks; ++b) {
        std::istringstream ss(rd.expect());
        int dim, tag, parametric; long count;
        if (!(ss >> dim >> tag >> parametric >> count)) rd.fail("malformed node block header");
        std::vector<long long> tags(count);
        for (long i = 0; i < count; ++i) {
          std::istringstream ts(rd.expect());
          if (!(ts >> tags[i])) rd.fail("malformed node tag");
        }
        for (long i = 0; i < count; ++i) {
          std::istringstream cs(rd.expect());
          double x, y, z;
          if (!(cs >> x >> y >> z)) rd.fail("malformed node coordinates");
          nodes[tags[i]] = Vec3(x, y, z);
          node_order.push_back(tags[i]);
        }
      }
      if (rd.expect() != "$EndNodes") rd.fail("expected $EndNodes");
    } else if (line == "$Elements") {
      long nblocks, nelems, mn, mx;
      {
        std::istringstream ss(rd.expect());
        if (!(ss >> nblocks >> nelems >> mn >> mx)) rd.fail("malformed $Elements header");
      }
      static const std::map<int, int> nodes_per_type = {
          {2, 3}, {3, 4}, {9, 6}, {10, 9}, {16, 8},
          {4, 4}, {5, 8}, {11, 10}, {12, 27}};
      for (long b = 0; b < nblocks; ++b) {
        std::istringstream ss(rd.expect());
        int dim, tag, type; long count;
        if (!(ss >> dim >> tag >> type >> count)) rd.fail("malformed element block header");
        auto it = nodes_per_type.find(type);
        for (long i = 0; i < count; ++i) {
          std::istringstream es(rd.expect());
          long long etag;
          if (!(es >> etag)) rd.fail("malformed element entry");
          if (it == nodes_per_type.end()) continue;  // skip points/lines/etc.
          RawElem re;
          re.type = type;
          re.entity_dim = dim;
          re.entity_tag = tag;
          re.nodes.resize(it->second);
          for (int k = 0; k < it->second; ++k)
            if (!(es >> re.nodes[k])) rd.fail("element has too few nodes");
          raw.push_back(std::move(re));
        }
      }
      if (rd.expect() != "$EndElements") rd.fail("expected $EndElements");
    } else if (!line.empty() && line[0] == '$') {
      // skip unknown section
      std::string end = "$End" + line.substr(1);
      while (rd.next(line) && line != end) {}
    }
  }

  Mesh mesh;
  bool have_volume = false, have_surface = false;
  for (const auto& re : raw) {
    if (re.entity_dim == 3) have_volume = true;
    if (re.entity_dim == 2) have_surface = true;
  }
  if (!have_volume) throw ParseError(path + ": no volume cells found");
  if (have_surface && phys_names.empty() && entity_phys.empty())
    throw ParseError(path +
                     ": mixed-dimension cells but no physical groups to "
                     "classify surface elements");

  // volume elements first; collect referenced nodes
  std::set<long long> referenced;
  for (const auto& re : raw) {
    if (re.entity_dim != 3) continue;
    Element el;
    if (re.type == 4 || re.type == 11) {
      el.kind = CellKind::Tet;
      el.verts = {0, 0, 0, 0};
      for (int k = 0; k < 4; ++k) el.verts[k] = static_cast<int>(re.nodes[k]);
    } else {
      el.kind = CellKind::Hex;
      el.verts.resize(8);
      for (int k = 0; k < 8; ++k)
        el.verts[k] = static_cast<int>(re.nodes[kHexGmshToTensor[k]]);
    }
    auto pit = entity_phys.find({3, re.entity_tag});
    if (pit != entity_phys.end()) el.region = pit->second;
    mesh.elements.push_back(std::move(el));
    for (int v : mesh.elements.back().verts)
      referenced.insert(static_cast<long long>(v));
  }

  // renumber referenced nodes in file order (drops unreferenced ones)
  std::map<long long, int> renum;
  for (long long t : node_order) {
    if (!referenced.count(t)) continue;
    auto nit = nodes.find(t);
    if (nit == nodes.end()) throw ParseError("element references unknown node");
    renum[t] = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(nit->second);
  }
  for (long long t : referenced)
    if (!renum.count(t))
      throw ParseError("element references unknown node " + std::to_string(t));
  for (auto& el : mesh.elements)
    for (int& v : el.verts) v = renum[static_cast<long long>(v)];

  // geometry check before topology
  for (int e = 0; e < mesh.n_elements(); ++e) {
    auto coords = mesh.element_coords(e);
    const auto& rule = make_quadrature(mesh.elements[e].kind, 2);
    for (int q = 0; q < rule.size(); ++q) {
      try {
        map_physical(mesh.elements[e].kind, coords, rule.points[q]);
      } catch (const GeometryError&) {
        throw GeometryError(path + ": non-positive Jacobian in element " +
                            std::to_string(e));
      }
    }
  }

  build_face_topology(mesh);

  // boundary tags from surface elements
  std::map<std::vector<int>, BoundaryTag> face_tags;
  for (const auto& re : raw) {
    if (re.entity_dim != 2) continue;
    auto pit = entity_phys.find({2, re.entity_tag});
    if (pit == entity_phys.end()) continue;
    auto nit = phys_names.find({2, pit->second});
    if (nit == phys_names.end()) continue;
    BoundaryTag tag;
    if (nit->second == "PEC") tag = BoundaryTag::GammaD;
    else if (nit->second == "ABC") tag = BoundaryTag::GammaA;
    else continue;
    int ncorner = (re.type == 2 || re.type == 9) ? 3 : 4;
    std::vector<int> key;
    for (int k = 0; k < ncorner; ++k) {
      auto rit = renum.find(re.nodes[k]);
      if (rit == renum.end()) throw ParseError("surface element references unknown node");
      key.push_back(rit->second);
    }
    std::sort(key.begin(), key.end());
    face_tags[key] = tag;
  }
  for (auto& fc : mesh.faces) {
    if (!fc.boundary()) continue;
    std::vector<int> key = fc.verts;
    std::sort(key.begin(), key.end());
    auto it = face_tags.find(key);
    fc.tag = (it != face_tags.end()) ? it->second : BoundaryTag::GammaD;
  }
  return mesh;
}

void write_gmsh(const Mesh& mesh, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path);

  std::set<int> regions;
  for (const auto& el : mesh.elements) regions.insert(el.region);
  bool has_d = false, has_a = false;
  for (const auto& fc : mesh.faces) {
    if (!fc.boundary()) continue;
    if (fc.tag == BoundaryTag::GammaD) has_d = true;
    if (fc.tag == BoundaryTag::GammaA) has_a = true;
  }

  std::fprintf(f, "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n");

  int nsurf = (has_d ? 1 : 0) + (has_a ? 1 : 0);
  std::fprintf(f, "$PhysicalNames\n%d\n", nsurf + static_cast<int>(regions.size()));
  if (has_d) std::fprintf(f, "2 1 \"PEC\"\n");
  if (has_a) std::fprintf(f, "2 2 \"ABC\"\n");
  for (int r : regions) std::fprintf(f, "3 %d \"region%d\"\n", r, r);
  std::fprintf(f, "$EndPhysicalNames\n");

  std::fprintf(f, "$Entities\n0 0 %d %d\n", nsurf, static_cast<int>(regions.size()));
  if (has_d) std::fprintf(f, "1 0 0 0 0 0 0 1 1 0\n");
  if (has_a) std::fprintf(f, "2 0 0 0 0 0 0 1 2 0\n");
  for (int r : regions)
    std::fprintf(f, "%d 0 0 0 0 0 0 1 %d 0\n", r, r);
  std::fprintf(f, "$EndEntities\n");

  int first_region = *regions.begin();
  std::fprintf(f, "$Nodes\n1 %zu 1 %zu\n3 %d 0 %zu\n", mesh.vertices.size(),
               mesh.vertices.size(), first_region, mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    std::fprintf(f, "%zu\n", i + 1);
  for (const auto& v : mesh.vertices)
    std::fprintf(f, "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
  std::fprintf(f, "$EndNodes\n");

  // element blocks: boundary faces per tag, then volume cells per region/kind
  struct Block { int dim, entity, type; std::vector<std::vector<int>> conn; };
  std::vector<Block> blocks;
  auto block_for = [&](int dim, int entity, int type) -> Block& {
    for (auto& b : blocks)
      if (b.dim == dim && b.entity == entity && b.type == type) return b;
    blocks.push_back({dim, entity, type, {}});
    return blocks.back();
  };
  for (const auto& fc : mesh.faces) {
    if (!fc.boundary()) continue;
    int entity = (fc.tag == BoundaryTag::GammaA) ? 2 : 1;
    int type = (fc.verts.size() == 3) ? 2 : 3;
    block_for(2, entity, type).conn.push_back(fc.verts);
  }
  // volume cells in element order; a new block starts whenever the region or
  // cell type changes, so reading the file back preserves the ordering
  Block* cur = nullptr;
  for (const auto& el : mesh.elements) {
    int type = (el.kind == CellKind::Tet) ? 4 : 5;
    if (!cur || cur->entity != el.region || cur->type != type) {
      blocks.push_back({3, el.region, type, {}});
      cur = &blocks.back();
    }
    if (el.kind == CellKind::Tet) {
      cur->conn.push_back(el.verts);
    } else {
      std::vector<int> gm(8);
      for (int k = 0; k < 8; ++k) gm[k] = el.verts[kHexGmshToTensor[k]];
      cur->conn.push_back(gm);
    }
  }

  std::size_t total = 0;
  for (const auto& b : blocks) total += b.conn.size();
  std::fprintf(f, "$Elements\n%zu %zu 1 %zu\n", blocks.size(), total, total);
  std::size_t tag = 1;
  for (const auto& b : blocks) {
    std::fprintf(f, "%d %d %d %zu\n", b.dim, b.entity, b.type, b.conn.size());
    for (const auto& conn : b.conn) {
      std::fprintf(f, "%zu", tag++);
      for (int v : conn) std::fprintf(f, " %d", v + 1);
      std::fprintf(f, "\n");
    }
  }
  std::fprintf(f, "$EndElements\n");
  std::fclose(f);
}

}  // namespace hdgem
