#include "sheafdiff/serialization.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "sheafdiff/diffusion.hpp"
#include "sheafdiff/errors.hpp"

namespace sheafdiff {

using nlohmann::json;

namespace {

std::string edge_key(const Edge& e) { return std::to_string(e.u) + "-" + std::to_string(e.v); }

std::string restriction_key(VertexId i, const Edge& e) {
  return std::to_string(i) + "|" + edge_key(e);
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& doc, std::size_t rows, std::size_t cols,
                        const std::string& key) {
  if (!doc.is_array() || doc.size() != rows) {
    throw StructuralError("restriction " + key + " must have " + std::to_string(rows) + " rows");
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = doc[r];
    if (!row.is_array() || row.size() != cols) {
      throw StructuralError("restriction " + key + " must have " + std::to_string(cols) +
                            " columns");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return m;
}

Vector vector_from_json(const json& doc) {
  Vector v(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t k = 0; k < doc.size(); ++k) v(static_cast<Eigen::Index>(k)) = doc[k].get<double>();
  return v;
}

SheafDocument parse(const json& doc) {
  if (!doc.is_object()) throw StructuralError("sheaf document must be a JSON object");
  for (const char* field : {"vertices", "edges", "restrictions"}) {
    if (!doc.contains(field)) throw StructuralError(std::string("sheaf document lacks '") + field + "'");
  }
  const auto vertex_dims = doc.at("vertices").get<std::vector<std::size_t>>();
  Graph graph(vertex_dims.size());
  std::vector<std::size_t> edge_dims;
  for (const json& e : doc.at("edges")) {
    const auto pair = e.at("pair").get<std::vector<VertexId>>();
    if (pair.size() != 2) throw StructuralError("edge 'pair' must have two entries");
    graph.add_edge(pair[0], pair[1]);
    edge_dims.push_back(e.at("dim").get<std::size_t>());
  }
  const json& maps = doc.at("restrictions");
  std::vector<EdgeRestrictions> restrictions;
  for (EdgeId id = 0; id < graph.edge_count(); ++id) {
    const Edge& e = graph.edge(id);
    const auto load = [&](VertexId v) {
      const std::string key = restriction_key(v, e);
      if (!maps.contains(key)) throw StructuralError("missing restriction " + key);
      return matrix_from_json(maps.at(key), edge_dims[id], vertex_dims.at(v), key);
    };
    Matrix from_u = load(e.u);
    Matrix from_v = load(e.v);
    restrictions.push_back({std::move(from_u), std::move(from_v)});
  }
  CellularSheaf sheaf(std::move(graph), vertex_dims, std::move(edge_dims),
                      std::move(restrictions));

  std::optional<PotentialSet> potentials;
  if (doc.contains("potentials")) {
    const json& pots = doc.at("potentials");
    std::vector<EdgePotential> list;
    for (EdgeId id = 0; id < sheaf.edge_count(); ++id) {
      const std::string key = edge_key(sheaf.graph().edge(id));
      if (!pots.contains(key)) throw ConfigurationError("missing potential for edge " + key);
      const json& p = pots.at(key);
      const std::string kind = p.at("kind").get<std::string>();
      const double weight = p.value("weight", 1.0);
      if (kind == "quadratic") {
        list.push_back(EdgePotential::quadratic(sheaf.edge_dim(id), weight));
      } else if (kind == "offset_quadratic") {
        list.push_back(EdgePotential::offset_quadratic(vector_from_json(p.at("offset")), weight));
      } else {
        throw ConfigurationError("unsupported potential kind '" + kind + "' on edge " + key);
      }
    }
    PotentialSet set(std::move(list));
    set.validate_for(sheaf);
    potentials = std::move(set);
  }
  return {std::move(sheaf), std::move(potentials)};
}

}  // namespace

json sheaf_to_json(const CellularSheaf& sheaf, const PotentialSet* potentials) {
  json doc;
  doc["vertices"] = sheaf.vertex_dims();
  json edges = json::array();
  json maps = json::object();
  for (EdgeId id = 0; id < sheaf.edge_count(); ++id) {
    const Edge& e = sheaf.graph().edge(id);
    edges.push_back({{"pair", {e.u, e.v}}, {"dim", sheaf.edge_dim(id)}});
    maps[restriction_key(e.u, e)] = matrix_to_json(sheaf.restrictions(id).from_u);
    maps[restriction_key(e.v, e)] = matrix_to_json(sheaf.restrictions(id).from_v);
  }
  doc["edges"] = std::move(edges);
  doc["restrictions"] = std::move(maps);
  if (potentials) {
    potentials->validate_for(sheaf);
    json pots = json::object();
    for (EdgeId id = 0; id < sheaf.edge_count(); ++id) {
      const auto& p = (*potentials)[id];
      if (!p.is_quadratic_family()) {
        throw ConfigurationError("custom potentials cannot be serialized");
      }
      json entry{{"kind", to_string(p.kind())}};
      if (p.kind() == EdgePotential::Kind::kOffsetQuadratic) {
        entry["offset"] = std::vector<double>(p.offset().data(), p.offset().data() + p.offset().size());
      }
      if (p.weight() != 1.0) entry["weight"] = p.weight();
      pots[edge_key(sheaf.graph().edge(id))] = std::move(entry);
    }
    doc["potentials"] = std::move(pots);
  }
  return doc;
}

SheafDocument sheaf_from_json(const json& doc) {
  try {
    return parse(doc);
  } catch (const json::exception& ex) {
    throw StructuralError(std::string("malformed sheaf document: ") + ex.what());
  }
}

void save_sheaf(const std::filesystem::path& path, const CellularSheaf& sheaf,
                const PotentialSet* potentials) {
  std::ofstream out(path);
  if (!out) throw ConfigurationError("cannot write " + path.string());
  out << sheaf_to_json(sheaf, potentials).dump(2) << '\n';
}

SheafDocument load_sheaf(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& ex) {
    throw StructuralError("cannot parse " + path.string() + ": " + ex.what());
  }
  return sheaf_from_json(doc);
}

void write_trace_csv(std::ostream& out, const DiffusionTrace& trace) {
  out << "tick,energy,alpha,beta,rel_error,iterate_norm\n";
  out << std::setprecision(17);
  for (const auto& r : trace.records) {
    out << r.tick << ',' << r.energy << ',' << r.alpha << ',' << r.beta << ',' << r.rel_error
        << ',' << r.iterate_norm << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const DiffusionTrace& trace) {
  std::ofstream out(path);
  if (!out) throw ConfigurationError("cannot write " + path.string());
  write_trace_csv(out, trace);
}

}  // namespace sheafdiff
