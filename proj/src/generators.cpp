#include "sheafdiff/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "sheafdiff/errors.hpp"
#include "sheafdiff/seeding.hpp"

namespace sheafdiff {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t v) { return static_cast<Index>(v); }

}  // namespace

Graph random_regular_graph(std::size_t n, std::size_t k, std::uint64_t seed,
                           std::size_t max_retries) {
  if ((n * k) % 2 != 0) throw std::invalid_argument("n * k must be even for a k-regular graph");
  if (k >= n && !(n == 0 && k == 0)) throw std::invalid_argument("k-regular graph needs k < n");
  std::mt19937_64 rng(seed);
  std::vector<VertexId> points;
  points.reserve(n * k);
  for (VertexId v = 0; v < n; ++v) {
    for (std::size_t c = 0; c < k; ++c) points.push_back(v);
  }
  for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
    std::shuffle(points.begin(), points.end(), rng);
    Graph g(n);
    bool simple = true;
    for (std::size_t p = 0; p + 1 < points.size() && simple; p += 2) {
      const VertexId a = points[p];
      const VertexId b = points[p + 1];
      if (a == b || g.has_edge(a, b)) {
        simple = false;
      } else {
        g.add_edge(a, b);
      }
    }
    if (simple) return g;
  }
  throw RetryableError("pairing model produced no simple " + std::to_string(k) +
                       "-regular graph on " + std::to_string(n) + " vertices in " +
                       std::to_string(max_retries) + " attempts");
}

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  Graph g(n);
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId j = i + 1; j < n; ++j) {
      if (coin(rng)) g.add_edge(i, j);
    }
  }
  return g;
}

CellularSheaf constant_sheaf(const Graph& graph, std::size_t n) {
  if (n == 0) throw std::invalid_argument("constant sheaf dimension must be >= 1");
  const Matrix id = Matrix::Identity(idx(n), idx(n));
  std::vector<EdgeRestrictions> maps(graph.edge_count(), EdgeRestrictions{id, id});
  return CellularSheaf(graph, std::vector<std::size_t>(graph.vertex_count(), n),
                       std::vector<std::size_t>(graph.edge_count(), n), std::move(maps));
}

CellularSheaf random_restriction_sheaf(const Graph& graph, std::size_t vertex_dim,
                                       std::size_t edge_dim, std::uint64_t seed) {
  if (vertex_dim == 0 || edge_dim == 0) throw std::invalid_argument("stalk dimensions must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto draw = [&] {
    Matrix m(idx(edge_dim), idx(vertex_dim));
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) m(r, c) = unit(rng);
    }
    return m;
  };
  std::vector<EdgeRestrictions> maps;
  maps.reserve(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    Matrix from_u = draw();
    Matrix from_v = draw();
    maps.push_back({std::move(from_u), std::move(from_v)});
  }
  return CellularSheaf(graph, std::vector<std::size_t>(graph.vertex_count(), vertex_dim),
                       std::vector<std::size_t>(graph.edge_count(), edge_dim), std::move(maps));
}

Matrix restriction_from_weight(const Matrix& weight, double pivot_threshold) {
  if (weight.rows() != weight.cols() || weight.rows() == 0) {
    throw StructuralError("matrix weight must be square and non-empty");
  }
  // W = S^T S with S the PSD square root; QR of S gives S P = Q R, so
  // F = R P^T satisfies F^T F = S^T S = W.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (weight + weight.transpose()));
  const Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix root = eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();

  Eigen::ColPivHouseholderQR<Matrix> qr(root);
  const Matrix R = qr.matrixR().triangularView<Eigen::Upper>();
  const double lead = std::abs(R(0, 0));
  Index rank = 0;
  if (lead > 0.0) {
    while (rank < R.rows() && std::abs(R(rank, rank)) > pivot_threshold * lead) ++rank;
  }
  if (rank == 0) return Matrix::Zero(1, weight.cols());
  return R.topRows(rank) * qr.colsPermutation().transpose();
}

CellularSheaf sheaf_from_weights(const Graph& graph, const std::vector<Matrix>& weights) {
  if (weights.size() != graph.edge_count()) {
    throw StructuralError("need one matrix weight per edge");
  }
  const std::size_t dim = weights.empty() ? 1 : static_cast<std::size_t>(weights[0].rows());
  std::vector<std::size_t> edge_dims;
  std::vector<EdgeRestrictions> maps;
  for (const auto& w : weights) {
    if (static_cast<std::size_t>(w.rows()) != dim) {
      throw StructuralError("all matrix weights must share one dimension");
    }
    Matrix f = restriction_from_weight(w);
    edge_dims.push_back(static_cast<std::size_t>(f.rows()));
    maps.push_back({f, f});
  }
  return CellularSheaf(graph, std::vector<std::size_t>(graph.vertex_count(), dim),
                       std::move(edge_dims), std::move(maps));
}

MatrixWeightedSheaf matrix_weighted_sheaf(const Graph& graph, std::size_t dim,
                                          double pd_probability, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("matrix weight dimension must be >= 1");
  if (!(pd_probability >= 0.0 && pd_probability <= 1.0)) {
    throw std::invalid_argument("pd_probability must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution strictly_pd(pd_probability);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Matrix> weights;
  weights.reserve(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const std::size_t rows = strictly_pd(rng) ? dim : dim - 1;
    Matrix factor(idx(rows), idx(dim));
    for (Index r = 0; r < factor.rows(); ++r) {
      for (Index c = 0; c < factor.cols(); ++c) factor(r, c) = normal(rng);
    }
    weights.push_back(rows == 0 ? Matrix::Zero(idx(dim), idx(dim))
                                : Matrix(factor.transpose() * factor));
  }
  CellularSheaf sheaf = sheaf_from_weights(graph, weights);
  return {std::move(sheaf), std::move(weights)};
}

Matrix matrix_weighted_laplacian(const Graph& graph, const std::vector<Matrix>& weights) {
  if (weights.size() != graph.edge_count()) {
    throw StructuralError("need one matrix weight per edge");
  }
  const Index dim = weights.empty() ? 1 : weights[0].rows();
  const Index n = idx(graph.vertex_count()) * dim;
  Matrix L = Matrix::Zero(n, n);
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const Edge& ed = graph.edge(e);
    const Index u = idx(ed.u) * dim;
    const Index v = idx(ed.v) * dim;
    L.block(u, u, dim, dim) += weights[e];
    L.block(v, v, dim, dim) += weights[e];
    L.block(u, v, dim, dim) -= weights[e];
    L.block(v, u, dim, dim) -= weights[e];
  }
  return L;
}

UavFormation uav_formation_sheaf(const UavDisplacements& displacements) {
  Graph graph(6);
  // Agents 1..6 map to vertices 0..5; edge order 12, 13, 23, 45, 46, 56, 14.
  const std::pair<VertexId, VertexId> edges[] = {{0, 1}, {0, 2}, {1, 2}, {3, 4},
                                                 {3, 5}, {4, 5}, {0, 3}};
  for (const auto& [a, b] : edges) graph.add_edge(a, b);

  Matrix position = Matrix::Zero(3, 6);
  position.leftCols(3).setIdentity();
  Matrix velocity = Matrix::Zero(3, 6);
  velocity.rightCols(3).setIdentity();
  const Matrix zero = Matrix::Zero(3, 6);

  std::vector<EdgeRestrictions> maps{
      {position, position}, {position, position}, {zero, zero},         {position, position},
      {position, position}, {zero, zero},         {velocity, velocity},
  };
  std::vector<EdgePotential> potentials{
      EdgePotential::offset_quadratic(displacements[0]),
      EdgePotential::offset_quadratic(displacements[1]),
      EdgePotential::quadratic(3),
      EdgePotential::offset_quadratic(displacements[2]),
      EdgePotential::offset_quadratic(displacements[3]),
      EdgePotential::quadratic(3),
      EdgePotential::quadratic(3),
  };
  CellularSheaf sheaf(std::move(graph), std::vector<std::size_t>(6, 6),
                      std::vector<std::size_t>(7, 3), std::move(maps));
  return {std::move(sheaf), PotentialSet(std::move(potentials))};
}

Cochain0 gaussian_initial_condition(const CellularSheaf& sheaf, double variance,
                                    std::uint64_t seed) {
  if (!(variance > 0.0)) throw std::invalid_argument("initial-condition variance must be > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  Cochain0 x = sheaf.zero_c0();
  for (Index k = 0; k < x.size(); ++k) x(k) = normal(rng);
  return x;
}

Graph generate_graph(const GraphSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case GraphSpec::Kind::kRegular:
      return random_regular_graph(spec.n, spec.k, seed);
    case GraphSpec::Kind::kErdosRenyi:
      return erdos_renyi(spec.n, spec.p, seed);
    case GraphSpec::Kind::kExplicit:
      return Graph(spec.n, spec.edges);
  }
  throw ConfigurationError("unknown graph kind");
}

GeneratedSheaf generate_sheaf(const Graph& graph, const SheafSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case SheafSpec::Kind::kConstant:
      return {constant_sheaf(graph, spec.vertex_dim), {}};
    case SheafSpec::Kind::kRandomRestriction:
      return {random_restriction_sheaf(graph, spec.vertex_dim, spec.edge_dim, seed), {}};
    case SheafSpec::Kind::kMatrixWeighted: {
      auto mw = matrix_weighted_sheaf(graph, spec.vertex_dim, spec.pd_probability, seed);
      return {std::move(mw.sheaf), std::move(mw.weights)};
    }
  }
  throw ConfigurationError("unknown sheaf kind");
}

GeneratedSheaf generate(const GeneratorConfig& config) {
  const Graph graph = generate_graph(config.graph, derive_seed(config.seed, Stream::kGraph));
  return generate_sheaf(graph, config.sheaf, derive_seed(config.seed, Stream::kSheaf));
}

}  // namespace sheafdiff
