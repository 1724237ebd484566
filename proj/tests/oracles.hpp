#pragma once

// Reference computations for the tests. Each one is built from first
// principles (dense loops, textbook formulas) rather than the library's own
// routines, so agreement is meaningful.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "sheafdiff/generators.hpp"
#include "sheafdiff/potentials.hpp"

namespace oracle {

using sheafdiff::CellularSheaf;
using sheafdiff::Matrix;
using sheafdiff::Vector;

/// Central difference gradient of f at x.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                          double h = 1e-6) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    probe(k) = x(k) + h;
    const double up = f(probe);
    probe(k) = x(k) - h;
    const double down = f(probe);
    probe(k) = x(k);
    g(k) = (up - down) / (2.0 * h);
  }
  return g;
}

/// D - A from an edge list.
inline Matrix graph_laplacian(std::size_t n,
                              const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  Matrix a = Matrix::Zero(n, n);
  for (const auto& [u, v] : edges) {
    a(u, v) = 1.0;
    a(v, u) = 1.0;
  }
  Matrix d = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = a.row(i).sum();
  return d - a;
}

inline std::vector<std::pair<std::size_t, std::size_t>> edge_pairs(const sheafdiff::Graph& g) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : g.edges()) out.emplace_back(e.u, e.v);
  return out;
}

/// Union-find component count.
inline std::size_t component_count(std::size_t n,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };
  std::size_t count = n;
  for (const auto& [u, v] : edges) {
    const std::size_t a = find(u), b = find(v);
    if (a != b) {
      parent[a] = b;
      --count;
    }
  }
  return count;
}

/// Coboundary written entry by entry from the restriction maps.
inline Matrix coboundary(const CellularSheaf& sheaf) {
  std::vector<std::size_t> voff{0}, eoff{0};
  for (std::size_t i = 0; i < sheaf.vertex_count(); ++i) {
    voff.push_back(voff.back() + sheaf.vertex_dim(i));
  }
  for (std::size_t e = 0; e < sheaf.edge_count(); ++e) {
    eoff.push_back(eoff.back() + sheaf.edge_dim(e));
  }
  Matrix d = Matrix::Zero(eoff.back(), voff.back());
  for (std::size_t e = 0; e < sheaf.edge_count(); ++e) {
    const auto& edge = sheaf.graph().edge(e);
    const Matrix& fu = sheaf.restrictions(e).from_u;
    const Matrix& fv = sheaf.restrictions(e).from_v;
    for (Eigen::Index r = 0; r < fu.rows(); ++r) {
      for (Eigen::Index c = 0; c < fu.cols(); ++c) d(eoff[e] + r, voff[edge.u] + c) += fu(r, c);
      for (Eigen::Index c = 0; c < fv.cols(); ++c) d(eoff[e] + r, voff[edge.v] + c) -= fv(r, c);
    }
  }
  return d;
}

inline std::size_t svd_rank(const Matrix& m, double rel_tol = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) r += s(k) > rel_tol * s(0) ? 1 : 0;
  return r;
}

/// Matrix-weighted Laplacian: block (i,i) = sum of incident weights,
/// block (i,j) = -W_ij.
inline Matrix matrix_weighted_blocks(const sheafdiff::Graph& g, const std::vector<Matrix>& w,
                                     std::size_t dim) {
  const std::size_t n = g.vertex_count();
  Matrix l = Matrix::Zero(n * dim, n * dim);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto [u, v] = g.edge(e);
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) {
        l(u * dim + r, u * dim + c) += w[e](r, c);
        l(v * dim + r, v * dim + c) += w[e](r, c);
        l(u * dim + r, v * dim + c) -= w[e](r, c);
        l(v * dim + r, u * dim + c) -= w[e](r, c);
      }
    }
  }
  return l;
}

/// Nearest point of {x : delta x = b} (b in the image) via a complete
/// orthogonal decomposition: x - delta^+ (delta x - b).
inline Vector project_affine(const Matrix& delta, const Vector& b, const Vector& x) {
  if (delta.rows() == 0) return x;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(delta);
  cod.setThreshold(1e-10);
  return x - cod.solve(delta * x - b);
}

/// Nearest point of argmin 1/2 |delta x - b|^2 for arbitrary b: least-squares
/// residual first, then the affine projection.
inline Vector project_least_squares(const Matrix& delta, const Vector& b, const Vector& x) {
  if (delta.rows() == 0) return x;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(delta);
  cod.setThreshold(1e-10);
  const Vector reachable = delta * cod.solve(b);
  return x - cod.solve(delta * x - reachable);
}

/// f(x) = 1/2 |v_1 - v_4|^2 + sum over leader-follower edges
/// 1/2 |p_i - p_j - target_ij|^2, with agents 1..6 at offsets 0, 6, ..., 30.
inline double uav_energy(const Vector& x, const sheafdiff::UavDisplacements& targets) {
  auto p = [&](int agent) -> Eigen::Vector3d { return x.segment<3>(6 * (agent - 1)); };
  auto v = [&](int agent) -> Eigen::Vector3d { return x.segment<3>(6 * (agent - 1) + 3); };
  double f = 0.5 * (v(1) - v(4)).squaredNorm();
  f += 0.5 * (p(1) - p(2) - targets[0]).squaredNorm();
  f += 0.5 * (p(1) - p(3) - targets[1]).squaredNorm();
  f += 0.5 * (p(4) - p(5) - targets[2]).squaredNorm();
  f += 0.5 * (p(4) - p(6) - targets[3]).squaredNorm();
  return f;
}

/// Spearman correlation by brute-force ranking: rank = (#less) + (#equal + 1) / 2.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) {
        if (w < v[i]) less += 1;
        if (w == v[i]) equal += 1;
      }
      r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Random sheaf on a random graph with at most max_vertices vertices and stalk
/// dimensions up to max_dim and standard Gaussian restriction maps.
inline CellularSheaf random_sheaf(std::mt19937_64& rng, std::size_t max_vertices = 10,
                                  std::size_t max_dim = 5, double edge_probability = 0.5) {
  std::uniform_int_distribution<std::size_t> nv(2, max_vertices);
  std::uniform_int_distribution<std::size_t> dim(1, max_dim);
  std::bernoulli_distribution coin(edge_probability);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = nv(rng);
  sheafdiff::Graph g(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (coin(rng)) g.add_edge(u, v);
    }
  }
  if (g.edge_count() == 0) g.add_edge(0, 1);
  std::vector<std::size_t> vdims(n), edims(g.edge_count());
  for (auto& d : vdims) d = dim(rng);
  for (auto& d : edims) d = dim(rng);
  std::vector<sheafdiff::EdgeRestrictions> maps;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto [u, v] = g.edge(e);
    Matrix fu(edims[e], vdims[u]), fv(edims[e], vdims[v]);
    for (Eigen::Index k = 0; k < fu.size(); ++k) fu(k) = normal(rng);
    for (Eigen::Index k = 0; k < fv.size(); ++k) fv(k) = normal(rng);
    maps.push_back({fu, fv});
  }
  return CellularSheaf(std::move(g), vdims, edims, std::move(maps));
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = normal(rng);
  return v;
}

}  // namespace oracle
