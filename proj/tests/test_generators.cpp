#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sheafdiff/errors.hpp"
#include "sheafdiff/generators.hpp"
#include "sheafdiff/laplacian.hpp"
#include "sheafdiff/potentials.hpp"
#include "sheafdiff/spectral.hpp"

using namespace sheafdiff;

TEST_CASE("random regular graphs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_regular_graph(20, 4, seed);
    CHECK(g.vertex_count() == 20);
    CHECK(g.edge_count() == 40);
    for (std::size_t i = 0; i < 20; ++i) CHECK(g.degree(i) == 4);
    for (const auto& e : g.edges()) CHECK(e.u < e.v);
  }
  const Graph pair = random_regular_graph(2, 1, 3);
  CHECK(pair.edge_count() == 1);
  CHECK(pair.has_edge(0, 1));
  CHECK_THROWS_AS(random_regular_graph(5, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_regular_graph(4, 4, 1), std::invalid_argument);

  const Graph a = random_regular_graph(30, 3, 99);
  const Graph b = random_regular_graph(30, 3, 99);
  CHECK(oracle::edge_pairs(a) == oracle::edge_pairs(b));
}

TEST_CASE("Erdos-Renyi graphs") {
  CHECK(erdos_renyi(20, 0.0, 1).edge_count() == 0);
  CHECK(erdos_renyi(20, 1.0, 1).edge_count() == 190);
  CHECK_THROWS_AS(erdos_renyi(20, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(erdos_renyi(20, -0.1, 1), std::invalid_argument);

  // 190 pairs at p = 0.3: mean 57, per-graph variance 190 * 0.21.
  double total = 0.0;
  const int samples = 200;
  for (int seed = 0; seed < samples; ++seed) {
    total += static_cast<double>(erdos_renyi(20, 0.3, static_cast<std::uint64_t>(seed)).edge_count());
  }
  const double se = std::sqrt(190 * 0.3 * 0.7 / samples);
  CHECK(std::abs(total / samples - 57.0) <= 3.0 * se);
}

TEST_CASE("constant sheaf Laplacian is the graph Laplacian tensor identity") {
  const Graph g = random_regular_graph(10, 3, 4);
  const CellularSheaf s = constant_sheaf(g, 2);
  const Matrix graph_l = oracle::graph_laplacian(10, oracle::edge_pairs(g));
  Matrix expected = Matrix::Zero(20, 20);
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) {
      expected.block(2 * i, 2 * j, 2, 2) = graph_l(i, j) * Matrix::Identity(2, 2);
    }
  }
  CHECK((linear_laplacian(s) - expected).norm() <= 1e-12);
}

TEST_CASE("random restriction sheaves") {
  const Graph g = random_regular_graph(20, 4, 5);
  const CellularSheaf s = random_restriction_sheaf(g, 4, 1, 17);
  CHECK(s.c0_dim() == 80);
  CHECK(s.c1_dim() == 40);
  bool in_range = true;
  for (std::size_t e = 0; e < s.edge_count(); ++e) {
    const auto& r = s.restrictions(e);
    CHECK(r.from_u.rows() == 1);
    CHECK(r.from_u.cols() == 4);
    in_range &= r.from_u.minCoeff() >= 0.0 && r.from_u.maxCoeff() <= 1.0;
    in_range &= r.from_v.minCoeff() >= 0.0 && r.from_v.maxCoeff() <= 1.0;
    CHECK(r.from_u != r.from_v);
  }
  CHECK(in_range);

  const CellularSheaf again = random_restriction_sheaf(g, 4, 1, 17);
  for (std::size_t e = 0; e < s.edge_count(); ++e) {
    CHECK(again.restrictions(e).from_u == s.restrictions(e).from_u);
    CHECK(again.restrictions(e).from_v == s.restrictions(e).from_v);
  }
}

TEST_CASE("matrix-weighted sheaves reproduce the weighted Laplacian") {
  const Graph g = random_regular_graph(12, 3, 6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MatrixWeightedSheaf mw = matrix_weighted_sheaf(g, 4, 0.2, seed);
    REQUIRE(mw.weights.size() == g.edge_count());
    const Matrix oracle_l = oracle::matrix_weighted_blocks(g, mw.weights, 4);
    CHECK((linear_laplacian(mw.sheaf) - oracle_l).norm() <= 1e-9 * oracle_l.norm());
    CHECK((matrix_weighted_laplacian(g, mw.weights) - oracle_l).norm() <= 1e-12);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const Matrix& f = mw.sheaf.restrictions(e).from_u;
      CHECK((f.transpose() * f - mw.weights[e]).norm() <= 1e-9 * (1.0 + mw.weights[e].norm()));
      CHECK(oracle::svd_rank(mw.weights[e], 1e-8) >= 3);
    }
  }

  // Identity weights give the constant sheaf Laplacian.
  const std::vector<Matrix> identity(g.edge_count(), Matrix::Identity(3, 3));
  const CellularSheaf unit = sheaf_from_weights(g, identity);
  CHECK((linear_laplacian(unit) - linear_laplacian(constant_sheaf(g, 3))).norm() <= 1e-12);

  // Rank-deficient and zero weights.
  Matrix rank_one = Matrix::Zero(3, 3);
  rank_one(0, 0) = 2.0;
  rank_one(0, 1) = rank_one(1, 0) = 1.0;
  rank_one(1, 1) = 0.5;
  const Matrix f = restriction_from_weight(rank_one);
  CHECK(f.rows() == 1);
  CHECK((f.transpose() * f - rank_one).norm() <= 1e-12);
  const Matrix z = restriction_from_weight(Matrix::Zero(3, 3));
  CHECK(z.rows() == 1);
  CHECK(z.isZero());
}

TEST_CASE("UAV formation sheaf") {
  const UavDisplacements targets{Eigen::Vector3d(1, 1, 0), Eigen::Vector3d(1, -1, 0),
                                 Eigen::Vector3d(-1, 1, 0.5), Eigen::Vector3d(-1, -1, 0.5)};
  const UavFormation uav = uav_formation_sheaf(targets);
  CHECK(uav.sheaf.vertex_count() == 6);
  CHECK(uav.sheaf.edge_count() == 7);
  CHECK(uav.sheaf.c0_dim() == 36);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = oracle::random_vector(rng, 36, 2.0);
    CHECK(dirichlet_energy(uav.sheaf, uav.potentials, x) ==
          doctest::Approx(oracle::uav_energy(x, targets)).epsilon(1e-12));
  }

  // Formation achieved and leader velocities equal: zero energy.
  Vector x = oracle::random_vector(rng, 36);
  auto pos = [&](int agent) { return x.segment<3>(6 * (agent - 1)); };
  auto vel = [&](int agent) { return x.segment<3>(6 * (agent - 1) + 3); };
  pos(2) = pos(1) - targets[0];
  pos(3) = pos(1) - targets[1];
  pos(5) = pos(4) - targets[2];
  pos(6) = pos(4) - targets[3];
  vel(4) = vel(1);
  CHECK(dirichlet_energy(uav.sheaf, uav.potentials, x) <= 1e-24);
  CHECK(oracle::uav_energy(x, targets) <= 1e-24);
}

TEST_CASE("Gaussian initial conditions") {
  const CellularSheaf s = constant_sheaf(random_regular_graph(20, 4, 1), 5);
  double sum = 0.0, sq = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; count < 100000; ++seed) {
    const Vector x = gaussian_initial_condition(s, 10.0, seed);
    sum += x.sum();
    sq += x.squaredNorm();
    count += static_cast<std::size_t>(x.size());
  }
  const double mean = sum / static_cast<double>(count);
  const double variance = sq / static_cast<double>(count) - mean * mean;
  CHECK(std::abs(variance - 10.0) <= 0.5);
  CHECK(gaussian_initial_condition(s, 2.0, 9) == gaussian_initial_condition(s, 2.0, 9));
  CHECK_THROWS_AS(gaussian_initial_condition(s, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_initial_condition(s, -1.0, 1), std::invalid_argument);
}

TEST_CASE("generator config dispatch") {
  GeneratorConfig config;
  config.seed = 11;
  const GeneratedSheaf a = generate(config);
  const GeneratedSheaf b = generate(config);
  CHECK(a.sheaf.c0_dim() == 80);
  CHECK(a.weights.empty());
  CHECK((linear_laplacian(a.sheaf) - linear_laplacian(b.sheaf)).norm() == 0.0);

  config.sheaf.kind = SheafSpec::Kind::kMatrixWeighted;
  config.sheaf.vertex_dim = 3;
  const GeneratedSheaf mw = generate(config);
  CHECK(mw.weights.size() == mw.sheaf.edge_count());

  config.graph.kind = GraphSpec::Kind::kExplicit;
  config.graph.n = 3;
  config.graph.edges = {{0, 1}, {1, 2}};
  config.sheaf.kind = SheafSpec::Kind::kConstant;
  config.sheaf.vertex_dim = 1;
  const GeneratedSheaf path = generate(config);
  const SpectralReport r = spectral_report(path.sheaf, PotentialSet::quadratic(path.sheaf));
  CHECK(r.lambda_max == doctest::Approx(3.0));
}
