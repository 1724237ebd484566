#include <doctest.h>

#include "oracles.hpp"
#include "sheafdiff/errors.hpp"
#include "sheafdiff/generators.hpp"
#include "sheafdiff/laplacian.hpp"
#include "sheafdiff/spectral.hpp"

using namespace sheafdiff;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v(k++) = x;
  return v;
}

CellularSheaf edge_sheaf(std::size_t dim = 1) {
  Graph g(2);
  g.add_edge(0, 1);
  return constant_sheaf(g, dim);
}

PotentialSet random_offsets(std::mt19937_64& rng, const CellularSheaf& s, double scale = 1.0) {
  std::vector<EdgePotential> pots;
  for (std::size_t e = 0; e < s.edge_count(); ++e) {
    pots.push_back(EdgePotential::offset_quadratic(
        oracle::random_vector(rng, static_cast<Eigen::Index>(s.edge_dim(e)), scale)));
  }
  return PotentialSet(pots);
}

}  // namespace

TEST_CASE("potential values") {
  CHECK(potential_value(EdgePotential::quadratic(2), Vector::Zero(2)) == 0.0);
  CHECK(potential_value(EdgePotential::offset_quadratic(vec({1, 1})), vec({1, 1})) == 0.0);
  CHECK(potential_value(EdgePotential::offset_quadratic(vec({1, 0})), vec({3, 4})) == 10.0);
  CHECK(potential_value(EdgePotential::quadratic(2, 3.0), vec({1, 1})) == 3.0);
  CHECK_THROWS_AS(potential_value(EdgePotential::quadratic(2), vec({1})), StructuralError);
  CHECK_THROWS_AS(EdgePotential::quadratic(2, 0.0), ConfigurationError);
}

TEST_CASE("potential gradients") {
  CHECK(potential_gradient(EdgePotential::quadratic(2), vec({2, -1})) == vec({2, -1}));
  CHECK(potential_gradient(EdgePotential::offset_quadratic(vec({5})), vec({5})) == vec({0}));
  CHECK_THROWS_AS(potential_gradient(EdgePotential::quadratic(3), vec({1, 2})), StructuralError);

  std::mt19937_64 rng(3);
  const EdgePotential p = EdgePotential::offset_quadratic(oracle::random_vector(rng, 4));
  for (int k = 0; k < 20; ++k) {
    const Vector y = oracle::random_vector(rng, 4, 3.0);
    const Vector fd = oracle::fd_gradient([&](const Vector& z) { return p.value(z); }, y);
    CHECK((fd - p.gradient(y)).norm() <= 1e-7 * p.gradient(y).norm());
  }
}

TEST_CASE("built-in potentials are 1-strongly convex and 1-smooth") {
  std::mt19937_64 rng(5);
  for (const EdgePotential& p :
       {EdgePotential::quadratic(3), EdgePotential::offset_quadratic(vec({1, -2, 0.5}))}) {
    CHECK(p.strong_convexity() == 1.0);
    CHECK(p.smoothness() == 1.0);
    for (int k = 0; k < 50; ++k) {
      const Vector x = oracle::random_vector(rng, 3, 5.0);
      const Vector y = oracle::random_vector(rng, 3, 5.0);
      const Vector dg = p.gradient(x) - p.gradient(y);
      const double d2 = (x - y).squaredNorm();
      CHECK(dg.dot(x - y) >= (1.0 - 1e-12) * p.strong_convexity() * d2);
      CHECK(dg.norm() <= (1.0 + 1e-12) * p.smoothness() * (x - y).norm());
    }
  }
  const EdgePotential custom = EdgePotential::custom(
      1, [](const Vector& y) { return y.squaredNorm(); }, [](const Vector& y) { return Vector(2 * y); },
      2.0, 2.0);
  CHECK(custom.strong_convexity() == 2.0);
  CHECK_THROWS_AS(
      EdgePotential::custom(
          1, [](const Vector& y) { return y.squaredNorm(); }, [](const Vector& y) { return y; }, 3.0,
          1.0),
      ConfigurationError);
}

TEST_CASE("Dirichlet energy examples") {
  const CellularSheaf r1 = edge_sheaf();
  CHECK(dirichlet_energy(r1, PotentialSet::quadratic(r1), vec({5, 2})) == 4.5);
  CHECK(dirichlet_energy(r1, PotentialSet::quadratic(r1), vec({7, 7})) == 0.0);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const CellularSheaf s = oracle::random_sheaf(rng);
    const PotentialSet p = random_offsets(rng, s);
    const Vector x = oracle::random_vector(rng, static_cast<Eigen::Index>(s.c0_dim()));
    // Chain rule through the per-edge gradients.
    const Vector y = coboundary_apply(s, x);
    Vector grad_y(y.size());
    for (std::size_t e = 0; e < s.edge_count(); ++e) {
      s.edge_block(grad_y, e) = p[e].gradient(s.edge_block(y, e));
    }
    const Vector chain = oracle::coboundary(s).transpose() * grad_y;
    CHECK((chain - nonlinear_laplacian_apply(s, p, x)).norm() <= 1e-12 * (1.0 + chain.norm()));
  }
}

TEST_CASE("energy minimum") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const CellularSheaf s = oracle::random_sheaf(rng);
    const MinimizerSet quad = energy_minimum(s, PotentialSet::quadratic(s));
    CHECK(quad.f_star == 0.0);
    CHECK(quad.particular.norm() <= 1e-12);
    CHECK(quad.sections.dimension() == global_sections(s).dimension());

    // b = delta z lies in the image.
    const Vector z = oracle::random_vector(rng, static_cast<Eigen::Index>(s.c0_dim()));
    const Vector b = coboundary_apply(s, z);
    const PotentialSet in_image = PotentialSet::offset_quadratic(s, b);
    const MinimizerSet shifted = energy_minimum(s, in_image);
    CHECK(shifted.f_star <= 1e-10);
    CHECK(shifted.offset_in_image);
    const Vector x = oracle::random_vector(rng, static_cast<Eigen::Index>(s.c0_dim()));
    const Matrix d = oracle::coboundary(s);
    CHECK((shifted.project(x) - oracle::project_affine(d, b, x)).norm() <= 1e-8 * (1 + x.norm()));

    // f(x) >= f* on random points, any offsets.
    const PotentialSet arbitrary = random_offsets(rng, s);
    const MinimizerSet general = energy_minimum(s, arbitrary);
    for (int k = 0; k < 10; ++k) {
      const Vector w = oracle::random_vector(rng, static_cast<Eigen::Index>(s.c0_dim()), 3.0);
      CHECK(dirichlet_energy(s, arbitrary, w) >= general.f_star - 1e-10);
    }
    CHECK(dirichlet_energy(s, arbitrary, general.particular) ==
          doctest::Approx(general.f_star).epsilon(1e-9));
  }

  // b orthogonal to the image of delta on a triangle.
  Graph cycle(3);
  cycle.add_edge(0, 1);
  cycle.add_edge(1, 2);
  cycle.add_edge(0, 2);
  const CellularSheaf c = constant_sheaf(cycle, 1);
  // Edges oriented (0,1), (1,2), (0,2): image of delta is {y : y01 + y12 = y02}.
  const Vector b = vec({1, 1, -1});
  const MinimizerSet orth = energy_minimum(c, PotentialSet::offset_quadratic(c, b));
  CHECK(orth.f_star == doctest::Approx(0.5 * b.squaredNorm()).epsilon(1e-12));
  CHECK_FALSE(orth.offset_in_image);

  const CellularSheaf r1 = edge_sheaf();
  const PotentialSet custom{std::vector<EdgePotential>{EdgePotential::custom(
      1, [](const Vector& y) { return y.squaredNorm(); }, [](const Vector& y) { return Vector(2 * y); },
      2.0, 2.0)}};
  CHECK_THROWS_AS(energy_minimum(r1, custom), ConfigurationError);
}

TEST_CASE("spectrum examples") {
  const SpectralReport edge = spectrum(edge_sheaf());
  CHECK(edge.lambda_max == doctest::Approx(2.0).epsilon(1e-14));
  REQUIRE(edge.lambda_2);
  CHECK(*edge.lambda_2 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(edge.zero_multiplicity == 1);

  Graph path(3);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  const SpectralReport p3 = spectrum(constant_sheaf(path, 1));
  Eigen::SelfAdjointEigenSolver<Matrix> direct(oracle::graph_laplacian(3, oracle::edge_pairs(path)));
  CHECK((p3.eigenvalues - direct.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(p3.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p3.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p3.eigenvalues(2) == doctest::Approx(3.0).epsilon(1e-12));

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const CellularSheaf s = oracle::random_sheaf(rng);
    CHECK(spectrum(s).zero_multiplicity == global_sections(s).dimension());
  }

  Graph empty(2);
  const CellularSheaf lonely = constant_sheaf(empty, 2);
  const SpectralReport none = spectral_report(lonely, PotentialSet::quadratic(lonely));
  CHECK_FALSE(none.lambda_2);
  CHECK_FALSE(none.kappa);
  CHECK_THROWS_AS(eb_constant(none, PotentialSet::quadratic(lonely)), ConfigurationError);
}

TEST_CASE("Lipschitz and error-bound constants") {
  const CellularSheaf r1 = edge_sheaf();
  const PotentialSet quad = PotentialSet::quadratic(r1);
  const SpectralReport rep = spectral_report(r1, quad);
  CHECK(lipschitz_constant(rep, quad) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(eb_constant(rep, quad) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

  const PotentialSet scaled{std::vector<EdgePotential>{EdgePotential::quadratic(1, 3.0)}};
  CHECK(lipschitz_constant(rep, scaled) == doctest::Approx(3.0 * rep.lambda_max).epsilon(1e-14));

  Graph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  const CellularSheaf s = constant_sheaf(g, 2);
  const SpectralReport srep = spectrum(s);
  const PotentialSet unit = PotentialSet::quadratic(s);
  const PotentialSet doubled{
      std::vector<EdgePotential>{EdgePotential::quadratic(2, 2.0), EdgePotential::quadratic(2, 2.0)}};
  CHECK(eb_constant(srep, doubled) == doctest::Approx(0.5 * eb_constant(srep, unit)).epsilon(1e-14));
  const PotentialSet mixed{
      std::vector<EdgePotential>{EdgePotential::quadratic(2, 3.0), EdgePotential::quadratic(2, 1.0)}};
  CHECK(lipschitz_constant(srep, mixed) == doctest::Approx(3.0 * srep.lambda_max).epsilon(1e-14));
}

TEST_CASE("singular values match the Laplacian spectrum") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const CellularSheaf s = oracle::random_sheaf(rng);
    const SpectralReport rep = spectrum(s);
    Eigen::JacobiSVD<Matrix> svd(oracle::coboundary(s));
    const Vector sv = svd.singularValues();
    CHECK(rep.sigma_max * rep.sigma_max == doctest::Approx(rep.lambda_max).epsilon(1e-10));
    CHECK(sv(0) * sv(0) == doctest::Approx(rep.lambda_max).epsilon(1e-10));
    REQUIRE(rep.lambda_2);
    double smallest = sv(0);
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv(k) > 1e-8 * sv(0)) smallest = std::min(smallest, sv(k));
    }
    CHECK(smallest * smallest == doctest::Approx(*rep.lambda_2).epsilon(1e-10));
    CHECK(*rep.sigma_2 * *rep.sigma_2 == doctest::Approx(*rep.lambda_2).epsilon(1e-10));
    CHECK(*rep.lambda_2 <= rep.lambda_max);
  }
}

TEST_CASE("sampled Lipschitz, error-bound and PL inequalities") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const CellularSheaf s = oracle::random_sheaf(rng);
    const Eigen::Index n = static_cast<Eigen::Index>(s.c0_dim());
    const Vector z = oracle::random_vector(rng, n);
    const PotentialSet p = PotentialSet::offset_quadratic(s, coboundary_apply(s, z));
    const SpectralReport rep = spectral_report(s, p);
    const MinimizerSet mins = energy_minimum(s, p);
    for (int k = 0; k < 20; ++k) {
      const Vector x = oracle::random_vector(rng, n, 3.0);
      const Vector y = oracle::random_vector(rng, n, 3.0);
      const double lhs =
          (nonlinear_laplacian_apply(s, p, x) - nonlinear_laplacian_apply(s, p, y)).norm();
      CHECK(lhs <= rep.K * (x - y).norm() * (1.0 + 1e-10));

      // The provable constants use sigma_2^2; the kappa = 1/(m sigma_2) form
      // only follows from them when sigma_2 >= 1.
      const Vector grad = nonlinear_laplacian_apply(s, p, x);
      const double lambda_2 = *rep.lambda_2;
      CHECK(mins.distance(x) <= grad.norm() / (rep.m * lambda_2) * (1.0 + 1e-8));
      const double gap = dirichlet_energy(s, p, x) - mins.f_star;
      CHECK(0.5 * grad.squaredNorm() >= rep.m * lambda_2 * gap * (1.0 - 1e-8));
      if (*rep.sigma_2 >= 1.0) {
        CHECK(mins.distance(x) <= *rep.kappa * grad.norm() * (1.0 + 1e-8));
        CHECK(0.5 * grad.squaredNorm() >= rep.m * *rep.sigma_2 * gap * (1.0 - 1e-8));
      }
    }
  }
}

TEST_CASE("kappa = 1/(m sigma_2) is not an error bound when sigma_2 < 1") {
  // Path 0-1-2 with scalar maps 0.1: lambda_2 = 0.01, sigma_2 = 0.1.
  Graph path(3);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  const Matrix small = Matrix::Constant(1, 1, 0.1);
  const CellularSheaf s(path, {1, 1, 1}, {1, 1}, {{small, small}, {small, small}});
  const PotentialSet q = PotentialSet::quadratic(s);
  const SpectralReport rep = spectral_report(s, q);
  REQUIRE(*rep.sigma_2 < 1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(linear_laplacian(s));
  const Vector v = eig.eigenvectors().col(1);
  const Vector grad = nonlinear_laplacian_apply(s, q, v);
  const double dist = energy_minimum(s, q).distance(v);
  CHECK(dist > *rep.kappa * grad.norm());
  CHECK(dist == doctest::Approx(grad.norm() / *rep.lambda_2).epsilon(1e-9));
}

TEST_CASE("projection onto minimizers") {
  std::mt19937_64 rng(23);
  const Graph g = random_regular_graph(10, 3, rng());
  REQUIRE(g.is_connected());
  const CellularSheaf r1 = constant_sheaf(g, 1);
  const Vector x = oracle::random_vector(rng, 10);
  const Vector proj = project_onto_minimizers(r1, PotentialSet::quadratic(r1), x);
  CHECK((proj - Vector::Constant(10, x.mean())).norm() <= 1e-10);

  for (int trial = 0; trial < 10; ++trial) {
    const CellularSheaf s = oracle::random_sheaf(rng);
    const Eigen::Index n = static_cast<Eigen::Index>(s.c0_dim());
    const PotentialSet q = PotentialSet::quadratic(s);
    const SectionBasis sections = global_sections(s);
    const Vector w = oracle::random_vector(rng, n, 3.0);
    if (sections.dimension() > 0) {
      const Vector section = sections.basis * oracle::random_vector(rng, sections.basis.cols());
      CHECK((project_onto_minimizers(s, q, section) - section).norm() <=
            1e-9 * (1 + section.norm()));
      const Vector pw = project_onto_minimizers(s, q, w);
      CHECK((sections.basis.transpose() * (w - pw)).cwiseAbs().maxCoeff() <= 1e-9);
    } else {
      CHECK(project_onto_minimizers(s, q, w).norm() <= 1e-12);
    }

    const PotentialSet offsets = random_offsets(rng, s);
    const Vector b = offsets.stacked_offset(s);
    const Vector expected = oracle::project_least_squares(oracle::coboundary(s), b, w);
    CHECK((project_onto_minimizers(s, offsets, w) - expected).norm() <= 1e-8 * (1 + w.norm()));
  }
}
