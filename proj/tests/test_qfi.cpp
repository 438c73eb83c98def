#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "starkqfi/hamiltonian.hpp"
#include "starkqfi/qfi.hpp"

using namespace starkqfi;

TEST_SUITE("qfi") {

TEST_CASE("trivial derivatives") {
  std::mt19937_64 rng(1);
  const auto psi = oracle::random_state(10, rng);
  CHECK(qfi_pure({2.0, psi, StateVector::Zero(10)}).qfi == 0.0);
  const double t = 3.0;
  const double g = 1.7;
  const auto s = qfi_pure({t, psi, Complex(0.0, -t * g) * psi});
  CHECK(s.qfi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.qfi >= 0.0);
}

TEST_CASE("two Fock states in superposition") {
  // J = 0, |psi0> = (|a> + |b>)/sqrt 2 with generator eigenvalues g1 and g2.
  FockBasis b(5, 2);
  const ModelParams p{0.0, 1.3, 0.6, 5, 2};
  const auto H = build_hamiltonian(p, b);
  const auto G = build_gradient_generator(b);
  const FockState a({1, 1, 0, 0, 0});
  const FockState c({0, 0, 0, 1, 1});
  const StateVector psi0 = (b.basis_vector(a) + b.basis_vector(c)) / std::sqrt(2.0);
  const double g1 = 1.0;
  const double g2 = 7.0;
  const std::vector<double> times{0.5, 2.0, 11.0};
  for (auto method : {PropagationMethod::krylov, PropagationMethod::dense}) {
    PropagatorOptions o;
    o.method = method;
    const auto series = qfi_series(H, G, psi0, times, o);
    for (const auto& s : series) {
      CHECK(s.qfi == doctest::Approx(s.t * s.t * (g1 - g2) * (g1 - g2)).epsilon(1e-10));
      CHECK(s.qfi_over_t2 == doctest::Approx(36.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("Fock eigenstate has zero QFI") {
  FockBasis b(6, 3);
  const auto H = build_hamiltonian({0.0, 2.0, 1.1, 6, 3}, b);
  const auto G = build_gradient_generator(b);
  const auto psi0 = b.basis_vector(staggered_initial_state(6, 3));
  const std::vector<double> times{1.0, 50.0, 200.0};
  for (auto method : {PropagationMethod::krylov, PropagationMethod::dense}) {
    PropagatorOptions o;
    o.method = method;
    for (const auto& s : qfi_series(H, G, psi0, times, o)) CHECK(s.qfi == doctest::Approx(0.0).epsilon(1e-9));
  }
  auto builder = [&](double h) { return build_hamiltonian({0.0, 2.0, h, 6, 3}, b); };
  CHECK(qfi_finite_difference(builder, psi0, 20.0, 1.1, 1e-4).qfi == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("augmented derivative matches finite differences") {
  FockBasis b(5, 2);
  auto builder = [&](double h) { return build_hamiltonian({1.0, 4.0, h, 5, 2}, b); };
  const auto psi0 = b.basis_vector(staggered_initial_state(5, 2));
  const auto G = build_gradient_generator(b);
  const double t = 20.0;
  const std::vector<double> times{t};
  for (double h : {5.0, 1.0}) {
    PropagatorOptions o;
    o.method = PropagationMethod::krylov;
    const auto exact = qfi_series(builder(h), G, psi0, times, o).front();
    const auto fd = qfi_finite_difference(builder, psi0, t, h, 2.5e-4, o);
    CHECK(std::abs(fd.qfi - exact.qfi) <= 1e-5 * exact.qfi);
  }
}

TEST_CASE("finite differences converge at second order") {
  FockBasis b(5, 2);
  auto builder = [&](double h) { return build_hamiltonian({1.0, 2.0, h, 5, 2}, b); };
  const auto psi0 = b.basis_vector(staggered_initial_state(5, 2));
  const double t = 20.0;
  const double grid[] = {t};
  const double h = 1.0;
  const Eigen::MatrixXcd Hd = oracle::hamiltonian(5, 2, 1.0, 2.0, h);
  const auto ref = oracle::evolve_pair(Hd, oracle::gradient(5, 2), psi0, t).second;
  auto central = [&](double d) -> StateVector {
    return (evolve(builder(h + d), psi0, grid).front() - evolve(builder(h - d), psi0, grid).front()) / (2.0 * d);
  };
  const double e1 = (central(1e-2) - ref).norm();
  const double e2 = (central(5e-3) - ref).norm();
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  CHECK_THROWS_AS(qfi_finite_difference(builder, psi0, t, h, 0.5), NumericalError);
  CHECK_THROWS_AS(qfi_finite_difference(builder, psi0, t, h, 0.0), std::invalid_argument);
}

TEST_CASE("gauge and re-origin invariance") {
  FockBasis b(7, 3);
  const auto H = build_hamiltonian({1.0, 3.0, 2.0, 7, 3}, b);
  const auto G = build_gradient_generator(b);
  const auto psi0 = b.basis_vector(staggered_initial_state(7, 3));
  const std::vector<double> times{8.0};
  const auto pair = evolve_with_derivative(H, G, psi0, times).front();
  const double reference = qfi_pure(pair).qfi;
  const Complex phase = std::exp(Complex(0.0, 0.917));
  const double alpha = -2.3;
  EvolvedPair moved{pair.t, phase * pair.psi, phase * pair.dpsi + Complex(0.0, alpha) * phase * pair.psi};
  CHECK(std::abs(qfi_pure(moved).qfi - reference) <= 1e-10 * std::max(1.0, reference));

  // Shifting the gradient origin adds c * identity to G.
  SparseOperator I(G.rows(), G.cols());
  I.setIdentity();
  const SparseOperator shifted = G + Complex(3.0) * I;
  const auto shifted_pair = evolve_with_derivative(H, shifted, psi0, times).front();
  CHECK(std::abs(qfi_pure(shifted_pair).qfi - reference) <= 1e-9 * std::max(1.0, reference));
}

TEST_CASE("short-time law") {
  std::mt19937_64 rng(4);
  FockBasis b(6, 3);
  const auto H = build_hamiltonian({1.0, 1.0, 0.5, 6, 3}, b);
  const auto G = build_gradient_generator(b);
  const auto psi0 = oracle::random_state(b.dimension(), rng);
  const StateVector Gpsi = G * psi0;
  const double variance = Gpsi.squaredNorm() - std::norm(psi0.dot(Gpsi));
  const double t = 0.05;
  for (auto method : {PropagationMethod::krylov, PropagationMethod::dense}) {
    PropagatorOptions o;
    o.method = method;
    const auto s = qfi_series(H, G, psi0, std::vector<double>{t}, o).front();
    CHECK(s.qfi == doctest::Approx(4.0 * t * t * variance).epsilon(1e-3));
  }
}

TEST_CASE("dense spectral series equals the site-basis pair") {
  FockBasis b(9, 2);
  const auto H = build_hamiltonian({1.0, 0.0, 5.0, 9, 2}, b);
  const auto G = build_gradient_generator(b);
  const auto psi0 = b.basis_vector(staggered_initial_state(9, 2));
  std::vector<double> times;
  for (int k = 1; k <= 20; ++k) times.push_back(10.0 * k);
  PropagatorOptions dense;
  dense.method = PropagationMethod::dense;
  PropagatorOptions krylov;
  krylov.method = PropagationMethod::krylov;
  const auto a = qfi_series(H, G, psi0, times, dense);
  const auto c = qfi_series(H, G, psi0, times, krylov);
  for (std::size_t k = 0; k < times.size(); ++k) CHECK(std::abs(a[k].qfi - c[k].qfi) <= 1e-8 * c[k].qfi);
}

TEST_CASE("validation") {
  std::mt19937_64 rng(2);
  const StateVector psi = oracle::random_state(4, rng);
  CHECK_THROWS_AS(qfi_pure({1.0, 2.0 * psi, psi}), NumericalError);
  CHECK(cramer_rao_bound(1.0, 1) == 1.0);
  CHECK(cramer_rao_bound(4.0, 1) == 0.5);
  CHECK(cramer_rao_bound(1e12, 1) == doctest::Approx(1e-6));
  CHECK(cramer_rao_bound(1.0, 4) == 0.5);
  CHECK_THROWS_AS(cramer_rao_bound(0.0, 1), std::domain_error);
  CHECK_THROWS_AS(cramer_rao_bound(1.0, 0), std::invalid_argument);
}

}
