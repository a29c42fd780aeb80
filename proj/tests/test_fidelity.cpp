#include <gtest/gtest.h>

#include <random>

#include "qecw/fidelity.hpp"

using namespace qecw;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

Matrix random_unitary(Eigen::Index d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(d, d, rng));
  return qr.householderQ() * Matrix::Identity(d, d);
}

// Random channel with `k` Kraus operators: blocks of an isometry d -> k*d.
KrausChannel random_channel(const Dims& dims, std::size_t k, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  Eigen::HouseholderQR<Matrix> qr(random_matrix(d * Eigen::Index(k), d, rng));
  const Matrix v = qr.householderQ() * Matrix::Identity(d * Eigen::Index(k), d);
  std::vector<KrausOperator> ops;
  for (std::size_t e = 0; e < k; ++e) ops.push_back({"k" + std::to_string(e), v.middleRows(Eigen::Index(e) * d, d)});
  return KrausChannel(dims, std::move(ops));
}

// f_e = sum_e |tr A_e / d|^2.
double trace_formula(const KrausChannel& ch) {
  double f = 0;
  for (const auto& op : ch.ops()) f += std::norm(op.matrix.trace() / double(ch.dim()));
  return f;
}

}  // namespace

TEST(Fidelity, ErrorEstimateSplitsOutput) {
  std::mt19937_64 rng(1);
  Vector a = random_matrix(4, 1, rng).col(0).normalized();
  Vector b = random_matrix(4, 1, rng).col(0).normalized();
  const StateVector ref({4}, a), out({4}, b);
  const auto est = error_estimate_pure(out, ref);
  EXPECT_NEAR(est.epsilon, 1 - std::norm(est.gamma), 1e-12);
  EXPECT_NEAR(std::abs(a.dot(est.error_term)), 0.0, 1e-12);
  EXPECT_LT((est.gamma * a + est.error_term - b).norm(), 1e-12);
  EXPECT_THROW(error_estimate_pure(out, StateVector({2, 2}, a)), DimensionError);
}

TEST(Fidelity, MixtureAndMixedStateFidelityAgree) {
  std::mt19937_64 rng(2);
  const StateVector ref({2}, Vector::Unit(2, 0));
  std::vector<std::pair<double, StateVector>> branches;
  Matrix rho = Matrix::Zero(2, 2);
  for (double p : {0.2, 0.5, 0.3}) {
    const Vector v = random_matrix(2, 1, rng).col(0).normalized();
    branches.emplace_back(p, StateVector({2}, v));
    rho += p * v * v.adjoint();
  }
  EXPECT_NEAR(error_estimate_mixture(branches, ref), 1 - fidelity_mixed(DensityOperator({2}, rho), ref), 1e-12);
}

TEST(Fidelity, EntanglementFidelityOfDepolarizing) {
  for (double p : {0.0, 0.1, 0.37, 1.0}) {
    const auto ch = depolarizing(p);
    EXPECT_NEAR(entanglement_fidelity(ch), 1 - 3 * p / 4, 1e-10);
    EXPECT_NEAR(entanglement_fidelity(ch), trace_formula(ch), 1e-12);
  }
}

TEST(Fidelity, EntanglementFidelityMatchesTraceFormulaAndIgnoresReferenceRotation) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto ch = random_channel({2, 2}, 3, rng);
    EXPECT_NEAR(entanglement_fidelity(ch), trace_formula(ch), 1e-12);
    EXPECT_NEAR(entanglement_fidelity(ch, random_unitary(4, rng)), trace_formula(ch), 1e-12);
  }
}

TEST(Fidelity, AverageErrorRelation) {
  EXPECT_NEAR(average_error_from_entanglement(0.3, 1), 0.2, 1e-15);
  EXPECT_NEAR(average_error_from_entanglement(0.5, 2), 0.4, 1e-15);
  EXPECT_THROW(average_error_from_entanglement(1.5, 1), PreconditionError);
}

TEST(Fidelity, MonteCarloAverageErrorWithinFourSigma) {
  std::mt19937_64 rng(4);
  const KrausChannel one = random_channel({2}, 3, rng);
  const KrausChannel two = random_channel({2, 2}, 2, rng);
  for (const auto& [ch, k] : {std::pair{one, 1}, std::pair{two, 2}}) {
    const double expected = average_error_from_entanglement(1 - trace_formula(ch), std::size_t(k));
    const auto est = average_error_monte_carlo(ch, 20000, 99);
    EXPECT_LE(std::abs(est.mean - expected), 4 * est.std_error + 1e-12) << "k = " << k;
  }
}

TEST(Fidelity, MonteCarloDoesNotDependOnWorkerCount) {
  const auto ch = depolarizing(0.3);
  const auto a = average_error_monte_carlo(ch, 500, 7, 1);
  const auto b = average_error_monte_carlo(ch, 500, 7, 4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_THROW(average_error_monte_carlo(ch, 0, 7), PreconditionError);
}

TEST(Fidelity, BadBranchBoundDominatesExactProbability) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> count(2, 5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = count(rng);
    auto ch = random_channel({2}, k, rng);
    std::set<std::string> bad;
    for (std::size_t e = 0; e < k; ++e)
      if (std::bernoulli_distribution(0.5)(rng)) bad.insert("k" + std::to_string(e));
    if (bad.empty()) bad.insert("k0");
    ch = ch.with_bad_labels(bad);
    const StateVector psi({2}, random_matrix(2, 1, rng).col(0).normalized());
    EXPECT_GE(bad_branch_upper_bound(ch, psi) + 1e-12, bad_branch_probability(ch, psi));
  }
}

TEST(Fidelity, BadBranchBoundIsTightForOneBadUnitary) {
  std::mt19937_64 rng(8);
  for (double p : {0.01, 0.2, 0.5}) {
    const Matrix u = random_unitary(2, rng);
    const KrausChannel ch({2}, {{"good", std::sqrt(1 - p) * Matrix::Identity(2, 2)}, {"bad", std::sqrt(p) * u}}, std::set<std::string>{"bad"});
    const StateVector psi({2}, random_matrix(2, 1, rng).col(0).normalized());
    EXPECT_NEAR(bad_branch_upper_bound(ch, psi), p, 1e-12);
    EXPECT_NEAR(bad_branch_probability(ch, psi), p, 1e-12);
  }
  EXPECT_THROW(bad_branch_upper_bound(depolarizing(0.1), StateVector({2}, Vector::Unit(2, 0))), PreconditionError);
}
