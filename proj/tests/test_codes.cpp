#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include "qecw/channels.hpp"
#include "qecw/codes.hpp"

using namespace qecw;

namespace {

const double pi = std::acos(-1.0);

StateVector ket(const std::string& bits) {
  std::size_t idx = 0;
  for (char c : bits) idx = idx * 2 + (c == '1');
  return StateVector::basis(qubit_dims(bits.size()), idx);
}

}  // namespace

TEST(ClassicalCodes, MajorityTableRows) {
  const auto id = repetition_identification();
  // word -> (syndrome, decoded bit), written out by hand
  const std::vector<std::tuple<std::string, std::string, std::string>> rows{
      {"000", "00", "0"}, {"001", "11", "0"}, {"010", "01", "0"}, {"100", "10", "0"},
      {"111", "00", "1"}, {"110", "11", "1"}, {"101", "01", "1"}, {"011", "10", "1"}};
  for (const auto& [w, s, l] : rows) {
    ASSERT_TRUE(id.at(w).has_value());
    EXPECT_EQ(id.at(w)->syndrome, s) << w;
    EXPECT_EQ(id.at(w)->logical, l) << w;
    EXPECT_EQ(std::string(1, majority_decode(w)), l);
  }
}

TEST(ClassicalCodes, FailureProbabilityIsExactInRationals) {
  using boost::multiprecision::cpp_rational;
  const cpp_rational p(1, 4);
  EXPECT_EQ(repetition_failure_probability(p), cpp_rational(5, 32));
  EXPECT_NEAR(repetition_failure_probability(0.25), 0.15625, 1e-15);
  // direct enumeration over the 8 flip patterns
  cpp_rational total = 0;
  for (int pattern = 0; pattern < 8; ++pattern) {
    const int flips = __builtin_popcount(pattern);
    cpp_rational pr = 1;
    for (int k = 0; k < 3; ++k) pr *= (k < flips) ? p : cpp_rational(1) - p;
    if (flips >= 2) total += pr;
  }
  EXPECT_EQ(total, cpp_rational(5, 32));
}

TEST(ClassicalCodes, StateIndexingAndMaps) {
  const ClassicalCode c(3, 2, {"00", "12"});
  EXPECT_EQ(c.state_count(), 9u);
  EXPECT_EQ(c.index_of("12"), 5u);
  EXPECT_EQ(c.word_of(7), "21");
  EXPECT_THROW(c.index_of("13"), PreconditionError);
  EXPECT_THROW(ClassicalCode(11, 1, {}), PreconditionError);
  EXPECT_THROW(flip_map(c, {0}), PreconditionError);
  const auto rep = repetition_classical();
  const auto f = flip_map(rep, {0, 2});
  EXPECT_EQ(rep.word_of(f(rep.index_of("000"))), "101");
  EXPECT_TRUE(f.is_invertible());
  const ClassicalMap collapse{"c", std::vector<std::size_t>(8, 0)};
  EXPECT_FALSE(collapse.is_invertible());
  const ClassicalCode cyc(7, 1, {"1", "4"});
  EXPECT_EQ(shift_map(cyc, -2)(0), 5u);
  EXPECT_EQ(shift_map(cyc, 3)(6), 2u);
}

TEST(ClassicalCodes, ParityIdentification) {
  const auto id = classical_parity_identification();
  const auto flip = flip_map(id.space, {0, 1});
  for (std::size_t x = 0; x < 4; ++x) {
    EXPECT_EQ(id.table[x]->logical, id.table[flip(x)]->logical);
    EXPECT_NE(id.table[x]->syndrome, id.table[flip(x)]->syndrome);
  }
}

TEST(ClassicalCodes, MissingEntriesDecodeAsFail) {
  ClassicalIdentification id{ClassicalCode(2, 1, {"0"}), {ClassicalIdentification::Entry{"s", "0"}, std::nullopt}};
  EXPECT_EQ(id.decode("0"), "0");
  EXPECT_EQ(id.decode("1"), "fail");
}

TEST(QuantumCodes, RepetitionIdentificationFollowsTheTable) {
  const auto id = repetition_quantum();
  EXPECT_TRUE(is_unitary(id.isometry()));
  EXPECT_FALSE(id.is_partial());
  // |011> is syndrome 10 with logical 1
  const auto pair = id.to_pair(DensityOperator::pure(ket("011")));
  EXPECT_NEAR(pair.matrix(2 * 2 + 1, 2 * 2 + 1).real(), 1.0, 1e-15);
  const auto code = id.code_subspace();
  EXPECT_LT((code.state(0).amplitudes - ket("000").amplitudes).norm(), 1e-15);
  EXPECT_LT((code.state(1).amplitudes - ket("111").amplitudes).norm(), 1e-15);
}

TEST(QuantumCodes, EncodeIsLinear) {
  const auto id = repetition_quantum();
  Vector in(2);
  in << 0.6, Complex(0, 0.8);
  const auto enc = id.encode(StateVector({2}, in));
  const Vector expected = 0.6 * ket("000").amplitudes + Complex(0, 0.8) * ket("111").amplitudes;
  EXPECT_LT((enc.amplitudes - expected).norm(), 1e-15);
}

TEST(QuantumCodes, CyclicLayout) {
  const auto id = cyclic7();
  EXPECT_TRUE(id.is_partial());
  EXPECT_EQ(id.syndrome_base(), 1u);
  // |3l + s> <-> syndrome s, logical l
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t s = 0; s < 3; ++s) EXPECT_NEAR(std::abs(id.pair_state(s, l).amplitudes(static_cast<Eigen::Index>(3 * l + s))), 1.0, 0);
  const auto code = id.code_subspace();
  EXPECT_NEAR(std::abs(code.state(0).amplitudes(1)), 1.0, 0);
  EXPECT_NEAR(std::abs(code.state(1).amplitudes(4)), 1.0, 0);
  EXPECT_NEAR(id.detector()(6, 6).real(), 1.0, 1e-15);
}

TEST(QuantumCodes, SyndromeResetRestoresBaseAndDetectsLeakage) {
  const auto id = cyclic7();
  Vector in(2);
  in << 0.8, 0.6;
  const auto enc = id.encode(StateVector({2}, in));
  const Vector shifted = shift_operator(1, 7) * enc.amplitudes;
  const auto back = syndrome_reset(id, DensityOperator::pure(StateVector({7}, shifted)));
  EXPECT_LT(max_abs(back.matrix - DensityOperator::pure(enc).matrix), 1e-12);
  const Vector far = shift_operator(2, 7) * enc.amplitudes;
  EXPECT_THROW(syndrome_reset(id, DensityOperator::pure(StateVector({7}, far))), DetectionError);
}

TEST(QuantumCodes, ThreeSpinStatesAreOrthonormalWithTheRightQuantumNumbers) {
  const auto id = three_spin_noiseless();
  const Matrix& w = id.isometry();
  EXPECT_TRUE(is_isometry(w, 1e-12));
  const Matrix jz2 = 2.0 * collective_spin(Pauli::Z, 3).matrix;
  const Matrix total = [] {
    Matrix t = Matrix::Zero(8, 8);
    for (Pauli u : {Pauli::X, Pauli::Y, Pauli::Z}) {
      const Matrix j = collective_spin(u, 3).matrix;
      t += j * j;
    }
    return t;
  }();
  for (Eigen::Index c = 0; c < 4; ++c) {
    const double sz = c < 2 ? 1.0 : -1.0;
    EXPECT_LT((jz2 * w.col(c) - sz * w.col(c)).norm(), 1e-12);
    // total spin 1/2: j(j+1) = 3/4
    EXPECT_LT((total * w.col(c) - 0.75 * w.col(c)).norm(), 1e-12);
  }
}

TEST(QuantumCodes, CyclicPermutationEigenvalue) {
  const auto id = three_spin_noiseless();
  const Matrix pi1 = permutation_operator({2, 0, 1}, qubit_dims(3)).matrix;
  const Complex expected = std::exp(Complex(0, -2 * pi / 3));
  const Vector psi = id.isometry().col(0);
  EXPECT_LT((pi1 * psi - expected * psi).norm(), 1e-12);
  const Vector psi1 = id.isometry().col(1);
  EXPECT_LT((pi1 * psi1 - std::conj(expected) * psi1).norm(), 1e-12);
}

TEST(QuantumCodes, StabilizerCodespaces) {
  const auto five = five_qubit();
  EXPECT_EQ(five.code.dimension(), 2u);
  for (const auto& g : five.generators.generators())
    for (std::size_t k = 0; k < 2; ++k) {
      const Vector v = five.code.state(k).amplitudes;
      EXPECT_LT((dense(g).matrix * v - v).norm(), 1e-12);
    }
  const auto rep = stabilizer_codespace(repetition_stabilizer());
  EXPECT_NEAR(rep.projector_matrix().trace().real(), 2.0, 1e-12);
  EXPECT_NEAR(std::abs(rep.projector_matrix()(0, 7)), 0.0, 1e-12);
  EXPECT_NEAR(rep.projector_matrix()(7, 7).real(), 1.0, 1e-12);
  EXPECT_THROW(stabilizer_codespace(StabilizerGeneratorSet::parse({"ZZ", "-ZZ"})), PreconditionError);
}

TEST(QuantumCodes, CodeSubspaceValidation) {
  Matrix bad(2, 2);
  bad << 1, 1, 0, 1;
  EXPECT_THROW(CodeSubspace({2}, bad), PreconditionError);
  EXPECT_THROW(SubsystemIdentification({2}, 2, 2, Matrix::Identity(2, 2), 0, {"a", "b"}), DimensionError);
}
