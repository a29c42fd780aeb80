// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "qecw/qecw.hpp"

using namespace qecw;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream note;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) note << "; ";
      ok = false;
      note << what;
    }
  }
  void near(double actual, double expected, double tolerance, const std::string& what) {
    std::ostringstream s;
    s << what << " = " << actual << " (expected " << expected << " +- " << tolerance << ")";
    expect(std::abs(actual - expected) <= tolerance, s.str());
  }
};

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

Matrix random_isometry(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rows, cols, rng));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

KrausChannel random_channel(const Dims& dims, std::size_t k, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  const Matrix v = random_isometry(d * Eigen::Index(k), d, rng);
  std::vector<KrausOperator> ops;
  for (std::size_t e = 0; e < k; ++e) ops.push_back({"k" + std::to_string(e), v.middleRows(Eigen::Index(e) * d, d)});
  return KrausChannel(dims, std::move(ops));
}

Vector haar(Eigen::Index d, std::mt19937_64& rng) { return random_matrix(d, 1, rng).col(0).normalized(); }

StateVector qubit(double a, double b) {
  Vector v(2);
  v << a, b;
  return StateVector({2}, v.normalized());
}

double recovered_fidelity(const Decoder& dec, const Matrix& e, const Vector& encoded) {
  const Vector hit = e * encoded;
  if (hit.squaredNorm() < 1e-24) return 1.0;
  const Matrix rho = hit * hit.adjoint() / hit.squaredNorm();
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& r : dec.recovery.ops()) out += r.matrix * rho * r.matrix.adjoint();
  return encoded.dot(out * encoded).real();
}

// f_e = sum |tr A / d|^2, independent of the reference-system construction.
double trace_formula(const KrausChannel& ch) {
  double f = 0;
  for (const auto& op : ch.ops()) f += std::norm(op.matrix.trace() / double(ch.dim()));
  return f;
}

// ---------------------------------------------------------------------------

void classical_repetition(Check& c) {
  c.expect(repetition_failure_probability(cpp_rational(1, 4)) == cpp_rational(5, 32), "rational failure probability != 5/32");
  c.near(repetition_failure_probability(0.25), 0.15625, 1e-12, "float failure probability");
}

void quantum_repetition(Check& c) {
  const auto id = repetition_quantum();
  const auto noise = tensor_independent(bit_flip(0.25), 3);
  const auto r = run_exact("rep", id, noise, qubit(1, 0), "0");
  std::vector<double> got;
  for (const auto& o : r.outcomes) got.push_back(o.p);
  std::sort(got.rbegin(), got.rend());
  const std::vector<double> published{.4219, .1406, .1406, .1406, .0469, .0469, .0469, .0156};
  c.expect(got.size() == published.size(), "outcome count");
  for (std::size_t k = 0; k < std::min(got.size(), published.size()); ++k) c.near(got[k], published[k], 1e-4, "outcome " + std::to_string(k));
  c.near(r.metrics["error"].get<double>(), .1563, 1e-4, "logical error for |0>");
  const auto plus = run_exact("rep", id, noise, qubit(1, 1), "+");
  c.expect(plus.metrics["error"].get<double>() <= 1e-9, "logical error for |+> above 1e-9");
}

void cyclic_system(Check& c) {
  const auto r = run_cyclic(qubit(1, 1), "+");
  c.near(r.metrics["q"].get<double>(), 0.5641, 1e-4, "q");
  const auto model = gaussian_shift_model();
  c.near(model.probability(1), 0.2075, 1e-4, "p(+1)");
  c.near(model.probability(-1), 0.2075, 1e-4, "p(-1)");
  c.near(r.metrics["success_probability"].get<double>(), 0.9792, 1e-4, "decode success");
}

void detectability(Check& c) {
  const auto code = repetition_quantum().code_subspace();
  const auto z1 = detectable_quantum(code, dense(PauliProduct::parse("ZII")));
  const auto x1 = detectable_quantum(code, dense(PauliProduct::parse("XII")));
  c.expect(!z1.detectable, "Z1 reported detectable");
  c.expect(x1.detectable && std::abs(x1.lambda) < 1e-12, "X1 not detectable with lambda 0");
  const auto rep = repetition_classical();
  c.expect(!detectable_classical(rep, flip_map(rep, {0, 1, 2})), "flip-all reported detectable");
}

void minimum_distances(Check& c) {
  const auto rep = repetition_stabilizer();
  const auto rep_code = stabilizer_codespace(rep);
  const auto five = five_qubit();
  const std::vector<Pauli> all{Pauli::X, Pauli::Y, Pauli::Z}, x_only{Pauli::X};
  struct Case {
    std::string name;
    const StabilizerGeneratorSet& s;
    const CodeSubspace& code;
    std::vector<Pauli> alphabet;
    std::size_t expected;
  };
  for (const Case& k : {Case{"quantum repetition", rep, rep_code, all, 1}, Case{"classical repetition", rep, rep_code, x_only, 3},
                        Case{"five-qubit", five.generators, five.code, all, 3}}) {
    const auto sym = stabilizer_min_distance(k.s, k.alphabet);
    const auto den = min_distance_quantum(k.code, k.alphabet);
    c.expect(sym.found() && sym.distance == k.expected, k.name + " symplectic distance " + std::to_string(sym.distance));
    c.expect(den.found() && den.distance == k.expected, k.name + " dense distance " + std::to_string(den.distance));
  }
}

void correctability_and_decoder(Check& c) {
  std::mt19937_64 rng(606);
  const auto rep_code = repetition_quantum().code_subspace();
  const auto five = five_qubit();
  const std::vector<std::pair<CodeSubspace, std::vector<PauliProduct>>> cases{
      {rep_code, pauli_words_up_to_weight(3, 1, {Pauli::X})}, {five.code, pauli_words_up_to_weight(5, 1)}};
  for (const auto& [code, words] : cases) {
    const auto errs = ErrorSet::from_paulis(words);
    const bool ok = correctable_quantum(code, errs).correctable;
    c.expect(ok, "set reported uncorrectable");
    if (!ok) continue;
    const auto dec = synthesize_decoder(code, errs);
    double worst = 1;
    for (int t = 0; t < 20; ++t) {
      const Vector enc = code.encode(haar(Eigen::Index(code.dimension()), rng)).amplitudes;
      for (const auto& e : errs.ops()) worst = std::min(worst, recovered_fidelity(dec, e.matrix, enc));
    }
    c.expect(worst >= 1 - 1e-8, "recovery fidelity " + std::to_string(worst));
  }
  auto words = pauli_words_up_to_weight(3, 1, {Pauli::X});
  words.push_back(PauliProduct::parse("ZII"));
  c.expect(!correctable_quantum(rep_code, ErrorSet::from_paulis(words)).correctable, "adding Z1 kept the set correctable");
}

void noiseless_qubit(Check& c) {
  const auto built = build_noiseless_qubit();
  const auto closed = three_spin_noiseless();
  for (Eigen::Index k = 0; k < 4; ++k) {
    const double overlap = std::abs(closed.isometry().col(k).dot(built.isometry().col(k)));
    c.expect(overlap >= 1 - 1e-8, "overlap of state " + std::to_string(k) + " = " + std::to_string(overlap));
  }
  std::mt19937_64 rng(707);
  std::normal_distribution<double> g;
  double dev = 0, leak = 0;
  for (int t = 0; t < 100; ++t) {
    const auto f = factorization_check(built, collective_error({g(rng), g(rng), g(rng)}).matrix);
    dev = std::max(dev, f.deviation);
    leak = std::max(leak, f.leakage);
  }
  c.expect(dev <= 1e-8 && leak <= 1e-8, "logical-block deviation " + std::to_string(dev) + ", leakage " + std::to_string(leak));
  Matrix z(2, 2), x(2, 2);
  z << 1, 0, 0, -1;
  x << 0, 1, 1, 0;
  const auto fz = factorization_check(built, 2.0 * collective_spin(Pauli::Z, 3).matrix);
  const auto fx = factorization_check(built, 2.0 * collective_spin(Pauli::X, 3).matrix);
  c.expect(max_abs(fz.syndrome_action - z) <= 1e-8 && fz.deviation <= 1e-8, "2J_z is not Z on the syndrome");
  c.expect(max_abs(fx.syndrome_action - x) <= 1e-8 && fx.deviation <= 1e-8, "2J_x is not X on the syndrome");
}

void twirling(Check& c) {
  double worst = 0;
  for (double p : {0.0, 0.1, 0.5, 1.0}) {
    const auto pc = twirl(depolarizing(p));
    worst = std::max({worst, std::abs(pc.probability("I") - (1 - 3 * p / 4)), std::abs(pc.probability("X") - p / 4),
                      std::abs(pc.probability("Y") - p / 4), std::abs(pc.probability("Z") - p / 4)});
  }
  c.expect(worst <= 1e-10, "depolarizing fixed point deviation " + std::to_string(worst));
  const double theta = 0.4;
  const auto rot = twirl(KrausChannel({2}, {{"r", exp_hermitian(pauli(Pauli::Z), theta).matrix}}));
  c.near(rot.probability("I"), std::pow(std::cos(theta), 2), 1e-10, "rotation p_I");
  c.near(rot.probability("Z"), std::pow(std::sin(theta), 2), 1e-10, "rotation p_Z");
  std::mt19937_64 rng(808);
  double sum_dev = 0, remix_dev = 0;
  for (int t = 0; t < 100; ++t) {
    const LinearOperator u({2, 2}, random_isometry(4, 4, rng));
    const auto ch = channel_from_unitary(u, StateVector::basis({2}, 0), {StateVector::basis({2}, 0), StateVector::basis({2}, 1)});
    const auto pc = twirl(ch);
    double total = 0;
    for (const auto& [w, p] : pc.probabilities()) total += p;
    sum_dev = std::max(sum_dev, std::abs(total - 1));
    const auto mixed = twirl(remix(ch, random_isometry(2, 2, rng)));
    for (const char* w : {"I", "X", "Y", "Z"}) remix_dev = std::max(remix_dev, std::abs(mixed.probability(w) - pc.probability(w)));
  }
  c.expect(sum_dev <= 1e-10, "sum of twirl probabilities off by " + std::to_string(sum_dev));
  c.expect(remix_dev <= 1e-10, "remixing changed the twirl by " + std::to_string(remix_dev));
}

void fidelity_relations(Check& c) {
  for (double p : {0.05, 0.3, 0.8}) c.near(entanglement_fidelity(depolarizing(p)), 1 - 3 * p / 4, 1e-10, "f_e(depolarizing)");
  std::mt19937_64 rng(909);
  for (std::size_t k : {1u, 2u}) {
    const auto ch = random_channel(qubit_dims(k), 3, rng);
    const double eps_e = 1 - entanglement_fidelity(ch);
    c.near(eps_e, 1 - trace_formula(ch), 1e-12, "entanglement error vs trace formula");
    const auto est = average_error_monte_carlo(ch, 100000, 2024 + k);
    const double predicted = average_error_from_entanglement(eps_e, k);
    c.expect(std::abs(est.mean - predicted) <= 4 * est.std_error,
             "k=" + std::to_string(k) + ": MC " + std::to_string(est.mean) + " vs " + std::to_string(predicted));
  }
}

void bad_branch_bound(Check& c) {
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<std::size_t> count(2, 6);
  std::bernoulli_distribution coin(0.5);
  int violations = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = count(rng);
    std::set<std::string> bad;
    for (std::size_t e = 0; e < k; ++e)
      if (coin(rng)) bad.insert("k" + std::to_string(e));
    if (bad.empty()) bad.insert("k0");
    const auto ch = random_channel({2}, k, rng).with_bad_labels(bad);
    const StateVector psi({2}, haar(2, rng));
    violations += bad_branch_upper_bound(ch, psi) + 1e-12 < bad_branch_probability(ch, psi);
  }
  c.expect(violations == 0, std::to_string(violations) + " bound violations");
  const double p = 0.07;
  const KrausChannel one({2}, {{"good", std::sqrt(1 - p) * Matrix::Identity(2, 2)}, {"bad", std::sqrt(p) * random_isometry(2, 2, rng)}},
                         std::set<std::string>{"bad"});
  const StateVector psi({2}, haar(2, rng));
  c.near(bad_branch_upper_bound(one, psi), bad_branch_probability(one, psi), 1e-12, "single bad unitary");
}

void concatenation(Check& c) {
  const cpp_rational p(1, 1000), cc(100);
  const auto levels = concat_levels(p, cc, 10);
  for (int k = 1; k <= 10; ++k) c.expect(levels[std::size_t(k - 1)] == concat_closed_form(p, cc, k), "closed form differs at level " + std::to_string(k));
  const std::vector<cpp_rational> published{cpp_rational(1, 1000), cpp_rational(1, 10000), cpp_rational(1, 1000000),
                                            cpp_rational(1, cpp_int(10000000000LL))};
  c.expect(std::vector<cpp_rational>(levels.begin(), levels.begin() + 4) == published, "first four levels differ");
  const cpp_rational tiny(1, boost::multiprecision::pow(cpp_int(10), 40));
  c.expect(concat_verdict(cpp_rational(1, 100), cc) == ConcatVerdict::flat, "p = 1/C not flat");
  c.expect(concat_verdict(cpp_rational(1, 100) - tiny, cc) == ConcatVerdict::improving, "p < 1/C not improving");
  c.expect(concat_verdict(cpp_rational(1, 100) + tiny, cc) == ConcatVerdict::worsening, "p > 1/C not worsening");
}

void property_suites(Check& c) {
  std::mt19937_64 rng(1212);
  std::uniform_int_distribution<int> letter(0, 3), length(1, 5);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = std::size_t(length(rng));
    std::vector<Pauli> a(n), b(n);
    for (auto& x : a) x = static_cast<Pauli>(letter(rng));
    for (auto& x : b) x = static_cast<Pauli>(letter(rng));
    const Matrix ma = dense(PauliProduct(a)).matrix, mb = dense(PauliProduct(b)).matrix;
    mismatches += commutes(PauliProduct(a), PauliProduct(b)) != (max_abs(ma * mb - mb * ma) < 1e-12);
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + " commutation mismatches");

  int bad_states = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + std::size_t(t % 2);
    const auto ch = random_channel(qubit_dims(n), 1 + std::size_t(t % 4), rng);
    const Matrix a = random_matrix(Eigen::Index(ch.dim()), Eigen::Index(ch.dim()), rng);
    Matrix rho = a * a.adjoint();
    rho /= rho.trace();
    const auto out = apply(ch, DensityOperator(ch.dims(), rho));
    bad_states += std::abs(out.trace() - 1) > 1e-9 || out.min_eigenvalue() < -1e-9 || !is_hermitian(out.matrix);
  }
  c.expect(bad_states == 0, std::to_string(bad_states) + " outputs not trace-one positive");

  const auto five = five_qubit();
  const auto words = pauli_words_up_to_weight(5, 1);
  const auto dec = synthesize_decoder(five.code, ErrorSet::from_paulis(words));
  std::normal_distribution<double> g;
  double worst = 1;
  for (int t = 0; t < 20; ++t) {
    Matrix combo = Matrix::Zero(32, 32);
    for (const auto& w : words) combo += Complex(g(rng), g(rng)) * dense(w).matrix;
    worst = std::min(worst, recovered_fidelity(dec, combo, five.code.encode(haar(2, rng)).amplitudes));
    std::vector<KrausOperator> ops;
    for (const auto& w : words) ops.push_back({w.to_string(), dense(w).matrix});
    ops.push_back({"combo", combo});
    c.expect(correctable_quantum(five.code, ErrorSet(qubit_dims(5), ops)).correctable, "linear combination broke correctability");
  }
  c.expect(worst >= 1 - 1e-8, "combination recovery fidelity " + std::to_string(worst));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"classical repetition failure probability", classical_repetition},
      {"quantum repetition exact pipeline", quantum_repetition},
      {"cyclic system shift statistics", cyclic_system},
      {"detectability goldens", detectability},
      {"minimum distances, dense and symplectic", minimum_distances},
      {"correctability and synthesized decoder", correctability_and_decoder},
      {"three-spin noiseless qubit", noiseless_qubit},
      {"twirling", twirling},
      {"fidelity relations", fidelity_relations},
      {"bad-branch bound", bad_branch_bound},
      {"concatenation recursion", concatenation},
      {"property suites", property_suites},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Check c;
    try {
      criteria[k].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("[%s] %2zu %s%s%s\n", c.ok ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), c.ok ? "" : ": ",
                c.note.str().c_str());
    failures += !c.ok;
  }
  return failures == 0 ? 0 : 1;
}
