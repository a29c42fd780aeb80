#pragma once

// Error estimates, fidelities, entanglement fidelity, average error and the
// bad-branch upper bound for environment-labeled operator sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "qecw/channels.hpp"
#include "qecw/hilbert.hpp"

namespace qecw {

struct ErrorEstimate {
  Complex gamma;     // <psi|psi_o>
  double epsilon;    // |psi_o - gamma psi|^2
  Vector error_term; // psi_o - gamma psi, orthogonal to psi
};

/// Splits the output into a multiple of the reference plus an orthogonal
/// error term. For a normalized output, epsilon = 1 - |gamma|^2; for a
/// branch carrying its amplitude, epsilon is that branch's error contribution.
inline ErrorEstimate error_estimate_pure(const StateVector& output, const StateVector& reference) {
  if (output.dims != reference.dims) throw DimensionError("error estimate: dims mismatch");
  if (std::abs(reference.norm() - 1.0) > tol::algebraic) throw PreconditionError("reference state must be normalized");
  const Complex gamma = reference.amplitudes.dot(output.amplitudes);
  Vector e = output.amplitudes - gamma * reference.amplitudes;
  const double eps = e.squaredNorm();
  return {gamma, eps, std::move(e)};
}

/// Probability-weighted sum of the branch estimates; each branch is a
/// normalized state with its probability.
inline double error_estimate_mixture(const std::vector<std::pair<double, StateVector>>& branches, const StateVector& reference) {
  double total = 0;
  for (const auto& [p, psi] : branches) total += p * error_estimate_pure(psi, reference).epsilon;
  return total;
}

/// <phi|rho|phi>.
inline double fidelity_mixed(const DensityOperator& rho, const StateVector& reference) {
  if (rho.dims != reference.dims) throw DimensionError("fidelity: dims mismatch");
  return reference.amplitudes.dot(rho.matrix * reference.amplitudes).real();
}

/// Maximally entangled |B> = sum_i |i>_R |i>_S / sqrt(d), reference first.
inline StateVector maximally_entangled(const Dims& system) {
  const Dims both = concat_dims(system, system);
  detail::check_cap(total_dim(both));
  const auto d = static_cast<Eigen::Index>(total_dim(system));
  Vector b = Vector::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) b(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return StateVector(both, std::move(b));
}

/// f_e = <B| (id_R (x) ch)(|B><B|) |B>. With `reference_unitary` U the
/// maximally entangled state (U (x) 1)|B> is used instead; the value does not
/// depend on the choice.
inline double entanglement_fidelity(const KrausChannel& ch, const std::optional<Matrix>& reference_unitary = std::nullopt) {
  const auto d = static_cast<Eigen::Index>(ch.dim());
  StateVector b = maximally_entangled(ch.dims());
  const Matrix id = Matrix::Identity(d, d);
  if (reference_unitary) {
    if (!is_unitary(*reference_unitary) || reference_unitary->rows() != d) throw PreconditionError("reference rotation must be a unitary on the system dimension");
    b = StateVector(b.dims, kron(*reference_unitary, id) * b.amplitudes);
  }
  double f = 0;
  for (const auto& op : ch.ops()) {
    const Vector out = kron(id, op.matrix) * b.amplitudes;
    f += std::norm(b.amplitudes.dot(out));
  }
  return f;
}

/// Average error over pure inputs from the entanglement error on k qubits:
/// eps_a = 2^k / (2^k + 1) eps_e.
inline double average_error_from_entanglement(double eps_e, std::size_t k) {
  if (eps_e < -tol::algebraic || eps_e > 1 + tol::algebraic) throw PreconditionError("entanglement error outside [0, 1]");
  const double d = std::ldexp(1.0, static_cast<int>(k));
  return d / (d + 1.0) * eps_e;
}

struct MonteCarloEstimate {
  double mean = 0;
  double half_width = 0;  // 95% normal-approximation interval
  double std_error = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

namespace detail {
/// Independent generator for one trial, derived from (seed, trial index).
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

/// Normalized complex Gaussian vector: a Haar-random pure state.
inline Vector haar_state(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double re = g(rng);
    const double im = g(rng);
    v(k) = Complex(re, im);
  }
  return v.normalized();
}

inline std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs body(trial) for every trial, split across workers. Results are
/// written by index, so the outcome does not depend on the worker count.
template <class Body>
void parallel_trials(std::size_t trials, std::size_t workers, Body&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, trials));
  if (workers == 1) {
    for (std::size_t t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (trials + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(trials, lo + chunk);
      for (std::size_t t = lo; t < hi; ++t) body(t);
    });
  for (auto& th : pool) th.join();
}

inline MonteCarloEstimate summarize(const std::vector<double>& values, std::uint64_t seed) {
  MonteCarloEstimate est;
  est.trials = values.size();
  est.seed = seed;
  double sum = 0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  est.half_width = 1.96 * est.std_error;
  return est;
}
}  // namespace detail

/// Mean of 1 - <psi|ch(|psi><psi|)|psi> over Haar-random pure inputs.
inline MonteCarloEstimate average_error_monte_carlo(const KrausChannel& ch, std::size_t trials, std::uint64_t seed,
                                                    std::size_t workers = detail::default_workers()) {
  if (trials == 0) throw PreconditionError("monte carlo needs at least one trial");
  const auto d = static_cast<Eigen::Index>(ch.dim());
  std::vector<double> errors(trials);
  detail::parallel_trials(trials, workers, [&](std::size_t t) {
    auto rng = detail::trial_rng(seed, t);
    const Vector psi = detail::haar_state(d, rng);
    double f = 0;
    for (const auto& op : ch.ops()) f += std::norm(psi.dot(op.matrix * psi));
    errors[t] = 1.0 - f;
  });
  return detail::summarize(errors, seed);
}

/// Largest singular value.
inline double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

/// (sum over bad labels of |A_e|)^2 with the operator norm for |A_e|. The
/// label amplitudes are part of the operators here.
inline double bad_branch_upper_bound(const KrausChannel& ch, const StateVector& psi) {
  if (!ch.bad_labels()) throw PreconditionError("channel has no bad label set");
  if (psi.dims != ch.dims()) throw DimensionError("bound: state dims differ from channel dims");
  double s = 0;
  for (const auto& label : *ch.bad_labels()) s += operator_norm(ch.op(label).matrix);
  return s * s;
}

/// Exact weight of the bad branches: |sum_{e in bad} |e> A_e psi|^2 = sum |A_e psi|^2.
inline double bad_branch_probability(const KrausChannel& ch, const StateVector& psi) {
  if (!ch.bad_labels()) throw PreconditionError("channel has no bad label set");
  if (psi.dims != ch.dims()) throw DimensionError("bad branch: state dims differ from channel dims");
  double p = 0;
  for (const auto& label : *ch.bad_labels()) p += (ch.op(label).matrix * psi.amplitudes).squaredNorm();
  return p;
}

}  // namespace qecw
