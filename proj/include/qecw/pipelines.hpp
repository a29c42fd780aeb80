#pragma once

// Encode -> noise -> decode experiments, exact and sampled, and the
// concatenation recursion.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qecw/channels.hpp"
#include "qecw/codes.hpp"
#include "qecw/fidelity.hpp"
#include "qecw/hilbert.hpp"

namespace qecw {

/// Reported numbers carry 12 significant digits so that text output is
/// stable against last-bit differences.
inline double report_round(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  // numerical noise on O(1) quantities prints as an exact zero
  return std::abs(r) < 1e-12 ? 0.0 : r;
}

inline nlohmann::ordered_json rounded_matrix_json(const Matrix& m) {
  auto out = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({report_round(m(r, c).real()), report_round(m(r, c).imag())});
    out.push_back(std::move(row));
  }
  return out;
}

struct Outcome {
  std::string syndrome;  // syndrome label, or "fail" for detected leakage
  std::string logical;   // logical basis outcome, "-" for fail
  double p;
};

struct PipelineReport {
  std::string scenario;
  std::string input;
  std::vector<Outcome> outcomes;
  Matrix logical_rho;  // logical state of the identified part; trace = 1 - fail mass
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;

  double probability(const std::string& syndrome, const std::string& logical) const {
    for (const auto& o : outcomes)
      if (o.syndrome == syndrome && o.logical == logical) return o.p;
    return 0.0;
  }

  double total_probability() const {
    double s = 0;
    for (const auto& o : outcomes) s += o.p;
    return s;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["input"] = input;
    auto outs = nlohmann::ordered_json::array();
    for (const auto& o : outcomes) {
      nlohmann::ordered_json e;
      e["syndrome"] = o.syndrome;
      e["logical"] = o.logical;
      e["p"] = report_round(o.p);
      outs.push_back(std::move(e));
    }
    j["outcomes"] = std::move(outs);
    j["logical_rho"] = rounded_matrix_json(logical_rho);
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : metrics.items()) m[k] = v.is_number_float() ? nlohmann::ordered_json(report_round(v.get<double>())) : v;
    j["metrics"] = std::move(m);
    if (seed) j["seed"] = *seed;
    if (trials) j["trials"] = *trials;
    return j;
  }
};

namespace detail {
inline std::string logical_label(std::size_t l) { return std::to_string(l); }

/// Outcome table and metrics of a physical state read through an identification.
inline PipelineReport read_out(std::string scenario, std::string input_name, const SubsystemIdentification& id,
                               const DensityOperator& rho, const StateVector& input) {
  PipelineReport r;
  r.scenario = std::move(scenario);
  r.input = std::move(input_name);
  const DensityOperator pair = id.to_pair(rho);
  for (std::size_t s = 0; s < id.syndrome_dim(); ++s)
    for (std::size_t l = 0; l < id.logical_dim(); ++l) {
      const auto c = id.column(s, l);
      r.outcomes.push_back({id.syndrome_labels()[s], logical_label(l), pair.matrix(c, c).real()});
    }
  const double fail = std::max(0.0, id.leakage(rho));
  if (id.is_partial()) r.outcomes.push_back({"fail", "-", fail});
  r.logical_rho = partial_trace(pair, {1}).matrix;
  const double f = input.amplitudes.dot(r.logical_rho * input.amplitudes).real();
  r.metrics["fidelity"] = f;
  r.metrics["error"] = 1.0 - f;
  r.metrics["fail_probability"] = fail;
  return r;
}
}  // namespace detail

/// Exact propagation: encode with `id`, apply `channel`, then read the
/// syndrome and logical factors through the same identification. Leaked
/// weight is reported as the "fail" outcome and counts as error.
inline PipelineReport run_exact(const std::string& scenario, const SubsystemIdentification& id, const KrausChannel& channel,
                                const StateVector& input, const std::string& input_name) {
  if (channel.dims() != id.physical_dims()) throw DimensionError("run_exact: channel does not act on the code's physical space");
  const DensityOperator encoded = id.encode(DensityOperator::pure(input));
  const DensityOperator noisy = apply(channel, encoded);
  return detail::read_out(scenario, input_name, id, noisy, input);
}

/// Sampled version of run_exact: each trial picks a Kraus branch by its Born
/// probability, then a syndrome (or fail), then a logical basis outcome. The
/// error estimate averages the per-trial infidelity of the decoded logical state.
inline PipelineReport run_monte_carlo(const std::string& scenario, const SubsystemIdentification& id, const KrausChannel& channel,
                                      const StateVector& input, const std::string& input_name, std::size_t trials,
                                      std::uint64_t seed, std::size_t workers = detail::default_workers()) {
  if (trials == 0) throw PreconditionError("monte carlo needs at least one trial");
  if (channel.dims() != id.physical_dims()) throw DimensionError("run_monte_carlo: channel does not act on the code's physical space");
  const Vector encoded = id.encode(input).amplitudes;
  const std::size_t ns = id.syndrome_dim();
  const std::size_t nl = id.logical_dim();
  const std::size_t fail_index = ns * nl;
  std::vector<std::size_t> outcome(trials);
  std::vector<double> errors(trials);

  detail::parallel_trials(trials, workers, [&](std::size_t t) {
    auto rng = detail::trial_rng(seed, t);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto pick = [&](const std::vector<double>& weights) {
      double total = 0;
      for (double w : weights) total += w;
      double x = u(rng) * total;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        if (x < weights[k]) return k;
        x -= weights[k];
      }
      std::size_t last = weights.size() - 1;
      while (last > 0 && weights[last] <= 0) --last;
      return last;
    };
    std::vector<Vector> branches;
    std::vector<double> weights;
    for (const auto& op : channel.ops()) {
      branches.push_back(op.matrix * encoded);
      weights.push_back(branches.back().squaredNorm());
    }
    const Vector psi = branches[pick(weights)].normalized();
    const Vector pair = id.isometry().adjoint() * psi;
    std::vector<double> syn(ns + 1, 0.0);
    for (std::size_t s = 0; s < ns; ++s) syn[s] = pair.segment(static_cast<Eigen::Index>(s * nl), static_cast<Eigen::Index>(nl)).squaredNorm();
    syn[ns] = id.is_partial() ? std::max(0.0, 1.0 - pair.squaredNorm()) : 0.0;
    const std::size_t s = pick(syn);
    if (s == ns) {
      outcome[t] = fail_index;
      errors[t] = 1.0;
      return;
    }
    const Vector logical = pair.segment(static_cast<Eigen::Index>(s * nl), static_cast<Eigen::Index>(nl)).normalized();
    errors[t] = 1.0 - std::norm(input.amplitudes.dot(logical));
    std::vector<double> lw;
    for (Eigen::Index l = 0; l < logical.size(); ++l) lw.push_back(std::norm(logical(l)));
    outcome[t] = s * nl + pick(lw);
  });

  std::vector<std::size_t> counts(fail_index + 1, 0);
  for (auto o : outcome) ++counts[o];
  PipelineReport r;
  r.scenario = scenario;
  r.input = input_name;
  const double n = static_cast<double>(trials);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t l = 0; l < nl; ++l)
      r.outcomes.push_back({id.syndrome_labels()[s], detail::logical_label(l), static_cast<double>(counts[s * nl + l]) / n});
  if (id.is_partial()) r.outcomes.push_back({"fail", "-", static_cast<double>(counts[fail_index]) / n});
  // sampled logical basis frequencies, identified part only
  r.logical_rho = Matrix::Zero(static_cast<Eigen::Index>(nl), static_cast<Eigen::Index>(nl));
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t l = 0; l < nl; ++l)
      r.logical_rho(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)) += static_cast<double>(counts[s * nl + l]) / n;
  const auto est = detail::summarize(errors, seed);
  r.metrics["error"] = est.mean;
  r.metrics["error_half_width"] = est.half_width;
  r.metrics["error_std_error"] = est.std_error;
  r.metrics["fail_probability"] = static_cast<double>(counts[fail_index]) / n;
  r.seed = seed;
  r.trials = trials;
  return r;
}

// ---------------------------------------------------------------------------
// Cyclic system

struct CyclicBranch {
  int shift;
  double probability;       // q e^{-k^2}
  double fail_probability;  // weight of this branch on the undecodable state
  std::vector<StateVector> decoded;  // logical part per syndrome, carrying its amplitude within the branch
  double error;                      // sum over syndromes of |v_s - gamma_s psi|^2, times the branch probability
};

/// The single shift branch s_k applied to the encoded input.
inline CyclicBranch cyclic_branch(const StateVector& input, int k, int truncation = default_gaussian_truncation) {
  const auto id = cyclic7();
  const auto model = gaussian_shift_model(truncation);
  const double p = model.probability(k);
  const Vector shifted = shift_operator(k, 7) * id.encode(input).amplitudes;
  const double fail = std::norm(shifted(6));
  const Vector pair = id.isometry().adjoint() * shifted;
  CyclicBranch b{k, p, p * fail, {}, 0.0};
  double eps = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    b.decoded.emplace_back(Dims{2}, pair.segment(static_cast<Eigen::Index>(2 * s), 2), true);
    eps += error_estimate_pure(b.decoded.back(), input).epsilon;
  }
  b.error = p * eps;
  return b;
}

/// Cyclic code under the Gaussian shift model, detection then decoding.
inline PipelineReport run_cyclic(const StateVector& input, const std::string& input_name, int truncation = default_gaussian_truncation) {
  const auto id = cyclic7();
  const auto model = gaussian_shift_model(truncation);
  PipelineReport r = run_exact("cyclic7", id, gaussian_shift(7, truncation), input, input_name);
  const nlohmann::ordered_json base = r.metrics;
  r.metrics = nlohmann::ordered_json::object();
  r.metrics["q"] = model.q;
  r.metrics["p_shift_pm1"] = model.probability(1);
  const double within_one = model.probability(-1) + model.probability(0) + model.probability(1);
  r.metrics["shift_mass_within_one"] = within_one;
  r.metrics["success_probability"] = within_one;
  for (const auto& [key, value] : base.items()) r.metrics[key] = value;
  return r;
}

// ---------------------------------------------------------------------------
// Two rounds on the repetition code

/// Two rounds of single-flip noise on the repetition code, with or without
/// a syndrome reset between them. Returns the final logical error.
inline double run_two_rounds(const StateVector& input, double p, bool reset) {
  const auto id = repetition_quantum();
  const auto noise = single_flip_noise(p, 3);
  DensityOperator rho = apply(noise, id.encode(DensityOperator::pure(input)));
  if (reset) rho = syndrome_reset(id, rho);
  rho = apply(noise, rho);
  const DensityOperator logical = id.logical(rho);
  return 1.0 - fidelity_mixed(logical, input);
}

// ---------------------------------------------------------------------------
// Concatenation

/// Level bounds with the first level equal to p: p_1 = p, p_{j+1} = C p_j^2.
template <class T>
std::vector<T> concat_levels(const T& p, const T& c, int levels) {
  if (levels < 1) throw PreconditionError("concatenation needs at least one level");
  std::vector<T> out{p};
  for (int j = 1; j < levels; ++j) out.push_back(c * out.back() * out.back());
  return out;
}

/// p_k = C^{2^{k-1} - 1} p^{2^{k-1}}.
template <class T>
T concat_closed_form(const T& p, const T& c, int k) {
  if (k < 1) throw PreconditionError("concatenation level must be at least 1");
  const unsigned long long e = 1ULL << (k - 1);
  T cp = T(1), pp = T(1);
  for (unsigned long long i = 0; i + 1 < e; ++i) cp *= c;
  for (unsigned long long i = 0; i < e; ++i) pp *= p;
  return cp * pp;
}

enum class ConcatVerdict { improving, flat, worsening };

inline const char* to_string(ConcatVerdict v) {
  switch (v) {
    case ConcatVerdict::improving: return "improving";
    case ConcatVerdict::flat: return "flat";
    case ConcatVerdict::worsening: return "worsening";
  }
  return "";
}

/// Improving iff p < 1/C, compared as p*C against 1.
template <class T>
ConcatVerdict concat_verdict(const T& p, const T& c) {
  const T pc = p * c;
  if (pc < T(1)) return ConcatVerdict::improving;
  if (pc == T(1)) return ConcatVerdict::flat;
  return ConcatVerdict::worsening;
}

struct ConcatSchedule {
  double p;
  double c;
  int levels;
  std::size_t block = 1;
};

struct ConcatResult {
  std::vector<double> levels;
  ConcatVerdict verdict;
  std::vector<double> resources;  // block^j physical units per logical unit at level j
};

inline ConcatResult concat_recursion(const ConcatSchedule& s) {
  if (!(s.p > 0) || !(s.c > 0)) throw PreconditionError("concatenation needs positive p and C");
  ConcatResult r{concat_levels(s.p, s.c, s.levels), concat_verdict(s.p, s.c), {}};
  double units = 1;
  for (int j = 1; j <= s.levels; ++j) {
    units *= static_cast<double>(s.block);
    r.resources.push_back(units);
  }
  return r;
}

/// Threshold figures quoted in the literature for various fault-tolerance
/// schemes. Shipped for reference only; nothing here derives them.
inline constexpr std::array<double, 4> reference_threshold_values{1e-6, 1e-4, 1e-2, 1.0};

}  // namespace qecw
