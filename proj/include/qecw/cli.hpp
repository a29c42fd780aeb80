#pragma once

// Command-line front end. run_cli() is the whole program; tools/qecw.cpp
// only forwards argv and the standard streams.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qecw/analysis.hpp"
#include "qecw/channels.hpp"
#include "qecw/codes.hpp"
#include "qecw/fidelity.hpp"
#include "qecw/pipelines.hpp"

namespace qecw::cli {

enum ExitCode : int { ok = 0, negative = 1, detection_failure = 2, usage = 64 };

/// Raised for malformed user input; maps to exit code 64.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Input parsing

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Value given inline, or read from a file when it names one.
inline std::string inline_or_file(const std::string& value) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(value, ec)) return read_file(value);
  return value;
}

inline double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad number for " + what + ": " + s);
  }
}

struct CodeHandle {
  std::string name;
  CodeSubspace code;
  std::optional<SubsystemIdentification> id;
  std::optional<StabilizerGeneratorSet> stabilizer;
};

inline const std::vector<std::string>& builtin_codes() {
  static const std::vector<std::string> names{"repetition3", "cyclic7", "threespin", "fivequbit", "trivial2"};
  return names;
}

inline CodeHandle builtin_code(const std::string& name) {
  if (name == "repetition3") {
    auto id = repetition_quantum();
    return {name, id.code_subspace(), id, repetition_stabilizer()};
  }
  if (name == "cyclic7") {
    auto id = cyclic7();
    return {name, id.code_subspace(), id, std::nullopt};
  }
  if (name == "threespin") {
    auto id = three_spin_noiseless();
    return {name, id.code_subspace(), id, std::nullopt};
  }
  if (name == "fivequbit") {
    auto c = five_qubit();
    return {name, c.code, std::nullopt, c.generators};
  }
  if (name == "trivial2") {
    auto id = trivial_two_qubit();
    return {name, id.code_subspace(), id, std::nullopt};
  }
  throw UsageError("unknown code " + name);
}

/// Builtin name, or a file/inline text starting with "stabilizer:" (Pauli
/// words, one per line) or "basis:" (JSON amplitude arrays, one per line).
inline CodeHandle parse_code(const std::string& value) {
  if (std::find(builtin_codes().begin(), builtin_codes().end(), value) != builtin_codes().end()) return builtin_code(value);
  const std::string text = trim(inline_or_file(value));
  const auto lines = split(text, "\n");
  if (lines.empty()) throw UsageError("empty code definition");
  const std::string head = lines.front();
  try {
    if (head.rfind("stabilizer:", 0) == 0) {
      std::vector<std::string> words = split(head.substr(11), " ,");
      for (std::size_t k = 1; k < lines.size(); ++k)
        for (auto& w : split(lines[k], " ,")) words.push_back(w);
      auto s = StabilizerGeneratorSet::parse(words);
      auto code = stabilizer_codespace(s);
      return {"stabilizer", std::move(code), std::nullopt, std::move(s)};
    }
    if (head.rfind("basis:", 0) == 0) {
      std::vector<Vector> vecs;
      std::string rest = trim(head.substr(6));
      std::vector<std::string> rows;
      if (!rest.empty()) rows.push_back(rest);
      for (std::size_t k = 1; k < lines.size(); ++k) rows.push_back(lines[k]);
      for (const auto& r : rows) vecs.push_back(vector_from_json(nlohmann::json::parse(r)));
      if (vecs.empty()) throw UsageError("basis: needs at least one vector");
      const auto d = vecs.front().size();
      Matrix m(d, static_cast<Eigen::Index>(vecs.size()));
      for (std::size_t k = 0; k < vecs.size(); ++k) {
        if (vecs[k].size() != d) throw UsageError("basis vectors differ in length");
        m.col(static_cast<Eigen::Index>(k)) = vecs[k];
      }
      Dims dims{static_cast<std::size_t>(d)};
      if (d > 0 && (d & (d - 1)) == 0) dims = qubit_dims(static_cast<std::size_t>(std::countr_zero(static_cast<unsigned long long>(d))));
      return {"basis", CodeSubspace(dims, std::move(m)), std::nullopt, std::nullopt};
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad code definition: ") + e.what());
  }
  throw UsageError("code must be a builtin (" + std::string("repetition3, cyclic7, threespin, fivequbit, trivial2") +
                   ") or start with 'stabilizer:' or 'basis:'");
}

inline bool all_qubits(const Dims& dims) {
  return std::all_of(dims.begin(), dims.end(), [](std::size_t d) { return d == 2; });
}

/// Comma or space separated tokens: I, weightK, X1/Y2/Z3 (1-based qubit),
/// full Pauli words with optional phase, s<k> (cyclic shift).
inline ErrorSet parse_errors(const std::string& spec, const Dims& dims) {
  static const std::regex weight_re("weight([0-9]+)");
  static const std::regex single_re("([XYZ])([0-9]+)");
  static const std::regex shift_re("s(-?[0-9]+)");
  static const std::regex word_re("(\\+|-|\\+i|-i)?[IXYZ]+");
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  const std::size_t n = dims.size();
  std::vector<KrausOperator> ops;
  auto add = [&](std::string label, Matrix m) {
    for (const auto& o : ops)
      if (o.label == label) return;
    ops.push_back({std::move(label), std::move(m)});
  };
  const auto tokens = split(spec, ", \n");
  if (tokens.empty()) throw UsageError("empty error specification");
  for (const auto& t : tokens) {
    std::smatch m;
    if (t == "I") {
      add("I", Matrix::Identity(d, d));
    } else if (std::regex_match(t, m, weight_re)) {
      if (!all_qubits(dims)) throw UsageError(t + " needs a qubit code");
      for (const auto& p : pauli_words_up_to_weight(n, std::stoul(m[1].str())))
        add(p.is_identity() ? std::string("I") : p.to_string(), dense(p).matrix);
    } else if (std::regex_match(t, m, single_re)) {
      if (!all_qubits(dims)) throw UsageError(t + " needs a qubit code");
      const std::size_t q = std::stoul(m[2].str());
      if (q < 1 || q > n) throw UsageError("qubit index out of range in " + t);
      add(t, dense(PauliProduct::single(n, q - 1, *pauli_from_char(m[1].str()[0]))).matrix);
    } else if (std::regex_match(t, m, shift_re)) {
      if (dims.size() != 1) throw UsageError(t + " needs a single cyclic system");
      add(t, shift_operator(std::stoi(m[1].str()), dims[0]));
    } else if (std::regex_match(t, word_re)) {
      const auto p = PauliProduct::parse(t);
      if (p.size() != n || !all_qubits(dims)) throw UsageError("Pauli word " + t + " does not match the code length");
      add(t, dense(p).matrix);
    } else {
      throw UsageError("unrecognized error token " + t);
    }
  }
  return ErrorSet(dims, std::move(ops));
}

namespace detail {
inline std::map<std::string, std::string> key_values(const std::vector<std::string>& tokens, std::size_t from) {
  std::map<std::string, std::string> kv;
  for (std::size_t k = from; k < tokens.size(); ++k) {
    const auto eq = tokens[k].find('=');
    if (eq == std::string::npos) throw UsageError("expected key=value, got " + tokens[k]);
    kv[tokens[k].substr(0, eq)] = tokens[k].substr(eq + 1);
  }
  return kv;
}

inline double take(std::map<std::string, std::string>& kv, const std::string& key, std::optional<double> fallback = std::nullopt) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    if (fallback) return *fallback;
    throw UsageError("missing " + key + "=");
  }
  const double v = parse_number(it->second, key);
  kv.erase(it);
  return v;
}

inline void expect_empty(const std::map<std::string, std::string>& kv, const std::string& what) {
  if (!kv.empty()) throw UsageError("unknown parameter " + kv.begin()->first + " for " + what);
}

inline KrausChannel parse_channel_line(const std::string& line) {
  const auto tokens = split(line, " \t");
  if (tokens.empty()) throw UsageError("empty channel line");
  const std::string& kind = tokens[0];
  try {
    if (kind == "independent") {
      if (tokens.size() < 3 || tokens[1].rfind("n=", 0) != 0) throw UsageError("independent needs n=<count> <inner channel>");
      const double n = parse_number(tokens[1].substr(2), "n");
      if (n < 1 || n != std::floor(n)) throw UsageError("independent needs a positive integer n");
      std::string inner;
      for (std::size_t k = 2; k < tokens.size(); ++k) inner += tokens[k] + " ";
      return tensor_independent(parse_channel_line(inner), static_cast<std::size_t>(n));
    }
    auto kv = key_values(tokens, 1);
    if (kind == "depolarizing") {
      const double p = take(kv, "p");
      expect_empty(kv, kind);
      return depolarizing(p);
    }
    if (kind == "bitflip") {
      const double p = take(kv, "p");
      expect_empty(kv, kind);
      return bit_flip(p);
    }
    if (kind == "gaussian7") {
      const double k = take(kv, "K", default_gaussian_truncation);
      expect_empty(kv, kind);
      return gaussian_shift(7, static_cast<int>(k));
    }
    if (kind == "collective") {
      const std::array<double, 3> v{take(kv, "vx", 0.0), take(kv, "vy", 0.0), take(kv, "vz", 0.0)};
      expect_empty(kv, kind);
      return collective_rotation(v);
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("bad channel ") + line + ": " + e.what());
  }
  throw UsageError("unknown channel kind " + kind);
}
}  // namespace detail

/// One channel per line (or per ';'); several lines compose in order.
inline KrausChannel parse_channel_spec(const std::string& value) {
  const auto lines = split(inline_or_file(value), "\n;");
  if (lines.empty()) throw UsageError("empty channel specification");
  KrausChannel ch = detail::parse_channel_line(lines[0]);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const KrausChannel next = detail::parse_channel_line(lines[k]);
    if (next.dims() != ch.dims()) throw UsageError("composed channels act on different spaces");
    ch = compose(next, ch);
  }
  return ch;
}

/// 0, 1, +, -, +i, -i for a qubit; otherwise a JSON amplitude array.
inline StateVector parse_input(const std::string& token, std::size_t dim) {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i(0, 1);
  Vector v(2);
  if (dim == 2) {
    if (token == "0") v << 1, 0;
    else if (token == "1") v << 0, 1;
    else if (token == "+") v << r, r;
    else if (token == "-") v << r, -r;
    else if (token == "+i") v << r, r * i;
    else if (token == "-i") v << r, -r * i;
    else v.resize(0);
    if (v.size() == 2) return StateVector({2}, v);
  }
  try {
    Vector a = vector_from_json(nlohmann::json::parse(token));
    if (static_cast<std::size_t>(a.size()) != dim) throw UsageError("input has the wrong dimension");
    if (a.norm() == 0) throw UsageError("input is the zero vector");
    return StateVector({dim}, a.normalized());
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("bad input state " + token);
  }
}

// ---------------------------------------------------------------------------
// Output

inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array() && !j.empty() && (j.front().is_object())) {
    for (std::size_t k = 0; k < j.size(); ++k) flatten(j[k], prefix + "[" + std::to_string(k) + "]", rows);
  } else {
    rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

inline std::string render(const json& j, bool table) {
  if (!table) return j.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(j, "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::string out;
  for (const auto& [k, v] : rows) out += k + std::string(width - k.size() + 2, ' ') + v + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Demos

inline PipelineReport classical_report(const std::string& scenario, const std::string& input, const ClassicalIdentification& id,
                                       const std::vector<double>& distribution, const std::string& expected_logical) {
  PipelineReport r;
  r.scenario = scenario;
  r.input = input;
  double fail = 0, wrong = 0;
  std::map<std::string, double> logical_mass;
  for (std::size_t z = 0; z < distribution.size(); ++z) {
    const auto& e = id.table[z];
    if (!e) {
      fail += distribution[z];
      continue;
    }
    r.outcomes.push_back({e->syndrome, e->logical, distribution[z]});
    logical_mass[e->logical] += distribution[z];
    if (e->logical != expected_logical) wrong += distribution[z];
  }
  r.logical_rho = Matrix::Zero(static_cast<Eigen::Index>(logical_mass.size()), static_cast<Eigen::Index>(logical_mass.size()));
  Eigen::Index k = 0;
  for (const auto& [label, mass] : logical_mass) r.logical_rho(k, k) = mass, ++k;
  r.metrics["error"] = wrong + fail;
  r.metrics["fail_probability"] = fail;
  return r;
}

inline std::vector<std::array<double, 3>> random_rotations(std::size_t count, std::uint64_t seed) {
  std::vector<std::array<double, 3>> out;
  for (std::size_t k = 0; k < count; ++k) {
    auto rng = qecw::detail::trial_rng(seed, k);
    std::normal_distribution<double> g;
    std::array<double, 3> v{};
    for (auto& x : v) x = g(rng);
    out.push_back(v);
  }
  return out;
}

inline const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names{"trivial2",   "repetition-classical", "repetition-quantum", "cyclic7",
                                              "three-spin", "five-qubit",           "parity2"};
  return names;
}

inline PipelineReport run_demo(const std::string& name, std::uint64_t seed) {
  const StateVector zero = parse_input("0", 2);
  const StateVector plus = parse_input("+", 2);
  if (name == "trivial2") {
    const auto ch = tensor(depolarizing(1.0), identity_channel({2}));
    return run_exact(name, trivial_two_qubit(), ch, plus, "+");
  }
  if (name == "repetition-classical") {
    const auto id = repetition_identification();
    const double p = 0.25;
    std::vector<double> dist(8);
    for (std::size_t z = 0; z < 8; ++z) {
      const std::string w = id.space.word_of(z);
      double pr = 1;
      for (char c : w) pr *= c == '1' ? p : 1 - p;
      dist[z] = pr;
    }
    auto r = classical_report(name, "000", id, dist, "0");
    r.metrics["failure_probability"] = repetition_failure_probability(p);
    return r;
  }
  if (name == "repetition-quantum") return run_exact(name, repetition_quantum(), tensor_independent(bit_flip(0.25), 3), zero, "0");
  if (name == "cyclic7") {
    auto r = run_cyclic(plus, "+");
    const auto b = cyclic_branch(plus, 2);
    r.metrics["shift2_probability"] = b.probability;
    r.metrics["shift2_fail_probability"] = b.fail_probability;
    r.metrics["shift2_error"] = b.error;
    return r;
  }
  if (name == "three-spin") {
    const auto id = three_spin_noiseless();
    const auto rotations = random_rotations(100, seed);
    std::vector<Matrix> us;
    double leak = 0, dev = 0;
    for (const auto& v : rotations) {
      us.push_back(collective_error(v).matrix);
      const auto f = factorization_check(id, us.back());
      leak = std::max(leak, f.leakage);
      dev = std::max(dev, f.deviation);
    }
    const auto ch = unitary_mixture(qubit_dims(3), std::vector<double>(us.size(), 1.0 / static_cast<double>(us.size())), us);
    auto r = run_exact(name, id, ch, plus, "+");
    r.metrics["rotations"] = rotations.size();
    r.metrics["max_leakage"] = leak;
    r.metrics["max_logical_deviation"] = dev;
    r.seed = seed;
    return r;
  }
  if (name == "five-qubit") {
    const auto code = five_qubit();
    const auto dec = synthesize_decoder(code.code, ErrorSet::from_paulis(pauli_words_up_to_weight(5, 1)));
    return run_exact(name, dec.identification, tensor_independent(depolarizing(0.1), 5), zero, "0");
  }
  if (name == "parity2") {
    const auto id = classical_parity_identification();
    const auto flip = flip_map(id.space, {0, 1});
    std::vector<double> dist(4, 0.0);
    const std::size_t x = id.space.index_of("01");
    dist[x] += 0.5;
    dist[flip(x)] += 0.5;
    return classical_report(name, "01", id, dist, "1");
  }
  throw UsageError("unknown demo " + name);
}

// ---------------------------------------------------------------------------
// Subcommands

struct Common {
  bool table = false;
  bool json_flag = false;
  std::string out_file;
};

inline json check_command(const std::string& code_value, const std::string& errors_value, const std::string& assertion, int& exit_code) {
  const auto handle = parse_code(code_value);
  const auto errs = parse_errors(errors_value, handle.code.dims());
  json j;
  j["code"] = handle.name;
  auto list = json::array();
  bool all_detectable = true;
  for (const auto& e : errs.ops()) {
    const auto v = detectable_quantum(handle.code, e.matrix);
    all_detectable = all_detectable && v.detectable;
    json item;
    item["error"] = e.label;
    item["detectable"] = v.detectable;
    item["lambda"] = {report_round(v.lambda.real()), report_round(v.lambda.imag())};
    list.push_back(std::move(item));
  }
  j["errors"] = std::move(list);
  const auto c = correctable_quantum(handle.code, errs);
  j["correctable"] = c.correctable;
  if (c.correctable) {
    j["rank"] = c.rank;
    j["lambda_matrix"] = rounded_matrix_json(c.lambda);
    const auto dec = synthesize_decoder(handle.code, errs);
    json d;
    d["syndromes"] = dec.rank;
    d["logical_dim"] = dec.identification.logical_dim();
    d["partial"] = dec.identification.is_partial();
    j["decoder"] = std::move(d);
  } else {
    j["first_failure"] = {c.first_failure->first, c.first_failure->second};
  }
  if ((assertion == "detectable" && !all_detectable) || (assertion == "correctable" && !c.correctable)) exit_code = negative;
  return j;
}

inline json mindist_command(const std::string& stabilizer, const std::string& code_value, const std::string& alphabet_s,
                            std::size_t cap) {
  const auto alphabet = parse_alphabet(alphabet_s);
  auto encode = [](const MinDistance& m) {
    json r;
    r["status"] = m.status == MinDistance::Status::found ? "found"
                  : m.status == MinDistance::Status::exceeds_cap ? "exceeds_cap"
                                                                 : "no_logical_operator";
    if (m.found()) r["distance"] = m.distance;
    else r["distance"] = nullptr;
    if (m.witness) r["witness"] = m.witness->to_string();
    r["cap"] = m.cap;
    return r;
  };
  json j;
  std::optional<StabilizerGeneratorSet> s;
  std::optional<CodeSubspace> dense_code;
  if (!stabilizer.empty()) {
    if (std::find(builtin_codes().begin(), builtin_codes().end(), stabilizer) != builtin_codes().end()) {
      auto h = builtin_code(stabilizer);
      if (!h.stabilizer) throw UsageError(stabilizer + " is not a stabilizer code");
      s = h.stabilizer;
      j["code"] = stabilizer;
    } else {
      s = StabilizerGeneratorSet::parse(split(inline_or_file(stabilizer), " ,\n"));
      j["code"] = "stabilizer";
    }
    if (total_dim(qubit_dims(s->size())) <= max_dimension()) dense_code = stabilizer_codespace(*s);
  } else if (!code_value.empty()) {
    auto h = parse_code(code_value);
    j["code"] = h.name;
    dense_code = h.code;
    s = h.stabilizer;
  } else {
    throw UsageError("mindist needs --stabilizer or --code");
  }
  j["alphabet"] = alphabet_s;
  std::optional<MinDistance> sym, den;
  if (s) j["symplectic"] = encode(*(sym = stabilizer_min_distance(*s, alphabet, cap)));
  if (dense_code) j["dense"] = encode(*(den = min_distance_quantum(*dense_code, alphabet, cap)));
  const MinDistance& primary = sym ? *sym : *den;
  j["distance"] = primary.found() ? json(primary.distance) : json(nullptr);
  if (sym && den) j["agree"] = sym->status == den->status && sym->distance == den->distance;
  return j;
}

inline json pauli_probs_json(const PauliChannel& pc) {
  json p;
  for (const char* w : {"I", "X", "Y", "Z"}) p[w] = report_round(pc.probability(w));
  return p;
}

inline json twirl_command(const std::string& channel_value, bool clifford) {
  const auto ch = parse_channel_spec(channel_value);
  if (ch.dims() != Dims{2}) throw UsageError("twirl needs a one-qubit channel");
  const auto pc = twirl(ch);
  json j;
  j["p"] = pauli_probs_json(pc);
  j["depolarizing_p"] = report_round(depolarizing_parameter(pc));
  if (clifford) j["clifford"] = pauli_probs_json(twirl(clifford_twirl(pc)));
  return j;
}

inline json noiseless_command(std::size_t trials, std::uint64_t seed) {
  const auto built = build_noiseless_qubit();
  const auto closed = three_spin_noiseless();
  json j;
  auto overlaps = json::array();
  for (Eigen::Index c = 0; c < 4; ++c) overlaps.push_back(report_round(std::abs(closed.isometry().col(c).dot(built.isometry().col(c)))));
  j["overlaps"] = std::move(overlaps);
  j["symmetric_rank"] = static_cast<std::size_t>(std::llround(symmetric_projector(3).matrix.trace().real()));
  std::vector<Matrix> js;
  for (Pauli u : {Pauli::X, Pauli::Y, Pauli::Z}) js.push_back(collective_spin(u, 3).matrix);
  j["commutant_dimension"] = commutant(js).size();
  auto logical_action = [&](const Matrix& op) {
    // restrict to syndrome "up" block
    const Matrix b = built.syndrome_block(0);
    return rounded_matrix_json(b.adjoint() * op * b);
  };
  j["pi1_logical"] = logical_action(cyclic_permutation3().matrix);
  j["pi2_logical"] = logical_action(swap23().matrix);
  double leak = 0, dev = 0;
  for (const auto& v : random_rotations(trials, seed)) {
    const auto f = factorization_check(built, collective_error(v).matrix);
    leak = std::max(leak, f.leakage);
    dev = std::max(dev, f.deviation);
  }
  j["rotations"] = trials;
  j["seed"] = seed;
  j["max_leakage"] = report_round(leak);
  j["max_logical_deviation"] = report_round(dev);
  return j;
}

inline json concat_command(double p, double c, int levels, std::size_t block) {
  const auto r = concat_recursion({p, c, levels, block});
  json j;
  j["p"] = p;
  j["C"] = c;
  auto lv = json::array();
  for (double x : r.levels) lv.push_back(report_round(x));
  j["levels"] = std::move(lv);
  j["verdict"] = to_string(r.verdict);
  j["resources"] = r.resources;
  return j;
}

inline SubsystemIdentification simulation_identification(const CodeHandle& h) {
  if (h.id) return *h.id;
  if (h.stabilizer) {
    // decoder for all errors of weight <= 1
    return synthesize_decoder(h.code, ErrorSet::from_paulis(pauli_words_up_to_weight(h.stabilizer->size(), 1))).identification;
  }
  throw UsageError("simulate needs a code with a subsystem identification or a stabilizer");
}

/// Entry point. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qecw: quantum error-correction workbench"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    auto* t = sub->add_flag("--table", common.table, "human-readable table output");
    sub->add_flag("--json", common.json_flag, "JSON output (default)")->excludes(t);
    sub->add_option("--out", common.out_file, "write output to FILE");
  };

  std::string code, errors, channel, input = "0", assertion, stabilizer, alphabet = "XYZ", demo;
  std::size_t trials = 0, rotations = 100, cap = default_distance_cap, block = 1;
  std::uint64_t seed = 0;
  double p = 0, c = 0, fail_threshold = 0.5;
  int levels = 4;
  bool clifford = false;

  auto* check = app.add_subcommand("check", "detectability and correctability of an error set");
  check->add_option("--code", code, "builtin code name or code file")->required();
  check->add_option("--errors", errors, "error tokens")->required();
  check->add_option("--assert", assertion, "exit 1 unless the property holds")->check(CLI::IsMember({"detectable", "correctable"}));
  add_common(check);

  auto* mind = app.add_subcommand("mindist", "minimum distance of a code");
  mind->add_option("--stabilizer", stabilizer, "builtin stabilizer code or comma-separated generators");
  mind->add_option("--code", code, "builtin code name or code file (dense search)");
  mind->add_option("--alphabet", alphabet, "per-qubit error alphabet, subset of XYZ");
  mind->add_option("--cap", cap, "largest weight searched")->check(CLI::PositiveNumber);
  add_common(mind);

  auto* sim = app.add_subcommand("simulate", "encode, apply noise, decode");
  sim->add_option("--code", code, "builtin code name or code file")->required();
  sim->add_option("--channel", channel, "channel specification or file")->required();
  sim->add_option("--input", input, "logical input: 0, 1, +, -, +i, -i or a JSON amplitude array");
  sim->add_option("--trials", trials, "Monte Carlo trials; 0 runs the exact pipeline");
  sim->add_option("--seed", seed, "random seed");
  sim->add_option("--fail-threshold", fail_threshold, "exit 2 when the fail mass exceeds this")->check(CLI::Range(0.0, 1.0));
  add_common(sim);

  auto* tw = app.add_subcommand("twirl", "Pauli twirl of a one-qubit channel");
  tw->add_option("--channel", channel, "channel specification or file")->required();
  tw->add_flag("--clifford", clifford, "also average over the 24 rotations");
  add_common(tw);

  auto* nl = app.add_subcommand("noiseless", "rebuild the three-spin noiseless qubit");
  nl->add_option("--trials", rotations, "number of random collective rotations checked");
  nl->add_option("--seed", seed, "random seed");
  add_common(nl);

  auto* cc = app.add_subcommand("concat", "concatenation recursion");
  cc->add_option("--p", p, "base error per unit")->required();
  cc->add_option("--C", c, "per-level constant")->required();
  cc->add_option("--levels", levels, "number of levels")->check(CLI::Range(1, 62));
  cc->add_option("--block", block, "physical units per coded block");
  add_common(cc);

  auto* dm = app.add_subcommand("demo", "run a canonical scenario");
  dm->add_option("name", demo, "scenario name")->required()->check(CLI::IsMember(demo_names()));
  dm->add_option("--seed", seed, "random seed");
  add_common(dm);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  }

  int exit_code = ok;
  json result;
  try {
    if (*check) {
      result = check_command(code, errors, assertion, exit_code);
    } else if (*mind) {
      result = mindist_command(stabilizer, code, alphabet, cap);
    } else if (*sim) {
      const auto h = parse_code(code);
      const auto id = simulation_identification(h);
      const auto ch = parse_channel_spec(channel);
      const auto in = parse_input(input, id.logical_dim());
      const auto report = trials == 0 ? run_exact("simulate:" + h.name, id, ch, in, input)
                                      : run_monte_carlo("simulate:" + h.name, id, ch, in, input, trials, seed);
      if (report.metrics.value("fail_probability", 0.0) > fail_threshold) exit_code = detection_failure;
      result = report.to_json();
    } else if (*tw) {
      result = twirl_command(channel, clifford);
    } else if (*nl) {
      result = noiseless_command(rotations, seed);
    } else if (*cc) {
      result = concat_command(p, c, levels, block);
    } else if (*dm) {
      result = run_demo(demo, seed).to_json();
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::invalid_argument& e) {
    // dimension and precondition failures on user-supplied input
    err << "error: " << e.what() << "\n";
    return usage;
  }

  const std::string text = render(result, common.table);
  if (!common.out_file.empty()) {
    std::ofstream f(common.out_file);
    if (!f) {
      err << "error: cannot write " << common.out_file << "\n";
      return usage;
    }
    f << text;
  } else {
    out << text;
  }
  return exit_code;
}

}  // namespace qecw::cli
