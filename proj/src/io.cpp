#include "satrep/io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "satrep/error.hpp"

namespace satrep::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  // "file:" alone names the document root.
  const bool root = !where.empty() && where.back() == ':';
  throw Error(ErrorCode::ParseError, (root ? where.substr(0, where.size() - 1) : where) + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, std::string("missing \"") + key + "\"");
  return j.at(key);
}

double number_from_json(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int int_from_json(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

HermitianOperator hermitian_from_json(const json& j, const std::string& where, const Tolerances& tol) {
  const auto m = matrix_from_json(j, where);
  try {
    return HermitianOperator(m, tol);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

StateSpec state_from_json(const json& j, const std::string& where, const Tolerances& tol) {
  if (!j.is_object()) fail(where, "expected {\"vector\": ...} or {\"density\": ...}");
  try {
    if (j.contains("vector")) {
      const auto& v = j.at("vector");
      if (!v.is_array() || v.empty()) fail(where + "/vector", "expected a nonempty array");
      std::vector<Complex> amps;
      for (std::size_t i = 0; i < v.size(); ++i)
        amps.push_back(complex_from_json(v[i], where + "/vector/" + std::to_string(i)));
      StateVector psi(std::move(amps));
      auto rho = DensityMatrix::pure(psi);
      return {std::move(psi), std::move(rho)};
    }
    if (j.contains("density"))
      return {std::nullopt, DensityMatrix(hermitian_from_json(j.at("density"), where + "/density", tol), tol)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    fail(where, e.what());
  }
  fail(where, "expected {\"vector\": ...} or {\"density\": ...}");
}

json state_to_json(const StateSpec& s) {
  if (s.vector) {
    json v = json::array();
    for (const auto& a : s.vector->amplitudes()) v.push_back(to_json(a));
    return {{"vector", v}};
  }
  return {{"density", to_json(s.density.op().matrix())}};
}

Povm povm_from_json(const json& j, const std::string& where, const Tolerances& tol) {
  const auto& outs = require(j, "outcomes", where);
  if (!outs.is_array() || outs.empty()) fail(where + "/outcomes", "expected a nonempty array");
  std::vector<Outcome> outcomes;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const std::string at = where + "/outcomes/" + std::to_string(i);
    outcomes.push_back({label_from_json(require(outs[i], "label", at), at + "/label"),
                        hermitian_from_json(require(outs[i], "effect", at), at + "/effect", tol)});
  }
  try {
    const std::size_t dim = outcomes.front().effect.dim();
    return Povm::checked(dim, std::move(outcomes), tol);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

Instrument instrument_from_json(const json& j, const std::string& where, const Tolerances& tol) {
  const auto& outs = require(j, "outcomes", where);
  if (!outs.is_array() || outs.empty()) fail(where + "/outcomes", "expected a nonempty array");
  std::vector<KrausOutcome> outcomes;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const std::string at = where + "/outcomes/" + std::to_string(i);
    const auto& kraus = require(outs[i], "kraus", at);
    if (!kraus.is_array() || kraus.empty()) fail(at + "/kraus", "expected a nonempty array of matrices");
    KrausOutcome o{label_from_json(require(outs[i], "label", at), at + "/label"), {}};
    for (std::size_t k = 0; k < kraus.size(); ++k)
      o.kraus.push_back(matrix_from_json(kraus[k], at + "/kraus/" + std::to_string(k)));
    outcomes.push_back(std::move(o));
  }
  try {
    const std::size_t dim = outcomes.front().kraus.front().dim();
    return Instrument::checked(dim, std::move(outcomes), tol);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

Source source_from_json(const json& j, const std::string& where, const Tolerances& tol);

std::shared_ptr<const Problem> nested_problem(const json& j, const std::string& where, const Tolerances& tol) {
  auto p = std::make_shared<Problem>();
  p->source = source_from_json(j, where, tol);
  return p;
}

Source source_from_json(const json& j, const std::string& where, const Tolerances& tol) {
  if (!j.is_object()) fail(where, "expected an object");
  auto effect_of = [&](const json& obj) {
    const auto e = hermitian_from_json(require(obj, "effect", where), where + "/effect", tol);
    if (!is_effect(e, tol)) fail(where + "/effect", "operator is not an effect (0 ≤ E ≤ 1)");
    return e;
  };
  if (j.contains("builder")) {
    const auto& b = j.at("builder");
    if (!b.is_string()) fail(where + "/builder", "expected a string");
    const auto name = b.get<std::string>();
    if (name == "luders") return LudersBuilder{effect_of(j)};
    if (name == "spectral") return SpectralBuilder{effect_of(j)};
    if (name == "binary") return BinaryBuilder{effect_of(j)};
    if (name == "ladder") {
      const int d = int_from_json(require(j, "d", where), where + "/d");
      if (d < 2) fail(where + "/d", "ladder needs d ≥ 2");
      return LadderBuilder{d};
    }
    if (name == "preparative") {
      PreparativeBuilder pb{povm_from_json(require(j, "povm", where), where + "/povm", tol), {}};
      const auto& states = require(j, "states", where);
      if (!states.is_array() || states.size() != pb.povm.size())
        fail(where + "/states", "expected one state per POVM outcome");
      for (std::size_t i = 0; i < states.size(); ++i) {
        pb.states.push_back(state_from_json(states[i], where + "/states/" + std::to_string(i), tol));
        if (pb.states.back().density.dim() != pb.povm.dim())
          fail(where + "/states/" + std::to_string(i), "state dimension differs from POVM");
      }
      return pb;
    }
    if (name == "mixture") {
      MixtureBuilder mb{nested_problem(require(j, "first", where), where + "/first", tol),
                        nested_problem(require(j, "second", where), where + "/second", tol),
                        number_from_json(require(j, "t", where), where + "/t")};
      if (!(mb.t >= 0.0 && mb.t <= 1.0)) fail(where + "/t", "mixture weight outside [0, 1]");
      if (!mb.first->yields_instrument() || !mb.second->yields_instrument())
        fail(where, "mixture components must be instruments");
      return mb;
    }
    fail(where + "/builder", "unknown builder \"" + name + "\"");
  }
  int present = j.contains("effect") + j.contains("instrument") + j.contains("povm");
  if (present != 1) fail(where, "expected exactly one of \"effect\", \"instrument\", \"povm\" or a \"builder\"");
  if (j.contains("effect")) return EffectSource{effect_of(j)};
  if (j.contains("instrument"))
    return InstrumentSource{instrument_from_json(j.at("instrument"), where + "/instrument", tol)};
  return PovmSource{povm_from_json(j.at("povm"), where + "/povm", tol)};
}

json source_to_json(const Source& s) {
  return std::visit(
      [](const auto& src) -> json {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, EffectSource>) {
          return {{"effect", to_json(src.effect.matrix())}};
        } else if constexpr (std::is_same_v<T, InstrumentSource>) {
          return {{"instrument", to_json(src.instrument)}};
        } else if constexpr (std::is_same_v<T, PovmSource>) {
          return {{"povm", to_json(src.povm)}};
        } else if constexpr (std::is_same_v<T, LudersBuilder>) {
          return {{"builder", "luders"}, {"effect", to_json(src.effect.matrix())}};
        } else if constexpr (std::is_same_v<T, SpectralBuilder>) {
          return {{"builder", "spectral"}, {"effect", to_json(src.effect.matrix())}};
        } else if constexpr (std::is_same_v<T, BinaryBuilder>) {
          return {{"builder", "binary"}, {"effect", to_json(src.effect.matrix())}};
        } else if constexpr (std::is_same_v<T, LadderBuilder>) {
          return {{"builder", "ladder"}, {"d", src.d}};
        } else if constexpr (std::is_same_v<T, PreparativeBuilder>) {
          json states = json::array();
          for (const auto& st : src.states) states.push_back(state_to_json(st));
          return {{"builder", "preparative"}, {"povm", to_json(src.povm)}, {"states", states}};
        } else {
          return {{"builder", "mixture"},
                  {"first", source_to_json(src.first->source)},
                  {"second", source_to_json(src.second->source)},
                  {"t", src.t}};
        }
      },
      s);
}

}  // namespace

// ---------------------------------------------------------------------------
// Serialization

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.dim(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Label& l) {
  if (l.is_int()) return l.as_int();
  if (l.is_string()) return l.as_string();
  if (l.is_real()) return l.as_real();
  json arr = json::array();
  for (const auto& item : l.as_sequence()) arr.push_back(to_json(item));
  return arr;
}

json to_json(const Tolerances& t) {
  return {{"herm_tol", t.herm_tol},       {"psd_tol", t.psd_tol},
          {"eig_tol", t.eig_tol},         {"cluster_tol", t.cluster_tol},
          {"sum_tol", t.sum_tol},         {"zero_tol", t.zero_tol},
          {"prop_tol", t.prop_tol},       {"proj_tol", t.proj_tol},
          {"stoch_tol", t.stoch_tol},     {"feas_tol", t.feas_tol},
          {"witness_tol", t.witness_tol}, {"max_jacobi_sweeps", t.max_jacobi_sweeps},
          {"enumeration_cap", t.enumeration_cap}};
}

json to_json(const Povm& p) {
  json outs = json::array();
  for (const auto& o : p.outcomes()) outs.push_back({{"label", to_json(o.label)}, {"effect", to_json(o.effect.matrix())}});
  return {{"outcomes", outs}};
}

json to_json(const Instrument& ins) {
  json outs = json::array();
  for (const auto& o : ins.outcomes()) {
    json kraus = json::array();
    for (const auto& k : o.kraus) kraus.push_back(to_json(k));
    outs.push_back({{"label", to_json(o.label)}, {"kraus", kraus}});
  }
  return {{"outcomes", outs}};
}

json to_json(const MarkovKernel& k) {
  json targets = json::array(), sources = json::array(), rows = json::array();
  for (const auto& l : k.targets()) targets.push_back(to_json(l));
  for (const auto& l : k.sources()) sources.push_back(to_json(l));
  for (std::size_t r = 0; r < k.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < k.cols(); ++c) row.push_back(k(r, c));
    rows.push_back(std::move(row));
  }
  return {{"targets", targets}, {"sources", sources}, {"matrix", rows}};
}

json to_json(const Distribution& d) {
  json arr = json::array();
  for (const auto& [label, p] : d) arr.push_back({{"label", to_json(label)}, {"probability", p}});
  return arr;
}

// ---------------------------------------------------------------------------
// Parsing

Complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    const Complex z{j[0].get<double>(), j[1].get<double>()};
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(where, "non-finite scalar");
    return z;
  }
  fail(where, "expected a complex scalar [re, im] or a number");
}

ComplexMatrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of rows");
  const std::size_t n = j.size();
  std::vector<Complex> data;
  data.reserve(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::string row_at = where + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != n) fail(row_at, "row length differs from row count (matrix must be square)");
    for (std::size_t c = 0; c < n; ++c) data.push_back(complex_from_json(j[r][c], row_at + "/" + std::to_string(c)));
  }
  return ComplexMatrix(n, std::move(data));
}

Label label_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Label(j.get<std::int64_t>());
  if (j.is_number_float()) return Label::real(j.get<double>());
  if (j.is_string()) return Label(j.get<std::string>());
  if (j.is_array()) {
    Label::Sequence items;
    for (std::size_t i = 0; i < j.size(); ++i) items.push_back(label_from_json(j[i], where + "/" + std::to_string(i)));
    return Label::sequence(std::move(items));
  }
  fail(where, "expected an integer, real, string or array label");
}

Tolerances tolerances_from_json(const json& j, Tolerances t, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object of tolerance overrides");
  for (const auto& [key, value] : j.items()) {
    const std::string at = where + "/" + key;
    auto real = [&](double& field) {
      field = number_from_json(value, at);
      if (!(field >= 0.0)) fail(at, "tolerance must be nonnegative");
    };
    if (key == "herm_tol") real(t.herm_tol);
    else if (key == "psd_tol") real(t.psd_tol);
    else if (key == "eig_tol") real(t.eig_tol);
    else if (key == "cluster_tol") real(t.cluster_tol);
    else if (key == "sum_tol") real(t.sum_tol);
    else if (key == "zero_tol") real(t.zero_tol);
    else if (key == "prop_tol") real(t.prop_tol);
    else if (key == "proj_tol") real(t.proj_tol);
    else if (key == "stoch_tol") real(t.stoch_tol);
    else if (key == "feas_tol") real(t.feas_tol);
    else if (key == "witness_tol") real(t.witness_tol);
    else if (key == "max_jacobi_sweeps") t.max_jacobi_sweeps = int_from_json(value, at);
    else if (key == "enumeration_cap") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0) fail(at, "expected a nonnegative integer");
      t.enumeration_cap = value.get<std::size_t>();
    } else if (key != "version") {
      fail(at, "unknown tolerance");
    }
  }
  return t;
}

bool Problem::yields_instrument() const {
  return !std::holds_alternative<PovmSource>(source) && !std::holds_alternative<SpectralBuilder>(source) &&
         !std::holds_alternative<BinaryBuilder>(source);
}

Instrument Problem::instrument(const Tolerances& tol) const {
  return std::visit(
      [&](const auto& src) -> Instrument {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, EffectSource> || std::is_same_v<T, LudersBuilder>) {
          return luders_binary(src.effect, tol);
        } else if constexpr (std::is_same_v<T, InstrumentSource>) {
          return src.instrument;
        } else if constexpr (std::is_same_v<T, LadderBuilder>) {
          return ladder(src.d);
        } else if constexpr (std::is_same_v<T, PreparativeBuilder>) {
          std::vector<DensityMatrix> states;
          for (const auto& s : src.states) states.push_back(s.density);
          return preparative(src.povm, states, tol);
        } else if constexpr (std::is_same_v<T, MixtureBuilder>) {
          return mixture(src.first->instrument(tol), src.second->instrument(tol), src.t, tol);
        } else {
          throw Error(ErrorCode::ParseError, "problem describes a POVM, not an instrument");
        }
      },
      source);
}

Povm Problem::povm(const Tolerances& tol) const {
  if (const auto* p = std::get_if<PovmSource>(&source)) return p->povm;
  if (const auto* s = std::get_if<SpectralBuilder>(&source)) return spectral_measure_of_effect(s->effect, tol);
  if (const auto* b = std::get_if<BinaryBuilder>(&source)) return binary_povm(b->effect, tol);
  if (const auto* e = std::get_if<EffectSource>(&source); e && repetitions == 1) return binary_povm(e->effect, tol);
  return repeated_observable(instrument(tol), repetitions, tol);
}

std::optional<HermitianOperator> Problem::luders_effect() const {
  if (const auto* e = std::get_if<EffectSource>(&source)) return e->effect;
  if (const auto* l = std::get_if<LudersBuilder>(&source)) return l->effect;
  return std::nullopt;
}

Problem parse_problem(const json& j, const std::string& where, const Tolerances& base) {
  if (!j.is_object()) fail(where, "top level must be an object");
  if (!j.contains("version")) fail(where, "missing \"version\"");
  if (j.at("version") != kFormatVersion) fail(where + ":/version", "unsupported version (expected 1)");

  Problem p;
  Tolerances tol = base;
  if (j.contains("tolerances")) {
    tol = tolerances_from_json(j.at("tolerances"), tol, where + ":/tolerances");
    p.tolerance_overrides = j.at("tolerances");
  }
  p.source = source_from_json(j, where + ":", tol);
  if (j.contains("repetitions")) {
    p.repetitions = int_from_json(j.at("repetitions"), where + ":/repetitions");
    if (p.repetitions < 1) fail(where + ":/repetitions", "must be ≥ 1");
  }
  if (j.contains("state")) p.state = state_from_json(j.at("state"), where + ":/state", tol);
  if (j.contains("states")) {
    const auto& s = j.at("states");
    if (!s.is_array()) fail(where + ":/states", "expected an array of states");
    for (std::size_t i = 0; i < s.size(); ++i)
      p.witness_states.push_back(state_from_json(s[i], where + ":/states/" + std::to_string(i), tol));
  }
  return p;
}

Problem parse_problem_text(const std::string& text, const std::string& where, const Tolerances& tol) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(where, "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return parse_problem(j, where, tol);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path, "byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

Problem load_problem(const std::string& path, const Tolerances& tol) {
  return parse_problem(read_json_file(path), path, tol);
}

Tolerances effective_tolerances(const Problem& p, const Tolerances& base) {
  if (!p.tolerance_overrides) return base;
  return tolerances_from_json(*p.tolerance_overrides, base, "tolerances");
}

json serialize(const Problem& p) {
  json j = source_to_json(p.source);
  j["version"] = kFormatVersion;
  if (p.repetitions != 1) j["repetitions"] = p.repetitions;
  if (p.state) j["state"] = state_to_json(*p.state);
  if (!p.witness_states.empty()) {
    json states = json::array();
    for (const auto& s : p.witness_states) states.push_back(state_to_json(s));
    j["states"] = states;
  }
  if (p.tolerance_overrides) j["tolerances"] = *p.tolerance_overrides;
  return j;
}

}  // namespace satrep::io
