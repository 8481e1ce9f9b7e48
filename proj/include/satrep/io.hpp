#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "satrep/config.hpp"
#include "satrep/instrument.hpp"
#include "satrep/povm.hpp"

namespace satrep::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

// Complex scalars are [re, im]; a bare number is accepted on input as a real
// scalar. Matrices are row-major arrays of rows.
json to_json(Complex z);
json to_json(const ComplexMatrix& m);
json to_json(const Label& l);
json to_json(const Tolerances& t);
json to_json(const Povm& p);
json to_json(const Instrument& ins);
json to_json(const MarkovKernel& k);
json to_json(const Distribution& d);

/// Each parser throws Error(ParseError) naming the JSON pointer of the
/// offending value.
Complex complex_from_json(const json& j, const std::string& where);
ComplexMatrix matrix_from_json(const json& j, const std::string& where);
Label label_from_json(const json& j, const std::string& where);
/// Applies the keys present in `j` on top of `base`; unknown keys are errors.
Tolerances tolerances_from_json(const json& j, Tolerances base, const std::string& where);

/// A state given either as {"vector": [...]} or {"density": M}.
struct StateSpec {
  std::optional<StateVector> vector;
  DensityMatrix density;
};

struct Problem;

struct EffectSource { HermitianOperator effect; };      // "effect" without builder
struct InstrumentSource { Instrument instrument; };     // "instrument"
struct PovmSource { Povm povm; };                       // "povm"
struct LudersBuilder { HermitianOperator effect; };     // {"builder": "luders"}
struct LadderBuilder { int d; };                        // {"builder": "ladder"}
struct PreparativeBuilder {                             // {"builder": "preparative"}
  Povm povm;
  std::vector<StateSpec> states;
};
struct MixtureBuilder {                                 // {"builder": "mixture"}
  std::shared_ptr<const Problem> first;
  std::shared_ptr<const Problem> second;
  double t;
};
struct SpectralBuilder { HermitianOperator effect; };   // {"builder": "spectral"}: POVM P^E
struct BinaryBuilder { HermitianOperator effect; };     // {"builder": "binary"}: POVM {1−E, E}

using Source = std::variant<EffectSource, InstrumentSource, PovmSource, LudersBuilder, LadderBuilder,
                            PreparativeBuilder, MixtureBuilder, SpectralBuilder, BinaryBuilder>;

/// Parsed problem file.
struct Problem {
  Source source;
  int repetitions = 1;               // POVM consumers read A_n of an instrument
  std::optional<StateSpec> state;    // initial state for simulations
  std::vector<StateSpec> witness_states;
  std::optional<json> tolerance_overrides;

  bool yields_instrument() const;
  /// Throws ParseError if the problem describes a POVM only.
  Instrument instrument(const Tolerances& tol = default_tolerances()) const;
  /// POVM sources directly; instruments through A_n with n = repetitions;
  /// a bare effect E as {1−E, E}.
  Povm povm(const Tolerances& tol = default_tolerances()) const;
  /// The effect behind Lüders-type problems (bare effect or luders builder).
  std::optional<HermitianOperator> luders_effect() const;
};

/// `where` prefixes error messages (usually the file name).
Problem parse_problem(const json& j, const std::string& where = "<json>",
                      const Tolerances& tol = default_tolerances());
Problem parse_problem_text(const std::string& text, const std::string& where = "<text>",
                           const Tolerances& tol = default_tolerances());
Problem load_problem(const std::string& path, const Tolerances& tol = default_tolerances());

/// `base` with the problem's own "tolerances" block applied.
Tolerances effective_tolerances(const Problem& p, const Tolerances& base);

/// Canonical JSON of a problem: version tag, complex scalars as [re, im].
json serialize(const Problem& p);

json read_json_file(const std::string& path);

}  // namespace satrep::io
