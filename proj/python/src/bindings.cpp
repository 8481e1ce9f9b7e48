#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "satrep/asymptotics.hpp"
#include "satrep/commands.hpp"
#include "satrep/error.hpp"
#include "satrep/io.hpp"
#include "satrep/preorder.hpp"

namespace py = pybind11;
using namespace satrep;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

ComplexMatrix matrix_from(const CArray& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw Error(ErrorCode::DimMismatch, "expected a square matrix");
  const auto d = static_cast<std::size_t>(a.shape(0));
  return ComplexMatrix(d, std::vector<Complex>(a.data(), a.data() + d * d));
}

CArray array_from(const ComplexMatrix& m) {
  const auto d = static_cast<py::ssize_t>(m.dim());
  CArray out({d, d});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

HermitianOperator hermitian_from(const CArray& a, const Tolerances& tol) { return HermitianOperator(matrix_from(a), tol); }

py::object label_to_py(const Label& l) {
  if (l.is_int()) return py::int_(l.as_int());
  if (l.is_string()) return py::str(l.as_string());
  if (l.is_real()) return py::float_(l.as_real());
  py::list items;
  for (const auto& x : l.as_sequence()) items.append(label_to_py(x));
  return py::tuple(items);
}

Label label_from_py(const py::handle& h) {
  if (py::isinstance<py::bool_>(h)) throw Error(ErrorCode::ParseError, "bool is not a label");
  if (py::isinstance<py::int_>(h)) return Label(h.cast<std::int64_t>());
  if (py::isinstance<py::float_>(h)) return Label::real(h.cast<double>());
  if (py::isinstance<py::str>(h)) return Label(h.cast<std::string>());
  if (py::isinstance<py::tuple>(h) || py::isinstance<py::list>(h)) {
    Label::Sequence s;
    for (const auto& x : h) s.push_back(label_from_py(x));
    return Label::sequence(std::move(s));
  }
  throw Error(ErrorCode::ParseError, "labels are int, float, str or tuples of labels");
}

std::vector<Complex> vector_from(const py::array_t<Complex, py::array::c_style | py::array::forcecast>& v) {
  return {v.data(), v.data() + v.size()};
}

py::dict distribution_to_py(const Distribution& d) {
  py::dict out;
  for (const auto& [l, p] : d) out[label_to_py(l)] = p;
  return out;
}

Distribution distribution_from_py(const py::dict& d) {
  Distribution out;
  for (const auto& [k, v] : d) out.emplace_back(label_from_py(k), v.cast<double>());
  return out;
}

py::dict certificate_to_py(const PreorderCertificate& c) {
  py::dict out;
  out["holds"] = c.holds;
  out["gap"] = c.gap;
  out["residual"] = c.residual;
  out["lp_iterations"] = c.lp_iterations;
  out["canonical_target_size"] = c.canonical_target_size;
  out["canonical_source_size"] = c.canonical_source_size;
  if (c.kernel) {
    const auto& k = *c.kernel;
    py::array_t<double> m({static_cast<py::ssize_t>(k.rows()), static_cast<py::ssize_t>(k.cols())});
    auto view = m.mutable_unchecked<2>();
    for (std::size_t r = 0; r < k.rows(); ++r)
      for (std::size_t col = 0; col < k.cols(); ++col) view(r, col) = k(r, col);
    py::list targets, sources;
    for (const auto& l : k.targets()) targets.append(label_to_py(l));
    for (const auto& l : k.sources()) sources.append(label_to_py(l));
    out["kernel"] = m;
    out["kernel_targets"] = targets;
    out["kernel_sources"] = sources;
  } else {
    out["kernel"] = py::none();
  }
  return out;
}

py::object json_to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

cli::RunConfig run_config(const Tolerances& tol, int n_max, std::optional<std::uint64_t> seed, std::size_t n_steps,
                          std::size_t n_traj, std::size_t bins, std::vector<int> n_list, unsigned threads) {
  cli::RunConfig c;
  c.tol = tol;
  c.n_max = n_max;
  c.seed = seed;
  c.n_steps = n_steps;
  c.n_traj = n_traj;
  c.bins = bins;
  c.n_list = std::move(n_list);
  c.threads = threads;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Saturation of repeated quantum measurements";

  static py::exception<Error> error(m, "SatrepError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init<>())
      .def_readwrite("herm_tol", &Tolerances::herm_tol)
      .def_readwrite("psd_tol", &Tolerances::psd_tol)
      .def_readwrite("eig_tol", &Tolerances::eig_tol)
      .def_readwrite("cluster_tol", &Tolerances::cluster_tol)
      .def_readwrite("sum_tol", &Tolerances::sum_tol)
      .def_readwrite("zero_tol", &Tolerances::zero_tol)
      .def_readwrite("prop_tol", &Tolerances::prop_tol)
      .def_readwrite("proj_tol", &Tolerances::proj_tol)
      .def_readwrite("stoch_tol", &Tolerances::stoch_tol)
      .def_readwrite("feas_tol", &Tolerances::feas_tol)
      .def_readwrite("witness_tol", &Tolerances::witness_tol)
      .def_readwrite("max_jacobi_sweeps", &Tolerances::max_jacobi_sweeps)
      .def_readwrite("enumeration_cap", &Tolerances::enumeration_cap)
      .def("to_dict", [](const Tolerances& t) { return json_to_py(io::to_json(t)); });

  py::class_<Povm>(m, "Povm")
      .def(py::init([](const py::list& outcomes, const Tolerances& tol) {
             std::vector<Outcome> outs;
             std::size_t dim = 0;
             for (const auto& item : outcomes) {
               const auto pair = item.cast<py::tuple>();
               const auto e = hermitian_from(pair[1].cast<CArray>(), tol);
               dim = e.dim();
               outs.push_back({label_from_py(pair[0]), e});
             }
             return Povm::checked(dim, std::move(outs), tol);
           }),
           py::arg("outcomes"), py::arg("tol") = Tolerances{},
           "Validated POVM from a list of (label, effect) pairs.")
      .def_property_readonly("dim", &Povm::dim)
      .def("__len__", &Povm::size)
      .def_property_readonly("labels", [](const Povm& p) {
        py::list out;
        for (const auto& l : p.labels()) out.append(label_to_py(l));
        return out;
      })
      .def_property_readonly("effects", [](const Povm& p) {
        py::list out;
        for (const auto& o : p.outcomes()) out.append(array_from(o.effect.matrix()));
        return out;
      })
      .def("effect", [](const Povm& p, const py::object& l) { return array_from(p.effect(label_from_py(l)).matrix()); });

  py::class_<Instrument>(m, "Instrument")
      .def(py::init([](const py::list& outcomes, const Tolerances& tol) {
             std::vector<KrausOutcome> outs;
             std::size_t dim = 0;
             for (const auto& item : outcomes) {
               const auto pair = item.cast<py::tuple>();
               KrausOutcome o{label_from_py(pair[0]), {}};
               for (const auto& k : pair[1]) {
                 o.kraus.push_back(matrix_from(k.cast<CArray>()));
                 dim = o.kraus.back().dim();
               }
               outs.push_back(std::move(o));
             }
             return Instrument::checked(dim, std::move(outs), tol);
           }),
           py::arg("outcomes"), py::arg("tol") = Tolerances{},
           "Instrument from a list of (label, [Kraus operators]) pairs.")
      .def_property_readonly("dim", &Instrument::dim)
      .def("__len__", &Instrument::size)
      .def_property_readonly("labels", [](const Instrument& ins) {
        py::list out;
        for (const auto& l : ins.labels()) out.append(label_to_py(l));
        return out;
      })
      .def("normalization_residual", &Instrument::normalization_residual);

  m.def("eigh", [](const CArray& a, const Tolerances& tol) {
    const auto e = eigh(hermitian_from(a, tol), tol);
    return py::make_tuple(py::array_t<double>(e.eigenvalues.size(), e.eigenvalues.data()), array_from(e.eigenvectors));
  }, py::arg("matrix"), py::arg("tol") = Tolerances{});
  m.def("sqrt_psd", [](const CArray& a, const Tolerances& tol) { return array_from(sqrt_psd(hermitian_from(a, tol), tol).matrix()); },
        py::arg("matrix"), py::arg("tol") = Tolerances{});

  m.def("luders_binary", [](const CArray& a, const Tolerances& tol) { return luders_binary(hermitian_from(a, tol), tol); },
        py::arg("effect"), py::arg("tol") = Tolerances{});
  m.def("ladder", &ladder, py::arg("d"));
  m.def("preparative", [](const Povm& p, const std::vector<CArray>& states, const Tolerances& tol) {
    std::vector<DensityMatrix> rhos;
    for (const auto& s : states) rhos.emplace_back(hermitian_from(s, tol), tol);
    return preparative(p, rhos, tol);
  }, py::arg("povm"), py::arg("states"), py::arg("tol") = Tolerances{});
  m.def("mixture", &mixture, py::arg("first"), py::arg("second"), py::arg("t"), py::arg("tol") = Tolerances{});
  m.def("compose", py::overload_cast<const Instrument&, const Instrument&>(&compose), py::arg("first"), py::arg("second"));
  m.def("is_repeatable", &is_repeatable, py::arg("instrument"), py::arg("tol") = Tolerances{});
  m.def("derived_observable", &derived_observable, py::arg("instrument"));
  m.def("repeated_observable", &repeated_observable, py::arg("instrument"), py::arg("n"), py::arg("tol") = Tolerances{});

  m.def("spectral_measure_of_effect", [](const CArray& a, const Tolerances& tol) {
    return spectral_measure_of_effect(hermitian_from(a, tol), tol);
  }, py::arg("effect"), py::arg("tol") = Tolerances{});
  m.def("binary_povm", [](const CArray& a, const Tolerances& tol) { return binary_povm(hermitian_from(a, tol), tol); },
        py::arg("effect"), py::arg("tol") = Tolerances{});
  m.def("canonicalize", py::overload_cast<const Povm&, const Tolerances&>(&canonicalize), py::arg("povm"), py::arg("tol") = Tolerances{});
  m.def("is_sharp", &is_sharp, py::arg("povm"), py::arg("tol") = Tolerances{});
  m.def("outcome_distribution", [](const Povm& p, const py::array_t<Complex, py::array::c_style | py::array::forcecast>& psi) {
    return distribution_to_py(outcome_distribution(p, StateVector::normalized(vector_from(psi))));
  }, py::arg("povm"), py::arg("psi"), "Outcome law of a pure state (normalized first).");

  m.def("preceq", [](const Povm& a, const Povm& b, const Tolerances& tol) { return certificate_to_py(preceq(a, b, tol)); },
        py::arg("a"), py::arg("b"), py::arg("tol") = Tolerances{});
  m.def("equivalent", [](const Povm& a, const Povm& b, const Tolerances& tol) {
    const auto r = equivalent(a, b, tol);
    py::dict out;
    out["equivalent"] = r.equivalent;
    out["forward"] = certificate_to_py(r.forward);
    out["backward"] = certificate_to_py(r.backward);
    return out;
  }, py::arg("a"), py::arg("b"), py::arg("tol") = Tolerances{});
  m.def("saturation_step", [](const Instrument& ins, int n_max, const Tolerances& tol) {
    const auto r = saturation_step(ins, n_max, tol);
    py::dict out;
    out["verdict"] = r.verdict == SaturationReport::Verdict::Finite ? "Finite" : "ExceededCap";
    out["step"] = r.step;
    py::list chain;
    for (const auto& level : r.chain) {
      py::dict d = certificate_to_py(level.certificate);
      d["n"] = level.n;
      d["raw_outcomes"] = level.raw_outcomes;
      chain.append(d);
    }
    out["chain"] = chain;
    return out;
  }, py::arg("instrument"), py::arg("n_max") = 8, py::arg("tol") = Tolerances{});

  m.def("sample_frequencies", [](const Instrument& ins, const CArray& rho, std::size_t n_steps, std::size_t n_traj,
                                 std::uint64_t seed, unsigned threads, const Tolerances& tol) {
    const DensityMatrix state(hermitian_from(rho, tol), tol);
    TrajectoryBatch batch;
    {
      py::gil_scoped_release release;
      batch = sample_trajectories(ins, state, n_steps, n_traj, seed, threads);
    }
    if (!batch.binary()) throw Error(ErrorCode::NonBinaryLabels, "frequencies need outcomes {0, 1}");
    return py::array_t<double>(batch.frequencies.size(), batch.frequencies.data());
  }, py::arg("instrument"), py::arg("rho"), py::arg("n_steps"), py::arg("n_traj"), py::arg("seed"),
     py::arg("threads") = 1, py::arg("tol") = Tolerances{},
     "Final frequencies X_n of n_traj independent trajectories.");
  m.def("estimate_spectral_masses", [](const Instrument& ins, const CArray& rho, const CArray& effect,
                                       std::size_t n_steps, std::size_t n_traj, std::uint64_t seed, const Tolerances& tol) {
    const DensityMatrix state(hermitian_from(rho, tol), tol);
    const auto batch = sample_trajectories(ins, state, n_steps, n_traj, seed);
    py::dict out;
    for (const auto& sm : estimate_spectral_masses(batch, hermitian_from(effect, tol), tol)) out[py::float_(sm.eigenvalue)] = sm.mass;
    return out;
  }, py::arg("instrument"), py::arg("rho"), py::arg("effect"), py::arg("n_steps"), py::arg("n_traj"), py::arg("seed"),
     py::arg("tol") = Tolerances{});
  m.def("hellinger_sq", [](const py::dict& p, const py::dict& q) {
    return hellinger_sq(distribution_from_py(p), distribution_from_py(q));
  }, py::arg("p"), py::arg("q"));
  m.def("luders_hellinger_closed_form", &luders_hellinger_closed_form, py::arg("lambda1"), py::arg("lambda2"), py::arg("n"));

  m.def("run_command", [](const std::string& command, const std::vector<std::string>& files, const Tolerances& tol,
                          int n_max, std::optional<std::uint64_t> seed, std::size_t n_steps, std::size_t n_traj,
                          std::size_t bins, std::vector<int> n_list, unsigned threads) {
    const auto config = run_config(tol, n_max, seed, n_steps, n_traj, bins, std::move(n_list), threads);
    auto load = [&](std::size_t i) {
      if (i >= files.size()) throw Error(ErrorCode::ParseError, command + " needs more problem files");
      return io::load_problem(files[i], tol);
    };
    cli::CommandResult r;
    if (command == "saturation") r = cli::cmd_saturation(load(0), config);
    else if (command == "preorder") r = cli::cmd_preorder(load(0), load(1), config);
    else if (command == "simulate") r = cli::cmd_simulate(load(0), config);
    else if (command == "hellinger") r = cli::cmd_hellinger(load(0), config);
    else throw Error(ErrorCode::ParseError, "unknown command " + command);
    py::dict out;
    out["report"] = json_to_py(r.report);
    out["exit_code"] = r.exit_code;
    out["csv"] = r.csv ? py::object(py::str(*r.csv)) : py::object(py::none());
    return out;
  }, py::arg("command"), py::arg("files"), py::arg("tol") = Tolerances{}, py::arg("n_max") = 8,
     py::arg("seed") = py::none(), py::arg("n_steps") = 200, py::arg("n_traj") = 1000, py::arg("bins") = 50,
     py::arg("n_list") = std::vector<int>{}, py::arg("threads") = 1,
     "Runs a command-line subcommand in-process and returns its JSON report.");
}
