#include <optional>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qcd/bethe.hpp"
#include "qcd/cli/commands.hpp"
#include "qcd/cli/report.hpp"
#include "qcd/duality.hpp"
#include "qcd/identities.hpp"
#include "qcd/ruijsenaars.hpp"
#include "qcd/sampling.hpp"
#include "qcd/spin_chain.hpp"

namespace py = pybind11;
using namespace qcd;

namespace {

spin_chain::ChainParams make_chain(cplx eta, cplx h, const std::vector<cplx>& inhom, cplx v) {
  spin_chain::ChainParams p;
  p.L = static_cast<int>(inhom.size());
  p.eta = eta;
  p.h = h;
  p.v = v;
  p.inhom = inhom;
  p.validate();
  return p;
}

py::dict state_dict(const duality::StateRecord& s) {
  py::dict d;
  d["sector_M2"] = s.sector_M2;
  d["H"] = s.H;
  d["lax_eigenvalues"] = s.lax_eigenvalues;
  d["predicted"] = s.matched_string.values;
  d["max_match_error"] = s.max_match_error;
  d["power_sum_error"] = s.power_sum_error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum-classical duality between the twisted XXZ chain and the trigonometric RS model";

  py::register_exception<Error>(m, "Error");

  m.attr("RNG_NAME") = Rng::kName;

  m.def(
      "run_command",
      [](const std::string& command, const std::string& config_text, std::optional<std::uint64_t> seed,
         std::optional<double> tol, std::optional<int> trials) {
        cli::Overrides o{seed, tol, trials};
        cli::CommandOutcome out;
        try {
          out = cli::run_command(command, cli::parse_config_text(config_text), o);
        } catch (const Error& e) {
          out.exit_code = cli::kExitConfigError;
          out.message = e.what();
        }
        const std::string report = out.report.is_null() ? std::string() : out.report.dump();
        return py::make_tuple(out.exit_code, report, out.message);
      },
      py::arg("command"), py::arg("config_text"), py::arg("seed") = py::none(), py::arg("tol") = py::none(),
      py::arg("trials") = py::none(), "Runs a command on a JSON config text. Returns (exit_code, report, message).");

  m.def("payload", [](const std::string& report) { return cli::payload(cli::Json::parse(report)); },
        "Report serialized without its timestamp.");

  m.def("r_matrix", &spin_chain::r_matrix, py::arg("x"), py::arg("eta"), py::arg("tol") = 1e-12);

  m.def(
      "draw_chain",
      [](std::uint64_t seed, int L) {
        Rng rng(seed);
        const auto p = sampling::draw_chain(rng, L);
        py::dict d;
        d["eta"] = p.eta;
        d["h"] = p.h;
        d["inhom"] = p.inhom;
        return d;
      },
      py::arg("seed"), py::arg("L"));

  m.def(
      "verify_duality",
      [](cplx eta, cplx h, const std::vector<cplx>& inhom) {
        const auto r = duality::verify_duality(make_chain(eta, h, inhom, 0.0));
        py::list states;
        for (const auto& s : r.states) states.append(state_dict(s));
        py::dict d;
        d["states"] = states;
        d["worst_error"] = r.worst_error;
        d["worst_power_sum_error"] = r.worst_power_sum_error;
        d["n_states"] = r.n_states;
        return d;
      },
      py::arg("eta"), py::arg("h"), py::arg("inhom"));

  m.def("predicted_strings",
        [](int L, int M2, cplx h, cplx eta) { return duality::predicted_strings(L, M2, h, eta).values; },
        py::arg("L"), py::arg("M2"), py::arg("h"), py::arg("eta"));

  m.def(
      "solve_bae",
      [](cplx eta, cplx h, const std::vector<cplx>& inhom, int M2, std::uint64_t seed, int n_starts) {
        const auto chain = make_chain(eta, h, inhom, 0.0);
        py::list out;
        for (const auto& s : bethe::solve_bae(chain, M2, seed, n_starts)) {
          py::dict d;
          d["roots"] = s.roots;
          d["residual"] = s.residual;
          d["H"] = bethe::eigenvalues_h(s.roots, chain);
          d["G"] = bethe::eigenvalues_g(s.roots, chain);
          out.append(d);
        }
        return out;
      },
      py::arg("eta"), py::arg("h"), py::arg("inhom"), py::arg("M2"), py::arg("seed") = 0, py::arg("n_starts") = 16);

  m.def(
      "lax_from_momenta",
      [](cplx eta, const std::vector<cplx>& x, const std::vector<cplx>& p) {
        return rs::lax_from_momenta(rs::RSState{eta, x, p});
      },
      py::arg("eta"), py::arg("x"), py::arg("p"));

  m.def(
      "rs_evolve",
      [](cplx eta, const std::vector<cplx>& x, const std::vector<cplx>& p, double t_final, double tol,
         double dt_output) {
        rs::EvolveOptions opts;
        opts.tol = tol;
        opts.dt_output = dt_output;
        const auto traj = rs::evolve(rs::RSState{eta, x, p}, t_final, opts);
        std::vector<double> t;
        std::vector<std::vector<cplx>> xs, ps;
        for (const auto& pt : traj.points) {
          t.push_back(pt.t);
          xs.push_back(pt.state.x);
          ps.push_back(pt.state.p);
        }
        py::dict d;
        d["t"] = t;
        d["x"] = xs;
        d["p"] = ps;
        d["spectral_drift"] = rs::spectral_drift(traj);
        d["integrals_drift"] = rs::integrals_drift(traj);
        return d;
      },
      py::arg("eta"), py::arg("x"), py::arg("p"), py::arg("t_final"), py::arg("tol") = 1e-10,
      py::arg("dt_output") = 1e-3);

  m.def(
      "verify_lemma1",
      [](const std::vector<cplx>& x, const std::vector<cplx>& y, cplx g, cplx eta) {
        identities::LemmaParams p{x, y, g, eta};
        p.validate();
        return identities::verify_lemma1(p);
      },
      py::arg("x"), py::arg("y"), py::arg("g"), py::arg("eta"));
}
