#include "qcd/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "qcd/bethe.hpp"
#include "qcd/cli/report.hpp"
#include "qcd/duality.hpp"
#include "qcd/identities.hpp"
#include "qcd/rng.hpp"
#include "qcd/sampling.hpp"

#ifndef QCD_VERSION
#define QCD_VERSION "0.0.0"
#endif

namespace qcd::cli {

namespace {

// Thrown after the config stage; carries the exit code.
struct StageFailure {
  int code;
  std::string message;
};

struct Prepared {
  Json resolved;
  std::function<Json(Json& summary, bool& passed)> run;
};

constexpr std::uint64_t kDefaultSeed = 0;

Json summary_base(bool passed, int code) {
  Json s;
  s["passed"] = passed;
  s["exit_code"] = code;
  s["tool_version"] = QCD_VERSION;
  s["rng"] = Rng::kName;
  return s;
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 step keyed by the stream index
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct Common {
  std::uint64_t seed;
  double tol;
  int trials;
};

Common read_common(Section& root, const Overrides& o, double default_tol, int default_trials, int max_trials) {
  Common c;
  c.seed = root.u64("seed", kDefaultSeed);
  c.tol = root.positive("tol", default_tol);
  c.trials = root.integer("trials", default_trials, 1, max_trials);
  if (o.seed) c.seed = *o.seed;
  if (o.tol) {
    if (!(*o.tol > 0.0) || !std::isfinite(*o.tol)) throw ConfigError("--tol must be > 0");
    c.tol = *o.tol;
  }
  if (o.trials) {
    if (*o.trials < 1 || *o.trials > max_trials) throw ConfigError("--trials out of range");
    c.trials = *o.trials;
  }
  return c;
}

Json common_json(const Common& c) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["trials"] = c.trials;
  return j;
}

// ---------------------------------------------------------------- duality

Prepared prepare_verify_duality(const Json& config, const Overrides& o) {
  Section root(config, "");
  root.string("schema_version", kSchemaVersion);
  const Common common = read_common(root, o, duality::kDualityTol, 1, 10000);
  std::vector<spin_chain::ChainParams> chains;
  Json resolved = common_json(common);
  if (root.has("chain") && root.has("L")) throw ConfigError("give either chain or L, not both");
  if (root.has("L")) {
    const int L = root.integer("L", 1, 1, spin_chain::kMaxSites);
    resolved["L"] = L;
    Rng rng(common.seed);
    for (int t = 0; t < common.trials; ++t) chains.push_back(sampling::draw_chain(rng, L));
  } else {
    spin_chain::ChainParams c;
    if (root.has("chain")) c = parse_chain(root.section("chain"));
    c.validate();
    if (common.trials != 1) throw ConfigError("trials > 1 needs random draws (set L instead of chain)");
    resolved["chain"] = chain_to_json(c);
    chains.push_back(c);
  }
  root.finish();

  Prepared p;
  p.resolved = resolved;
  p.run = [chains, common](Json& summary, bool& passed) {
    Json results;
    Json list = Json::array();
    double worst = 0.0, worst_power = 0.0, worst_momentum = 0.0;
    int n_states = 0;
    for (const auto& chain : chains) {
      const auto spectrum = spin_chain::joint_diagonalize(chain);
      const auto report = duality::verify_duality(chain, spectrum);
      const double momentum = duality::verify_momentum_identification(chain, spectrum);
      Json jc;
      jc["params"] = chain_to_json(chain);
      jc["params_hash"] = report.params_hash;
      jc["worst_error"] = report.worst_error;
      jc["worst_power_sum_error"] = report.worst_power_sum_error;
      jc["momentum_residual"] = momentum;
      jc["joint_residual"] = report.joint_residual;
      jc["n_states"] = report.n_states;
      Json states = Json::array();
      for (const auto& s : report.states) {
        Json js;
        js["sector_M2"] = s.sector_M2;
        js["H"] = to_json(std::span<const cplx>(s.H));
        js["lax_eigenvalues"] = multiset_to_json(s.lax_eigenvalues);
        js["strings"] = multiset_to_json(s.matched_string.values);
        js["max_match_error"] = s.max_match_error;
        js["power_sum_error"] = s.power_sum_error;
        states.push_back(std::move(js));
      }
      jc["states"] = std::move(states);
      list.push_back(std::move(jc));
      worst = std::max(worst, report.worst_error);
      worst_power = std::max(worst_power, report.worst_power_sum_error);
      worst_momentum = std::max(worst_momentum, momentum);
      n_states += report.n_states;
    }
    results["chains"] = std::move(list);
    passed = worst <= common.tol;
    summary["worst_error"] = worst;
    summary["worst_power_sum_error"] = worst_power;
    summary["worst_momentum_residual"] = worst_momentum;
    summary["n_chains"] = static_cast<int>(chains.size());
    summary["n_states"] = n_states;
    summary["tol"] = common.tol;
    return results;
  };
  return p;
}

// ---------------------------------------------------------------- bethe

Prepared prepare_solve_bethe(const Json& config, const Overrides& o) {
  Section root(config, "");
  root.string("schema_version", kSchemaVersion);
  const Common common = read_common(root, o, 1e-8, 16, 100000);
  Json resolved = common_json(common);
  spin_chain::ChainParams chain;
  if (root.has("chain") && root.has("L")) throw ConfigError("give either chain or L, not both");
  if (root.has("L")) {
    const int L = root.integer("L", 1, 1, spin_chain::kMaxSites);
    resolved["L"] = L;
    Rng rng(common.seed);
    chain = sampling::draw_chain(rng, L);
  } else if (root.has("chain")) {
    chain = parse_chain(root.section("chain"));
  }
  chain.validate();
  resolved["chain"] = chain_to_json(chain);
  const auto m2 = root.optional_integer("M2", 0, chain.L);
  if (m2) resolved["M2"] = *m2;
  root.finish();

  Prepared p;
  p.resolved = resolved;
  p.run = [chain, m2, common](Json& summary, bool& passed) {
    const auto spectrum = spin_chain::joint_diagonalize(chain);
    std::vector<int> sectors;
    if (m2) {
      sectors.push_back(*m2);
    } else {
      for (int s = 0; s <= chain.L; ++s) sectors.push_back(s);
    }
    Json results;
    results["chain"] = chain_to_json(chain);
    Json list = Json::array();
    passed = true;
    int total_solutions = 0, total_failed = 0;
    for (const int M2 : sectors) {
      bethe::SolveStats stats;
      const auto sols = bethe::solve_bae(chain, M2, derived_seed(common.seed, static_cast<std::uint64_t>(M2)),
                                         common.trials, {}, &stats);
      std::vector<int> ed;
      for (int s = 0; s < static_cast<int>(spectrum.states.size()); ++s)
        if (spectrum.states[s].sector_M2 == M2) ed.push_back(s);

      std::vector<std::vector<cplx>> hs, gs;
      Json jsols = Json::array();
      double worst_residual = 0.0;
      for (const auto& sol : sols) {
        hs.push_back(bethe::eigenvalues_h(sol.roots, chain));
        gs.push_back(bethe::eigenvalues_g(sol.roots, chain));
        worst_residual = std::max(worst_residual, sol.residual);
        Json js;
        js["roots"] = multiset_to_json(sol.roots);
        js["residual"] = sol.residual;
        js["H"] = to_json(std::span<const cplx>(hs.back()));
        js["G"] = to_json(std::span<const cplx>(gs.back()));
        jsols.push_back(std::move(js));
      }
      int matched = 0;
      double worst_match = 0.0;
      Json ed_matches = Json::array();
      for (const int s : ed) {
        double best = std::numeric_limits<double>::infinity();
        int best_index = -1;
        for (std::size_t k = 0; k < sols.size(); ++k) {
          double d = 0.0;
          for (int i = 0; i < chain.L; ++i)
            d = std::max({d, rel(hs[k][i], spectrum.states[s].H[i]), rel(gs[k][i], spectrum.states[s].G[i])});
          if (d < best) {
            best = d;
            best_index = static_cast<int>(k);
          }
        }
        const bool ok = best <= common.tol;
        matched += ok ? 1 : 0;
        worst_match = std::max(worst_match, best);
        Json jm;
        jm["ed_state"] = s;
        jm["solution"] = ok ? Json(best_index) : Json(nullptr);
        jm["error"] = std::isfinite(best) ? Json(best) : Json(nullptr);
        ed_matches.push_back(std::move(jm));
      }
      const int expected = static_cast<int>(std::llround(std::tgamma(chain.L + 1.0) /
                                                         (std::tgamma(M2 + 1.0) * std::tgamma(chain.L - M2 + 1.0))));
      const bool sector_ok = static_cast<int>(sols.size()) == expected && matched == static_cast<int>(ed.size()) &&
                             worst_residual <= 1e-10;
      passed = passed && sector_ok;
      total_solutions += static_cast<int>(sols.size());
      total_failed += stats.failed;
      Json js;
      js["M2"] = M2;
      js["expected_count"] = expected;
      js["solution_count"] = static_cast<int>(sols.size());
      js["ed_count"] = static_cast<int>(ed.size());
      js["ed_matched"] = matched;
      js["match_rate"] = ed.empty() ? 1.0 : double(matched) / double(ed.size());
      js["worst_match_error"] = worst_match;
      js["worst_residual"] = worst_residual;
      js["passed"] = sector_ok;
      js["starts"] = stats.starts;
      js["converged"] = stats.converged;
      js["failed_starts"] = stats.failed;
      js["duplicates"] = stats.duplicates;
      js["solutions"] = std::move(jsols);
      js["ed_matches"] = std::move(ed_matches);
      list.push_back(std::move(js));
    }
    results["sectors"] = std::move(list);
    summary["n_sectors"] = static_cast<int>(sectors.size());
    summary["n_solutions"] = total_solutions;
    summary["failed_starts"] = total_failed;
    summary["tol"] = common.tol;
    return results;
  };
  return p;
}

// ---------------------------------------------------------------- rs

bool is_half_ipi(cplx eta) { return std::abs(eta - cplx(0.0, kPi / 2)) <= 1e-14; }

Json trajectory_json(const rs::Trajectory& tr, int stride) {
  Json t = Json::array(), x = Json::array(), p = Json::array();
  for (std::size_t i = 0; i < tr.points.size(); i += static_cast<std::size_t>(stride)) {
    const auto& pt = tr.points[i];
    t.push_back(pt.t);
    x.push_back(to_json(std::span<const cplx>(pt.state.x)));
    p.push_back(to_json(std::span<const cplx>(pt.state.p)));
  }
  Json j;
  j["t"] = std::move(t);
  j["x"] = std::move(x);
  j["p"] = std::move(p);
  return j;
}

Prepared prepare_rs_evolve(const Json& config, const Overrides& o) {
  Section root(config, "");
  root.string("schema_version", kSchemaVersion);
  const Common common = read_common(root, o, 1e-6, 1, 1000);
  Json resolved = common_json(common);
  rs::EvolveOptions opt;
  opt.dt_output = 2.5e-4;
  const double t_final = root.positive("t_final", 2.0);
  opt.dt_output = root.positive("dt_output", opt.dt_output);
  opt.tol = root.positive("integrator_tol", opt.tol);
  const double eom_tol = root.positive("eom_tol", 1e-5);
  const int stride = root.integer("record_stride", 40, 1, 1000000);
  resolved["t_final"] = t_final;
  resolved["dt_output"] = opt.dt_output;
  resolved["integrator_tol"] = opt.tol;
  resolved["eom_tol"] = eom_tol;
  resolved["record_stride"] = stride;
  if (t_final / opt.dt_output > 1e7) throw ConfigError("t_final / dt_output exceeds 1e7 samples");

  std::optional<rs::RSState> explicit_state;
  std::string kind;
  int L = 0;
  if (root.has("state") && root.has("random")) throw ConfigError("give either state or random, not both");
  if (root.has("random")) {
    Section r = root.section("random");
    L = r.integer("L", 2, 1, rs::kMaxSubsetParticles);
    kind = r.string("kind", "real");
    r.finish();
    if (kind != "real" && kind != "half_ipi") throw ConfigError("random.kind must be \"real\" or \"half_ipi\"");
    resolved["random"] = Json{{"L", L}, {"kind", kind}};
  } else {
    rs::RSState st;
    st.x = {cplx{0.0}};
    st.p = {cplx{0.2}};
    if (root.has("state")) st = parse_rs_state(root.section("state"));
    st.validate();
    if (common.trials != 1) throw ConfigError("trials > 1 needs random draws");
    resolved["state"] = rs_state_to_json(st);
    explicit_state = st;
  }
  root.finish();

  Prepared p;
  p.resolved = resolved;
  p.run = [=](Json& summary, bool& passed) {
    Rng rng(common.seed);
    Json runs = Json::array();
    double worst_drift = 0.0, worst_eom = 0.0, worst_lax = 0.0, worst_e = 0.0;
    int redraws = 0;
    passed = true;
    for (int trial = 0; trial < common.trials; ++trial) {
      rs::RSState st;
      rs::Trajectory tr;
      if (explicit_state) {
        st = *explicit_state;
        tr = rs::evolve(st, t_final, opt);
      } else {
        // half_ipi draws are redrawn when a pair passes within |sinh| < 0.2,
        // where the finite-difference residual is truncation dominated.
        for (int attempt = 0;; ++attempt) {
          if (attempt >= 1000) throw NoConvergence("no admissible RS draw in 1000 attempts");
          st = kind == "real" ? sampling::draw_rs_real(rng, L) : sampling::draw_rs_half_ipi(rng, L);
          try {
            tr = rs::evolve(st, t_final, opt);
          } catch (const CollisionDetected&) {
            ++redraws;
            continue;
          }
          if (kind == "half_ipi" && sampling::min_pair_sinh(tr) < 0.2) {
            ++redraws;
            continue;
          }
          break;
        }
      }
      const auto form = is_half_ipi(st.eta) ? rs::EquationOfMotion::EtaHalfIPi : rs::EquationOfMotion::General;
      const double drift = rs::spectral_drift(tr);
      const double e_drift = rs::integrals_drift(tr);
      const double eom = rs::second_order_residual(tr, form);
      const double lax = rs::lax_equation_residual(tr);
      const cplx h0 = rs::hamiltonian(tr.points.front().state);
      double h_drift = 0.0;
      for (const auto& pt : tr.points) h_drift = std::max(h_drift, rel(rs::hamiltonian(pt.state), h0));
      Json jr;
      jr["initial"] = rs_state_to_json(st);
      jr["equation"] = form == rs::EquationOfMotion::General ? "general" : "eta_half_ipi";
      jr["steps_accepted"] = tr.steps_accepted;
      jr["steps_rejected"] = tr.steps_rejected;
      jr["spectral_drift"] = drift;
      jr["integrals_drift"] = e_drift;
      jr["hamiltonian_drift"] = h_drift;
      jr["eom_residual"] = eom;
      jr["lax_equation_residual"] = lax;
      jr["min_pair_sinh"] = st.size() > 1 ? Json(sampling::min_pair_sinh(tr)) : Json(nullptr);
      if (st.size() == 1) {
        const cplx v0 = tr.points.front().xdot[0];
        double lin = 0.0;
        for (const auto& pt : tr.points) lin = std::max(lin, rel(pt.state.x[0], st.x[0] + v0 * pt.t));
        jr["linear_motion_error"] = lin;
      }
      jr["trajectory"] = trajectory_json(tr, stride);
      const bool ok = drift <= common.tol && eom <= eom_tol;
      jr["passed"] = ok;
      passed = passed && ok;
      runs.push_back(std::move(jr));
      worst_drift = std::max(worst_drift, drift);
      worst_eom = std::max(worst_eom, eom);
      worst_lax = std::max(worst_lax, lax);
      worst_e = std::max(worst_e, e_drift);
    }
    Json results;
    results["runs"] = std::move(runs);
    summary["worst_spectral_drift"] = worst_drift;
    summary["worst_integrals_drift"] = worst_e;
    summary["worst_eom_residual"] = worst_eom;
    summary["worst_lax_equation_residual"] = worst_lax;
    summary["redraws"] = redraws;
    summary["tol"] = common.tol;
    return results;
  };
  return p;
}

// ---------------------------------------------------------------- identities

struct CheckTol {
  const char* name;
  double tol;
};

Prepared prepare_check_identities(const Json& config, const Overrides& o) {
  Section root(config, "");
  root.string("schema_version", kSchemaVersion);
  const Common common = read_common(root, o, 1e-8, 100, 100000);
  Json resolved = common_json(common);
  const int n_max = root.integer("N_max", 6, 1, 8);
  const auto fixed_n = root.optional_integer("N", 1, 8);
  const auto fixed_m = root.optional_integer("M", 0, 8);
  const bool corrupt = root.boolean("corrupt_g", false);
  root.finish();
  if (fixed_n && fixed_m && *fixed_m > *fixed_n) throw ConfigError("M must not exceed N");
  if (!fixed_n && fixed_m && *fixed_m > n_max) throw ConfigError("M must not exceed N_max");
  resolved["N_max"] = n_max;
  if (fixed_n) resolved["N"] = *fixed_n;
  if (fixed_m) resolved["M"] = *fixed_m;
  resolved["corrupt_g"] = corrupt;

  Prepared p;
  p.resolved = resolved;
  p.run = [=](Json& summary, bool& passed) {
    const std::vector<CheckTol> tols = {
        {"lemma1", common.tol},      {"factorization_q", 1e-9}, {"factorization_q_tilde", 1e-9},
        {"det_w", 1e-12},            {"pencil", 1e-8},          {"geometric_string", 1e-10},
        {"vandermonde_inverse", 1e-10},
    };
    std::map<std::string, double> worst;
    std::map<std::string, int> failures;
    for (const auto& t : tols) {
      worst[t.name] = 0.0;
      failures[t.name] = 0;
    }
    Rng rng(common.seed);
    Json rows = Json::array();
    int n_pass = 0;
    for (int trial = 0; trial < common.trials; ++trial) {
      int N = fixed_n ? *fixed_n : rng.uniform_int(std::max(1, fixed_m.value_or(1)), n_max);
      int M = fixed_m ? *fixed_m : rng.uniform_int(0, N);
      const auto params = sampling::draw_lemma(rng, N, M);
      std::map<std::string, double> r;
      auto rhs = params;
      if (corrupt) rhs.g = -rhs.g;
      r["lemma1"] = identities::lemma1_residual(params, rhs);
      const auto f = identities::factorization_residuals(params);
      r["factorization_q"] = f.q;
      if (M > 0) r["factorization_q_tilde"] = f.q_tilde;
      r["det_w"] = f.det_w;
      r["pencil"] = identities::pencil_form(params).residual;
      if (M == 0) r["geometric_string"] = identities::geometric_string_residual(params.x, params.g, params.eta);
      r["vandermonde_inverse"] = identities::vandermonde_inverse_residual(params.x);
      bool ok = true;
      Json row;
      row["trial"] = trial;
      row["N"] = N;
      row["M"] = M;
      Json res;
      for (const auto& t : tols) {
        const auto it = r.find(t.name);
        if (it == r.end()) continue;
        res[t.name] = it->second;
        const bool pass = it->second <= t.tol;
        if (!pass) ++failures[t.name];
        ok = ok && pass;
        worst[t.name] = std::max(worst[t.name], it->second);
      }
      if (M > 0) res["y_limit_re8"] = identities::y_limit_check(params, 0, 8.0).lhs;
      row["residuals"] = std::move(res);
      row["passed"] = ok;
      n_pass += ok ? 1 : 0;
      rows.push_back(std::move(row));
    }
    Json results;
    Json jt;
    for (const auto& t : tols) jt[t.name] = t.tol;
    results["tolerances"] = std::move(jt);
    results["trials"] = std::move(rows);
    passed = n_pass == common.trials;
    Json jw, jf;
    for (const auto& t : tols) {
      jw[t.name] = worst[t.name];
      jf[t.name] = failures[t.name];
    }
    summary["n_trials"] = common.trials;
    summary["n_pass"] = n_pass;
    summary["n_fail"] = common.trials - n_pass;
    summary["worst"] = std::move(jw);
    summary["failures"] = std::move(jf);
    return results;
  };
  return p;
}

const std::map<std::string, Prepared (*)(const Json&, const Overrides&)>& registry() {
  static const std::map<std::string, Prepared (*)(const Json&, const Overrides&)> r = {
      {"verify-duality", &prepare_verify_duality},
      {"solve-bethe", &prepare_solve_bethe},
      {"rs-evolve", &prepare_rs_evolve},
      {"check-identities", &prepare_check_identities},
  };
  return r;
}

int code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::MatchFailed:
      return kExitVerificationFailed;
    case ErrorKind::ConfigError:
      return kExitConfigError;
    default:
      return kExitNumericalFailure;
  }
}

}  // namespace

bool is_known_command(const std::string& command) { return registry().count(command) > 0; }

CommandOutcome run_command(const std::string& command, const Json& config, const Overrides& overrides) {
  CommandOutcome out;
  const auto it = registry().find(command);
  if (it == registry().end()) {
    out.exit_code = kExitConfigError;
    out.message = "unknown command " + command;
    return out;
  }
  Prepared prepared;
  try {
    prepared = it->second(config, overrides);
  } catch (const Error& e) {
    out.exit_code = kExitConfigError;
    out.message = e.what();
    return out;
  } catch (const std::exception& e) {
    out.exit_code = kExitConfigError;
    out.message = std::string("ConfigError: ") + e.what();
    return out;
  }

  Json summary;
  Json results;
  bool passed = false;
  std::string error;
  try {
    results = prepared.run(summary, passed);
    out.exit_code = passed ? kExitPass : kExitVerificationFailed;
  } catch (const Error& e) {
    out.exit_code = code_for(e);
    error = e.what();
    results = Json::object();
    summary = Json::object();
    summary["error"] = error;
  } catch (const std::exception& e) {
    out.exit_code = kExitNumericalFailure;
    error = e.what();
    results = Json::object();
    summary = Json::object();
    summary["error"] = error;
  }
  Json full = summary_base(out.exit_code == kExitPass, out.exit_code);
  for (auto s = summary.begin(); s != summary.end(); ++s) full[s.key()] = s.value();
  out.report = make_report(command, prepared.resolved, std::move(results), std::move(full));
  out.message = error.empty() ? command + (out.exit_code == kExitPass ? ": PASS" : ": FAIL") : error;
  return out;
}

CommandOutcome run_command_file(const std::string& command, const std::string& config_path,
                                const Overrides& overrides) {
  Json config;
  try {
    config = config_path.empty() ? parse_config_text(R"({"schema_version": "1"})") : load_config_file(config_path);
  } catch (const Error& e) {
    CommandOutcome out;
    out.exit_code = kExitConfigError;
    out.message = e.what();
    return out;
  }
  return run_command(command, config, overrides);
}

}  // namespace qcd::cli
