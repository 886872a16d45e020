// Command-line front end: stability verdicts, structured distances with
// witnesses, homotopy eigenvalue trajectories, and instance generation.

#include "dhdae/io.hpp"
#include "dhdae/oracle.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

using namespace dhdae;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotStable = 2;

std::string fmt_bounds(const StabilityVerdict& v) {
  std::ostringstream os;
  os << "bounds:";
  if (v.d_dae) os << " d_dae=" << *v.d_dae;
  if (v.d_sing_stack) os << " d_sing_stack=" << *v.d_sing_stack;
  if (v.d_hi_lower) os << " d_hi_lower=" << *v.d_hi_lower;
  if (v.d_r) os << " d_r=" << *v.d_r;
  return os.str();
}

int run_check(const std::string& file, double tol, bool as_json) {
  const DhdaeSystem sys = to_validated(read_system_file(file));
  const StabilityVerdict v = verdict(sys, tol);
  if (as_json) {
    std::cout << verdict_to_json(v).dump(2) << "\n";
  } else {
    std::cout << "regular: " << (v.regular ? "yes" : "no")
              << "   index: " << v.index << "\n";
    std::cout << "spectral abscissa: " << v.spectral_abscissa << "\n";
    std::cout << "principal submatrices nonsingular: "
              << (v.principal_submatrix_ok ? "yes" : "no")
              << (v.principal_check_exact ? " (exhaustive)" : " (sufficient)")
              << "\n";
    std::cout << fmt_bounds(v) << "\n";
    std::cout << "robustly asymptotically stable: "
              << (v.robustly_stable() ? "yes" : "no");
    if (!v.robustly_stable()) {
      std::cout << "  [";
      if (!v.cond_a) std::cout << " not-regular";
      if (v.cond_a && !v.cond_b)
        std::cout << (v.index > 1 ? " index " + std::to_string(v.index)
                                  : " principal-submatrix");
      if (!v.cond_c) std::cout << " eigenvalue-not-in-open-left-half-plane";
      std::cout << " ]";
    }
    std::cout << "\n";
  }
  return v.robustly_stable() ? kExitOk : kExitNotStable;
}

struct DistanceArgs {
  std::string kind = "im";
  std::string set = "si";
  std::string scope = "full";
  double tol = kDefaultRankTol;
  std::uint64_t seed = 0x5eed;
  int max_iter = 500;
  int certify = 0;
  bool as_json = false;
  std::string witness_out;
};

SetTag parse_set(const std::string& s) {
  if (s == "sd") return SetTag::Sd;
  if (s == "si") return SetTag::Si;
  throw Error("--set must be sd or si");
}

json one_distance(const DhdaeSystem& sys, const std::string& kind,
                  const DistanceArgs& a,
                  std::optional<PerturbationTriple>* witness_slot) {
  OptConfig cfg;
  cfg.seed = a.seed;
  cfg.max_iter = a.max_iter;
  const SetTag set = parse_set(a.set);
  const bool jr = a.scope == "jr";
  json j;
  std::optional<PerturbationTriple> witness;
  double value = 0;
  DegeneracyKind dk{};
  if (kind == "im") {
    const ImDistanceReport r = jr ? dist_im_jr(sys, set, a.tol, cfg)
                                  : dist_im_full(sys, set, a.tol, cfg);
    j = report_to_json(r);
    witness = r.witness;
    value = r.value;
    dk = DegeneracyKind::ImaginaryAxis;
  } else if (kind == "sing") {
    const SingDistanceReport r = jr ? dist_sing_jr(sys, set, a.tol, cfg)
                                    : dist_sing_full(sys, set, a.tol, cfg);
    j = report_to_json(r);
    j["unstructured"] = dist_sing_unstructured(sys, a.tol).value;
    witness = r.witness;
    value = r.value;
    dk = DegeneracyKind::Singular;
  } else if (kind == "hi") {
    const HiDistanceReport r = jr ? dist_hi_jr(sys, set, a.tol, cfg)
                                  : dist_hi_full(sys, set, a.tol, cfg);
    j = report_to_json(r);
    witness = r.witness;
    value = r.value;
    dk = DegeneracyKind::HigherIndex;
  } else {
    throw Error("unknown distance kind: " + kind);
  }
  if (a.certify > 0) {
    const CertificateRecord rec = certify_distance(
        sys, dk, jr ? (set == SetTag::Sd ? SetTag::SdJR : SetTag::SiJR) : set,
        value, witness, a.certify, a.seed, a.tol);
    json c;
    c["pass"] = rec.pass;
    c["detail"] = rec.detail;
    c["samples"] = rec.samples;
    c["rng_seed"] = rec.rng_seed;
    j["certificate"] = std::move(c);
  }
  if (witness_slot && witness) *witness_slot = witness;
  return j;
}

int run_distance(const std::string& file, const DistanceArgs& a) {
  const DhdaeSystem sys = to_validated(read_system_file(file));
  std::optional<PerturbationTriple> witness;
  json out;
  if (a.kind == "inst") {
    json comps;
    double best = std::numeric_limits<double>::infinity();
    std::string mech = "none";
    for (const char* k : {"im", "sing", "hi"}) {
      std::optional<PerturbationTriple> w;
      json j = one_distance(sys, k, a, &w);
      const double v = j.at("value").is_number()
                           ? j.at("value").get<double>()
                           : std::numeric_limits<double>::infinity();
      comps[k] = std::move(j);
      if (v < best) {
        best = v;
        mech = k;
        witness = w;
      }
    }
    out["schema"] = kReportSchema;
    out["kind"] = "inst";
    out["value"] = best;
    out["mechanism"] = mech;
    out["set"] = a.set;
    out["scope"] = a.scope;
    out["components"] = std::move(comps);
  } else {
    out = one_distance(sys, a.kind, a, &witness);
  }
  if (!a.witness_out.empty()) {
    if (!witness) throw Error("no witness available to write");
    write_perturbation_file(a.witness_out, *witness);
  }
  if (a.as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "kind: " << out.at("kind").get<std::string>() << "  set: "
              << a.set << "  scope: " << a.scope << "\n";
    if (out.contains("mechanism"))
      std::cout << "mechanism: " << out.at("mechanism").get<std::string>()
                << "\n";
    std::cout << "value: " << out.at("value").dump();
    if (out.contains("bound_kind"))
      std::cout << "  (" << out.at("bound_kind").get<std::string>() << ")";
    std::cout << "\n";
    if (out.contains("omega_star"))
      std::cout << "omega*: " << out.at("omega_star").get<double>() << "\n";
    if (out.contains("witness_verified"))
      std::cout << "witness verified: "
                << (out.at("witness_verified").get<bool>() ? "yes" : "no")
                << "\n";
    if (out.contains("certificate"))
      std::cout << "certificate: "
                << (out.at("certificate").at("pass").get<bool>() ? "pass"
                                                                 : "FAIL")
                << " (" << out.at("certificate").at("detail").get<std::string>()
                << ")\n";
  }
  return kExitOk;
}

int run_homotopy(const std::string& file, const std::string& pfile, int steps,
                 double tol, bool as_json) {
  const DhdaeSystem sys = to_validated(read_system_file(file));
  const PerturbationTriple p = read_perturbation_file(pfile);
  if (p.dE.rows() != sys.n)
    throw Error("perturbation size does not match the system");
  json rows = json::array();
  if (!as_json) std::cout << "t,branch,re,im,n_inf,index\n";
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    const DhdaeSystem st = DhdaeSystem::validate(
        sys.E + t * p.dE, sys.J + t * p.dJ, sys.R + t * p.dR, 1e-8);
    const StaircaseForm sc = compute_staircase(st, tol);
    const Classification cls = classify(sc);
    const auto fe = finite_eigensystem(sc);
    const Index n_inf = sc.sizes[2] + 2 * sc.sizes[3];
    if (as_json) {
      json row;
      row["t"] = t;
      row["index"] = cls.index;
      row["n_inf"] = n_inf;
      json eigs = json::array();
      for (const Complex& lam : fe.eigenvalues)
        eigs.push_back(json::array({lam.real(), lam.imag()}));
      row["eigenvalues"] = std::move(eigs);
      rows.push_back(std::move(row));
    } else if (fe.eigenvalues.empty()) {
      std::cout << t << ",,,," << n_inf << "," << cls.index << "\n";
    } else {
      for (std::size_t b = 0; b < fe.eigenvalues.size(); ++b)
        std::cout << t << "," << b << "," << fe.eigenvalues[b].real() << ","
                  << fe.eigenvalues[b].imag() << "," << n_inf << ","
                  << cls.index << "\n";
    }
  }
  if (as_json) {
    json out;
    out["schema"] = kReportSchema;
    out["kind"] = "homotopy";
    out["rows"] = std::move(rows);
    std::cout << out.dump(2) << "\n";
  }
  return kExitOk;
}

int run_gen(const std::string& kind, Index m, std::uint64_t seed,
            const std::string& params, const std::string& out, bool mtx) {
  DhdaeSystem sys = [&] {
    if (kind == "mechanical") return random_example(ExampleKind::Mechanical, m, seed);
    if (kind == "stokes") return random_example(ExampleKind::Stokes, m, seed);
    if (kind == "poroelastic")
      return random_example(ExampleKind::Poroelastic, m, seed);
    if (kind == "car_acoustic")
      return random_example(ExampleKind::CarAcoustic, m, seed);
    if (kind == "dc_network") {
      DcNetworkParams p;
      if (!params.empty()) {
        std::istringstream ps(params);
        std::string item;
        while (std::getline(ps, item, ',')) {
          const auto eq = item.find('=');
          if (eq == std::string::npos)
            throw Error("--params expects k=v pairs, got: " + item);
          const std::string key = item.substr(0, eq);
          const double val = std::stod(item.substr(eq + 1));
          if (key == "L") p.L = val;
          else if (key == "C1") p.C1 = val;
          else if (key == "C2") p.C2 = val;
          else if (key == "RL") p.RL = val;
          else if (key == "RG") p.RG = val;
          else if (key == "RR") p.RR = val;
          else throw Error("unknown dc_network parameter: " + key);
        }
      }
      return make_dc_network(p);
    }
    throw Error("unknown example kind: " + kind);
  }();
  LoadedSystem ls{sys.E, sys.J, sys.R, std::nullopt};
  if (mtx)
    write_system_mtx(out, ls);
  else
    write_system_json(out, ls);
  std::cout << "wrote " << (mtx ? out + ".{E,J,R}.{re,im}.mtx" : out)
            << " (n=" << sys.n << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dhdae: robust stability and structured distance analysis for "
      "dissipative Hamiltonian differential-algebraic systems"};
  app.require_subcommand(1);

  std::string file, pfile, out, kind = "im", params;
  DistanceArgs da;
  double tol = kDefaultRankTol;
  bool as_json = false, mtx = false;
  int steps = 32, threads = 0;
  Index gen_n = 2;
  std::uint64_t gen_seed = 1;

  auto* check = app.add_subcommand("check", "robust asymptotic stability verdict");
  check->add_option("file", file)->required();
  check->add_option("--tol", tol, "rank tolerance");
  check->add_flag("--json", as_json, "structured output");
  check->add_option("--threads", threads, "worker cap (DHDAE_THREADS)");

  auto* dist = app.add_subcommand("distance", "structured distances with witnesses");
  dist->add_option("file", file)->required();
  dist->add_option("--kind", da.kind, "im|sing|hi|inst")->required();
  dist->add_option("--set", da.set, "sd|si (default si)");
  dist->add_option("--scope", da.scope, "full|jr (default full)");
  dist->add_option("--tol", da.tol, "rank tolerance");
  dist->add_option("--seed", da.seed, "optimizer/oracle RNG seed");
  dist->add_option("--max-iter", da.max_iter, "optimizer iteration cap");
  dist->add_option("--certify", da.certify,
                   "run the sampling certificate with this many draws");
  dist->add_flag("--json", da.as_json, "structured output");
  dist->add_option("--witness-out", da.witness_out,
                   "write the witness perturbation to this JSON file");
  dist->add_option("--threads", threads, "worker cap (DHDAE_THREADS)");

  auto* hom = app.add_subcommand("homotopy",
                                 "eigenvalue trajectories under t*(dJ,dR,dE)");
  hom->add_option("file", file)->required();
  hom->add_option("--perturbation", pfile)->required();
  hom->add_option("--steps", steps, "number of homotopy steps (default 32)");
  hom->add_option("--tol", tol, "rank tolerance");
  hom->add_flag("--json", as_json, "structured output");

  auto* gen = app.add_subcommand("gen", "generate example instances");
  gen->add_option("--kind", kind,
                  "mechanical|stokes|poroelastic|car_acoustic|dc_network")
      ->required();
  gen->add_option("--n", gen_n, "parameter block size for the matrix families");
  gen->add_option("--seed", gen_seed, "RNG seed for random admissible data");
  gen->add_option("--params", params, "dc_network parameters, e.g. L=2,C1=0.5");
  gen->add_option("-o,--out", out)->required();
  gen->add_flag("--mtx", mtx, "write Matrix Market pairs instead of JSON");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) {
    const std::string v = std::to_string(threads);
    setenv("DHDAE_THREADS", v.c_str(), 1);
  }

  try {
    if (check->parsed()) return run_check(file, tol, as_json);
    if (dist->parsed()) return run_distance(file, da);
    if (hom->parsed()) return run_homotopy(file, pfile, steps, tol, as_json);
    if (gen->parsed()) return run_gen(kind, gen_n, gen_seed, params, out, mtx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
