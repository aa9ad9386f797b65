// Batch front door for the library: compute equilibrium data, classify the
// spike phase, predict limit laws, draw samples, and run the verification
// batteries.  Exit codes: 0 success, 1 input error, 2 verification failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spiked/appendix_oracle.hpp"
#include "spiked/equilibrium.hpp"
#include "spiked/errors.hpp"
#include "spiked/io.hpp"
#include "spiked/jack.hpp"
#include "spiked/limit_laws.hpp"
#include "spiked/phase.hpp"
#include "spiked/potential.hpp"
#include "spiked/sampler.hpp"

namespace {

using nlohmann::json;
using namespace spiked;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitVerify = 2;

// Values shared by several subcommands.  Each field mirrors one config key;
// command-line flags override the config file.
struct Options {
  std::string config_path;
  std::string potential_path;
  std::vector<double> coeffs;
  double a = 2.0;
  double a_min = 0.0;
  double a_max = 0.0;
  int a_count = 0;
  double beta = 2.0;
  int n = 0;
  int trials = 0;
  long steps = 0;
  long burn_in = -1;
  int thin = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  std::string format = "json";
  std::string method = "auto";
  std::string sample_path;
  double alpha = 0.0;
  bool alpha_set = false;
  double tol_ks = 0.05;
  double tol_tie = 1e-8;
  int jack_n = 0;
  double jack_beta = 0.0;
  int jack_K = 0;
};

json load_config(const std::string& path, const std::string& command) {
  if (path.empty()) return json::object();
  json cfg = json::parse(io::read_file(path));
  if (!cfg.is_object())
    throw Error(ErrorCode::InvalidArgument, "config root must be a JSON object");
  if (cfg.contains("command") && cfg.at("command").get<std::string>() != command) {
    throw Error(ErrorCode::InvalidArgument,
                "config command '" + cfg.at("command").get<std::string>() +
                    "' does not match subcommand '" + command + "'");
  }
  return cfg;
}

template <typename T>
void merge_field(CLI::App* cmd, const json& cfg, const std::string& flag,
                 const std::string& key, T& var) {
  if (cmd->count(flag) == 0 && cfg.contains(key)) var = cfg.at(key).get<T>();
}

Potential resolve_potential(const Options& opt) {
  if (!opt.potential_path.empty())
    return potential_from_json(io::read_file(opt.potential_path));
  if (!opt.coeffs.empty()) return make_potential(opt.coeffs);
  return make_potential({0.0, 0.0, 1.0});
}

// Canonical form of the effective configuration; hashed into every output so
// reruns are attributable and byte-identical.
std::string canonical_config(const std::string& command, const Potential& V,
                             const json& extra) {
  json c;
  c["command"] = command;
  c["coeffs"] = V.coeffs;
  for (auto it = extra.begin(); it != extra.end(); ++it) c[it.key()] = *it;
  return c.dump();
}

std::string provenance_json(const std::string& command, const std::string& canon) {
  std::string s = "{\"generator\":\"spiked ";
  s += io::version;
  s += "\",\"command\":\"" + command + "\",\"config_hash\":\"";
  s += io::hex64(io::fnv1a(canon)) + "\"}";
  return s;
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    io::write_file(opt.out, text);
  }
}

std::string csv_field(double v) { return io::g17(v); }

int run_eqm(const Options& opt) {
  const Potential V = resolve_potential(opt);
  const std::string canon = canonical_config("eqm", V, json::object());
  const EquilibriumMeasure eqm = solve_equilibrium(V);
  const ConditionReport cr = check_conditions(eqm);
  const VariationalReport vr = verify_variational(eqm, 200, 200);

  std::string out = "{\"provenance\":" + provenance_json("eqm", canon);
  out += ",\"equilibrium\":" + eqm_to_json(eqm);
  out += ",\"conditions\":{";
  out += "\"cond1\":" + std::string(cr.cond1 ? "true" : "false");
  out += ",\"cond2\":" + std::string(cr.cond2 ? "true" : "false");
  out += ",\"cond3\":" + std::string(cr.cond3 ? "true" : "false");
  out += ",\"cond4\":" + std::string(cr.cond4 ? "true" : "false");
  out += ",\"all\":" + std::string(cr.all() ? "true" : "false");
  out += ",\"min_h_on_support\":" + io::g17(cr.min_h_on_support);
  out += ",\"normalization\":" + io::g17(cr.normalization);
  out += ",\"min_exterior_margin\":" + io::g17(cr.min_exterior_margin);
  out += "},\"variational\":{";
  out += "\"max_interior_residual\":" + io::g17(vr.max_interior_residual);
  out += ",\"min_exterior_margin\":" + io::g17(vr.min_exterior_margin);
  out += ",\"equality_ok\":" + std::string(vr.equality_ok ? "true" : "false");
  out += ",\"inequality_ok\":" + std::string(vr.inequality_ok ? "true" : "false");
  out += "}}\n";
  emit(opt, out);
  return kExitOk;
}

int run_phase(const Options& opt) {
  const Potential V = resolve_potential(opt);
  double lo = opt.a_min, hi = opt.a_max;
  int count = opt.a_count;
  if (count <= 0) {
    lo = hi = opt.a;
    count = 1;
  }
  if (count < 1 || hi < lo)
    throw Error(ErrorCode::InvalidArgument, "bad a-sweep range");
  json extra;
  extra["a_min"] = lo;
  extra["a_max"] = hi;
  extra["a_count"] = count;
  const std::string canon = canonical_config("phase", V, extra);
  const EquilibriumMeasure eqm = solve_equilibrium(V);

  std::string out = io::provenance_header("phase", canon);
  out +=
      "a,regime,a_c,c_of_a,e,g_max,h_at_c,predicted_location,n_maximizers,"
      "x1,G1,order1,x2,G2,order2\n";
  for (int i = 0; i < count; ++i) {
    const double a =
        count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    const PhaseReport rep = classify(eqm, a);
    out += csv_field(rep.a);
    out += ",";
    out += regime_name(rep.regime);
    out += "," + csv_field(rep.a_c) + "," + csv_field(rep.c_of_a) + "," +
           csv_field(rep.e) + "," + csv_field(rep.g_max) + "," +
           csv_field(rep.h_at_c) + "," + csv_field(rep.predicted_location);
    out += "," + std::to_string(rep.maximizers.size());
    for (size_t j = 0; j < 2; ++j) {
      if (j < rep.maximizers.size()) {
        const CriticalPoint& cp = rep.maximizers[j];
        out += "," + csv_field(cp.x) + "," + csv_field(cp.G) + "," +
               std::to_string(cp.order);
      } else {
        out += ",,,";
      }
    }
    out += "\n";
  }
  emit(opt, out);
  return kExitOk;
}

int run_predict(const Options& opt) {
  const Potential V = resolve_potential(opt);
  json extra;
  extra["a"] = opt.a;
  extra["beta"] = opt.beta;
  if (opt.n > 0) extra["n"] = opt.n;
  if (opt.alpha_set) extra["alpha"] = opt.alpha;
  extra["format"] = opt.format;
  const std::string canon = canonical_config("predict", V, extra);
  const EquilibriumMeasure eqm = solve_equilibrium(V);
  const std::optional<double> alpha =
      opt.alpha_set ? std::optional<double>(opt.alpha) : std::nullopt;
  const LimitLaw law = predict_limit(eqm, opt.a, opt.beta, alpha);

  if (opt.format == "csv") {
    // Sampled mixture CDF, one block per component in standardized units.
    std::string out = io::provenance_header("predict", canon);
    out += "component,T,cdf\n";
    for (size_t i = 0; i < law.components.size(); ++i) {
      for (int j = 0; j <= 160; ++j) {
        const double T = -4.0 + 0.05 * j;
        out += std::to_string(i) + "," + csv_field(T) + "," +
               csv_field(law_cdf(law, static_cast<int>(i), T)) + "\n";
      }
    }
    emit(opt, out);
    return kExitOk;
  }
  if (opt.format != "json")
    throw Error(ErrorCode::InvalidArgument, "format must be json or csv");

  std::string out = "{\"provenance\":" + provenance_json("predict", canon);
  out += ",\"a\":" + io::g17(opt.a);
  out += ",\"law\":" + law_to_json(law);
  if (opt.n > 0) {
    out += ",\"n\":" + std::to_string(opt.n) + ",\"scales_at_n\":[";
    for (size_t i = 0; i < law.components.size(); ++i) {
      if (i) out += ",";
      out += io::g17(component_scale(law.components[i], opt.n));
    }
    out += "]";
  }
  out += "}\n";
  emit(opt, out);
  return kExitOk;
}

int run_sample(const Options& opt) {
  const Potential V = resolve_potential(opt);
  const bool is_x2 = V.coeffs == std::vector<double>{0.0, 0.0, 1.0};
  const bool direct_beta =
      opt.beta == 1.0 || opt.beta == 2.0 || opt.beta == 4.0;
  std::string method = opt.method;
  if (method == "auto") method = (is_x2 && direct_beta) ? "direct" : "mcmc";
  if (opt.n <= 0) throw Error(ErrorCode::InvalidArgument, "--n must be positive");

  json extra;
  extra["a"] = opt.a;
  extra["beta"] = opt.beta;
  extra["n"] = opt.n;
  extra["seed"] = opt.seed;
  extra["method"] = method;

  if (!opt.seed_set)
    throw Error(ErrorCode::InvalidArgument,
                "sample is stochastic: --seed (or config \"seed\") is required");

  EmpiricalSample s;
  if (method == "direct") {
    if (!is_x2)
      throw Error(ErrorCode::InvalidArgument,
                  "direct sampling is defined for the quadratic potential only");
    const int trials = opt.trials > 0 ? opt.trials : 1000;
    extra["trials"] = trials;
    const std::string canon = canonical_config("sample", V, extra);
    s = sample_gaussian_spiked(opt.n, opt.beta, opt.a, trials, opt.seed);
    emit(opt, io::provenance_header("sample", canon) + sample_to_csv(s));
    return kExitOk;
  }
  if (method != "mcmc")
    throw Error(ErrorCode::InvalidArgument, "method must be auto, direct, or mcmc");
  const long steps = opt.steps > 0 ? opt.steps : 100000;
  const long burn = opt.burn_in >= 0 ? opt.burn_in : steps / 5;
  const int thin = opt.thin > 0 ? opt.thin : 2 * opt.n;
  extra["steps"] = steps;
  extra["burn_in"] = burn;
  extra["thin"] = thin;
  const std::string canon = canonical_config("sample", V, extra);
  s = mcmc_spectrum(V, opt.n, opt.beta, opt.a, steps, burn, thin, opt.seed);
  emit(opt, io::provenance_header("sample", canon) + sample_to_csv(s));
  return kExitOk;
}

int run_ks(const Options& opt) {
  const Potential V = resolve_potential(opt);
  const EmpiricalSample s = sample_from_csv(io::read_file(opt.sample_path));
  const int n = opt.n > 0 ? opt.n : s.n;
  json extra;
  extra["a"] = opt.a;
  extra["beta"] = opt.beta;
  extra["n"] = n;
  extra["tol_ks"] = opt.tol_ks;
  const std::string canon = canonical_config("ks", V, extra);
  const EquilibriumMeasure eqm = solve_equilibrium(V);
  const std::optional<double> alpha =
      opt.alpha_set ? std::optional<double>(opt.alpha) : std::nullopt;
  const LimitLaw law = predict_limit(eqm, opt.a, opt.beta, alpha);
  const KsResult ks = ks_compare(s, law, n);
  const bool pass = ks.D <= opt.tol_ks;

  std::string out = "{\"provenance\":" + provenance_json("ks", canon);
  out += ",\"D\":" + io::g17(ks.D);
  out += ",\"at\":" + io::g17(ks.at);
  out += ",\"n\":" + std::to_string(n);
  out += ",\"draws\":" + std::to_string(s.values.size());
  out += ",\"threshold\":" + io::g17(opt.tol_ks);
  out += ",\"pass\":" + std::string(pass ? "true" : "false");
  out += ",\"summary\":\"" + ks.summary + "\"}\n";
  emit(opt, out);
  return pass ? kExitOk : kExitVerify;
}

int run_verify_appendix(const Options& opt) {
  const std::string canon = "{\"command\":\"verify-appendix\"}";
  const std::vector<OracleReport> reports = run_appendix_checks();
  bool all = true;
  for (const OracleReport& r : reports) all = all && r.passed;
  std::string out = "{\"provenance\":" + provenance_json("verify-appendix", canon);
  out += ",\"all_passed\":" + std::string(all ? "true" : "false");
  out += ",\"reports\":" + reports_to_json(reports) + "}\n";
  emit(opt, out);
  return all ? kExitOk : kExitVerify;
}

void append_jack_report(std::string& out, const JackReport& rep) {
  out += "{\"n\":" + std::to_string(rep.n);
  out += ",\"beta\":" + io::g17(rep.beta);
  out += ",\"K\":" + std::to_string(rep.K);
  out += ",\"seed\":" + std::to_string(rep.seed);
  out += ",\"all_passed\":" + std::string(rep.all_passed ? "true" : "false");
  out += ",\"checks\":[";
  for (size_t i = 0; i < rep.checks.size(); ++i) {
    const JackCheck& c = rep.checks[i];
    if (i) out += ",";
    out += "{\"name\":\"" + c.name + "\"";
    out += ",\"got\":" + io::g17(c.got);
    out += ",\"want\":" + io::g17(c.want);
    out += ",\"err\":" + io::g17(c.err);
    out += ",\"passed\":" + std::string(c.passed ? "true" : "false") + "}";
  }
  out += "]}";
}

int run_verify_jack(const Options& opt) {
  struct Combo {
    int n;
    double beta;
    int K;
  };
  std::vector<Combo> combos;
  if (opt.jack_n > 0) {
    combos.push_back({opt.jack_n, opt.jack_beta > 0 ? opt.jack_beta : 2.0,
                      opt.jack_K > 0 ? opt.jack_K : 10});
  } else {
    combos = {{4, 2.0, 10}, {3, 1.0, 10}, {5, 4.0, 12}, {4, 3.0, 10}};
  }
  json extra;
  extra["seed"] = opt.seed == 0 ? 1 : opt.seed;
  const std::uint64_t seed = opt.seed == 0 ? 1 : opt.seed;
  const std::string canon = "{\"command\":\"verify-jack\",\"seed\":" +
                            std::to_string(seed) + "}";

  bool all = true;
  std::string body = "[";
  for (size_t i = 0; i < combos.size(); ++i) {
    const JackReport rep =
        verify_jack_identities(combos[i].n, combos[i].beta, combos[i].K, {}, seed);
    all = all && rep.all_passed;
    if (i) body += ",";
    append_jack_report(body, rep);
  }
  body += "]";

  std::string out = "{\"provenance\":" + provenance_json("verify-jack", canon);
  out += ",\"all_passed\":" + std::string(all ? "true" : "false");
  out += ",\"reports\":" + body + "}\n";
  emit(opt, out);
  return all ? kExitOk : kExitVerify;
}

void add_potential_flags(CLI::App* cmd, Options& opt) {
  auto* p = cmd->add_option("--potential", opt.potential_path,
                            "JSON file with {\"coeffs\":[...]}");
  auto* c = cmd->add_option("--coeffs", opt.coeffs,
                            "potential coefficients, low degree first");
  p->excludes(c);
}

} // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"equilibrium-measure and spiked-ensemble toolkit"};
  app.require_subcommand(1);

  CLI::App* eqm = app.add_subcommand("eqm", "equilibrium measure + condition report");
  CLI::App* phase = app.add_subcommand("phase", "phase classification a-sweep (CSV)");
  CLI::App* predict = app.add_subcommand("predict", "limit-law prediction");
  CLI::App* sample = app.add_subcommand("sample", "draw largest-eigenvalue samples (CSV)");
  CLI::App* ks = app.add_subcommand("ks", "compare a sample file against the predicted law");
  CLI::App* vapp = app.add_subcommand("verify-appendix", "closed-form vs quadrature battery");
  CLI::App* vjack = app.add_subcommand("verify-jack", "series identity battery");

  for (CLI::App* cmd : {eqm, phase, predict, sample, ks, vapp, vjack}) {
    cmd->add_option("--config", opt.config_path, "JSON config mirroring the flags");
    cmd->add_option("--out", opt.out, "output path (default stdout)");
  }
  for (CLI::App* cmd : {eqm, phase, predict, sample, ks}) add_potential_flags(cmd, opt);

  phase->add_option("--a", opt.a, "single spike value");
  phase->add_option("--a-min", opt.a_min, "sweep start");
  phase->add_option("--a-max", opt.a_max, "sweep end");
  phase->add_option("--a-count", opt.a_count, "sweep points");

  for (CLI::App* cmd : {predict, sample, ks}) {
    cmd->add_option("--a", opt.a, "spike value");
    cmd->add_option("--beta", opt.beta, "ensemble beta");
    cmd->add_option("--n", opt.n, "sample size the law is instantiated at");
  }
  for (CLI::App* cmd : {predict, ks}) {
    cmd->add_option("--alpha", opt.alpha, "mixture tilt")->each([&](const std::string&) {
      opt.alpha_set = true;
    });
  }
  predict->add_option("--format", opt.format, "json (law) or csv (CDF table)");

  sample->add_option("--trials", opt.trials, "direct-sampler trials");
  sample->add_option("--steps", opt.steps, "MCMC steps");
  sample->add_option("--burn-in", opt.burn_in, "MCMC burn-in (default steps/5)");
  sample->add_option("--thin", opt.thin, "MCMC thinning (default 2n)");
  sample->add_option("--seed", opt.seed, "RNG seed")->each([&](const std::string&) {
    opt.seed_set = true;
  });
  sample->add_option("--method", opt.method, "auto, direct, or mcmc");

  ks->add_option("--sample", opt.sample_path, "sample CSV to test")->required();
  ks->add_option("--tol-ks", opt.tol_ks, "pass threshold on the KS distance");

  vjack->add_option("--n", opt.jack_n, "single-combo size override");
  vjack->add_option("--beta", opt.jack_beta, "single-combo beta");
  vjack->add_option("--k", opt.jack_K, "single-combo truncation");
  vjack->add_option("--seed", opt.seed, "RNG seed for the random configurations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    const std::string name = active->get_name();
    const json cfg = load_config(opt.config_path, name);
    if (name != "verify-appendix" && name != "verify-jack") {
      merge_field(active, cfg, "--potential", "potential", opt.potential_path);
      merge_field(active, cfg, "--coeffs", "coeffs", opt.coeffs);
    }
    if (name == "phase") {
      merge_field(active, cfg, "--a", "a", opt.a);
      merge_field(active, cfg, "--a-min", "a_min", opt.a_min);
      merge_field(active, cfg, "--a-max", "a_max", opt.a_max);
      merge_field(active, cfg, "--a-count", "a_count", opt.a_count);
    }
    if (name == "predict" || name == "sample" || name == "ks") {
      merge_field(active, cfg, "--a", "a", opt.a);
      merge_field(active, cfg, "--beta", "beta", opt.beta);
      merge_field(active, cfg, "--n", "n", opt.n);
    }
    if (name == "predict" || name == "ks") {
      if (active->count("--alpha") == 0 && cfg.contains("alpha")) {
        opt.alpha = cfg.at("alpha").get<double>();
        opt.alpha_set = true;
      }
    }
    if (name == "predict") merge_field(active, cfg, "--format", "format", opt.format);
    if (name == "sample") {
      merge_field(active, cfg, "--trials", "trials", opt.trials);
      merge_field(active, cfg, "--steps", "steps", opt.steps);
      merge_field(active, cfg, "--burn-in", "burn_in", opt.burn_in);
      merge_field(active, cfg, "--thin", "thin", opt.thin);
      merge_field(active, cfg, "--method", "method", opt.method);
      if (active->count("--seed") == 0 && cfg.contains("seed")) {
        opt.seed = cfg.at("seed").get<std::uint64_t>();
        opt.seed_set = true;
      }
    }
    if (name == "ks") {
      merge_field(active, cfg, "--sample", "sample", opt.sample_path);
      merge_field(active, cfg, "--tol-ks", "tol_ks", opt.tol_ks);
    }
    merge_field(active, cfg, "--out", "out", opt.out);

    if (name == "eqm") return run_eqm(opt);
    if (name == "phase") return run_phase(opt);
    if (name == "predict") return run_predict(opt);
    if (name == "sample") return run_sample(opt);
    if (name == "ks") return run_ks(opt);
    if (name == "verify-appendix") return run_verify_appendix(opt);
    if (name == "verify-jack") return run_verify_jack(opt);
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << "error: bad JSON input: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
