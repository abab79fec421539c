// Command-line front end: evaluation, sampling, bound-verification suites,
// and convergence experiments with reproducible seeded output.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pnstein/experiments.hpp"
#include "pnstein/prodnormal.hpp"
#include "pnstein/rng.hpp"
#include "pnstein/stein2.hpp"
#include "pnstein/testfn.hpp"
#include "pnstein/zerobias.hpp"

using json = nlohmann::ordered_json;
using namespace pnstein;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

zerobias::BaseDist parse_dist(const std::string& s) {
  if (s == "rademacher") return zerobias::BaseDist::rademacher();
  if (s == "gaussian") return zerobias::BaseDist::gaussian(1.0);
  if (s == "uniform")  // the unit-variance member
    return zerobias::BaseDist::uniform(-std::sqrt(3.0), std::sqrt(3.0));
  if (s.rfind("gaussian:", 0) == 0)
    return zerobias::BaseDist::gaussian(std::stod(s.substr(9)));
  if (s.rfind("uniform:", 0) == 0) {
    const double a = std::stod(s.substr(8));
    return zerobias::BaseDist::uniform(-a, a);
  }
  if (s.rfind("atoms:", 0) == 0) {
    std::vector<zerobias::Atom> atoms;
    std::string rest = s.substr(6);
    std::size_t pos = 0;
    while (pos < rest.size()) {
      const std::size_t semi = rest.find(';', pos);
      const std::string pair =
          rest.substr(pos, semi == std::string::npos ? semi : semi - pos);
      const std::size_t comma = pair.find(',');
      if (comma == std::string::npos)
        throw CLI::ValidationError("dist", "atoms need value,prob pairs");
      atoms.push_back(
          {std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))});
      if (semi == std::string::npos) break;
      pos = semi + 1;
    }
    return zerobias::BaseDist::finite(std::move(atoms));
  }
  throw CLI::ValidationError(
      "dist", "unknown distribution '" + s +
                  "' (rademacher | gaussian[:s] | uniform[:a] | atoms:v,p;...)");
}

struct Output {
  std::string format = "json";
  std::string path;  // empty = stdout

  void write_text(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    f << text;
  }

  void emit(const json& envelope) const {
    if (format == "json") {
      write_text(envelope.dump(2) + "\n");
      return;
    }
    const auto& results = envelope.at("results");
    std::string text;
    if (format == "csv") {
      bool header = false;
      for (const auto& row : results) {
        if (!header) {
          bool first = true;
          for (auto it = row.begin(); it != row.end(); ++it) {
            if (!first) text += ",";
            first = false;
            text += it.key();
          }
          text += "\n";
          header = true;
        }
        bool first = true;
        for (auto it = row.begin(); it != row.end(); ++it) {
          if (!first) text += ",";
          first = false;
          if (it->is_number_float())
            text += fmt17(it->get<double>());
          else if (it->is_string())
            text += it->get<std::string>();
          else
            text += it->dump();
        }
        text += "\n";
      }
    } else {  // plain
      text += "command = " + envelope.at("command").get<std::string>() + "\n";
      text += "seed = " + std::to_string(envelope.at("seed").get<std::uint64_t>()) + "\n";
      for (const auto& row : results) {
        for (auto it = row.begin(); it != row.end(); ++it) {
          text += it.key() + " = ";
          if (it->is_number_float())
            text += fmt17(it->get<double>());
          else if (it->is_string())
            text += it->get<std::string>();
          else
            text += it->dump();
          text += "\n";
        }
      }
    }
    write_text(text);
  }
};

json envelope(const std::string& command, std::uint64_t seed) {
  json j;
  j["command"] = command;
  j["seed"] = seed;
  j["results"] = json::array();
  return j;
}

json bound_report_json(const stein2::BoundReport& rep) {
  json rows = json::array();
  for (const auto& l : rep.lines) {
    json r;
    r["id"] = l.id;
    r["lhs"] = l.lhs;
    r["rhs"] = l.rhs;
    r["margin"] = l.margin;
    r["worst_x"] = l.worst_x;
    r["holds"] = l.holds;
    rows.push_back(std::move(r));
  }
  return rows;
}

json experiment_report_json(const experiments::ExperimentReport& r,
                            bool timing) {
  json row;
  row["lhs_estimate"] = r.lhs_estimate;
  row["lhs_se"] = r.lhs_se;
  row["coupling_l1"] = r.coupling_l1;
  row["coupling_l1_se"] = r.coupling_l1_se;
  row["coupling_l2"] = r.coupling_l2;
  row["coupling_l2_se"] = r.coupling_l2_se;
  row["conditional_term"] = r.conditional_term;
  row["conditional_se"] = r.conditional_se;
  row["conditional_exact"] = r.conditional_exact;
  row["bound_value"] = r.bound_value;
  row["pass"] = r.pass;
  row["status"] = r.conclusive ? (r.pass ? "pass" : "fail") : "inconclusive";
  row["reps"] = r.reps;
  // wall-clock timing is opt-in so that repeated runs stay byte-identical
  if (timing) row["runtime_seconds"] = r.runtime_seconds;
  return row;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"product-normal laws, zero-bias transforms, and Stein-equation "
               "verification"};
  app.require_subcommand(1);
  // frees the short -h: the test-function flag is --h per the interface
  app.set_help_flag("--help", "print help");
  app.set_config("--config", "", "config file (key = value lines, # comments)");

  std::uint64_t seed = 12345;
  Output out;
  int threads = 1;
  app.add_option("--seed", seed, "root random seed")
      ->envname("PNSTEIN_SEED")
      ->capture_default_str();
  app.add_option("--format", out.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "plain"}))
      ->capture_default_str();
  app.add_option("--out", out.path, "output file (default stdout)");
  app.add_option("--threads", threads, "worker threads for experiments")
      ->check(CLI::PositiveNumber);

  // shared evaluation flags
  int pn_n = 2;
  double sigma = 1.0;
  std::vector<double> xs, ts;
  auto add_law_flags = [&](CLI::App* sub, bool with_x) {
    sub->add_option("--n", pn_n, "number of normal factors")
        ->check(CLI::Range(1, 4));
    sub->add_option("--sigma", sigma, "scale")->check(CLI::PositiveNumber);
    if (with_x) sub->add_option("--x", xs, "evaluation points")->required();
    sub->fallthrough();
  };

  auto* c_pdf = app.add_subcommand("pdf", "product-normal density");
  add_law_flags(c_pdf, true);
  auto* c_cdf = app.add_subcommand("cdf", "product-normal distribution function");
  add_law_flags(c_cdf, true);
  auto* c_cf = app.add_subcommand("cf", "product-normal characteristic function");
  add_law_flags(c_cf, false);
  c_cf->add_option("--t", ts, "frequencies")->required();

  auto* c_sample = app.add_subcommand("sample", "draw product-normal variates");
  std::int64_t count = 10;
  bool binary = false;
  add_law_flags(c_sample, false);
  c_sample->add_option("--count", count, "number of draws")
      ->check(CLI::PositiveNumber);
  c_sample->add_flag("--binary", binary,
                     "raw little-endian 64-bit reals instead of text");

  auto* c_expect = app.add_subcommand("expectation", "E h(Z) for a named h");
  std::string h_name = "cos";
  std::string method = "quadrature";
  std::int64_t draws = 1000000;
  add_law_flags(c_expect, false);
  c_expect->add_option("--h", h_name, "test function name");
  c_expect->add_option("--method", method, "evaluation method")
      ->check(CLI::IsMember({"quadrature", "mc"}));
  c_expect->add_option("--draws", draws, "MC draws")->check(CLI::PositiveNumber);

  auto* c_zb = app.add_subcommand("zerobias", "order-n zero-bias transform");
  std::string dist_str = "rademacher";
  std::string zb_op = "cdf";
  int order = 1;
  std::vector<double> ws;
  int mom_p = 2;
  bool absolute = false;
  int terms = 1;
  c_zb->add_option("--dist", dist_str, "base law");
  c_zb->add_option("--order", order, "transform order")->check(CLI::PositiveNumber);
  c_zb->add_option("--op", zb_op, "operation")
      ->check(CLI::IsMember({"cdf", "pdf", "moment", "sample", "coupling"}));
  c_zb->add_option("--w", ws, "evaluation points (cdf/pdf)");
  c_zb->add_option("--p", mom_p, "moment power");
  c_zb->add_flag("--absolute", absolute, "absolute moment");
  c_zb->add_option("--count", count, "draws (sample/coupling)");
  c_zb->add_option("--terms", terms,
                   "summands of the standardized sum being coupled")
      ->check(CLI::PositiveNumber);
  c_zb->fallthrough();

  auto* c_stein = app.add_subcommand("stein-solve",
                                     "bounded solution of the second-order "
                                     "Stein equation");
  int deriv = 0;
  c_stein->add_option("--sigma", sigma, "scale")->check(CLI::PositiveNumber);
  c_stein->add_option("--h", h_name, "test function name");
  c_stein->add_option("--x", xs, "evaluation points")->required();
  c_stein->add_option("--deriv", deriv, "also report this derivative order")
      ->check(CLI::Range(0, 4));
  c_stein->fallthrough();

  auto* c_verify = app.add_subcommand("verify-bounds", "bound suites");
  std::string suite;
  c_verify->add_option("--suite", suite, "which suite")
      ->check(CLI::IsMember({"thm", "arflem", "appendix-c"}))
      ->required();
  c_verify->add_option("--h", h_name, "test function name (thm/arflem)");
  c_verify->add_option("--sigma", sigma, "scale (thm/arflem)")
      ->check(CLI::PositiveNumber);
  c_verify->fallthrough();

  auto* c_exp = app.add_subcommand("experiment", "convergence experiments");
  std::string mode;
  int em = 64, en = 64;
  std::string dist_x = "rademacher", dist_y = "rademacher";
  std::int64_t reps = 100000;
  std::string trace_path;
  c_exp->add_option("mode", mode, "cor42 | cor43 | coupling")
      ->check(CLI::IsMember({"cor42", "cor43", "coupling"}))
      ->required();
  c_exp->add_option("--m", em, "summands in the first factor");
  c_exp->add_option("--n", en, "summands in the second factor");
  c_exp->add_option("--dist-x", dist_x, "first base law");
  c_exp->add_option("--dist-y", dist_y, "second base law");
  c_exp->add_option("--h", h_name, "test function name");
  c_exp->add_option("--reps", reps, "MC replications");
  c_exp->add_option("--trace", trace_path,
                    "CSV of per-replication rep,w,w_star,h_w");
  bool timing = false;
  c_exp->add_flag("--timing", timing,
                  "include wall-clock runtime (breaks byte-reproducibility)");
  c_exp->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_pdf || *c_cdf) {
      const bool is_pdf = static_cast<bool>(*c_pdf);
      json env = envelope(is_pdf ? "pdf" : "cdf", seed);
      prodnormal::PNParams params{pn_n, sigma};
      prodnormal::PdfEvalConfig cfg;
      for (double x : xs) {
        json row;
        row["x"] = x;
        row["value"] = is_pdf ? prodnormal::pdf(params, x, cfg)
                              : prodnormal::cdf(params, x, cfg);
        row["rel_tol"] = cfg.quad_tol;
        env["results"].push_back(std::move(row));
      }
      out.emit(env);
      return kExitOk;
    }
    if (*c_cf) {
      json env = envelope("cf", seed);
      prodnormal::PNParams params{pn_n, sigma};
      for (double t : ts) {
        json row;
        row["t"] = t;
        row["value"] = prodnormal::cf(params, t);
        row["rel_tol"] = 1e-10;
        env["results"].push_back(std::move(row));
      }
      out.emit(env);
      return kExitOk;
    }
    if (*c_sample) {
      prodnormal::PNParams params{pn_n, sigma};
      Rng rng(seed);
      const auto values = prodnormal::sample(params, rng, count);
      if (binary) {
        std::string raw(reinterpret_cast<const char*>(values.data()),
                        values.size() * sizeof(double));
        out.write_text(raw);
      } else if (out.format == "json") {
        json env = envelope("sample", seed);
        for (double v : values) {
          json row;
          row["value"] = v;
          env["results"].push_back(std::move(row));
        }
        out.emit(env);
      } else {
        // seed echoed as a comment so the stream stays one value per line
        std::string text = "# seed = " + std::to_string(seed) + "\n";
        for (double v : values) text += fmt17(v) + "\n";
        out.write_text(text);
      }
      return kExitOk;
    }
    if (*c_expect) {
      json env = envelope("expectation", seed);
      const auto& h = testfn::by_name(h_name);
      prodnormal::PNParams params{pn_n, sigma};
      prodnormal::PdfEvalConfig cfg;
      json row;
      row["h"] = h_name;
      if (method == "quadrature") {
        row["value"] = prodnormal::expectation(params, h.h,
                                               prodnormal::Method::quadrature, cfg);
        row["rel_tol"] = cfg.quad_tol;
      } else {
        Rng rng(seed);
        double se = 0.0;
        row["value"] =
            prodnormal::expectation(params, h.h, prodnormal::Method::monte_carlo,
                                    cfg, &rng, draws, &se);
        row["se"] = se;
      }
      env["results"].push_back(std::move(row));
      out.emit(env);
      return kExitOk;
    }
    if (*c_zb) {
      json env = envelope("zerobias", seed);
      const zerobias::ZeroBiasSpec spec{parse_dist(dist_str), order};
      if (zb_op == "cdf" || zb_op == "pdf") {
        if (ws.empty()) throw CLI::ValidationError("--w", "needs points");
        for (double w : ws) {
          json row;
          row["w"] = w;
          row["value"] = zb_op == "cdf" ? zerobias::zero_bias_cdf(spec, w)
                                        : zerobias::zero_bias_pdf(spec, w);
          row["rel_tol"] = 1e-8;
          env["results"].push_back(std::move(row));
        }
      } else if (zb_op == "moment") {
        json row;
        row["p"] = mom_p;
        row["absolute"] = absolute;
        row["value"] = zerobias::zero_bias_moment(spec, mom_p, absolute);
        row["rel_tol"] = 1e-14;
        env["results"].push_back(std::move(row));
      } else if (zb_op == "sample") {
        Rng rng(seed);
        for (std::int64_t i = 0; i < count; ++i) {
          json row;
          row["value"] = zerobias::zero_bias_n_sample(spec, rng);
          env["results"].push_back(std::move(row));
        }
      } else {  // coupling draws of a standardized sum: pairs (w, w_star)
        Rng rng(seed);
        const std::vector<zerobias::BaseDist> summands(
            terms,
            parse_dist(dist_str).scaled(1.0 / std::sqrt(static_cast<double>(terms))));
        for (std::int64_t i = 0; i < count; ++i) {
          const auto d = zerobias::sum_zero_bias_coupling(summands, rng);
          json row;
          row["w"] = d.w;
          row["w_star"] = d.w_star;
          env["results"].push_back(std::move(row));
        }
      }
      out.emit(env);
      return kExitOk;
    }
    if (*c_stein) {
      json env = envelope("stein-solve", seed);
      stein2::SteinSol2 sol(testfn::by_name(h_name), sigma);
      for (double x : xs) {
        json row;
        row["x"] = x;
        row["value"] = sol.value(x);
        if (deriv >= 1) row["deriv_" + std::to_string(deriv)] = sol.deriv(deriv, x);
        row["residual"] = sol.residual(x == 0.0 ? 1e-7 : x);
        env["results"].push_back(std::move(row));
      }
      out.emit(env);
      return kExitOk;
    }
    if (*c_verify) {
      json env = envelope("verify-bounds", seed);
      env["suite"] = suite;
      stein2::BoundReport rep;
      if (suite == "appendix-c") {
        rep = stein2::appendix_c_suite(stein2::appendix_c_grid());
      } else {
        const auto& h = testfn::by_name(h_name);
        const auto grid = stein2::default_grid(sigma);
        rep = suite == "thm" ? stein2::verify_thm_bounds(h, sigma, grid)
                             : stein2::verify_arflem(h, sigma, grid);
        env["h"] = h_name;
        env["sigma"] = sigma;
      }
      env["results"] = bound_report_json(rep);
      env["all_hold"] = rep.all_hold;
      out.emit(env);
      return rep.all_hold ? kExitOk : kExitViolation;
    }
    if (*c_exp) {
      json env = envelope("experiment", seed);
      env["mode"] = mode;
      experiments::ExperimentConfig cfg;
      cfg.m = em;
      cfg.n = en;
      cfg.base_x = parse_dist(dist_x);
      cfg.base_y = parse_dist(dist_y);
      cfg.h = testfn::by_name(h_name);
      cfg.reps = reps;
      cfg.seed = seed;
      cfg.threads = threads;
      std::ofstream trace;
      if (!trace_path.empty()) {
        trace.open(trace_path);
        if (!trace) throw std::runtime_error("cannot open trace file " + trace_path);
        trace << "rep,w,w_star,h_w\n";
        cfg.per_rep = [&trace](std::int64_t r, double w, double ws_, double hw) {
          trace << r << "," << fmt17(w) << "," << fmt17(ws_) << "," << fmt17(hw)
                << "\n";
        };
      }
      experiments::ExperimentReport rep;
      if (mode == "cor42")
        rep = experiments::run_corollary_4_2(cfg);
      else if (mode == "cor43")
        rep = experiments::run_corollary_4_3(cfg);
      else
        rep = experiments::estimate_coupling_terms(cfg);
      env["results"].push_back(experiment_report_json(rep, timing));
      out.emit(env);
      return (rep.conclusive && !rep.pass) ? kExitViolation : kExitOk;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
