// pslab: command-line front end. Every subcommand prints one JSON document on stdout.
// Exit codes: 0 success, 2 input error, 3 numerical non-convergence, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pslab/capacity.hpp"
#include "pslab/cyclicity.hpp"
#include "pslab/domains.hpp"
#include "pslab/errors.hpp"
#include "pslab/norms.hpp"
#include "pslab/oracle.hpp"
#include "pslab/parallel.hpp"
#include "pslab/parse.hpp"

using json = nlohmann::ordered_json;
using namespace pslab;

namespace {

// Non-finite values are written as null; callers add a "divergent" flag where it matters.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json complex_json(Complex z) { return json::array({num(z.real()), num(z.imag())}); }

json point_json(const std::vector<Complex>& z) {
  json a = json::array();
  for (const auto& c : z) a.push_back(complex_json(c));
  return a;
}

std::string fmt(double x) {
  if (!std::isfinite(x)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---- domain input -------------------------------------------------------------

long long to_integer(const json& v, const char* what) {
  if (!v.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
  return v.get<long long>();
}

// Exponent entries are integers or [numerator, denominator] pairs.
std::pair<long long, long long> rational(const json& v) {
  if (v.is_number_integer()) return {v.get<long long>(), 1};
  if (v.is_array() && v.size() == 2) {
    const long long p = to_integer(v[0], "numerator"), q = to_integer(v[1], "denominator");
    if (q <= 0) throw InputError("denominators must be positive");
    if (p < 0) throw InputError("face exponents must be nonnegative");
    const long long g = std::gcd(p, q);
    return {p / g, q / g};
  }
  throw InputError("face exponents must be integers or [numerator, denominator] pairs");
}

double number(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number()) throw InputError(std::string("domain field '") + key + "' must be a number");
  return doc[key].get<double>();
}

DomainSpec domain_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string())
    throw InputError("domain file needs a string field 'kind'");
  const std::string kind = doc["kind"];
  DomainSpec spec;
  if (kind == "polydisk") {
    spec = Polydisk{static_cast<std::size_t>(to_integer(doc.value("n", json()), "n"))};
  } else if (kind == "ball") {
    spec = Ellipsoid{std::vector<double>(static_cast<std::size_t>(to_integer(doc.value("n", json()), "n")), 1.0)};
  } else if (kind == "ellipsoid") {
    if (!doc.contains("p") || !doc["p"].is_array()) throw InputError("ellipsoid needs an array 'p'");
    std::vector<double> p;
    for (const auto& v : doc["p"]) {
      if (!v.is_number()) throw InputError("ellipsoid exponents must be numbers");
      p.push_back(v.get<double>());
    }
    spec = Ellipsoid{p};
  } else if (kind == "omega-lambda") {
    spec = omega_lambda(static_cast<int>(to_integer(doc.value("m", json()), "m")),
                        static_cast<int>(to_integer(doc.value("n", json()), "n")), number(doc, "lambda"));
  } else if (kind == "polyhedral") {
    const auto n = static_cast<std::size_t>(to_integer(doc.value("n", json()), "n"));
    const bool normalize = doc.value("normalize", false);
    if (!doc.contains("faces") || !doc["faces"].is_array()) throw InputError("polyhedral domain needs an array 'faces'");
    PolyhedralReinhardt d{n, {}};
    for (const auto& f : doc["faces"]) {
      if (!f.contains("beta") || !f["beta"].is_array() || f["beta"].size() != n)
        throw InputError("each face needs 'beta' with n entries");
      const double lambda = f.contains("lambda") ? number(f, "lambda") : 1.0;
      Eigen::VectorXd beta(static_cast<Eigen::Index>(n));
      // Exact row sum as a reduced fraction.
      long long sp = 0, sq = 1;
      for (std::size_t i = 0; i < n; ++i) {
        const auto [p, q] = rational(f["beta"][i]);
        beta[static_cast<Eigen::Index>(i)] = static_cast<double>(p) / static_cast<double>(q);
        const long long l = std::lcm(sq, q);
        sp = sp * (l / sq) + p * (l / q);
        sq = l;
        const long long g = std::gcd(sp, sq);
        if (g > 1) sp /= g, sq /= g;
      }
      if (normalize) {
        d.faces.push_back(normalized_face(lambda, beta));
      } else {
        if (sp != sq) throw InputError("face exponent row must sum to exactly 1 (set \"normalize\": true to rescale)");
        d.faces.push_back(Face{lambda, beta});
      }
    }
    spec = d;
  } else {
    throw InputError("unknown domain kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

DomainSpec load_domain(const std::string& inline_spec, const std::string& file) {
  if (!inline_spec.empty() && !file.empty()) throw InputError("give either --domain or --domain-file, not both");
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw InputError("cannot open domain file " + file);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw InputError(std::string("domain file is not valid JSON: ") + e.what());
    }
    return domain_from_json(doc);
  }
  if (inline_spec.empty()) throw InputError("a domain is required (--domain or --domain-file)");
  return parse_domain(inline_spec);
}

json domain_json(const DomainSpec& spec) {
  json d;
  d["kind"] = kind_name(spec);
  d["dimension"] = dimension(spec);
  if (const auto* e = std::get_if<Ellipsoid>(&spec)) {
    d["p"] = e->p;
  } else if (const auto* p = std::get_if<PolyhedralReinhardt>(&spec)) {
    json faces = json::array();
    for (const auto& f : p->faces) {
      std::vector<double> b(f.beta.data(), f.beta.data() + f.beta.size());
      faces.push_back({{"lambda", f.lambda}, {"beta", b}});
    }
    d["faces"] = faces;
    json tori = json::array();
    for (const auto& t : vertex_tori(*p)) {
      std::vector<double> r(t.radii.data(), t.radii.data() + t.radii.size());
      tori.push_back({{"radii", r}, {"weight", t.weight}, {"faces", t.faces}});
    }
    d["vertex_tori"] = tori;
  }
  return d;
}

json energy_json(const EnergyResult& e) {
  return {{"value", num(e.value)},         {"divergent", e.divergent},
          {"partial_sum", num(e.partial)}, {"tail", num(e.tail)},
          {"remainder_bound", num(e.remainder_bound)}, {"decay_exponent", num(e.decay_exponent)},
          {"degrees", e.degrees}};
}

json measure_json(const MeasureSpec& mu) {
  json out = json::array();
  for (const auto& c : mu.components) {
    json coords = json::array();
    for (const auto& s : c.coords) {
      if (s.kind == CoordinateSupport::Kind::Fixed) coords.push_back({{"fix", complex_json(s.point)}});
      else coords.push_back({{"circle", s.radius}});
    }
    out.push_back({{"weight", c.weight}, {"coords", coords}});
  }
  return out;
}

json quotient_json(const QuotientNorm& q) {
  return {{"r", q.r},
          {"cap", q.cap},
          {"value", num(q.value)},
          {"tail_fraction", num(q.tail_fraction)},
          {"converged", q.converged},
          {"flagged", q.flagged},
          {"collapsed", q.collapsed}};
}

json sweep_json(const SweepReport& rep) {
  json pts = json::array();
  for (const auto& q : rep.sweep.points) pts.push_back(quotient_json(q));
  const FitResult& f = rep.fit;
  return {{"collapsed", rep.sweep.collapsed},
          {"points", pts},
          {"fit",
           {{"exponent", num(f.exponent)},
            {"raw_slope", num(f.raw_slope)},
            {"intercept", num(f.intercept)},
            {"residual", num(f.residual)},
            {"points_used", f.points_used},
            {"plateau", f.plateau},
            {"reliable", f.reliable},
            {"bounded_evidence", f.bounded_evidence}}}};
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write CSV file " + path);
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) return default_r_grid();
  if (text.rfind("dyadic:", 0) == 0) {
    const std::vector<double> k = parse_reals(text.substr(7));
    if (k.size() != 1 || k[0] != std::floor(k[0]) || k[0] < 1 || k[0] > 40)
      throw InputError("dyadic grid takes one integer in [1, 40]");
    return default_r_grid(static_cast<int>(k[0]));
  }
  return parse_reals(text);
}

// Boundary samples in log coordinates: "x1,y1;x2,y2;...".
std::vector<Eigen::VectorXd> parse_log_samples(const std::string& text) {
  std::vector<Eigen::VectorXd> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    const std::vector<double> v = parse_reals(text.substr(start, end - start));
    out.emplace_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    start = end + 1;
  }
  return out;
}

// ---- shared flags ---------------------------------------------------------------

struct Common {
  std::string domain, domain_file, csv;
  double beta = 0.0;
};

void add_domain(CLI::App* cmd, Common& c) {
  cmd->add_option("--domain", c.domain, "polydisk:N | ball:N | ellipsoid:p1,..,pn | omega-lambda:m,n,lambda");
  cmd->add_option("--domain-file", c.domain_file, "JSON domain document with a \"kind\" field");
}

void emit(const json& doc) { std::cout << doc.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Norms, dilation sweeps, energies and capacity bounds in Dirichlet-type spaces on Reinhardt domains"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: PSLAB_THREADS, else all logical cores)")
      ->check(CLI::NonNegativeNumber);

  Common c;
  std::string poly_text, measure_text, point_text, grid_text, betas_text = "0,1,2", gamma_text = "1,1", kind = "sphere";
  std::string radii_text, exps_text, samples_text;
  int cap = 0, max_degree = 2, jmax = 2000, generic_cap = 1024, grid_density = 24, k_faces = 4;
  std::size_t degrees = 0, samples = 1000000;
  std::uint64_t seed = 1;
  double p_exp = 2.0, r_val = 0.5, alpha = 0.0, c_rate = 1.0;
  std::string lambdas_text = "50,200,500";
  bool prefactor = false, force_generic = false;

  auto* norm = app.add_subcommand("norm", "squared norm of a polynomial");
  add_domain(norm, c);
  norm->add_option("--beta", c.beta)->required();
  norm->add_option("--poly", poly_text)->required();
  norm->add_flag("--prefactor", prefactor, "multiply ellipsoid norms by n^{-beta}");

  auto* mono = app.add_subcommand("monomial-norms", "table of squared monomial norms");
  add_domain(mono, c);
  mono->add_option("--beta", c.beta)->required();
  mono->add_option("--max-degree", max_degree)->check(CLI::Range(0, 400));
  mono->add_option("--csv", c.csv, "CSV with header l1..ln,degree,norm_sq");
  mono->add_flag("--prefactor", prefactor, "multiply ellipsoid norms by n^{-beta}");

  auto* sweep = app.add_subcommand("dilation-sweep", "||f/f_r||^2 over an r-grid with a growth fit");
  add_domain(sweep, c);
  sweep->add_option("--beta", c.beta)->required();
  sweep->add_option("--poly", poly_text)->required();
  sweep->add_option("--r-grid", grid_text, "comma list of radii or dyadic:K for 1-2^-k, k<=K");
  sweep->add_option("--cap", cap, "fixed truncation degree (default: schedule)")->check(CLI::NonNegativeNumber);
  sweep->add_option("--max-generic-cap", generic_cap)->check(CLI::PositiveNumber);
  sweep->add_flag("--generic", force_generic, "always use series inversion");
  sweep->add_option("--csv", c.csv, "CSV with header r,cap,value,tail_fraction,converged,collapsed");

  auto* energy_cmd = app.add_subcommand("energy", "energy of a product-torus measure");
  add_domain(energy_cmd, c);
  energy_cmd->add_option("--beta", c.beta)->required();
  energy_cmd->add_option("--measure", measure_text)->required();
  energy_cmd->add_option("--degrees", degrees, "number of total degrees summed explicitly");

  auto* capb = app.add_subcommand("capacity-bound", "capacity lower bound 1/energy");
  add_domain(capb, c);
  capb->add_option("--beta", c.beta)->required();
  capb->add_option("--measure", measure_text)->required();

  auto* pe = app.add_subcommand("pointeval-bound", "squared norm of point evaluation");
  add_domain(pe, c);
  pe->add_option("--beta", c.beta)->required();
  pe->add_option("--point", point_text)->required();
  pe->add_option("--degrees", degrees);

  auto* sb = app.add_subcommand("s-bound", "running maximum of the Gamma-binomial sums S(j)");
  sb->add_option("--p", p_exp)->required();
  sb->add_option("--r", r_val)->required();
  sb->add_option("--jmax", jmax)->check(CLI::Range(9, 1000000));
  sb->add_option("--csv", c.csv, "CSV with header j,S");

  auto* lv = app.add_subcommand("laplace-verify", "Laplace asymptote versus quadrature");
  lv->add_option("--r", r_val)->required();
  lv->add_option("--lambdas", lambdas_text);

  auto* pse = app.add_subcommand("pse-check", "norm-ratio identities across indices");
  add_domain(pse, c);
  pse->add_option("--betas", betas_text);
  pse->add_option("--max-degree", max_degree)->check(CLI::Range(0, 400));

  auto* orc = app.add_subcommand("oracle", "Monte Carlo and quadrature reference values");
  orc->add_option("--kind", kind)->check(CLI::IsMember({"sphere", "ball", "radial", "torus"}));
  orc->add_option("--gamma", gamma_text);
  orc->add_option("--samples", samples);
  orc->add_option("--seed", seed);
  orc->add_option("--alpha", alpha);
  orc->add_option("--c", c_rate);
  orc->add_option("--radii", radii_text);
  orc->add_option("--exponents", exps_text);

  auto* ar = app.add_subcommand("approx-reinhardt", "polyhedral approximation from boundary samples");
  ar->add_option("--log-samples", samples_text, "log-coordinate samples x1,..,xn;...")->required();
  ar->add_option("--k", k_faces)->check(CLI::NonNegativeNumber);

  auto* verdict = app.add_subcommand("verdict", "graded cyclicity verdict");
  add_domain(verdict, c);
  verdict->add_option("--beta", c.beta)->required();
  verdict->add_option("--poly", poly_text)->required();
  verdict->add_option("--zero", point_text, "known boundary zero, comma-separated complex coordinates");
  verdict->add_option("--r-grid", grid_text);
  verdict->add_option("--grid-density", grid_density)->check(CLI::Range(2, 200));
  verdict->add_option("--max-generic-cap", generic_cap)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (threads > 0) set_thread_count(threads);
    json out;
    auto* cmd = app.get_subcommands().front();
    out["command"] = cmd->get_name();

    if (cmd == norm) {
      const DomainSpec spec = load_domain(c.domain, c.domain_file);
      const SparsePoly f = parse_poly(poly_text, dimension(spec));
      const MonomialNorm norms(spec, NormOptions{prefactor});
      const double v = function_norm_sq(f, norms, c.beta);
      out["domain"] = domain_json(spec);
      out["beta"] = c.beta;
      out["poly"] = poly_text;
      out["norm_sq"] = num(v);
      out["norm"] = num(std::sqrt(v));
    } else if (cmd == mono) {
      const DomainSpec spec = load_domain(c.domain, c.domain_file);
      const MonomialNorm norms(spec, NormOptions{prefactor});
      const std::size_t n = norms.dimension();
      json rows = json::array();
      std::optional<std::ofstream> csv;
      if (!c.csv.empty()) {
        csv = open_csv(c.csv);
        for (std::size_t i = 0; i < n; ++i) *csv << 'l' << i + 1 << ',';
        *csv << "degree,norm_sq\n";
      }
      GradedLayout(n, max_degree).for_each([&](std::size_t, std::span<const int> L) {
        const double v = norms.norm_sq(L, c.beta);
        int d = 0;
        for (int l : L) d += l;
        rows.push_back({{"exponents", std::vector<int>(L.begin(), L.end())}, {"degree", d}, {"norm_sq", num(v)}});
        if (csv) {
          for (int l : L) *csv << l << ',';
          *csv << d << ',' << fmt(v) << '\n';
        }
      });
      out["domain"] = domain_json(spec);
      out["beta"] = c.beta;
      out["max_degree"] = max_degree;
      out["norms"] = rows;
    } else if (cmd == sweep) {
      const DomainSpec spec = load_domain(c.domain, c.domain_file);
      const SparsePoly f = parse_poly(poly_text, dimension(spec));
      SweepOptions opt;
      opt.r_grid = parse_grid(grid_text);
      opt.fixed_cap = cap;
      opt.max_generic_cap = generic_cap;
      opt.allow_collapsed = !force_generic;
      const SweepReport rep = dilation_sweep(f, spec, c.beta, opt);
      if (!c.csv.empty()) {
        auto csv = open_csv(c.csv);
        csv << "r,cap,value,tail_fraction,converged,collapsed\n";
        for (const auto& q : rep.sweep.points)
          csv << fmt(q.r) << ',' << q.cap << ',' << fmt(q.value) << ',' << fmt(q.tail_fraction) << ','
              << (q.converged ? 1 : 0) << ',' << (q.collapsed ? 1 : 0) << '\n';
      }
      out["domain"] = domain_json(spec);
      out["beta"] = c.beta;
      out["poly"] = poly_text;
      out["sweep"] = sweep_json(rep);
    } else if (cmd == energy_cmd || cmd == capb) {
      const DomainSpec spec = load_domain(c.domain, c.domain_file);
      const MeasureSpec mu = parse_measure(measure_text);
      const EnergyResult e = energy(mu, spec, c.beta, cmd == energy_cmd ? degrees : 0);
      out["domain"] = domain_json(spec);
      out["beta"] = c.beta;
      out["measure"] = measure_json(mu);
      out["energy"] = energy_json(e);
      out["divergent"] = e.divergent;
      if (cmd == capb) {
        out["capacity_lower_bound"] = e.divergent ? 0.0 : 1.0 / e.value;
        out["certifies_positive_capacity"] = !e.divergent;
      }
    } else if (cmd == pe) {
      const DomainSpec spec = load_domain(c.domain, c.domain_file);
      const std::vector<Complex> z = parse_point(point_text);
      const EnergyResult e = pointeval_bound(spec, c.beta, z, degrees);
      out["domain"] = domain_json(spec);
      out["beta"] = c.beta;
      out["point"] = point_json(z);
      out["kernel_diagonal"] = energy_json(e);
      out["divergent"] = e.divergent;
      out["bounded"] = !e.divergent;
    } else if (cmd == sb) {
      const SBoundReport rep = s_bound_check(p_exp, r_val, jmax);
      if (!c.csv.empty()) {
        auto csv = open_csv(c.csv);
        csv << "j,S\n";
        for (std::size_t j = 0; j < rep.values.size(); ++j) csv << j << ',' << fmt(rep.values[j]) << '\n';
      }
      out["p"] = p_exp;
      out["r"] = r_val;
      out["jmax"] = jmax;
      out["max"] = num(rep.max);
      out["argmax"] = rep.argmax;
      out["first_decile_max"] = num(rep.first_decile_max);
      out["last_decile_max"] = num(rep.last_decile_max);
    } else if (cmd == lv) {
      const std::vector<double> lambdas = parse_reals(lambdas_text);
      json rows = json::array();
      for (const auto& l : laplace_verify(r_val, lambdas))
        rows.push_back({{"lambda", l.lambda}, {"integral", num(l.integral)}, {"asymptote", num(l.asymptote)},
                        {"ratio", num(l.ratio)}});
      out["r"] = r_val;
      out["ratios"] = rows;
    } else if (cmd == pse) {
      const DomainSpec spec = load_domain(c.domain, c.domain_file);
      const std::vector<double> betas = parse_reals(betas_text);
      const PseReport rep = pse_check(spec, betas, max_degree);
      out["domain"] = domain_json(spec);
      out["betas"] = betas;
      out["max_degree"] = max_degree;
      out["exact_case"] = rep.exact_case;
      out["max_identity_error"] = num(rep.max_identity_error);
      out["degree_ratio"] = {num(rep.min_degree_ratio), num(rep.max_degree_ratio)};
      out["double_ratio"] = {num(rep.min_double_ratio), num(rep.max_double_ratio)};
      out["comparability_constant"] = num(rep.comparability_constant);
      out["bounded"] = rep.bounded;
    } else if (cmd == orc) {
      out["kind"] = kind;
      if (kind == "sphere" || kind == "ball") {
        const std::vector<double> gamma = parse_reals(gamma_text);
        const McEstimate m = kind == "sphere" ? mc_sphere_moment(gamma, samples, seed) : mc_ball_moment(gamma, samples, seed);
        out["gamma"] = gamma;
        out["samples"] = m.samples;
        out["seed"] = seed;
        out["estimate"] = num(m.estimate);
        out["std_error"] = num(m.std_error);
        out["closed_form"] = num(m.closed_form);
        out["z_score"] = num(m.z_score());
      } else if (kind == "radial") {
        const QuadratureResult q = radial_weight_quadrature(alpha, c_rate);
        out["alpha"] = alpha;
        out["c"] = c_rate;
        out["value"] = num(q.value);
        out["error_estimate"] = num(q.error_estimate);
        out["closed_form"] = num(q.closed_form);
      } else {
        const std::vector<double> radii = parse_reals(radii_text);
        std::vector<int> L;
        for (double x : parse_reals(exps_text)) {
          if (x < 0 || x != std::floor(x)) throw InputError("exponents must be nonnegative integers");
          L.push_back(static_cast<int>(x));
        }
        out["radii"] = radii;
        out["exponents"] = L;
        out["value"] = num(torus_moment(radii, MultiIndex(L)));
      }
    } else if (cmd == ar) {
      const auto pts = parse_log_samples(samples_text);
      const ReinhardtApproximation res = approximate_reinhardt(pts, k_faces);
      out["domain"] = domain_json(res.domain);
      out["used_samples"] = res.used_samples;
      out["warnings"] = res.warnings;
    } else if (cmd == verdict) {
      const DomainSpec spec = load_domain(c.domain, c.domain_file);
      const SparsePoly f = parse_poly(poly_text, dimension(spec));
      Budget budget;
      budget.grid_density = grid_density;
      budget.sweep.r_grid = parse_grid(grid_text);
      budget.sweep.max_generic_cap = generic_cap;
      if (!point_text.empty()) budget.boundary_zero = parse_point(point_text);
      const Verdict v = cyclicity_verdict(f, spec, c.beta, budget);
      out["domain"] = domain_json(spec);
      out["beta"] = c.beta;
      out["poly"] = poly_text;
      out["verdict"] = verdict_label(v.kind);
      out["detail"] = v.detail;
      if (v.witness)
        out["witness"] = {{"point", point_json(v.witness->point)},
                          {"residual", num(v.witness->residual)},
                          {"defining_value", num(v.witness->defining)}};
      if (v.measure) out["measure"] = measure_json(*v.measure);
      if (v.energy) out["energy"] = energy_json(*v.energy);
      if (v.sweep) out["sweep"] = sweep_json(*v.sweep);
    }
    emit(out);
    return 0;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
