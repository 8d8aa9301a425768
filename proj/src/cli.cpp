#include "canonlab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "canonlab/error.hpp"
#include "canonlab/hilbert.hpp"
#include "canonlab/io.hpp"
#include "canonlab/krivine.hpp"
#include "canonlab/lp_canon.hpp"
#include "canonlab/oracle.hpp"
#include "canonlab/rv_canon.hpp"
#include "canonlab/ultra.hpp"

namespace canonlab {

namespace {

struct Run {
  std::vector<std::string> args;
  std::string inputs;  // bytes of every input file, in read order
  Json outputs = Json::object();
  Json checks = Json::object();
  int code = kExitOk;

  Json read(const std::string& path) {
    const std::string text = read_text(path);
    inputs += text;
    inputs.push_back('\0');
    return parse_json(text, "'" + path + "'");
  }
};

std::vector<double> element_values(const LatticeElement& f) { return {f.values().begin(), f.values().end()}; }

std::uint64_t seed_from(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("CANONLAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidInput(std::string("CANONLAB_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return 0;
}

/// "1/m" or a decimal in (0, 1]; returns m.
std::size_t parse_eps(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos && text.substr(0, slash) == "1") {
    const long m = std::stol(text.substr(slash + 1));
    if (m >= 1) return static_cast<std::size_t>(m);
  } else {
    const double e = std::stod(text);
    if (e > 0.0 && e <= 1.0) {
      const double m = std::round(1.0 / e);
      if (std::abs(m * e - 1.0) <= kTolerance) return static_cast<std::size_t>(m);
    }
  }
  throw InvalidInput("--eps must be of the form 1/m, got '" + text + "'");
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidInput("bad coordinate '" + item + "' in point");
    }
  }
  return out;
}

SubStructure blocks_from(const Json& doc, std::size_t atoms) {
  if (!doc.contains("blocks")) return SubStructure::trivial(atoms);
  if (!doc["blocks"].is_array()) throw ParseError("expected an array of blocks", "/blocks");
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t b = 0; b < doc["blocks"].size(); ++b) {
    const Json& blk = doc["blocks"][b];
    if (!blk.is_array()) throw ParseError("expected an array of atom indices", "/blocks/" + std::to_string(b));
    blocks.emplace_back();
    for (std::size_t i = 0; i < blk.size(); ++i) {
      if (!blk[i].is_number_unsigned())
        throw ParseError("expected an atom index", "/blocks/" + std::to_string(b) + "/" + std::to_string(i));
      blocks.back().push_back(blk[i].get<std::size_t>());
    }
  }
  return SubStructure(std::move(blocks));
}

std::vector<RVElement> rv_list(const Json& doc, const std::string& key, const SpacePtr& sp) {
  const std::string ptr = "/" + key;
  if (!doc.contains(key) || !doc[key].is_array()) throw ParseError("expected an array of value lists", ptr);
  std::vector<RVElement> out;
  for (std::size_t i = 0; i < doc[key].size(); ++i) {
    const auto v = number_array(doc, ptr + "/" + std::to_string(i));
    if (v.size() != sp->size())
      throw ParseError("expected " + std::to_string(sp->size()) + " values", ptr + "/" + std::to_string(i));
    out.emplace_back(sp, v);
  }
  return out;
}

std::vector<Eigen::VectorXd> vector_list(const Json& doc, const std::string& key) {
  const std::string ptr = "/" + key;
  if (!doc.contains(key) || !doc[key].is_array()) throw ParseError("expected an array of vectors", ptr);
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < doc[key].size(); ++i) {
    const auto v = number_array(doc, ptr + "/" + std::to_string(i));
    out.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return out;
}

Json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"canonlab: canonical bases over discretized measure spaces", "canonlab"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed_flag;
  app.add_option("--seed", seed_flag, "seed for randomized work (default 0, or $CANONLAB_SEED)");

  Run run;
  run.args = args;
  std::function<void()> action;

  // lp-cb
  std::string space_path, element_path, out_path, curve_path;
  double p = 1.0;
  std::size_t grid_n = 0;
  bool intervals = false;
  auto* lp = app.add_subcommand("lp-cb", "canonical base of a 1-type over E");
  lp->add_option("--space", space_path, "space document")->required();
  lp->add_option("--element", element_path, "element document")->required();
  lp->add_option("--p", p, "exponent p >= 1");
  lp->add_option("--grid", grid_n, "grid size n: D = {k/n} (default fiber_cells)");
  lp->add_flag("--intervals", intervals, "emit E_[t,s] instead of E_t");
  lp->add_option("--out", out_path, "write the base as JSON");
  lp->add_option("--curve", curve_path, "write the E_t curve as CSV");
  lp->callback([&] {
    action = [&] {
      const ExtensionPair pair = space_from_json(run.read(space_path));
      const LatticeElement f = element_from_json(run.read(element_path), pair);
      const std::size_t n = grid_n ? grid_n : pair.fiber_cells();
      const LpCanonicalBase cb = canonical_base_1type(f, pair, p, uniform_grid(n), intervals);
      run.outputs = base_to_json(cb);
      if (!intervals) {
        run.checks["e0_is_zero"] = approx_equal(cb.values.front(), LatticeElement::zero(pair.base_space()));
        run.checks["e1_is_cond_exp"] = approx_equal(cb.values.back(), pair.fiber_mean(f));
        if (n == pair.fiber_cells()) {
          const auto rec = reconstruct_sorted(cb, n);
          const SliceFamily s = slices(f, pair);
          bool ok = true;
          for (std::size_t w = 0; w < rec.size(); ++w)
            for (std::size_t j = 0; j < n; ++j) ok = ok && std::abs(rec[w][j] - s.sorted[w][j]) <= kTolerance;
          run.checks["reconstructs_sorted_fibers"] = ok;
        }
        if (!curve_path.empty()) emit_curve(cb, curve_path);
      } else if (!curve_path.empty()) {
        throw InvalidInput("--curve needs the partial family (drop --intervals)");
      }
      if (!out_path.empty()) {
        std::ofstream o(out_path);
        if (!o) throw InvalidInput("cannot write '" + out_path + "'");
        o << run.outputs.dump(2) << "\n";
      }
    };
  });

  // rv-cb
  std::string rv_space, rv_elements;
  unsigned k_max = 2;
  auto* rv = app.add_subcommand("rv-cb", "conditional moments E[X^k|M] of [0,1]-valued variables");
  rv->add_option("--space", rv_space, "probability space {weights, blocks}")->required();
  rv->add_option("--elements", rv_elements, "variables {elements: [[...]]}")->required();
  rv->add_option("--k-max", k_max, "largest exponent per variable");
  rv->callback([&] {
    action = [&] {
      const Json sdoc = run.read(rv_space);
      const SpacePtr sp = make_space(number_array(sdoc, "/weights"));
      if (std::abs(sp->total() - 1.0) > kTolerance) throw InvalidInput("probability space must have total mass 1");
      const SubStructure s = blocks_from(sdoc, sp->size());
      const std::vector<RVElement> xs = rv_list(run.read(rv_elements), "elements", sp);
      if (xs.empty()) throw InvalidInput("no variables given");
      double count = 1.0;
      for (std::size_t i = 0; i < xs.size(); ++i) count *= k_max + 1.0;
      if (count > 1e5) throw InvalidInput("moment box too large");
      std::vector<unsigned> k(xs.size(), 0);
      Json moments = Json::array();
      bool in_range = true;
      for (;;) {
        const RVElement m = cond_moment(xs, k, s);
        for (std::size_t a = 0; a < m.size(); ++a) in_range = in_range && m[a] >= 0.0 && m[a] <= 1.0;
        moments.push_back({{"k", k}, {"values", element_values(m.element())}});
        std::size_t d = 0;
        while (d < k.size() && ++k[d] > k_max) k[d++] = 0;
        if (d == k.size()) break;
      }
      run.outputs["moments"] = moments;
      run.checks["values_in_unit_interval"] = in_range;
    };
  });

  // apr-cb
  std::string events_path;
  auto* apr = app.add_subcommand("apr-cb", "conditional probabilities of all meets of events");
  apr->add_option("--events", events_path, "{weights, blocks, events: [[0/1...]]}")->required();
  apr->callback([&] {
    action = [&] {
      const Json doc = run.read(events_path);
      const SpacePtr sp = make_space(number_array(doc, "/weights"));
      if (std::abs(sp->total() - 1.0) > kTolerance) throw InvalidInput("probability space must have total mass 1");
      const SubStructure s = blocks_from(doc, sp->size());
      const auto events = rv_list(doc, "events", sp);
      const auto entries = apr_cb(events, s);
      Json list = Json::array();
      bool bounded = true;
      for (const auto& e : entries) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < events.size(); ++i)
          if (e.subset & (1u << i)) members.push_back(i);
        for (const auto& other : entries)
          if ((other.subset & e.subset) == other.subset)
            for (std::size_t a = 0; a < sp->size(); ++a)
              bounded = bounded && e.probability[a] <= other.probability[a] + kTolerance;
        list.push_back({{"subset", members}, {"values", element_values(e.probability.element())}});
      }
      run.outputs["entries"] = list;
      run.checks["meets_bounded_by_sub_meets"] = bounded;
    };
  });

  // hs-cb
  std::string vectors_path, subspace_path;
  auto* hs = app.add_subcommand("hs-cb", "projections and Gram matrix over a subspace");
  hs->add_option("--vectors", vectors_path, "{vectors: [[...]]}")->required();
  hs->add_option("--subspace", subspace_path, "{basis: [[...]]} orthonormal, or {span: [[...]]}")->required();
  hs->callback([&] {
    action = [&] {
      const auto vs = vector_list(run.read(vectors_path), "vectors");
      if (vs.empty()) throw InvalidInput("no vectors given");
      const Json edoc = run.read(subspace_path);
      const auto dim = static_cast<std::size_t>(vs.front().size());
      const Subspace e = edoc.contains("span") ? Subspace::span(dim, vector_list(edoc, "span"))
                                               : Subspace(dim, vector_list(edoc, "basis"));
      const HilbertBase cb = hs_cb(vs, e);
      Json proj = Json::array(), gram = Json::array();
      bool orth = true;
      for (std::size_t i = 0; i < vs.size(); ++i) {
        proj.push_back(vec_json(cb.projections[i]));
        for (const auto& b : e.basis()) orth = orth && std::abs((vs[i] - cb.projections[i]).dot(b)) <= kTolerance;
        gram.push_back(vec_json(cb.gram.row(static_cast<Eigen::Index>(i)).transpose()));
      }
      run.outputs["projections"] = proj;
      run.outputs["gram"] = gram;
      run.checks["residuals_orthogonal"] = orth;
    };
  });

  // typeq
  std::string a_path, b_path;
  bool absolute = false;
  double tp = 1.0;
  auto* tq = app.add_subcommand("typeq", "compare types over E (exit 3 when unequal)");
  tq->add_option("--space", space_path, "space document")->required();
  tq->add_option("--a", a_path, "element or tuple document")->required();
  tq->add_option("--b", b_path, "element or tuple document")->required();
  tq->add_option("--p", tp, "exponent p >= 1");
  tq->add_flag("--absolute", absolute, "compare parameter-free types");
  tq->callback([&] {
    action = [&] {
      const ExtensionPair pair = space_from_json(run.read(space_path));
      run.inputs += read_text(a_path) + '\0' + read_text(b_path) + '\0';
      const auto fa = load_tuple(a_path, pair), fb = load_tuple(b_path, pair);
      if (fa.size() != fb.size()) throw InvalidInput("tuples of different length");
      bool equal = false;
      if (absolute) equal = absolute_type_equal(fa, fb, tp);
      else if (fa.size() == 1) equal = type_equal_1(fa[0], fb[0], pair, tp);
      else equal = type_equal_n(fa, fb, pair, tp);
      run.outputs["equal"] = equal;
      run.outputs["mode"] = absolute ? "absolute" : (fa.size() == 1 ? "1-type" : "n-type");
      if (!equal) run.code = kExitUnequal;
    };
  });

  // legendre
  std::string fn_path;
  std::optional<double> at_x, at_t;
  auto* lg = app.add_subcommand("legendre", "exact conjugate of a PL convex function");
  lg->add_option("--fn", fn_path, "{lower, upper, breakpoints, slopes, anchor}")->required();
  lg->add_option("--x", at_x, "point for the attainment check");
  lg->add_option("--t", at_t, "slope for the attainment check");
  lg->callback([&] {
    action = [&] {
      const PLConvexFn phi = pl_from_json(run.read(fn_path));
      const PLConvexFn star = conjugate(phi);
      run.outputs["input"] = pl_to_json(phi);
      run.outputs["conjugate"] = pl_to_json(star);
      run.checks["biconjugate_equals_input"] = approx_equal(biconjugate(phi), phi);
      if (at_x.has_value() != at_t.has_value()) throw InvalidInput("--x and --t go together");
      if (at_x) {
        const Attainment a = attainment_check(phi, *at_x, *at_t);
        run.outputs["attainment"] = {{"equality", a.equality},
                                     {"conjugate_subgradient", a.conjugate_subgradient},
                                     {"subgradient", a.subgradient}};
        run.checks["attainment_consistent"] = a.consistent();
      }
    };
  });

  // krivine
  std::string term_text, point_text, fn_name;
  std::size_t arity = 0, grid = 10000, max_pieces = 400;
  double eps = 0.05;
  auto* kv = app.add_subcommand("krivine", "lattice terms: eval, sup, approx");
  kv->require_subcommand(1);
  auto* kv_eval = kv->add_subcommand("eval", "evaluate a term at a point");
  kv_eval->add_option("--term", term_text)->required();
  kv_eval->add_option("--point", point_text, "comma-separated coordinates")->required();
  kv_eval->callback([&] {
    action = [&] {
      const auto x = parse_point(point_text);
      const LatticeTerm t = parse_term(term_text, x.size());
      run.outputs["term"] = t.to_string();
      run.outputs["value"] = eval_scalar(t, x);
    };
  });
  auto* kv_sup = kv->add_subcommand("sup", "sup of |t| over [-1,1]^n");
  kv_sup->add_option("--term", term_text)->required();
  kv_sup->add_option("--arity", arity)->required();
  kv_sup->callback([&] {
    action = [&] {
      const LatticeTerm t = parse_term(term_text, arity);
      run.outputs["term"] = t.to_string();
      run.outputs["sup_norm"] = term_sup_norm(t);
      run.outputs["exact"] = t.min_arity() <= 2;
    };
  });
  auto* kv_approx = kv->add_subcommand("approx", "approximate a homogeneous function on the sphere");
  kv_approx->add_option("--fn", fn_name, "euclid, identity, geomean(a), power(p,q), halfsum_pq(p,q)")->required();
  kv_approx->add_option("--eps", eps);
  kv_approx->add_option("--grid", grid, "sphere samples");
  kv_approx->add_option("--max-pieces", max_pieces);
  kv_approx->callback([&] {
    action = [&] {
      const HomogeneousFn phi = homogeneous_by_name(fn_name);
      ApproximationOptions opt;
      opt.max_pieces = max_pieces;
      opt.seed = seed_from(seed_flag);
      const SphereApproximation r = approximate_on_sphere(phi, eps, grid, opt);
      run.outputs["term"] = r.term.to_string();
      run.outputs["certified_error"] = r.certified_error;
      run.outputs["uniform_bound"] = r.uniform_bound;
      run.outputs["pieces"] = r.pieces;
      run.outputs["node_count"] = r.term.node_count();
      run.checks["reached_eps"] = r.reached;
    };
  });

  // ultra
  long prime = 2;
  std::size_t samples = 200;
  std::string ua, ur, ub, us;
  auto* ul = app.add_subcommand("ultra", "p-adic balls on the projective line");
  ul->add_option("--prime", prime);
  ul->require_subcommand(1);
  auto* tri = ul->add_subcommand("check-triangles", "ball triangle inequality on sampled triples");
  tri->add_option("--samples", samples);
  tri->callback([&] {
    action = [&] {
      const PAdicContext ctx(prime);
      const std::uint64_t seed = seed_from(seed_flag);
      const TriangleReport rep = check_triangles(sample_balls(samples, ctx, seed), ctx);
      run.outputs["prime"] = prime;
      run.outputs["seed"] = seed;
      run.outputs["triples"] = rep.triples;
      run.outputs["violations"] = rep.violations;
      run.checks["triangle_inequality"] = rep.violations == 0;
    };
  });
  auto* bd = ul->add_subcommand("ball-dist", "distance between balls a_r and b_s");
  bd->add_option("a", ua)->required();
  bd->add_option("r", ur)->required();
  bd->add_option("b", ub)->required();
  bd->add_option("s", us)->required();
  bd->callback([&] {
    action = [&] {
      const PAdicContext ctx(prime);
      const Ball a(ProjPoint::parse(ua), parse_rational(ur)), b(ProjPoint::parse(ub), parse_rational(us));
      const Rational d = ball_distance(a, b, ctx);
      const SupCheck sc = sup_formula_check(a, b, standard_witnesses(a, b, ctx), ctx);
      run.outputs["distance"] = to_string(d);
      run.outputs["center_distance"] = to_string(proj_distance(a.center, b.center, ctx));
      run.outputs["equal_balls"] = ball_equal(a, b, ctx);
      run.outputs["witness_sup"] = to_string(sc.sup);
      run.checks["witness_sup_le_distance"] = sc.sup <= sc.distance;
    };
  });

  // demo
  std::string eps_text = "1/4";
  double demo_p = 1.0;
  std::size_t cells = 0;
  auto* demo = app.add_subcommand("demo", "worked counterexamples");
  demo->require_subcommand(1);
  auto* p1 = demo->add_subcommand("p1", "the family f_eps with eps = 1/m");
  p1->add_option("--p", demo_p);
  p1->add_option("--eps", eps_text, "1/m");
  p1->add_option("--cells", cells, "fiber cells (default m)");
  p1->callback([&] {
    action = [&] {
      const P1Report r = p1_counterexample(parse_eps(eps_text), demo_p, cells);
      run.outputs["p"] = r.p;
      run.outputs["eps"] = r.eps;
      run.outputs["norms"] = {r.f_norm, r.e_norm};
      run.outputs["f_norm"] = r.f_norm;
      run.outputs["partial_norm"] = r.e_norm;
      run.outputs["expected_partial_norm"] = r.expected_e_norm;
      run.outputs["partial"] = element_values(r.partial);
      run.checks["f_norm_is_one"] = std::abs(r.f_norm - 1.0) <= kTolerance;
      run.checks["partial_norm_matches"] = std::abs(r.e_norm - r.expected_e_norm) <= kTolerance;
    };
  });
  int k_range = 5;
  auto* rm = demo->add_subcommand("remark", "(g, h) versus (g, -h) on three atoms");
  rm->add_option("--k-range", k_range);
  rm->callback([&] {
    action = [&] {
      const RemarkReport r = remark_counterexample(k_range);
      run.outputs["pairs_checked"] = r.pairs_checked;
      run.outputs["witness_integrals"] = {r.witness_gh, r.witness_g_minus_h};
      run.checks["one_types_agree"] = r.one_types_agree;
      run.checks["joint_types_differ"] = r.joint_types_differ;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (args.empty()) throw CLI::CallForHelp();
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return args.empty() ? kExitUsage : kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    action();
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  std::string digest_src;
  for (const auto& a : args) digest_src += a + '\0';
  digest_src += run.inputs;
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(fnv1a(digest_src)));
  Json report;
  report["command"] = args;
  report["inputs_digest"] = digest;
  report["outputs"] = run.outputs;
  report["checks"] = run.checks;
  report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << report.dump(2) << "\n";
  return run.code;
}

}  // namespace canonlab
