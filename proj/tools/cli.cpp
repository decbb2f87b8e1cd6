#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "residua/algebra.hpp"
#include "residua/baumslag.hpp"
#include "residua/csv.hpp"
#include "residua/error.hpp"
#include "residua/normbracket.hpp"
#include "residua/parallel.hpp"
#include "residua/permrep.hpp"
#include "residua/pipeline.hpp"
#include "residua/torus.hpp"
#include "residua/tower.hpp"
#include "residua/towerfile.hpp"

namespace residua {

namespace {

class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct TowerSource {
  std::string file;
  std::string preset;

  void attach(CLI::App* app) {
    auto* f = app->add_option("--tower", file, "Tower descriptor file");
    auto* p = app->add_option("--preset", preset, "Built-in tower and subgroup")
                  ->check(CLI::IsMember({"genus2", "z2"}));
    f->excludes(p);
    p->excludes(f);
  }

  TowerFile load(bool need_subgroup) const {
    std::optional<TowerFile> tf;
    if (!file.empty()) {
      tf.emplace(load_tower_file(file));
    } else if (preset == "genus2") {
      auto p = preset_genus2();
      tf.emplace(TowerFile{std::move(p.tower), std::move(p.subgroup)});
    } else if (preset == "z2") {
      auto p = preset_z2();
      tf.emplace(TowerFile{std::move(p.tower), std::move(p.subgroup)});
    } else {
      throw UsageError("one of --tower or --preset is required");
    }
    if (need_subgroup && !tf->subgroup) throw UsageError("the tower file has no [subgroup] section");
    return std::move(*tf);
  }
};

void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument(fmt::format("cannot write '{}'", path));
  f << text;
}

std::string describe(const NormalForm& nf, const Tower& tower) {
  if (nf.kind == NormalForm::Kind::Axial) return fmt::format("Axial({}, {})", nf.n, nf.alpha);
  const Basis basis = tower.basis_at(1);
  std::string out = "Alternating[";
  for (std::size_t i = 0; i < nf.syllables.size(); ++i) {
    if (i) out += ", ";
    out += fmt::format("({}, \"{}\")", nf.syllables[i].first, format_word(basis, nf.syllables[i].second));
  }
  return out + "]";
}

std::vector<AlgebraElement> split_elements(const Context& context, const std::string& text) {
  std::vector<AlgebraElement> out;
  std::string chunk;
  std::size_t start = 0;
  auto flush = [&] {
    out.push_back(parse_element(context, chunk));
    chunk.clear();
  };
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(start, nl - start);
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
    trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
    if (trimmed == "---") {
      flush();
    } else {
      chunk += line;
      chunk += '\n';
    }
    start = nl + 1;
  }
  if (chunk.find_first_not_of(" \t\r\n") != std::string::npos || out.empty()) flush();
  return out;
}

struct Options {
  std::size_t threads = 0;

  // norm
  std::string basis;
  std::string element;
  std::size_t doublings = 8;
  double target_ratio = 1.0;
  std::uint64_t term_cap = kDefaultTermCap;
  bool no_radial = false;
  std::string out;

  // tower, discriminate, permrep, certify
  TowerSource source;
  std::string word;
  std::string equal;
  std::size_t pi_level = 0;
  std::size_t tau_level = 0;
  std::int64_t tau_m = 1;
  std::size_t radius = 0;
  bool tight = false;
  std::uint64_t ball_cap = kDefaultBallCap;
  std::uint64_t image_cap = 50'000'000;
  std::size_t pair_check_limit = 1000;

  // baumslag
  std::vector<std::uint64_t> seed;
  std::uint64_t trials = 10000;
  SearchBounds bounds;
  bool exhaustive = false;

  // permrep
  std::vector<std::size_t> sizes{100, 400, 1600};
  double tol = 1e-12;
  std::size_t max_iters = 20000;
  std::size_t ref_doublings = 2;

  // torus
  bool klein = false;
  std::uint64_t grid = 0;
  std::size_t refine = 1;

  // certify
  double epsilon = 0.0;
  std::string elements;
  std::string prefix = "certificate";
  std::size_t max_power = 2;
  std::size_t fit_radius = 3;
};

int run_norm(const Options& o, std::ostream& out, std::ostream& err) {
  const Context context = Context::free(Basis::parse(o.basis));
  const AlgebraElement a = parse_element(context, read_text_file(o.element));
  SandwichOptions so;
  so.max_doublings = o.doublings;
  so.target_ratio = o.target_ratio;
  so.term_cap = o.term_cap;
  so.allow_radial = !o.no_radial;
  const NormBracket b = sandwich(a, so);
  emit(out, o.out, bracket_report(b));
  err << fmt::format("lower {} upper {} l1 {}{}{}{}\n", format_real(b.lower), format_real(b.upper),
                     format_real(b.l1_cap), b.radial ? " radial" : "", b.truncated ? " truncated" : "",
                     b.heuristic ? " heuristic" : "");
  err << "note: " << b.disclaimer << "\n";
  return 0;
}

int run_tower(const Options& o, std::ostream& out) {
  const TowerFile tf = o.source.load(false);
  const Tower& tower = tf.tower;
  if (o.word.empty() && o.equal.empty()) {
    out << format_tower_file(tower, tf.subgroup ? &*tf.subgroup : nullptr);
    out << fmt::format("# height: {}\n# degree: {}\n", tower.height(), degree(tower));
    if (o.radius > 0) out << fmt::format("# distortion_bound({}): {}\n", o.radius, distortion_bound(tower, o.radius).str(20));
    return 0;
  }
  const Word w = parse_word(tower.full_basis(), o.word);
  if (!o.equal.empty()) {
    const Word w2 = parse_word(tower.full_basis(), o.equal);
    out << (equal_h1(tower, w, w2) ? "true" : "false") << "\n";
    return 0;
  }
  if (o.pi_level > 0) {
    const Homomorphism pi = retraction_pi(tower, o.pi_level);
    out << format_word(pi.codomain(), pi.apply(w)) << "\n";
    return 0;
  }
  if (o.tau_level > 0) {
    const Homomorphism tau = twist_tau(tower, o.tau_level, o.tau_m);
    out << format_word(tau.codomain(), tau.apply(w)) << "\n";
    return 0;
  }
  out << describe(normal_form_h1(tower, w), tower) << "\n";
  return 0;
}

DiscriminateOptions discriminate_options(const Options& o) {
  DiscriminateOptions d;
  d.tight = o.tight;
  d.ball_cap = o.ball_cap;
  d.image_cap = o.image_cap;
  d.pair_check_limit = o.pair_check_limit;
  return d;
}

int run_discriminate(const Options& o, std::ostream& out) {
  const TowerFile tf = o.source.load(true);
  const Discrimination d = discriminating_hom(tf.tower, *tf.subgroup, o.radius, discriminate_options(o));
  Document doc;
  auto& root = doc.root();
  root.add("radius", DocValue::integer_value(static_cast<std::int64_t>(d.radius)));
  std::vector<DocValue> m;
  for (auto v : d.m) m.push_back(DocValue::integer_value(v));
  root.add("level_m", DocValue::array(std::move(m)));
  root.add("tight", DocValue::boolean_value(o.tight));
  root.add("ball_words", DocValue::integer_value(static_cast<std::int64_t>(d.words)));
  root.add("ball_elements", DocValue::integer_value(static_cast<std::int64_t>(d.elements)));
  root.add("pairs_checked", DocValue::integer_value(static_cast<std::int64_t>(d.pairs_checked)));
  root.add("stretch", DocValue::integer_value(static_cast<std::int64_t>(d.stretch)));
  root.add("distortion_bound", DocValue::string(d.bound.str(20)));
  root.add("stretch_within_bound", DocValue::boolean_value(BigFloat(d.stretch) <= d.bound));
  root.add("degree", DocValue::integer_value(static_cast<std::int64_t>(degree(tf.tower))));
  auto& images = doc.add_table("images");
  for (std::size_t i = 0; i < d.hom.domain().rank(); ++i) {
    images.add(d.hom.domain().name(i), DocValue::string(format_word(d.hom.codomain(), d.hom.image(i))));
  }
  emit(out, o.out, format_document(doc));
  return 0;
}

int run_baumslag(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.exhaustive) {
    const SweepReport r = exhaustive_n0(o.bounds.rank, o.bounds.u_len, o.bounds.b_len, o.bounds.k_max);
    Document doc;
    auto& root = doc.root();
    root.add("rank", DocValue::integer_value(static_cast<std::int64_t>(o.bounds.rank)));
    root.add("u_len", DocValue::integer_value(static_cast<std::int64_t>(o.bounds.u_len)));
    root.add("b_len", DocValue::integer_value(static_cast<std::int64_t>(o.bounds.b_len)));
    root.add("k_max", DocValue::integer_value(o.bounds.k_max));
    root.add("instances", DocValue::integer_value(static_cast<std::int64_t>(r.instances)));
    root.add("hypothesis_a", DocValue::integer_value(static_cast<std::int64_t>(r.hypothesis_a)));
    root.add("hypothesis_b", DocValue::integer_value(static_cast<std::int64_t>(r.hypothesis_b)));
    root.add("w_trivial", DocValue::integer_value(static_cast<std::int64_t>(r.trivial)));
    root.add("violations", DocValue::integer_value(static_cast<std::int64_t>(r.violations.size())));
    emit(out, o.out, format_document(doc));
    for (const auto& v : r.violations) err << "counterexample: " << v << "\n";
    return r.violations.empty() ? 0 : 3;
  }
  if (o.seed.size() != 1) throw UsageError("baumslag needs exactly one --seed");
  const SearchReport r = search_counterexamples(o.seed.front(), o.bounds, o.trials);
  emit(out, o.out, search_csv(r));
  err << fmt::format("trials {} violations {} probes {} noncommuting_probes {} tightest_ratio {}\n", r.rows.size(),
                     r.violations.size(), r.probes, r.probes_noncommuting, format_real(r.tightest_ratio));
  for (const auto& v : r.violations) err << "counterexample: " << v << "\n";
  return r.violations.empty() ? 0 : 3;
}

int run_permrep(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.seed.empty()) throw UsageError("permrep needs --seeds");
  const TowerFile tf = o.source.load(true);
  const AlgebraElement z = parse_element(Context::presented(tf.subgroup->names), read_text_file(o.element));
  ExperimentConfig config;
  config.sizes = o.sizes;
  config.seeds = o.seed;
  config.radius = o.radius;
  config.op.tol = o.tol;
  config.op.max_iters = o.max_iters;
  config.ref_doublings = o.ref_doublings;
  config.discriminate = discriminate_options(o);
  const ExperimentResult r = strong_convergence_experiment(tf.tower, *tf.subgroup, z, config);
  emit(out, o.out, experiment_csv(r));
  const auto unconverged = std::count_if(r.rows.begin(), r.rows.end(), [](const auto& row) { return !row.converged; });
  if (unconverged > 0) {
    err << fmt::format("{} power iterations did not converge within {} iterations\n", unconverged, o.max_iters);
    return 2;
  }
  return 0;
}

int run_torus(const Options& o, std::ostream& out) {
  const std::string text = read_text_file(o.element);
  std::vector<RefineRow> rows;
  if (o.klein) {
    rows = refine_klein(parse_klein(text), o.grid, o.refine);
  } else {
    rows = refine_zr(parse_zr(text), o.grid, o.refine);
  }
  std::string body = format_real(rows.front().norm) + "\n";
  body += refine_csv(rows);
  emit(out, o.out, body);
  return 0;
}

int run_certify(const Options& o, std::ostream& out, std::ostream& err) {
  const TowerFile tf = o.source.load(true);
  const auto elements = split_elements(Context::presented(tf.subgroup->names), read_text_file(o.elements));
  CertifyOptions co;
  co.max_power = o.max_power;
  co.fit_radius = o.fit_radius;
  co.discriminate = discriminate_options(o);
  const CsrfCertificate cert = certify(tf.tower, *tf.subgroup, o.radius, o.epsilon, elements, co);
  if (o.prefix == "-") {
    out << certificate_document(cert) << "\n" << certificate_csv(cert);
  } else {
    emit(out, o.prefix + ".cert", certificate_document(cert));
    emit(out, o.prefix + ".csv", certificate_csv(cert));
    out << o.prefix << ".cert\n" << o.prefix << ".csv\n";
  }
  if (!cert.all_slack_nonnegative()) {
    err << "negative slack in the certificate chain\n";
    return 3;
  }
  return 0;
}

void build(CLI::App& app, Options& o) {
  app.require_subcommand(1);
  app.add_option("--threads", o.threads, "Worker thread cap (0 = all cores)")->capture_default_str();

  auto* norm = app.add_subcommand("norm", "Bracket the reduced C*-norm of a free group algebra element");
  norm->add_option("--basis", o.basis, "Free basis, comma separated (e.g. a,b)")->required();
  norm->add_option("--element", o.element, "Element file: lines 'RE IM word' or a matdim block")->required();
  norm->add_option("--doublings", o.doublings, "Maximum number of squarings j")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{62}));
  norm->add_option("--target-ratio", o.target_ratio, "Stop once upper/lower is at most this")->capture_default_str();
  norm->add_option("--term-cap", o.term_cap, "Maximum number of terms in a convolution power")->capture_default_str();
  norm->add_flag("--no-radial", o.no_radial, "Disable the radial fast path");
  norm->add_option("--out", o.out, "Write the CSV here instead of standard output");

  auto* tower = app.add_subcommand("tower", "Inspect a tower: normal forms, equality, retraction and twist");
  o.source.attach(tower);
  tower->add_option("--word", o.word, "Word over the tower generators");
  tower->add_option("--equal", o.equal, "Decide whether --word equals this word (height 1)");
  tower->add_option("--pi", o.pi_level, "Apply the retraction killing t_level");
  tower->add_option("--tau", o.tau_level, "Apply the twist t_level -> t_level a^m");
  tower->add_option("--m", o.tau_m, "Twist exponent for --tau")->capture_default_str();
  tower->add_option("--radius", o.radius, "Also print the distortion bound at this radius");

  auto* disc = app.add_subcommand("discriminate", "Build and verify a homomorphism injective on B_Y(r)");
  o.source.attach(disc);
  disc->add_option("--radius", o.radius, "Ball radius r")->required()->check(CLI::PositiveNumber);
  disc->add_flag("--tight", o.tight, "Search the smallest twist exponent per level");
  disc->add_option("--ball-cap", o.ball_cap, "Maximum number of Y-words in the ball")->capture_default_str();
  disc->add_option("--image-cap", o.image_cap, "Maximum letters in a generator image")->capture_default_str();
  disc->add_option("--pair-check-limit", o.pair_check_limit, "Compare all pairs when the ball has at most this many words")
      ->capture_default_str();
  disc->add_option("--out", o.out, "Write the report here instead of standard output");

  auto* baum = app.add_subcommand("baumslag", "Search for counterexamples to the quantitative power lemma");
  baum->add_option("--seed", o.seed, "Random seed (required unless --exhaustive)")->expected(1);
  baum->add_option("--trials", o.trials, "Number of random instances")->capture_default_str();
  baum->add_option("--n-max", o.bounds.n_max, "Largest n")->capture_default_str();
  baum->add_option("--u-len", o.bounds.u_len, "Largest |u|")->capture_default_str()->check(CLI::PositiveNumber);
  baum->add_option("--b-len", o.bounds.b_len, "Largest |b_i|")->capture_default_str();
  baum->add_option("--k-max", o.bounds.k_max, "Largest |k_i| (raised to the threshold when needed)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  baum->add_option("--rank", o.bounds.rank, "Free group rank")->capture_default_str()->check(CLI::Range(1, 26));
  baum->add_flag("--exhaustive", o.exhaustive, "Enumerate every n = 0 instance within the bounds");
  baum->add_option("--out", o.out, "Write the output here instead of standard output");

  auto* perm = app.add_subcommand("permrep", "Operator norms in random permutation representations");
  o.source.attach(perm);
  perm->add_option("--element", o.element, "Element file over the subgroup generators")->required();
  perm->add_option("--sizes", o.sizes, "Representation degrees N")->capture_default_str()->delimiter(',');
  perm->add_option("--seeds", o.seed, "Random seeds, one experiment cell per (N, seed)")->required()->delimiter(',');
  perm->add_option("--radius", o.radius, "Radius of the discriminating homomorphism")->required();
  perm->add_option("--tol", o.tol, "Relative Rayleigh quotient stagnation tolerance")->capture_default_str();
  perm->add_option("--max-iters", o.max_iters, "Power iteration limit")->capture_default_str();
  perm->add_option("--ref-doublings", o.ref_doublings, "Squarings for the reference bracket")->capture_default_str();
  perm->add_option("--out", o.out, "Write the CSV here instead of standard output");

  auto* torus = app.add_subcommand("torus", "Grid norms in C[Z^r] and in the Klein bottle group");
  torus->add_flag("--klein", o.klein, "Element lines are 'RE IM p q' for a^p t^q");
  torus->add_option("--grid", o.grid, "Grid order q")->required()->check(CLI::PositiveNumber);
  torus->add_option("--element", o.element, "Element file")->required();
  torus->add_option("--refine", o.refine, "Refinement steps: also evaluate at 2q, 4q, ...")->capture_default_str();
  torus->add_option("--out", o.out, "Write the output here instead of standard output");

  auto* cert = app.add_subcommand("certify", "Certificate for the norm inequality chain");
  o.source.attach(cert);
  cert->add_option("--radius", o.radius, "Support radius R of the elements")->required()->check(CLI::PositiveNumber);
  cert->add_option("--epsilon", o.epsilon, "Tolerance epsilon")->required()->check(CLI::PositiveNumber);
  cert->add_option("--elements", o.elements, "Element file; separate elements with a line '---'")->required();
  cert->add_option("--max-power", o.max_power, "Largest convolution power j evaluated")->capture_default_str();
  cert->add_option("--fit-radius", o.fit_radius, "Radii used to fit the stretch constant")->capture_default_str();
  cert->add_option("--ball-cap", o.ball_cap, "Maximum number of Y-words in the ball")->capture_default_str();
  cert->add_option("--out", o.prefix, "Write PREFIX.cert and PREFIX.csv; '-' prints both to standard output")
      ->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Limit groups, discriminating homomorphisms and reduced C*-norm estimates", "residua"};
  Options o;
  build(app, o);
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  set_max_threads(o.threads);
  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "norm") return run_norm(o, out, err);
    if (name == "tower") return run_tower(o, out);
    if (name == "discriminate") return run_discriminate(o, out);
    if (name == "baumslag") return run_baumslag(o, out, err);
    if (name == "permrep") return run_permrep(o, out, err);
    if (name == "torus") return run_torus(o, out);
    if (name == "certify") return run_certify(o, out, err);
    return 1;
  } catch (const InjectivityError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const InvariantViolation& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const SizeLimitError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace residua
