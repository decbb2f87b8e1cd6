#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "residua/algebra.hpp"
#include "residua/baumslag.hpp"
#include "residua/error.hpp"
#include "residua/normbracket.hpp"
#include "residua/permrep.hpp"
#include "residua/pipeline.hpp"
#include "residua/torus.hpp"
#include "residua/tower.hpp"

namespace py = pybind11;
using namespace residua;

namespace {

Context free_context(const Basis& basis) { return Context::free(basis); }

py::dict bracket_dict(const NormBracket& b) {
  py::dict d;
  d["lower"] = b.lower;
  d["upper"] = b.upper;
  d["l1_cap"] = b.l1_cap;
  d["truncated"] = b.truncated;
  d["heuristic"] = b.heuristic;
  d["radial"] = b.radial;
  return d;
}

}  // namespace

PYBIND11_MODULE(_residua, m) {
  m.doc() = "Free group algebra norms, tower discrimination and permutation experiments";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<SizeLimitError>(m, "SizeLimitError", PyExc_MemoryError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

  py::class_<Basis>(m, "Basis")
      .def(py::init<std::vector<std::string>>())
      .def_static("parse", &Basis::parse)
      .def_property_readonly("rank", &Basis::rank)
      .def_property_readonly("names", &Basis::names)
      .def("__repr__", [](const Basis& b) {
        std::string s = "Basis(";
        for (std::size_t i = 0; i < b.rank(); ++i) s += (i ? "," : "") + b.name(i);
        return s + ")";
      });

  py::class_<Word>(m, "Word")
      .def(py::init([](const std::vector<Letter>& letters) { return Word::reduce(letters); }))
      .def_static("parse", [](const Basis& b, const std::string& s) { return parse_word(b, s); })
      .def_property_readonly("letters", [](const Word& w) {
        return std::vector<Letter>(w.letters().begin(), w.letters().end());
      })
      .def("__len__", &Word::length)
      .def("__mul__", [](const Word& a, const Word& b) { return a * b; })
      .def("__pow__", [](const Word& w, std::int64_t k) { return power(w, k); })
      .def("__eq__", [](const Word& a, const Word& b) { return a == b; })
      .def("__hash__", [](const Word& w) { return WordHash{}(w); })
      .def("inverse", [](const Word& w) { return inverse(w); })
      .def("format", [](const Word& w, const Basis& b) { return format_word(b, w); });

  py::class_<AlgebraElement>(m, "Element")
      .def(py::init([](const Basis& b, const std::string& text) { return parse_element(free_context(b), text); }),
           py::arg("basis"), py::arg("text"))
      .def_static("from_terms",
                  [](const Basis& b, const std::vector<std::pair<std::string, Complex>>& terms) {
                    std::vector<std::pair<Word, Complex>> ws;
                    for (const auto& [w, c] : terms) ws.emplace_back(parse_word(b, w), c);
                    return AlgebraElement::from_terms(free_context(b), std::move(ws));
                  })
      .def_property_readonly("size", &AlgebraElement::size)
      .def_property_readonly("dim", &AlgebraElement::dim)
      .def("coefficient", [](const AlgebraElement& a, const Word& w) { return a.at(w); })
      .def("__mul__", [](const AlgebraElement& a, const AlgebraElement& b) { return convolve(a, b); })
      .def("__add__", [](const AlgebraElement& a, const AlgebraElement& b) { return a + b; })
      .def("__sub__", [](const AlgebraElement& a, const AlgebraElement& b) { return a - b; })
      .def("scaled", &AlgebraElement::scaled)
      .def("star", [](const AlgebraElement& a) { return star(a); })
      .def("l1", [](const AlgebraElement& a) { return l1(a); })
      .def("l2", [](const AlgebraElement& a) { return l2(a); })
      .def("support_radius", [](const AlgebraElement& a) { return support_radius(a); })
      .def("__str__", [](const AlgebraElement& a) { return format_element(a); });

  py::class_<NormBracket>(m, "Bracket")
      .def_readonly("lower", &NormBracket::lower)
      .def_readonly("upper", &NormBracket::upper)
      .def_readonly("l1_cap", &NormBracket::l1_cap)
      .def_readonly("truncated", &NormBracket::truncated)
      .def_readonly("heuristic", &NormBracket::heuristic)
      .def_readonly("radial", &NormBracket::radial)
      .def_property_readonly("schedule",
                             [](const NormBracket& b) {
                               py::list rows;
                               for (const auto& r : b.schedule) {
                                 rows.append(py::dict(py::arg("j") = r.j, py::arg("m") = r.m,
                                                      py::arg("radius") = r.radius, py::arg("lower") = r.lower,
                                                      py::arg("upper") = r.upper));
                               }
                               return rows;
                             })
      .def("report", [](const NormBracket& b) { return bracket_report(b); });

  m.def(
      "sandwich",
      [](const AlgebraElement& a, std::size_t doublings, double target_ratio, bool allow_radial) {
        SandwichOptions o;
        o.max_doublings = doublings;
        o.target_ratio = target_ratio;
        o.allow_radial = allow_radial;
        return sandwich(a, o);
      },
      py::arg("element"), py::arg("doublings") = 8, py::arg("target_ratio") = 1.0, py::arg("allow_radial") = true);

  py::class_<Preset>(m, "Preset")
      .def_property_readonly("height", [](const Preset& p) { return p.tower.height(); })
      .def_property_readonly("basis", [](const Preset& p) { return p.tower.full_basis(); })
      .def_property_readonly("subgroup_names", [](const Preset& p) { return p.subgroup.names; })
      .def("normal_form",
           [](const Preset& p, const std::string& w) {
             const NormalForm nf = normal_form_h1(p.tower, parse_word(p.tower.full_basis(), w));
             py::dict d;
             d["kind"] = nf.kind == NormalForm::Kind::Axial ? "axial" : "alternating";
             d["n"] = nf.n;
             d["alpha"] = nf.alpha;
             py::list syl;
             for (const auto& [e, x] : nf.syllables) syl.append(py::make_tuple(e, format_word(p.tower.basis_at(1), x)));
             d["syllables"] = syl;
             return d;
           })
      .def("equal",
           [](const Preset& p, const std::string& a, const std::string& b) {
             return equal_h1(p.tower, parse_word(p.tower.full_basis(), a), parse_word(p.tower.full_basis(), b));
           })
      .def("distortion_bound",
           [](const Preset& p, std::size_t r) { return distortion_bound(p.tower, r).str(30); });

  m.def("preset", [](const std::string& name) {
    if (name == "genus2") return preset_genus2();
    if (name == "z2") return preset_z2();
    throw InvalidArgument("unknown preset '" + name + "'");
  });

  m.def("degree", py::overload_cast<std::size_t>(&degree), py::arg("height"));

  m.def(
      "discriminate",
      [](const Preset& p, std::size_t r, bool tight) {
        DiscriminateOptions o;
        o.tight = tight;
        const Discrimination d = discriminating_hom(p.tower, p.subgroup, r, o);
        py::dict out;
        out["m"] = d.m;
        out["words"] = d.words;
        out["elements"] = d.elements;
        out["stretch"] = d.stretch;
        out["pairs_checked"] = d.pairs_checked;
        out["bound"] = d.bound.str(30);
        std::vector<std::string> images;
        for (std::size_t i = 0; i < d.hom.domain().rank(); ++i) images.push_back(format_word(d.hom.codomain(), d.hom.image(i)));
        out["images"] = images;
        return out;
      },
      py::arg("preset"), py::arg("radius"), py::arg("tight") = false);

  m.def(
      "baumslag_search",
      [](std::uint64_t seed, std::uint64_t trials, std::size_t n_max, std::size_t u_len, std::size_t b_len,
         std::int64_t k_max) {
        SearchBounds b;
        b.n_max = n_max;
        b.u_len = u_len;
        b.b_len = b_len;
        b.k_max = k_max;
        const SearchReport r = search_counterexamples(seed, b, trials);
        py::dict out;
        out["trials"] = r.rows.size();
        out["violations"] = r.violations;
        out["probes"] = r.probes;
        out["tightest_ratio"] = r.tightest_ratio;
        out["csv"] = search_csv(r);
        return out;
      },
      py::arg("seed"), py::arg("trials") = 1000, py::arg("n_max") = 3, py::arg("u_len") = 4, py::arg("b_len") = 6,
      py::arg("k_max") = 400);

  m.def(
      "baumslag_sweep",
      [](std::size_t rank, std::size_t u_len, std::size_t b_len, std::int64_t k_max) {
        const SweepReport r = exhaustive_n0(rank, u_len, b_len, k_max);
        py::dict out;
        out["instances"] = r.instances;
        out["violations"] = r.violations;
        return out;
      },
      py::arg("rank") = 2, py::arg("u_len") = 3, py::arg("b_len") = 4, py::arg("k_max") = 60);

  py::class_<PermRep>(m, "PermRep")
      .def_readonly("degree", &PermRep::degree)
      .def_readonly("images", &PermRep::images)
      .def("evaluate", &PermRep::evaluate);

  m.def("random_free_rep", &random_free_rep, py::arg("basis"), py::arg("n"), py::arg("seed"));
  m.def(
      "op_norm",
      [](const AlgebraElement& z, const PermRep& rep, double tol, std::size_t max_iters) {
        OpNormOptions o;
        o.tol = tol;
        o.max_iters = max_iters;
        const OpNormResult r = op_norm(z, rep, o);
        return py::make_tuple(r.value, r.converged);
      },
      py::arg("element"), py::arg("rep"), py::arg("tol") = 1e-12, py::arg("max_iters") = 20000);

  m.def(
      "permrep_experiment",
      [](const Preset& p, const std::string& element, const std::vector<std::size_t>& sizes,
         const std::vector<std::uint64_t>& seeds, std::size_t radius) {
        const AlgebraElement z = parse_element(Context::presented(p.subgroup.names), element);
        ExperimentConfig c;
        c.sizes = sizes;
        c.seeds = seeds;
        c.radius = radius;
        return experiment_csv(strong_convergence_experiment(p.tower, p.subgroup, z, c));
      },
      py::arg("preset"), py::arg("element"), py::arg("sizes"), py::arg("seeds"), py::arg("radius") = 2);

  m.def(
      "zr_norm",
      [](const std::map<std::vector<std::int64_t>, Complex>& coeffs, std::uint64_t q) {
        ZrElement z;
        z.rank = coeffs.empty() ? 1 : coeffs.begin()->first.size();
        z.coeffs = coeffs;
        return zr_norm(z, q);
      },
      py::arg("coeffs"), py::arg("q"));
  m.def(
      "klein_norm",
      [](const std::map<KleinKey, Complex>& coeffs, std::uint64_t q) {
        KleinElement z;
        z.coeffs = coeffs;
        return klein_norm(z, q);
      },
      py::arg("coeffs"), py::arg("q"));

  py::class_<CsrfCertificate>(m, "Certificate")
      .def_readonly("m", &CsrfCertificate::m)
      .def_readonly("c_meas", &CsrfCertificate::c_meas)
      .def_readonly("certified_radius", &CsrfCertificate::certified_radius)
      .def_property_readonly("slacks",
                             [](const CsrfCertificate& c) {
                               std::vector<double> s;
                               for (const auto& r : c.rows) s.push_back(r.final_slack);
                               return s;
                             })
      .def("all_slack_nonnegative", &CsrfCertificate::all_slack_nonnegative)
      .def("document", [](const CsrfCertificate& c) { return certificate_document(c); })
      .def("csv", [](const CsrfCertificate& c) { return certificate_csv(c); });

  m.def(
      "certify",
      [](const Preset& p, std::size_t radius, double epsilon, const std::vector<std::string>& elements,
         std::size_t max_power) {
        std::vector<AlgebraElement> es;
        for (const auto& e : elements) es.push_back(parse_element(Context::presented(p.subgroup.names), e));
        CertifyOptions o;
        o.max_power = max_power;
        return certify(p.tower, p.subgroup, radius, epsilon, es, o);
      },
      py::arg("preset"), py::arg("radius"), py::arg("epsilon"), py::arg("elements"), py::arg("max_power") = 2);

  m.def("choose_m", &choose_m, py::arg("c"), py::arg("d"), py::arg("r"), py::arg("eps"));
}
