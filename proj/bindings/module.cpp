#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftgamma/empirical.hpp"
#include "shiftgamma/errors.hpp"
#include "shiftgamma/gamma.hpp"
#include "shiftgamma/iet.hpp"
#include "shiftgamma/metric.hpp"
#include "shiftgamma/sft.hpp"

namespace py = pybind11;
using namespace shiftgamma;
using nlohmann::ordered_json;

namespace {

py::object json_to_py(const ordered_json& j) {
    switch (j.type()) {
    case ordered_json::value_t::null:
        return py::none();
    case ordered_json::value_t::boolean:
        return py::bool_(j.get<bool>());
    case ordered_json::value_t::number_integer:
        return py::int_(j.get<long long>());
    case ordered_json::value_t::number_unsigned:
        return py::int_(j.get<unsigned long long>());
    case ordered_json::value_t::number_float:
        return py::float_(j.get<double>());
    case ordered_json::value_t::string:
        return py::str(j.get<std::string>());
    case ordered_json::value_t::array: {
        py::list out;
        for (const auto& v : j)
            out.append(json_to_py(v));
        return out;
    }
    case ordered_json::value_t::object: {
        py::dict out;
        for (const auto& [k, v] : j.items())
            out[py::str(k)] = json_to_py(v);
        return out;
    }
    default:
        return py::none();
    }
}

std::string kind_name(PointCountClass::Kind k) {
    switch (k) {
    case PointCountClass::Kind::Empty:
        return "empty";
    case PointCountClass::Kind::Finite:
        return "finite";
    default:
        return "infinite";
    }
}

py::dict gamma_result_dict(const EdgeSft& s, const GammaResult& g, bool with_witness) {
    py::dict d;
    d["N"] = g.n;
    d["m"] = g.m;
    d["lambda"] = g.lambda;
    d["gamma"] = g.gamma();
    if (with_witness && g.witness)
        d["witness"] = json_to_py(gamma_witness_to_json(s, *g.witness));
    return d;
}

IetSystem make_iet(const std::string& a, const std::string& b) {
    if (a.empty() && b.empty())
        return IetSystem{};
    const IetSystem dflt;
    return IetSystem(a.empty() ? dflt.a : parse_field_element(a),
                     b.empty() ? dflt.b : parse_field_element(b));
}

py::dict bounds_dict(const EmpiricalGammaBounds& b) {
    py::dict d;
    d["N"] = b.n;
    d["K"] = b.k;
    d["m_lower"] = b.m_lower;
    d["m_upper"] = b.m_upper;
    d["lower_certified"] = b.lower_certified;
    return d;
}

} // namespace

PYBIND11_MODULE(_shiftgamma, m) {
    m.doc() = "Exact separation exponents for shift powers, homoclinic pair searches, "
              "interval-exchange codings, and empirical decay bounds";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<DegenerateSystemError>(m, "DegenerateSystemError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);

    py::class_<EdgeSft>(m, "EdgeSft")
        .def_property_readonly("vertices", &EdgeSft::vertices)
        .def_property_readonly("alphabet", &EdgeSft::alphabet)
        .def_property_readonly("edges",
                               [](const EdgeSft& s) {
                                   py::list out;
                                   for (const SftEdge& e : s.edges())
                                       out.append(py::make_tuple(e.id, s.vertices()[e.from],
                                                                 s.vertices()[e.to],
                                                                 s.alphabet()[e.symbol]));
                                   return out;
                               })
        .def("__repr__", [](const EdgeSft& s) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "<EdgeSft %d vertices, %d edges>", s.vertex_count(),
                          s.edge_count());
            return std::string(buf);
        });

    m.def("parse_sft", &parse_sft, py::arg("text"), py::arg("source_name") = "<input>",
          "Parse a forbidden-word or graph description into an edge shift");
    m.def("higher_block", &higher_block, py::arg("alphabet"), py::arg("forbidden"),
          "Recode a forbidden-word subshift into a conjugate edge shift");
    m.def("make_edge_sft", &make_edge_sft, py::arg("vertices"), py::arg("edges"),
          "Build an edge shift from (id, from, to) triples");
    m.def("entropy", &entropy, py::arg("sft"), py::arg("tol") = 1e-12);
    m.def(
        "classify_point_count",
        [](const EdgeSft& s, int max_period) {
            const PointCountClass c = classify_point_count(s, max_period);
            return py::make_tuple(kind_name(c.kind), c.orbit_count);
        },
        py::arg("sft"), py::arg("max_period") = 12);

    m.def("m_of", &m_of, py::arg("sft"), py::arg("n"),
          "Largest m such that some pair disagrees only at circular distance >= m from "
          "the multiples of n");
    m.def(
        "gamma_exact",
        [](const EdgeSft& s, long n, double lam, bool with_witness) {
            return gamma_result_dict(s, gamma_exact(s, n, SelfSimilarShiftMetric{lam}),
                                     with_witness);
        },
        py::arg("sft"), py::arg("n"), py::arg("lam") = 2.0, py::arg("with_witness") = false);
    m.def(
        "gamma_table",
        [](const EdgeSft& s, long n_max, double lam) {
            const SelfSimilarShiftMetric metric{lam};
            py::list out;
            for (long n = 1; n <= n_max; ++n)
                out.append(gamma_result_dict(s, gamma_exact(s, n, metric), false));
            return out;
        },
        py::arg("sft"), py::arg("n_max"), py::arg("lam") = 2.0);
    m.def(
        "mt_fit",
        [](const EdgeSft& s, double lam, long n_max) {
            const MtFitResult r = mt_fit(s, SelfSimilarShiftMetric{lam}, n_max);
            py::dict d;
            d["lambda"] = r.lambda;
            d["n_max"] = r.n_max;
            py::list ms;
            for (const GammaResult& g : r.per_n)
                ms.append(g.m);
            d["m"] = ms;
            d["product_half_exponents"] = r.product_half_exponents;
            d["c_min"] = r.c_min();
            d["decaying"] = r.decaying;
            return d;
        },
        py::arg("sft"), py::arg("lam") = 2.0, py::arg("n_max") = 12);

    m.def(
        "find_homoclinic_pair",
        [](const EdgeSft& s) -> py::object {
            auto w = find_homoclinic_pair(s);
            if (!w)
                return py::none();
            return json_to_py(witness_to_json(s, *w));
        },
        py::arg("sft"));
    m.def(
        "find_asymptotic_pair",
        [](const EdgeSft& s, const std::string& direction) {
            AsymptoticDirection dir;
            if (direction == "forward")
                dir = AsymptoticDirection::Forward;
            else if (direction == "backward")
                dir = AsymptoticDirection::Backward;
            else
                throw DomainError("direction must be 'forward' or 'backward'");
            return json_to_py(witness_to_json(s, find_asymptotic_pair(s, dir)));
        },
        py::arg("sft"), py::arg("direction"));

    py::class_<IetSystem>(m, "IetSystem")
        .def(py::init(&make_iet), py::arg("a") = "", py::arg("b") = "",
             "Three-interval exchange with exact cut points, e.g. a='-1+1*sqrt2'; "
             "defaults to (sqrt2-1, sqrt3-1)")
        .def_property_readonly("a", [](const IetSystem& s) { return s.a.str(); })
        .def_property_readonly("b", [](const IetSystem& s) { return s.b.str(); })
        .def("degenerate", &IetSystem::degenerate)
        .def("__repr__", [](const IetSystem& s) {
            return "<IetSystem a=" + s.a.str() + " b=" + s.b.str() + ">";
        });

    m.def("iet_language", &iet_language, py::arg("system"), py::arg("n"));
    m.def("iet_complexity", &iet_complexity, py::arg("system"), py::arg("n_max"));
    m.def(
        "itinerary",
        [](const IetSystem& sys, const std::string& x, long k_lo, long k_hi) {
            return itinerary(sys, parse_field_element(x), k_lo, k_hi).symbols;
        },
        py::arg("system"), py::arg("x"), py::arg("k_lo"), py::arg("k_hi"),
        "Coding symbols of the orbit of the exactly-represented point x");

    py::class_<FiniteConfiguration>(m, "FiniteConfiguration")
        .def_readonly("alphabet", &FiniteConfiguration::alphabet)
        .def_readonly("lo", &FiniteConfiguration::lo)
        .def_readonly("hi", &FiniteConfiguration::hi)
        .def_readonly("cells", &FiniteConfiguration::cells);
    m.def("make_configuration", &make_configuration, py::arg("alphabet"), py::arg("lo"),
          py::arg("cells"));
    m.def(
        "distance",
        [](const FiniteConfiguration& x, const FiniteConfiguration& y, double lam) {
            const DistanceValue d = distance(x, y, SelfSimilarShiftMetric{lam});
            return py::make_tuple(d.is_exact() ? "exact" : "bounded_above", d.exponent,
                                  d.decimal(lam));
        },
        py::arg("x"), py::arg("y"), py::arg("lam") = 2.0,
        "Certified distance as (kind, lambda-exponent, decimal)");

    py::class_<LanguageOracle>(m, "LanguageOracle")
        .def_static("from_sft", [](const EdgeSft& s) { return LanguageOracle::from_sft(s); },
                    py::arg("sft"))
        .def_static("from_iet",
                    [](const IetSystem& s) { return LanguageOracle::from_iet(s); },
                    py::arg("system"))
        .def_static("from_words", &LanguageOracle::from_words, py::arg("text"),
                    py::arg("source_name") = "<input>")
        .def_property_readonly("alphabet", &LanguageOracle::alphabet)
        .def_property_readonly("max_query", &LanguageOracle::max_query)
        .def("words", &LanguageOracle::words, py::arg("n"))
        .def("is_legal", &LanguageOracle::is_legal, py::arg("cells"));

    m.def("m_upper_at_horizon", &m_upper_at_horizon, py::arg("oracle"), py::arg("n"),
          py::arg("k"),
          "Largest m not refuted by the window-K pair search; upper bound for m_of");
    m.def("m_lower_from_witness", &m_lower_from_witness, py::arg("oracle"), py::arg("n"),
          py::arg("k"), py::arg("x"), py::arg("y"));
    m.def(
        "decay_report",
        [](const LanguageOracle& o, long n_max, long k, double lam) {
            const DecayReport r = decay_report(o, SelfSimilarShiftMetric{lam}, n_max, k);
            py::dict d;
            d["lambda"] = r.lambda;
            d["oracle"] = r.oracle_tag;
            py::list rows;
            for (const DecayRow& row : r.rows) {
                py::dict rd = bounds_dict(row.bounds);
                rd["exact_m"] = row.exact_m ? py::object(py::int_(*row.exact_m))
                                            : py::object(py::none());
                rows.append(rd);
            }
            d["rows"] = rows;
            d["csv"] = decay_report_csv(r);
            return d;
        },
        py::arg("oracle"), py::arg("n_max"), py::arg("k"), py::arg("lam") = 2.0);
}
