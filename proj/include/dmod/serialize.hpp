#pragma once

#include <json.hpp>

#include "dmod/galois.hpp"
#include "dmod/modring.hpp"

namespace dmod {

/// Insertion-ordered JSON so identical inputs give identical bytes.
using ojson = nlohmann::ordered_json;

inline ojson elem_json(const FieldElem& x) {
    ojson a = ojson::array();
    for (u64 c : x.coords()) a.push_back(c);
    return a;
}

inline ojson field_json(const FieldPtr& F) {
    ojson j;
    j["p"] = F->p();
    j["degree"] = F->degree();
    u64 size = 1;
    bool fits = true;
    for (unsigned i = 0; i < F->degree() && fits; ++i) {
        if (size > (1ULL << 62) / F->p())
            fits = false;
        else
            size *= F->p();
    }
    if (fits) j["size"] = size;
    auto Fp = Field::get(F->p(), 1);
    std::vector<FieldElem> c;
    for (u64 v : F->modulus()) c.push_back(Fp->from_int(v));
    j["modulus"] = Poly::from_coeffs(Fp, std::move(c)).to_string();
    return j;
}

inline ojson operator_json(const AdditivePoly& f) {
    ojson j;
    j["q"] = f.twist();
    ojson cs = ojson::array();
    for (const auto& b : f.coeffs()) cs.push_back(elem_json(b));
    j["coeffs"] = cs;
    return j;
}

inline ojson module_json(const DrinfeldModule& psi) {
    ojson j;
    j["q"] = psi.q();
    j["base"] = field_json(psi.base_field());
    j["field"] = field_json(psi.field());
    j["rank"] = psi.rank();
    j["theta"] = elem_json(psi.theta());
    ojson cs = ojson::array();
    for (unsigned i = 1; i <= psi.rank(); ++i) cs.push_back(elem_json(psi.coeff(i)));
    j["coeffs"] = cs;
    j["characteristic"] = psi.characteristic().to_string();
    ojson js = ojson::array();
    for (const auto& x : j_invariants(psi)) js.push_back(elem_json(x));
    j["j_invariants"] = js;
    return j;
}

inline ojson matrix_json(const ResidueMatrix& M) {
    ojson rows = ojson::array();
    for (unsigned i = 0; i < M.dim(); ++i) {
        ojson row = ojson::array();
        for (unsigned j = 0; j < M.dim(); ++j) row.push_back(M.at(i, j).to_string());
        rows.push_back(row);
    }
    return rows;
}

inline ojson torsion_json(const TorsionModule& T, bool with_points = true) {
    ojson j;
    j["level"] = T.n.to_string();
    j["ambient"] = field_json(T.ambient);
    j["steps"] = T.steps;
    j["count"] = T.points.size();
    if (with_points) {
        ojson ps = ojson::array();
        for (const auto& x : T.points) ps.push_back(elem_json(x));
        j["points"] = ps;
    }
    return j;
}

inline ojson sample_json(const FrobeniusSample& s) {
    ojson j;
    j["m"] = s.spec.m;
    j["theta"] = elem_json(s.spec.psi.theta());
    ojson cs = ojson::array();
    for (unsigned i = 1; i <= s.spec.psi.rank(); ++i)
        cs.push_back(elem_json(s.spec.psi.coeff(i)));
    j["coeffs"] = cs;
    ojson bs = ojson::array();
    for (const auto& b : s.basis) bs.push_back(elem_json(b));
    j["basis"] = bs;
    j["matrix"] = matrix_json(s.matrix);
    ojson cp = ojson::array();
    for (const auto& c : s.charpoly) cp.push_back(c.to_string());
    j["charpoly"] = cp;
    j["order"] = s.order;
    j["splitting_degree"] = s.splitting_degree;
    return j;
}

inline ojson report_json(const CertificationReport& rep) {
    ojson j;
    u64 q = 1;
    for (unsigned i = 0; i < rep.base->degree(); ++i) q *= rep.base->p();
    j["q"] = q;
    j["rank"] = rep.rank;
    j["level"] = rep.level.to_string();
    j["group_order"] = rep.group_order;
    j["method"] = rep.method;
    j["verdict"] = rep.verdict;
    j["certified"] = rep.certified;
    j["samples_requested"] = rep.requested;
    j["det_checked"] = rep.det_checked;
    if (rep.det_checked) j["det_consistent"] = rep.det_consistent;
    ojson ss = ojson::array();
    for (const auto& s : rep.samples) ss.push_back(sample_json(s));
    j["samples"] = ss;
    return j;
}

}  // namespace dmod
