#pragma once

#include <algorithm>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmod/serialize.hpp"
#include "dmod/verify.hpp"

namespace dmod {
namespace cli {

namespace detail {

/// Splits q into (p, e) with q = p^e, p prime.
inline std::pair<u64, unsigned> prime_power_split(u64 q) {
    if (q < 2) fail_input("NotPrimePower", "field size must be at least 2");
    u64 p = 2;
    while (q % p != 0) ++p;
    u64 v = q;
    unsigned e = 0;
    while (v % p == 0) {
        v /= p;
        ++e;
    }
    if (v != 1) fail_input("NotPrimePower", "field size must be a prime power");
    return {p, e};
}

inline FieldPtr field_of_size(u64 q) {
    auto [p, e] = prime_power_split(q);
    return Field::get(p, e);
}

inline nlohmann::json parse_json_arg(const std::string& text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail_input("BadJson", std::string(what) + ": " + e.what());
    }
}

/// An element literal: either an integer (base-p digit expansion) or an
/// explicit coordinate array over the prime subfield.
inline FieldElem parse_elem(const FieldPtr& K, const nlohmann::json& v, const char* what) {
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0))
        return K->from_int(v.get<u64>());
    if (v.is_array()) {
        std::vector<u64> c;
        for (const auto& d : v) {
            if (!d.is_number_unsigned() && !(d.is_number_integer() && d.get<long long>() >= 0))
                fail_input("BadElement", std::string(what) + ": coordinates must be nonnegative integers");
            c.push_back(d.get<u64>());
        }
        return K->from_coords(std::move(c));
    }
    fail_input("BadElement",
               std::string(what) + ": expected an integer or a coordinate array");
}

inline std::vector<FieldElem> parse_elem_list(const FieldPtr& K, const std::string& text,
                                              const char* what) {
    auto j = parse_json_arg(text, what);
    if (!j.is_array()) fail_input("BadElement", std::string(what) + ": expected a JSON array");
    std::vector<FieldElem> out;
    for (const auto& v : j) out.push_back(parse_elem(K, v, what));
    return out;
}

/// Shared module flags: base field size, extension degree, theta, coefficients.
struct ModuleArgs {
    u64 q = 2;
    unsigned m = 1;
    std::string theta;
    std::string coeffs;

    void attach(CLI::App* sub, bool required) {
        sub->add_option("--q", q, "base field size (prime power)")->required();
        sub->add_option("--m", m, "extension degree of the coefficient field over the base");
        auto* t = sub->add_option("--theta", theta,
                                  "image of t: integer or coordinate array");
        auto* c = sub->add_option("--coeffs", coeffs,
                                  "higher coefficients a_1..a_r as a JSON array");
        t->needs(c);
        c->needs(t);
        if (required) {
            t->required();
            c->required();
        }
    }

    bool given() const { return !theta.empty(); }

    DrinfeldModule build() const {
        if (m == 0) fail_input("BadDegree", "extension degree must be positive");
        auto [p, e] = prime_power_split(q);
        auto Fq = Field::get(p, e);
        auto K = Field::get(p, e * m);
        auto th = parse_elem(K, parse_json_arg(theta, "--theta"), "--theta");
        auto a = parse_elem_list(K, coeffs, "--coeffs");
        return DrinfeldModule::make(Fq, K, th, std::move(a));
    }
};

inline int emit(const ojson& payload, std::ostream& out, std::ostream& err,
                const std::string& out_path) {
    std::string text = payload.dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
        return 0;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        err << "error: cannot open '" << out_path << "' for writing\n";
        return 2;
    }
    f << text;
    if (!f) {
        err << "error: failed writing '" << out_path << "'\n";
        return 2;
    }
    return 0;
}

inline ojson suite_json(const SuiteResult& s) {
    ojson j;
    j["name"] = s.name;
    j["checks"] = s.checks;
    j["failures"] = s.failures;
    if (!s.notes.empty()) j["notes"] = s.notes;
    return j;
}

}  // namespace detail

/// Runs one command line (without the program name).  Writes the JSON payload
/// to `out` (or the file named by --out) and diagnostics to `err`.  Returns
/// the process exit code: 0 success / certified / suite passed, 1 inconclusive
/// or failed or a resource cap was hit, 2 invalid input, 3 internal error.
inline int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact arithmetic for finite Drinfeld modules"};
    app.require_subcommand(1);

    std::string out_path;

    auto* c_field = app.add_subcommand("field", "describe a finite field");
    u64 field_q = 2;
    c_field->add_option("--q", field_q, "field size (prime power)")->required();

    auto* c_psi = app.add_subcommand("psi", "describe a Drinfeld module");
    detail::ModuleArgs psi_args;
    psi_args.attach(c_psi, true);

    auto* c_torsion = app.add_subcommand("torsion", "compute a torsion module");
    detail::ModuleArgs tor_args;
    tor_args.attach(c_torsion, true);
    std::string tor_n;
    bool tor_no_points = false;
    c_torsion->add_option("--n", tor_n, "level polynomial in t")->required();
    c_torsion->add_flag("--no-points", tor_no_points, "omit the point list");

    auto* c_moore = app.add_subcommand("moore", "Moore determinant of a point list");
    u64 moore_q = 2;
    unsigned moore_m = 1;
    std::string moore_points;
    c_moore->add_option("--q", moore_q, "base field size (prime power)")->required();
    c_moore->add_option("--m", moore_m, "extension degree of the point field");
    c_moore->add_option("--points", moore_points, "points as a JSON array")->required();

    auto* c_group = app.add_subcommand("group", "matrix group orders over F_q[t]/(n)");
    u64 group_q = 2;
    unsigned group_r = 2;
    std::string group_n;
    c_group->add_option("--q", group_q, "base field size (prime power)")->required();
    c_group->add_option("--r", group_r, "matrix dimension")->required();
    c_group->add_option("--n", group_n, "modulus polynomial in t")->required();

    auto* c_frob = app.add_subcommand("frobenius", "Frobenius action on a torsion module");
    detail::ModuleArgs frob_args;
    frob_args.attach(c_frob, false);
    unsigned frob_r = 0;
    std::string frob_n;
    u64 frob_seed = 1;
    c_frob->add_option("--r", frob_r, "rank (for seeded module drawing)");
    c_frob->add_option("--n", frob_n, "level polynomial in t")->required();
    c_frob->add_option("--seed", frob_seed, "seed for drawing a module");

    auto* c_verify = app.add_subcommand("verify", "run property suites");
    std::string verify_suite = "all";
    u64 verify_seed = 0;
    c_verify->add_option("--suite", verify_suite,
                         "all, torsion-product, level-structures, moore, "
                         "leading-identity, twist-invariants, or group-structure");
    c_verify->add_option("--seed", verify_seed, "base seed for the randomized suites");

    auto* c_certify = app.add_subcommand("certify", "certify full image of the mod-n action");
    u64 cert_q = 2;
    unsigned cert_r = 2;
    std::string cert_n;
    unsigned cert_samples = 64;
    u64 cert_seed = 1;
    c_certify->add_option("--q", cert_q, "base field size (prime power)")->required();
    c_certify->add_option("--r", cert_r, "rank")->required();
    c_certify->add_option("--n", cert_n, "level polynomial in t")->required();
    c_certify->add_option("--samples", cert_samples, "number of Frobenius samples");
    c_certify->add_option("--seed", cert_seed, "sampling seed");

    for (auto* sub : {c_field, c_psi, c_torsion, c_moore, c_group, c_frob, c_verify, c_certify})
        sub->add_option("--out", out_path, "write the JSON payload to this file");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*c_field) {
            auto F = detail::field_of_size(field_q);
            return detail::emit(field_json(F), out, err, out_path);
        }

        if (*c_psi) {
            auto psi = psi_args.build();
            return detail::emit(module_json(psi), out, err, out_path);
        }

        if (*c_torsion) {
            auto psi = tor_args.build();
            auto n = parse_poly(psi.base_field(), tor_n);
            auto T = torsion(psi, n);
            return detail::emit(torsion_json(T, !tor_no_points), out, err, out_path);
        }

        if (*c_moore) {
            auto [p, e] = detail::prime_power_split(moore_q);
            if (moore_m == 0) fail_input("BadDegree", "extension degree must be positive");
            auto K = Field::get(p, e * moore_m);
            auto xs = detail::parse_elem_list(K, moore_points, "--points");
            if (xs.empty()) fail_input("BadElement", "--points: need at least one point");
            ojson j;
            j["q"] = moore_q;
            ojson pts = ojson::array();
            for (const auto& x : xs) pts.push_back(elem_json(x));
            j["points"] = pts;
            auto d = moore_det(xs, moore_q);
            j["determinant"] = elem_json(d);
            j["independent"] = !d.is_zero();
            if (!d.is_zero()) {
                auto op = moore_interpolate(xs, moore_q);
                j["annihilator"] = operator_json(op);
                j["polynomial"] = op.to_poly().to_string();
            }
            return detail::emit(j, out, err, out_path);
        }

        if (*c_group) {
            auto Fq = detail::field_of_size(group_q);
            if (group_r == 0) fail_input("RankZero", "matrix dimension must be positive");
            auto n = monic(parse_poly(Fq, group_n));
            ojson j;
            j["q"] = group_q;
            j["dim"] = group_r;
            j["modulus"] = n.to_string();
            j["gl_order"] = gl_order(Fq, group_r, n);
            j["sl_order"] = sl_order(Fq, group_r, n);
            j["unit_count"] = residue_unit_count(Fq, n);
            u64 kernel_size = 1;
            bool small = true;
            for (unsigned i = 0; small && i < group_r * group_r * n.degree(); ++i) {
                kernel_size *= group_q;
                if (kernel_size > 4096) small = false;
            }
            if (small && n.degree() > 0) {
                auto kf = kernel_factorization_check(Fq, group_r, n);
                ojson k;
                k["count"] = kf.g_count;
                k["det_one_count"] = kf.s_count;
                k["unit1_count"] = kf.unit1_count;
                k["gl_order_level_tn"] = kf.gl_tn;
                k["gl_order_level_t"] = kf.gl_t;
                k["det_split"] = kf.det_split;
                k["reduction_split"] = kf.reduction_split;
                j["kernel_mod_t"] = k;
            }
            return detail::emit(j, out, err, out_path);
        }

        if (*c_frob) {
            Specialization spec;
            if (frob_args.given()) {
                auto psi = frob_args.build();
                spec.psi = psi;
                spec.n = monic(parse_poly(psi.base_field(), frob_n));
                spec.m = frob_args.m;
            } else {
                if (frob_r == 0)
                    fail_input("RankZero", "--r is required when drawing a module by seed");
                auto Fq = detail::field_of_size(frob_args.q);
                auto n = parse_poly(Fq, frob_n);
                spec = specialize(Fq, frob_r, n, frob_args.m, frob_seed);
            }
            auto s = frobenius_sample(spec);
            return detail::emit(sample_json(s), out, err, out_path);
        }

        if (*c_verify) {
            std::vector<SuiteResult> rs;
            if (verify_suite == "all")
                rs = verify_all(verify_seed);
            else
                rs.push_back(run_suite(verify_suite, verify_seed));
            ojson j;
            j["seed"] = verify_seed;
            ojson arr = ojson::array();
            unsigned checks = 0, failures = 0;
            for (const auto& s : rs) {
                arr.push_back(detail::suite_json(s));
                checks += s.checks;
                failures += s.failures;
                err << "suite " << s.name << ": " << s.checks << " checks, " << s.failures
                    << " failures\n";
            }
            j["suites"] = arr;
            j["checks"] = checks;
            j["failures"] = failures;
            j["ok"] = failures == 0;
            int rc = detail::emit(j, out, err, out_path);
            return rc != 0 ? rc : (failures == 0 ? 0 : 1);
        }

        if (*c_certify) {
            auto Fq = detail::field_of_size(cert_q);
            auto n = parse_poly(Fq, cert_n);
            auto rep = certify(Fq, cert_r, n, cert_samples, cert_seed);
            err << "verdict: " << rep.verdict << " (group order " << rep.group_order << ")\n";
            int rc = detail::emit(report_json(rep), out, err, out_path);
            return rc != 0 ? rc : (rep.certified ? 0 : 1);
        }

        fail_internal("no subcommand dispatched");
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::InvalidInput:
                return 2;
            case ErrorKind::CapExceeded:
                return 1;
            case ErrorKind::Internal:
                return 3;
        }
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace cli
}  // namespace dmod
