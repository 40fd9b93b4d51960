#include "quadrep/reports.hpp"

#include <algorithm>
#include <sstream>

namespace quadrep {

using nlohmann::json;

HypothesisReport check_theorem_hypotheses(const GramMatrix& s, const GramMatrix& t, const Integer& q, int j,
                                          const Integer& c, const Integer& threshold, std::size_t witness_limit,
                                          const LocalSearchOptions& opts) {
    if (!is_prime(q)) throw ArgumentError("q must be prime: " + q.get_str());
    if (!is_positive_definite(s) || !is_positive_definite(t)) throw ArgumentError("S and T must be positive definite");
    if (j < 0) throw ArgumentError("j must be nonnegative");
    if (c < 1) throw ArgumentError("c must be positive");

    HypothesisReport r;
    r.s = s;
    r.t = t;
    r.q = q;
    r.j = j;
    r.c = c;
    r.threshold = threshold;
    r.witness_limit = witness_limit;
    const std::size_t n = s.rank(), m = t.rank();
    r.rank_check = m + 3 <= n;

    if (m <= n) {
        r.local = represents_locally_everywhere(s, t, c, opts);
        r.local_ok = r.local.all_representable();
    } else {
        r.local.other_primes_ok = false;
        r.local.other_primes_reason = "rank of T exceeds rank of S";
    }
    if (r.local_ok) {
        r.shortcut_used = auto_isotropy_shortcut(s, t, q);
        if (!r.shortcut_used) r.complement_isotropic = complement_isotropic_at_q(s, t, q);
        r.condition_i = r.shortcut_used || *r.complement_isotropic;
    }

    r.ord_q_det_t = ord_p(det(t), q);
    r.condition_ii = r.ord_q_det_t <= j;

    r.minimum_t = lattice_minimum(t);
    r.condition_iii = r.minimum_t > threshold;

    auto found = find_representations(s, t, c, witness_limit);
    r.witnesses_found = found.size();
    if (!found.empty()) {
        auto best = std::min_element(found.begin(), found.end(), [](const Embedding& a, const Embedding& b) {
            return a.imprimitivity_bound < b.imprimitivity_bound;
        });
        // the stored witness re-verifies tXSX = T on construction
        r.witness = Embedding::make(s, t, best->x);
        r.globally_represented = true;
    }
    return r;
}

std::vector<GramMatrix> FamilySpec::members() const {
    std::vector<GramMatrix> out;
    if (bound < 1) return out;
    const long b = bound.get_si();
    if (kind == "unary") {
        for (long t = 1; t <= b; ++t) out.push_back(GramMatrix::diagonal(std::vector<long>{t}));
    } else if (kind == "diag") {
        for (long x = 1; x <= b; ++x)
            for (long y = x; y <= b; ++y) {
                if (coprime_only && gcd(Integer(x), Integer(y)) != 1) continue;
                out.push_back(GramMatrix::diagonal(std::vector<long>{x, y}));
            }
    } else {
        throw ArgumentError("unknown family kind: " + kind);
    }
    return out;
}

std::string FamilySpec::describe() const {
    std::string d = kind == "unary" ? "(t), 1 <= t <= " + bound.get_str()
                                    : "diag(a,b), 1 <= a <= b <= " + bound.get_str();
    if (coprime_only && kind == "diag") d += ", gcd(a,b) = 1";
    return d;
}

ScanResult scan_family(const GramMatrix& s, const FamilySpec& family, const ScanOptions& opts) {
    if (!is_positive_definite(s)) throw ArgumentError("S must be positive definite");
    if (!is_prime(opts.q)) throw ArgumentError("q must be prime");
    ScanResult res;
    res.family = family.describe();
    res.s = s;
    res.q = opts.q;
    res.j = opts.j;
    res.c = opts.c;

    GenusRecord genus = enumerate_genus(s, opts.neighbor_prime, opts.class_cap, opts.extra_prime);
    if (!genus.complete) throw Error("scan_family: genus enumeration hit the class cap");
    res.neighbor_prime = genus.prime_used;
    res.classes = genus.classes.size();
    res.genus_complete = genus.complete;

    const auto members = family.members();
    std::size_t end = members.size();
    if (opts.max_rows > 0 && opts.resume + opts.max_rows < end) {
        end = opts.resume + opts.max_rows;
        res.resume_token = end;
    }
    bool eligible = false;
    Integer worst = 0;
    for (std::size_t i = opts.resume; i < end; ++i) {
        const GramMatrix& t = members[i];
        ScanRow row;
        row.t = t;
        row.det = det(t);
        row.mu = lattice_minimum(t);
        row.classes_total = res.classes;
        if (t.rank() <= s.rank()) {
            auto local = represents_locally_everywhere(s, t, opts.c, opts.local);
            row.undecided = local.any_undecided();
            bool cond_i = local.all_representable() &&
                          (auto_isotropy_shortcut(s, t, opts.q) || complement_isotropic_at_q(s, t, opts.q));
            bool cond_ii = ord_p(row.det, opts.q) <= opts.j;
            row.local_ok = cond_i && cond_ii;
        }
        if (row.local_ok) {
            eligible = true;
            std::size_t count = 0;
            for (const auto& cr : represented_by_all_classes(genus, t, opts.c))
                if (cr.represented) ++count;
            row.classes_representing = count;
            row.exception = count < row.classes_total;
            if (row.exception) {
                res.exceptions.push_back(res.rows.size());
                worst = std::max(worst, row.mu);
            }
        }
        res.rows.push_back(std::move(row));
    }
    if (eligible) res.empirical_c = worst;
    return res;
}

ReportFormat parse_format(const std::string& name) {
    if (name == "json") return ReportFormat::json;
    if (name == "csv") return ReportFormat::csv;
    throw ArgumentError("unknown format: " + name);
}

json to_json(const Integer& v) {
    if (v.fits_slong_p()) return json(v.get_si());
    return json(v.get_str());
}

json to_json(const IntMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const GramMatrix& s) { return to_json(s.matrix()); }

json to_json(const LocalRepCertificate& c) {
    json j;
    j["place"] = c.prime.to_string();
    j["status"] = to_string(c.status);
    j["method"] = c.method;
    j["precision"] = c.precision;
    j["margin"] = c.margin;
    j["elementary_divisor_valuations"] = c.elementary_divisor_valuations;
    j["nodes"] = c.nodes;
    j["witness"] = c.witness ? to_json(*c.witness) : json(nullptr);
    return j;
}

json to_json(const LocalEverywhereReport& r) {
    json j;
    json places = json::array();
    for (const auto& [v, cert] : r.places) places.push_back(to_json(cert));
    j["places"] = places;
    j["other_primes_ok"] = r.other_primes_ok;
    j["other_primes_reason"] = r.other_primes_reason;
    j["all_representable"] = r.all_representable();
    j["any_undecided"] = r.any_undecided();
    return j;
}

json to_json(const Embedding& e) {
    json j;
    j["x"] = to_json(e.x);
    json d = json::array();
    for (const auto& v : e.elementary_divisors) d.push_back(to_json(v));
    j["elementary_divisors"] = d;
    j["imprimitivity_bound"] = to_json(e.imprimitivity_bound);
    return j;
}

json to_json(const ShortVectorReport& r) {
    json j;
    j["bound"] = to_json(r.bound);
    j["minimum"] = to_json(r.minimum);
    json vs = json::array();
    for (std::size_t i = 0; i < r.vectors.size(); ++i) {
        json v = json::array();
        for (const auto& e : r.vectors[i]) v.push_back(to_json(e));
        vs.push_back(json{{"norm", to_json(r.norms[i])}, {"vector", v}});
    }
    j["vectors"] = vs;
    j["count_up_to_sign"] = r.vectors.size();
    return j;
}

json to_json(const SpaceInvariants& inv) {
    json j;
    j["rank"] = inv.rank;
    j["det_class"] = to_json(inv.det_class);
    j["signature"] = {inv.positive, inv.negative};
    json h;
    h["inf"] = inv.hasse_infinity;
    for (const auto& p : inv.relevant_primes()) h[p.get_str()] = inv.hasse_at(Place::finite(p));
    j["hasse"] = h;
    return j;
}

json to_json(const JordanSplitting& js) {
    json j;
    j["prime"] = to_json(js.prime);
    j["precision"] = js.precision;
    json comps = json::array();
    for (const auto& c : js.components) {
        json cj;
        cj["scale"] = c.scale;
        cj["rank"] = c.rank;
        cj["unit_block"] = to_json(c.unit_block);
        if (js.prime == 2) cj["odd"] = c.odd;
        comps.push_back(cj);
    }
    j["components"] = comps;
    return j;
}

json to_json(const GenusRecord& g) {
    json j;
    j["schema_version"] = schema_version;
    j["seed"] = to_json(g.seed);
    j["prime_used"] = to_json(g.prime_used);
    j["extra_prime"] = g.extra_prime ? to_json(*g.extra_prime) : json(nullptr);
    j["label"] = g.extra_prime ? "neighbor closure at two primes" : "spinor genus component (single-prime closure)";
    json classes = json::array();
    for (std::size_t i = 0; i < g.classes.size(); ++i) {
        const auto& f = g.fingerprints[i];
        classes.push_back(json{{"gram", to_json(g.classes[i])},
                               {"det", to_json(f.det)},
                               {"minimum", to_json(f.minimum)},
                               {"minimal_vectors", f.minimal_vectors},
                               {"vectors_up_to_twice_minimum", f.up_to_twice_minimum}});
    }
    j["classes"] = classes;
    json edges = json::array();
    for (const auto& [a, b] : g.edges) edges.push_back({a, b});
    j["edges"] = edges;
    j["complete"] = g.complete;
    return j;
}

json to_json(const HypothesisReport& r) {
    json j;
    j["schema_version"] = schema_version;
    j["inputs"] = json{{"S", to_json(r.s)},   {"T", to_json(r.t)}, {"q", to_json(r.q)},
                       {"j", r.j},            {"c", to_json(r.c)}, {"C", to_json(r.threshold)}};
    j["rank_check"] = r.rank_check;
    j["condition_i"] = json{{"holds", r.condition_i},
                            {"local", to_json(r.local)},
                            {"local_ok", r.local_ok},
                            {"shortcut_used", r.shortcut_used},
                            {"complement_isotropic_at_q",
                             r.complement_isotropic ? json(*r.complement_isotropic) : json(nullptr)}};
    j["condition_ii"] = json{{"holds", r.condition_ii}, {"ord_q_det_T", r.ord_q_det_t}, {"j", r.j}};
    j["condition_iii"] = json{{"holds", r.condition_iii}, {"minimum_T", to_json(r.minimum_t)},
                              {"C", to_json(r.threshold)}};
    j["globally_represented"] = r.globally_represented;
    j["witness"] = r.witness ? to_json(*r.witness) : json(nullptr);
    j["witnesses_found"] = r.witnesses_found;
    j["witness_limit"] = r.witness_limit;
    j["hypotheses_hold"] = r.hypotheses_hold();
    return j;
}

json to_json(const ScanResult& r) {
    json j;
    j["schema_version"] = schema_version;
    j["family"] = r.family;
    j["S"] = to_json(r.s);
    j["q"] = to_json(r.q);
    j["j"] = r.j;
    j["c"] = to_json(r.c);
    j["neighbor_prime"] = to_json(r.neighbor_prime);
    j["classes"] = r.classes;
    j["genus_complete"] = r.genus_complete;
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back(json{{"T", to_json(row.t)},
                            {"det", to_json(row.det)},
                            {"mu", to_json(row.mu)},
                            {"local_ok", row.local_ok},
                            {"undecided", row.undecided},
                            {"classes_total", row.classes_total},
                            {"classes_representing",
                             row.classes_representing ? json(*row.classes_representing) : json(nullptr)},
                            {"exception", row.exception}});
    }
    j["rows"] = rows;
    j["exceptions"] = r.exceptions;
    j["empirical_C"] = r.empirical_c ? to_json(*r.empirical_c) : json(nullptr);
    j["resume_token"] = r.resume_token ? json(*r.resume_token) : json(nullptr);
    return j;
}

std::string report_emit(const HypothesisReport& r, ReportFormat f) {
    if (f != ReportFormat::json) throw ArgumentError("hypothesis reports are JSON only");
    return to_json(r).dump(2) + "\n";
}

std::string report_emit(const ScanResult& r, ReportFormat f) {
    if (f == ReportFormat::json) return to_json(r).dump(2) + "\n";
    std::ostringstream os;
    os << scan_csv_header << "\n";
    for (const auto& row : r.rows) {
        os << row.det.get_str() << ',' << row.mu.get_str() << ',' << (row.local_ok ? 1 : 0) << ','
           << row.classes_total << ',';
        if (row.classes_representing) os << *row.classes_representing;
        os << ',' << (row.exception ? 1 : 0) << "\n";
    }
    return os.str();
}

}  // namespace quadrep
