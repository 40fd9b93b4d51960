#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadrep/exact_core.hpp"
#include "quadrep/genus_tools.hpp"
#include "quadrep/lattice_enum.hpp"
#include "quadrep/local_invariants.hpp"
#include "quadrep/local_reps.hpp"

namespace quadrep {

inline constexpr int schema_version = 1;

struct HypothesisReport {
    GramMatrix s, t;
    Integer q, c, threshold;
    int j = 0;

    bool rank_check = false;  // m <= n - 3

    // condition (i)
    LocalEverywhereReport local;
    bool local_ok = false;
    bool shortcut_used = false;
    std::optional<bool> complement_isotropic;  // evaluated when the shortcut does not apply
    bool condition_i = false;

    // condition (ii): ord_q(det T) <= j
    int ord_q_det_t = 0;
    bool condition_ii = false;

    // condition (iii): mu(T) > C
    Integer minimum_t;
    bool condition_iii = false;

    bool globally_represented = false;
    std::optional<Embedding> witness;  // smallest imprimitivity bound among the witnesses found
    std::size_t witnesses_found = 0;
    std::size_t witness_limit = 0;

    bool hypotheses_hold() const { return rank_check && condition_i && condition_ii && condition_iii; }
    bool undecided() const { return local.any_undecided(); }
};

HypothesisReport check_theorem_hypotheses(const GramMatrix& s, const GramMatrix& t, const Integer& q, int j,
                                          const Integer& c, const Integer& threshold, std::size_t witness_limit = 64,
                                          const LocalSearchOptions& opts = {});

struct FamilySpec {
    std::string kind;   // "diag": diag(a, b) with 1 <= a <= b <= bound; "unary": (t) with 1 <= t <= bound
    Integer bound = 0;
    bool coprime_only = false;  // diag only: gcd(a, b) = 1

    std::vector<GramMatrix> members() const;
    std::string describe() const;
};

struct ScanOptions {
    Integer q = 3;
    int j = 1;
    Integer c = 1;
    Integer neighbor_prime = 0;  // 0: smallest odd prime not dividing det S
    bool extra_prime = false;
    std::size_t class_cap = 64;
    std::size_t max_rows = 0;  // 0: no pagination
    std::size_t resume = 0;    // index of the first family member to process
    LocalSearchOptions local;
};

struct ScanRow {
    GramMatrix t;
    Integer det;
    Integer mu;
    bool local_ok = false;   // conditions (i) and (ii)
    bool undecided = false;  // some local certificate undecided
    std::size_t classes_total = 0;
    std::optional<std::size_t> classes_representing;  // evaluated only when local_ok
    bool exception = false;  // local_ok but some class fails to represent
};

struct ScanResult {
    std::string family;
    GramMatrix s;
    Integer q, c;
    int j = 0;
    Integer neighbor_prime;
    std::size_t classes = 0;
    bool genus_complete = false;
    std::vector<ScanRow> rows;
    std::vector<std::size_t> exceptions;  // row indices
    /// Largest minimum among exceptions, 0 without exceptions; none when no row was eligible.
    std::optional<Integer> empirical_c;
    std::optional<std::size_t> resume_token;  // next member index when the page was cut short
};

ScanResult scan_family(const GramMatrix& s, const FamilySpec& family, const ScanOptions& opts);

enum class ReportFormat { json, csv };
ReportFormat parse_format(const std::string& name);

std::string report_emit(const HypothesisReport& r, ReportFormat f);
std::string report_emit(const ScanResult& r, ReportFormat f);

inline constexpr const char* scan_csv_header = "det,mu,local_ok,classes_total,classes_representing,exception";

// JSON encodings shared by the CLI; integers that fit in 64 bits are numbers, larger ones strings.
nlohmann::json to_json(const Integer& v);
nlohmann::json to_json(const IntMatrix& m);
nlohmann::json to_json(const GramMatrix& s);
nlohmann::json to_json(const LocalRepCertificate& c);
nlohmann::json to_json(const LocalEverywhereReport& r);
nlohmann::json to_json(const Embedding& e);
nlohmann::json to_json(const ShortVectorReport& r);
nlohmann::json to_json(const SpaceInvariants& inv);
nlohmann::json to_json(const JordanSplitting& js);
nlohmann::json to_json(const GenusRecord& g);
nlohmann::json to_json(const HypothesisReport& r);
nlohmann::json to_json(const ScanResult& r);

}  // namespace quadrep
