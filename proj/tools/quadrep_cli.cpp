// Command-line front end: exact invariants, local and global representation, genus closure,
// hypothesis checks and family scans. Reports are JSON unless --format csv is given.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "quadrep/reports.hpp"

using namespace quadrep;
using nlohmann::json;

namespace {

enum Exit { exit_ok = 0, exit_negative = 1, exit_input = 2, exit_undecided = 3 };

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Rectangular integer matrix from a JSON array of rows.
IntMatrix read_matrix_file(const std::string& path) {
    json j;
    try {
        j = json::parse(slurp(path));
    } catch (const json::exception& e) {
        throw ArgumentError(path + ": " + e.what());
    }
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw ArgumentError(path + ": expected an array of rows");
    IntMatrix m(j.size(), j[0].size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != m.cols()) throw ArgumentError(path + ": ragged matrix");
        for (std::size_t k = 0; k < m.cols(); ++k) {
            const auto& e = j[i][k];
            if (e.is_number_integer()) m(i, k) = Integer(std::to_string(e.get<long long>()));
            else if (e.is_string()) m(i, k) = Integer(e.get<std::string>());
            else throw ArgumentError(path + ": non-integer entry");
        }
    }
    return m;
}

Integer parse_integer(const std::string& s, const char* what) {
    Integer v;
    if (s.empty() || v.set_str(s, 10) != 0) throw ArgumentError(std::string("bad integer for ") + what + ": " + s);
    return v;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

int exit_for(const LocalEverywhereReport& r) {
    if (r.any_undecided()) return exit_undecided;
    return r.all_representable() ? exit_ok : exit_negative;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadrep: exact tools for representations of integral quadratic forms"};
    app.require_subcommand(1);

    std::string gram_file, target_file, sigma_file, glue_file, format = "json", family = "diag";
    std::string q_str = "3", c_str = "1", p_str, threshold_str = "0", bound_str, prime_str = "0";
    int j_val = 1;
    std::size_t limit = 0, cap = 64, max_rows = 0, resume = 0, budget = LocalSearchOptions{}.node_budget;
    bool extra_prime = false, dedup_aut = false, coprime = false;

    auto add_gram = [&](CLI::App* sub) {
        sub->add_option("--gram", gram_file, "Gram matrix of S (plain text or JSON)")->required();
    };
    auto add_target = [&](CLI::App* sub) {
        sub->add_option("--target", target_file, "Gram matrix of T (plain text or JSON)")->required();
    };
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };

    auto* inv = app.add_subcommand("invariants", "det, definiteness, Smith divisors and rational invariants of S");
    add_gram(inv);

    auto* jor = app.add_subcommand("jordan", "Jordan splitting of S over Z_p");
    add_gram(jor);
    jor->add_option("-p,--prime", p_str, "prime")->required();

    auto* loc = app.add_subcommand("localrep", "local representation certificates at every place");
    add_gram(loc);
    add_target(loc);
    loc->add_option("-c", c_str, "imprimitivity bound c");
    loc->add_option("-p,--prime", p_str, "decide a single prime only");
    loc->add_option("--budget", budget, "search node budget per prime");

    auto* iso = app.add_subcommand("isotropy", "isotropy over Q_q of the complement of T in S");
    add_gram(iso);
    add_target(iso);
    iso->add_option("-q", q_str, "prime q");
    iso->add_option("--embedding", sigma_file, "exact X (JSON rows) instead of Witt cancellation");

    auto* mini = app.add_subcommand("minimum", "lattice minimum and short vectors");
    add_gram(mini);
    mini->add_option("--bound", bound_str, "list vectors with norm <= bound (default: the minimum)");
    add_format(mini);

    auto* rep = app.add_subcommand("represent", "all X with tXSX = T and imprimitivity dividing c");
    add_gram(rep);
    add_target(rep);
    rep->add_option("-c", c_str, "imprimitivity bound c");
    rep->add_option("--limit", limit, "stop after this many (0: all)");
    rep->add_flag("--dedup-aut", dedup_aut, "keep one representation per Aut(S)-orbit");

    auto* ext = app.add_subcommand("extend", "extend sigma: R -> S to M -> S");
    add_gram(ext);
    add_target(ext);
    ext->add_option("--sigma", sigma_file, "embedding matrix of R in S (JSON rows)")->required();
    ext->add_option("--glue", glue_file, "coordinates of R's basis in M's basis (JSON rows)")->required();

    auto* gen = app.add_subcommand("genus", "neighbor closure of the genus of S");
    add_gram(gen);
    gen->add_option("-p,--prime", prime_str, "odd neighbor prime not dividing det S (0: smallest)");
    gen->add_option("--cap", cap, "class cap");
    gen->add_flag("--extra-prime", extra_prime, "also close under a second neighbor prime");

    auto* chk = app.add_subcommand(
        "check", "evaluate the hypotheses (rank, conditions i-iii) and search a witness.\n"
                 "Condition (ii) is tested as ord_q(det T) <= j; the divisibility phrasing "
                 "q^j does not divide det T corresponds to ord_q(det T) <= j - 1.");
    add_gram(chk);
    add_target(chk);
    chk->add_option("-q", q_str, "prime q");
    chk->add_option("-j", j_val, "valuation bound j");
    chk->add_option("-c", c_str, "imprimitivity bound c");
    chk->add_option("-C,--threshold", threshold_str, "minimum threshold C (condition iii: mu(T) > C)");
    chk->add_option("--limit", limit, "witness search cap (0: 64)");
    chk->add_option("--budget", budget, "local search node budget per prime");

    auto* scan = app.add_subcommand("scan", "scan a target family against every class of the genus");
    add_gram(scan);
    scan->add_option("--family", family, "diag or unary")->check(CLI::IsMember({"diag", "unary"}));
    scan->add_option("--bound", bound_str, "family bound B")->required();
    scan->add_flag("--coprime", coprime, "diag family: only gcd(a,b) = 1");
    scan->add_option("-q", q_str, "prime q");
    scan->add_option("-j", j_val, "valuation bound j (ord_q(det T) <= j)");
    scan->add_option("-c", c_str, "imprimitivity bound c");
    scan->add_option("--neighbor-prime", prime_str, "neighbor prime (0: smallest admissible)");
    scan->add_flag("--extra-prime", extra_prime, "close the genus under a second prime as well");
    scan->add_option("--cap", cap, "class cap");
    scan->add_option("--max-rows", max_rows, "page size (0: everything)");
    scan->add_option("--resume", resume, "resume token from a previous page");
    add_format(scan);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        const GramMatrix s = read_gram_file(gram_file);
        auto target = [&] { return read_gram_file(target_file); };
        LocalSearchOptions opts;
        opts.node_budget = budget;

        if (*inv) {
            json j;
            j["schema_version"] = schema_version;
            j["rank"] = s.rank();
            j["det"] = to_json(det(s));
            j["positive_definite"] = is_positive_definite(s);
            json sd = json::array();
            for (const auto& d : smith_normal_form(s.matrix()).divisors) sd.push_back(to_json(d));
            j["smith_divisors"] = sd;
            j["diagonal_over_q"] = json::array();
            for (const auto& d : diagonalize_over_q(s)) j["diagonal_over_q"].push_back(d.get_str());
            if (det(s) != 0) j["space"] = to_json(space_invariants(s));
            print(j);
            return exit_ok;
        }
        if (*jor) {
            json j = to_json(jordan_decomposition(s, parse_integer(p_str, "p")));
            j["schema_version"] = schema_version;
            print(j);
            return exit_ok;
        }
        if (*loc) {
            const GramMatrix t = target();
            const Integer c = parse_integer(c_str, "c");
            if (!p_str.empty()) {
                auto cert = represents_over_zp(s, t, parse_integer(p_str, "p"), c, opts);
                json j = to_json(cert);
                j["schema_version"] = schema_version;
                print(j);
                if (cert.status == LocalStatus::undecided) return exit_undecided;
                return cert.representable() ? exit_ok : exit_negative;
            }
            auto r = represents_locally_everywhere(s, t, c, opts);
            json j = to_json(r);
            j["schema_version"] = schema_version;
            print(j);
            return exit_for(r);
        }
        if (*iso) {
            const GramMatrix t = target();
            const Integer q = parse_integer(q_str, "q");
            json j;
            j["schema_version"] = schema_version;
            j["shortcut"] = auto_isotropy_shortcut(s, t, q);
            bool result;
            if (!sigma_file.empty()) {
                IntMatrix x = read_matrix_file(sigma_file);
                Embedding e = Embedding::make(s, t, x);
                result = complement_isotropic_at_q(s, e.x, q);
                j["method"] = "exact complement";
            } else {
                result = complement_isotropic_at_q(s, t, q);
                j["method"] = "Witt cancellation";
            }
            j["complement_isotropic"] = result;
            print(j);
            return result ? exit_ok : exit_negative;
        }
        if (*mini) {
            const Integer m = lattice_minimum(s);
            const Integer b = bound_str.empty() ? m : parse_integer(bound_str, "bound");
            auto r = short_vectors(s, b);
            if (format == "csv") {
                std::cout << "norm,vector\n";
                for (std::size_t i = 0; i < r.vectors.size(); ++i) {
                    std::cout << r.norms[i].get_str() << ",\"";
                    for (std::size_t k = 0; k < r.vectors[i].size(); ++k)
                        std::cout << (k ? " " : "") << r.vectors[i][k].get_str();
                    std::cout << "\"\n";
                }
            } else {
                json j = to_json(r);
                j["schema_version"] = schema_version;
                j["minimum"] = to_json(m);
                print(j);
            }
            return exit_ok;
        }
        if (*rep) {
            const GramMatrix t = target();
            auto found = find_representations(s, t, parse_integer(c_str, "c"), limit);
            if (dedup_aut) found = dedup_under_automorphisms(s, found);
            json j;
            j["schema_version"] = schema_version;
            j["count"] = found.size();
            j["orbits_only"] = dedup_aut;
            j["embeddings"] = json::array();
            for (const auto& e : found) j["embeddings"].push_back(to_json(e));
            print(j);
            return found.empty() ? exit_negative : exit_ok;
        }
        if (*ext) {
            const GramMatrix m = target();
            IntMatrix x = read_matrix_file(sigma_file);
            IntMatrix glue = read_matrix_file(glue_file);
            Embedding sigma = Embedding::make(s, s.congruent(x), x);
            auto tau = extend_representation(s, sigma, m, glue);
            json j;
            j["schema_version"] = schema_version;
            j["tau"] = tau ? to_json(*tau) : json(nullptr);
            print(j);
            return tau ? exit_ok : exit_negative;
        }
        if (*gen) {
            auto g = enumerate_genus(s, parse_integer(prime_str, "prime"), cap, extra_prime);
            print(to_json(g));
            return exit_ok;
        }
        if (*chk) {
            const GramMatrix t = target();
            auto r = check_theorem_hypotheses(s, t, parse_integer(q_str, "q"), j_val, parse_integer(c_str, "c"),
                                              parse_integer(threshold_str, "C"), limit ? limit : 64, opts);
            std::cout << report_emit(r, ReportFormat::json);
            if (r.undecided()) return exit_undecided;
            return r.hypotheses_hold() ? exit_ok : exit_negative;
        }
        if (*scan) {
            FamilySpec fam{family, parse_integer(bound_str, "bound"), coprime};
            ScanOptions so;
            so.q = parse_integer(q_str, "q");
            so.j = j_val;
            so.c = parse_integer(c_str, "c");
            so.neighbor_prime = parse_integer(prime_str, "neighbor prime");
            so.extra_prime = extra_prime;
            so.class_cap = cap;
            so.max_rows = max_rows;
            so.resume = resume;
            so.local = opts;
            auto r = scan_family(s, fam, so);
            std::cout << report_emit(r, parse_format(format));
            for (const auto& row : r.rows)
                if (row.undecided) return exit_undecided;
            return exit_ok;
        }
    } catch (const ArgumentError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    } catch (const DegenerateError& e) {
        std::cerr << "degenerate input: " << e.what() << "\n";
        return exit_input;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
    return exit_ok;
}
