#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "quadrep/exact_core.hpp"
#include "quadrep/lattice_enum.hpp"

namespace quadrep {

/// Cheap isometry invariants used to bucket lattices before backtracking.
struct Fingerprint {
    Integer det;
    Integer minimum;
    std::size_t minimal_vectors = 0;  // counted with both signs
    std::size_t up_to_twice_minimum = 0;

    friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;
};

Fingerprint fingerprint(const GramMatrix& s);

/// A unimodular U with tU S1 U = S2, or none.
std::optional<IntMatrix> find_isometry(const GramMatrix& s1, const GramMatrix& s2);
bool is_isometric(const GramMatrix& s1, const GramMatrix& s2);

/// An automorphism g of S (tg S g = S) with g a_i = b_i for the given column sets, or none.
std::optional<IntMatrix> find_automorphism_mapping(const GramMatrix& s, const IntMatrix& a, const IntMatrix& b);

/// One embedding per Aut(S)-orbit, keeping the first of each orbit in input order.
std::vector<Embedding> dedup_under_automorphisms(const GramMatrix& s, const std::vector<Embedding>& embeddings);

/// Square class of Q(v); throws DegenerateError when Q(v) = 0.
Integer spinor_norm_reflection(const GramMatrix& s, const IntVector& v);

/// Square class of the product of Q(v_i): the spinor norm of the composite reflection.
Integer spinor_norm_of_reflections(const GramMatrix& s, const std::vector<IntVector>& vs);

/// p-neighbors of S up to isometry, each as an LLL-reduced Gram. Requires p odd, p not dividing det S.
std::vector<GramMatrix> p_neighbors(const GramMatrix& s, const Integer& p);

struct GenusRecord {
    GramMatrix seed;
    Integer prime_used;
    std::optional<Integer> extra_prime;  // second neighbor prime, when requested
    std::vector<GramMatrix> classes;     // LLL-reduced representatives, classes[0] ~ seed
    std::vector<Fingerprint> fingerprints;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // neighbor graph on class indices
    bool complete = false;
};

/// Breadth-first closure of the neighbor step. p = 0 picks the smallest admissible odd prime.
GenusRecord enumerate_genus(const GramMatrix& s, const Integer& p = 0, std::size_t class_cap = 64,
                            bool use_extra_prime = false);

/// Smallest odd prime not dividing det S (and different from `avoid`).
Integer default_neighbor_prime(const GramMatrix& s, const Integer& avoid = 0);

struct ClassRepresentation {
    std::size_t class_index = 0;
    bool represented = false;
    std::optional<Embedding> witness;
};

/// For each class, whether find_representations(class, T, c) is nonempty. Throws on an incomplete record.
std::vector<ClassRepresentation> represented_by_all_classes(const GenusRecord& g, const GramMatrix& t,
                                                            const Integer& c);

}  // namespace quadrep
