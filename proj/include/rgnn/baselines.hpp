#pragma once

#include <map>
#include <string>
#include <vector>

#include "rgnn/core.hpp"
#include "rgnn/network.hpp"
#include "rgnn/pair_transform.hpp"
#include "rgnn/tensor.hpp"

namespace rgnn {

// Binary predicates routing the two 2-OWL multisets.
inline const std::string kTwoGnnLeft = "p1";
inline const std::string kTwoGnnRight = "p2";

inline constexpr std::size_t kTwoGnnObjectCap = 30;
inline constexpr std::size_t kRgnn2ObjectCap = 40;

// Learned per-predicate vectors for the ET-style initial pair encoding;
// unary predicates are read as binary by repeating the first term.
struct PairEmbeddingVocab {
    int dim = 0;
    std::map<std::string, Tensor> vectors;  // predicate name -> 1 x dim
};

// e_{o,o'} = sum_p (e_p [p(o,o') in S] + e_{p_g} [p(o,o') in G]);
// output is row-major over O x O. Domains with ternary predicates are
// rejected (ArityTooHighError).
Tensor initial_pair_embeddings(const RelationalState& state,
                               const PairEmbeddingVocab& vocab);

struct TwoGnnMarks {
    std::vector<std::vector<int>> marks;  // per pair node, sorted vocab slots
    std::vector<std::string> mark_vocab;  // slot -> predicate name
};

// Which predicate vectors contribute to each pair's initial embedding.
TwoGnnMarks two_gnn_marks(const RelationalState& augmented);

// Full 2-OWL routing atoms p1(<w,v>,<u,v>) and p2(<u,w>,<u,v>) over all
// u,v,w; exactly 2n^3 atoms on n objects.
NetworkInput build_2gnn_input(const RelationalState& augmented,
                              const Vocabulary& net_vocab,
                              std::size_t max_objects = kTwoGnnObjectCap);

// A_0(S) plus every triangle over O^3 (n^3 atoms).
TransformedState build_rgnn2_input(const RelationalState& augmented_with_obj,
                                   std::size_t max_objects = kRgnn2ObjectCap);

}  // namespace rgnn
