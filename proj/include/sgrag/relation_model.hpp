#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sgrag/scene_graph.hpp"

namespace sgrag {

struct ModelDims {
  int d = 64;    // shared semantic space
  int d_t = 50;  // prototype dimension
  int d_v = 128; // visual feature dimension
};

// Class prototypes for entity labels and predicates. All vectors share one
// dimension; labels are unique. Immutable after load.
struct PrototypeTable {
  int dimension = 0;
  std::map<std::string, Eigen::VectorXd> entity_prototypes;
  std::map<std::string, Eigen::VectorXd> predicate_prototypes;

  const Eigen::VectorXd& entity(std::string_view label) const;
  const Eigen::VectorXd& predicate(std::string_view label) const;
};

// GloVe-style text file: one `label v1 v2 ... v_d` per line. Duplicate labels
// are a conflict error.
std::map<std::string, Eigen::VectorXd> load_prototype_vectors(const std::string& path);

// Deterministic stand-in for a real embedding: same (seed, label, dim) always
// yields the same vector, uniform coordinates in [-1, 1].
Eigen::VectorXd pseudo_prototype(std::string_view label, int dim, std::uint64_t seed);

PrototypeTable make_pseudo_prototypes(const std::vector<std::string>& entity_labels,
                                      const std::vector<std::string>& predicate_labels,
                                      int dim, std::uint64_t seed);

struct AffineMap {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;

  Eigen::VectorXd apply(const Eigen::VectorXd& input) const;
};

// Forward-only weights; no training loop exists.
struct ModelWeights {
  ModelDims dims;
  Eigen::MatrixXd w_subject;    // d x d_t
  Eigen::MatrixXd w_object;     // d x d_t
  Eigen::MatrixXd w_predicate;  // d x d_t
  AffineMap fc_entity;          // 2d -> d, consumes [proto ; mapped visual]
  AffineMap fc_predicate;       // 2d -> d, consumes [fused ; mapped visual]
  AffineMap m_entity;           // d_v -> d visual-to-semantic map
  AffineMap m_predicate;        // d_v -> d

  // Seeded uniform entries in [-0.1, 0.1]; byte-stable across platforms.
  static ModelWeights seeded(const ModelDims& dims, std::uint64_t seed);

  void validate() const;  // shape consistency and finiteness
};

// Text tensor dump with a header naming each tensor and its shape.
void save_weights(const ModelWeights& weights, const std::string& path);
ModelWeights load_weights(const std::string& path);

// Fusion: ReLU(a + b) - (a - b)^2, elementwise. Symmetric in its arguments.
Eigen::VectorXd fuse(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Diagonals of the two Jacobians of fuse: d/da = 1[a+b>0] - 2(a-b) and
// d/db = 1[a+b>0] + 2(a-b). Any coordinate with a+b exactly 0 sits on the
// ReLU kink and raises a non-differentiable-point error.
struct FuseGradient {
  Eigen::VectorXd wrt_a;
  Eigen::VectorXd wrt_b;
};
FuseGradient fuse_gradient(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

enum class EntityRole { subject, object };

// o = W_role t + ReLU(FC([W_role t ; M(e)])) .* M(e).
Eigen::VectorXd entity_representation(std::string_view label, EntityRole role,
                                      const Eigen::VectorXd& visual_feature,
                                      const ModelWeights& weights,
                                      const PrototypeTable& prototypes);

// p = W_p t_p + ReLU(FC([fuse(o_subj, o_obj) ; M(e_p)])) .* M(e_p).
Eigen::VectorXd predicate_representation(std::string_view predicate,
                                         const Eigen::VectorXd& subject_repr,
                                         const Eigen::VectorXd& object_repr,
                                         const Eigen::VectorXd& union_feature,
                                         const ModelWeights& weights,
                                         const PrototypeTable& prototypes);

// Cosine similarity between fuse(o_subj, o_obj) and every predicate
// representation, sorted by score descending, ties by label ascending.
std::vector<std::pair<std::string, double>> score_predicates(
    const Eigen::VectorXd& subject_repr, const Eigen::VectorXd& object_repr,
    const Eigen::VectorXd& union_feature, const ModelWeights& weights,
    const PrototypeTable& prototypes);

// Deterministic stand-ins for detector features.
Eigen::VectorXd pseudo_visual_feature(std::string_view key, int dim, std::uint64_t seed);

// Scores every ordered object pair and keeps the top-1 predicate when its
// score exceeds the threshold. Replaces annotation relations when the CLI
// runs with --relation-model penet-toy.
std::vector<RelationTriple> infer_relations(const SceneGraph& graph,
                                            const ModelWeights& weights,
                                            const PrototypeTable& prototypes,
                                            double score_threshold,
                                            std::uint64_t seed);

}  // namespace sgrag
