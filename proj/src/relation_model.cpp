#include "sgrag/relation_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sgrag/errors.hpp"
#include "sgrag/util.hpp"

namespace sgrag {
namespace {

void check_same_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       std::string_view what) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::dimension,
                std::string(what) + ": lengths " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()) + " differ");
  }
}

void check_finite(const Eigen::MatrixXd& m, std::string_view name) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::validation, std::string(name) + ": non-finite entries");
  }
}

Eigen::VectorXd seeded_vector(std::uint64_t seed, Eigen::Index size, double lo, double hi) {
  SplitMix64 rng(seed);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    v[i] = rng.uniform(lo, hi);
  }
  return v;
}

Eigen::MatrixXd seeded_matrix(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols,
                              double lo, double hi) {
  SplitMix64 rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {  // row-major fill, matches the file format
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = rng.uniform(lo, hi);
    }
  }
  return m;
}

double cosine_or_zero(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double na = a.norm();
  double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    return 0.0;
  }
  return a.dot(b) / (na * nb);
}

}  // namespace

const Eigen::VectorXd& PrototypeTable::entity(std::string_view label) const {
  auto it = entity_prototypes.find(std::string(label));
  if (it == entity_prototypes.end()) {
    throw Error(ErrorCode::vocabulary,
                "no entity prototype for label '" + std::string(label) + "'");
  }
  return it->second;
}

const Eigen::VectorXd& PrototypeTable::predicate(std::string_view label) const {
  auto it = predicate_prototypes.find(std::string(label));
  if (it == predicate_prototypes.end()) {
    throw Error(ErrorCode::vocabulary,
                "no predicate prototype for '" + std::string(label) + "'");
  }
  return it->second;
}

std::map<std::string, Eigen::VectorXd> load_prototype_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::input, "cannot open prototype file: " + path);
  }
  std::map<std::string, Eigen::VectorXd> table;
  std::ptrdiff_t dim = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream tokens(line);
    std::string label;
    tokens >> label;
    std::vector<double> values;
    double value;
    while (tokens >> value) {
      values.push_back(value);
    }
    if (!tokens.eof()) {
      throw Error(ErrorCode::parse,
                  path + ":" + std::to_string(line_no) + ": non-numeric vector entry");
    }
    if (label.empty() || values.empty()) {
      throw Error(ErrorCode::parse,
                  path + ":" + std::to_string(line_no) + ": expected 'label v1 v2 ...'");
    }
    if (dim < 0) {
      dim = static_cast<std::ptrdiff_t>(values.size());
    } else if (dim != static_cast<std::ptrdiff_t>(values.size())) {
      throw Error(ErrorCode::dimension,
                  path + ":" + std::to_string(line_no) + ": vector length " +
                      std::to_string(values.size()) + " != " + std::to_string(dim));
    }
    std::string normalized = normalize_label(label);
    if (table.count(normalized)) {
      throw Error(ErrorCode::conflict,
                  path + ":" + std::to_string(line_no) + ": duplicate label '" +
                      normalized + "'");
    }
    table.emplace(std::move(normalized),
                  Eigen::Map<Eigen::VectorXd>(values.data(),
                                              static_cast<Eigen::Index>(values.size())));
  }
  return table;
}

Eigen::VectorXd pseudo_prototype(std::string_view label, int dim, std::uint64_t seed) {
  return seeded_vector(stream_seed(seed, "prototype/" + std::string(label)), dim, -1.0, 1.0);
}

PrototypeTable make_pseudo_prototypes(const std::vector<std::string>& entity_labels,
                                      const std::vector<std::string>& predicate_labels,
                                      int dim, std::uint64_t seed) {
  PrototypeTable table;
  table.dimension = dim;
  for (const auto& label : entity_labels) {
    table.entity_prototypes.emplace(label, pseudo_prototype(label, dim, seed));
  }
  for (const auto& label : predicate_labels) {
    table.predicate_prototypes.emplace(label, pseudo_prototype("p:" + label, dim, seed));
  }
  return table;
}

Eigen::VectorXd AffineMap::apply(const Eigen::VectorXd& input) const {
  if (input.size() != weight.cols()) {
    throw Error(ErrorCode::dimension,
                "affine map expects input of length " + std::to_string(weight.cols()) +
                    ", got " + std::to_string(input.size()));
  }
  return weight * input + bias;
}

ModelWeights ModelWeights::seeded(const ModelDims& dims, std::uint64_t seed) {
  auto mat = [&](std::string_view tag, Eigen::Index rows, Eigen::Index cols) {
    return seeded_matrix(stream_seed(seed, "weights/" + std::string(tag)), rows, cols,
                         -0.1, 0.1);
  };
  auto vec = [&](std::string_view tag, Eigen::Index size) {
    return seeded_vector(stream_seed(seed, "weights/" + std::string(tag)), size, -0.1, 0.1);
  };
  ModelWeights weights;
  weights.dims = dims;
  weights.w_subject = mat("w_subject", dims.d, dims.d_t);
  weights.w_object = mat("w_object", dims.d, dims.d_t);
  weights.w_predicate = mat("w_predicate", dims.d, dims.d_t);
  weights.fc_entity = {mat("fc_entity.weight", dims.d, 2 * dims.d),
                       vec("fc_entity.bias", dims.d)};
  weights.fc_predicate = {mat("fc_predicate.weight", dims.d, 2 * dims.d),
                          vec("fc_predicate.bias", dims.d)};
  weights.m_entity = {mat("m_entity.weight", dims.d, dims.d_v),
                      vec("m_entity.bias", dims.d)};
  weights.m_predicate = {mat("m_predicate.weight", dims.d, dims.d_v),
                         vec("m_predicate.bias", dims.d)};
  weights.validate();
  return weights;
}

void ModelWeights::validate() const {
  const Eigen::Index d = dims.d, d_t = dims.d_t, d_v = dims.d_v;
  if (d <= 0 || d_t <= 0 || d_v <= 0) {
    throw Error(ErrorCode::validation, "model dimensions must be positive");
  }
  auto expect = [](const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols,
                   std::string_view name) {
    if (m.rows() != rows || m.cols() != cols) {
      throw Error(ErrorCode::dimension,
                  std::string(name) + ": expected " + std::to_string(rows) + "x" +
                      std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()));
    }
  };
  expect(w_subject, d, d_t, "w_subject");
  expect(w_object, d, d_t, "w_object");
  expect(w_predicate, d, d_t, "w_predicate");
  expect(fc_entity.weight, d, 2 * d, "fc_entity.weight");
  expect(fc_entity.bias, d, 1, "fc_entity.bias");
  expect(fc_predicate.weight, d, 2 * d, "fc_predicate.weight");
  expect(fc_predicate.bias, d, 1, "fc_predicate.bias");
  expect(m_entity.weight, d, d_v, "m_entity.weight");
  expect(m_entity.bias, d, 1, "m_entity.bias");
  expect(m_predicate.weight, d, d_v, "m_predicate.weight");
  expect(m_predicate.bias, d, 1, "m_predicate.bias");
  check_finite(w_subject, "w_subject");
  check_finite(w_object, "w_object");
  check_finite(w_predicate, "w_predicate");
  check_finite(fc_entity.weight, "fc_entity.weight");
  check_finite(fc_entity.bias, "fc_entity.bias");
  check_finite(fc_predicate.weight, "fc_predicate.weight");
  check_finite(fc_predicate.bias, "fc_predicate.bias");
  check_finite(m_entity.weight, "m_entity.weight");
  check_finite(m_entity.bias, "m_entity.bias");
  check_finite(m_predicate.weight, "m_predicate.weight");
  check_finite(m_predicate.bias, "m_predicate.bias");
}

namespace {

constexpr std::string_view kWeightsMagic = "sgrag-tensors v1";

void write_tensor(std::ostream& out, std::string_view name, const Eigen::MatrixXd& m) {
  out << "tensor " << name << " " << m.rows() << " " << m.cols() << "\n";
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      out << buf << (c + 1 == m.cols() ? "" : " ");
    }
    out << "\n";
  }
}

}  // namespace

void save_weights(const ModelWeights& weights, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::input, "cannot open weights file for writing: " + path);
  }
  out << kWeightsMagic << "\n";
  out << "dims " << weights.dims.d << " " << weights.dims.d_t << " " << weights.dims.d_v
      << "\n";
  write_tensor(out, "w_subject", weights.w_subject);
  write_tensor(out, "w_object", weights.w_object);
  write_tensor(out, "w_predicate", weights.w_predicate);
  write_tensor(out, "fc_entity.weight", weights.fc_entity.weight);
  write_tensor(out, "fc_entity.bias", weights.fc_entity.bias);
  write_tensor(out, "fc_predicate.weight", weights.fc_predicate.weight);
  write_tensor(out, "fc_predicate.bias", weights.fc_predicate.bias);
  write_tensor(out, "m_entity.weight", weights.m_entity.weight);
  write_tensor(out, "m_entity.bias", weights.m_entity.bias);
  write_tensor(out, "m_predicate.weight", weights.m_predicate.weight);
  write_tensor(out, "m_predicate.bias", weights.m_predicate.bias);
}

ModelWeights load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::input, "cannot open weights file: " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line != kWeightsMagic) {
    throw Error(ErrorCode::version_mismatch,
                path + ": expected header '" + std::string(kWeightsMagic) + "'");
  }
  ModelDims dims;
  {
    std::string tag;
    if (!(in >> tag >> dims.d >> dims.d_t >> dims.d_v) || tag != "dims") {
      throw Error(ErrorCode::parse, path + ": expected 'dims d d_t d_v' line");
    }
  }

  std::map<std::string, Eigen::MatrixXd> tensors;
  std::string tag;
  while (in >> tag) {
    if (tag != "tensor") {
      throw Error(ErrorCode::parse, path + ": expected 'tensor', got '" + tag + "'");
    }
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> name >> rows >> cols) || rows <= 0 || cols <= 0) {
      throw Error(ErrorCode::parse, path + ": malformed tensor header");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (!(in >> m(r, c))) {
          throw Error(ErrorCode::truncated_file,
                      path + ": tensor " + name + " ends early");
        }
      }
    }
    if (!tensors.emplace(name, std::move(m)).second) {
      throw Error(ErrorCode::conflict, path + ": duplicate tensor '" + name + "'");
    }
  }

  auto take_matrix = [&](const std::string& name) {
    auto it = tensors.find(name);
    if (it == tensors.end()) {
      throw Error(ErrorCode::parse, path + ": missing tensor '" + name + "'");
    }
    return it->second;
  };
  auto take_vector = [&](const std::string& name) -> Eigen::VectorXd {
    Eigen::MatrixXd m = take_matrix(name);
    if (m.cols() != 1) {
      throw Error(ErrorCode::dimension, path + ": tensor '" + name + "' is not a vector");
    }
    return m.col(0);
  };

  ModelWeights weights;
  weights.dims = dims;
  weights.w_subject = take_matrix("w_subject");
  weights.w_object = take_matrix("w_object");
  weights.w_predicate = take_matrix("w_predicate");
  weights.fc_entity = {take_matrix("fc_entity.weight"), take_vector("fc_entity.bias")};
  weights.fc_predicate = {take_matrix("fc_predicate.weight"),
                          take_vector("fc_predicate.bias")};
  weights.m_entity = {take_matrix("m_entity.weight"), take_vector("m_entity.bias")};
  weights.m_predicate = {take_matrix("m_predicate.weight"),
                         take_vector("m_predicate.bias")};
  weights.validate();
  return weights;
}

Eigen::VectorXd fuse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  check_same_length(a, b, "fuse");
  Eigen::ArrayXd sum = (a + b).array();
  Eigen::ArrayXd diff = (a - b).array();
  return (sum.max(0.0) - diff.square()).matrix();
}

FuseGradient fuse_gradient(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  check_same_length(a, b, "fuse_gradient");
  FuseGradient grad;
  grad.wrt_a.resize(a.size());
  grad.wrt_b.resize(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double sum = a[i] + b[i];
    if (sum == 0.0) {
      throw Error(ErrorCode::non_differentiable,
                  "fuse is not differentiable at coordinate " + std::to_string(i) +
                      " (a + b = 0 on the ReLU kink)");
    }
    double indicator = sum > 0.0 ? 1.0 : 0.0;
    double diff = a[i] - b[i];
    grad.wrt_a[i] = indicator - 2.0 * diff;
    grad.wrt_b[i] = indicator + 2.0 * diff;
  }
  return grad;
}

namespace {

// Shared gated-deviation form of Eqs. for o_i and p: proto + ReLU(FC([x ; m])) .* m.
Eigen::VectorXd gated_representation(const Eigen::VectorXd& proto_term,
                                     const Eigen::VectorXd& context,
                                     const Eigen::VectorXd& visual_feature,
                                     const AffineMap& fc, const AffineMap& visual_map) {
  Eigen::VectorXd mapped = visual_map.apply(visual_feature);
  if (context.size() != mapped.size()) {
    throw Error(ErrorCode::dimension,
                "gate context length " + std::to_string(context.size()) +
                    " != mapped visual length " + std::to_string(mapped.size()));
  }
  Eigen::VectorXd concatenated(context.size() + mapped.size());
  concatenated << context, mapped;
  Eigen::VectorXd gate = fc.apply(concatenated).array().max(0.0).matrix();
  return proto_term + (gate.array() * mapped.array()).matrix();
}

}  // namespace

Eigen::VectorXd entity_representation(std::string_view label, EntityRole role,
                                      const Eigen::VectorXd& visual_feature,
                                      const ModelWeights& weights,
                                      const PrototypeTable& prototypes) {
  const Eigen::VectorXd& proto = prototypes.entity(label);
  const Eigen::MatrixXd& w =
      role == EntityRole::subject ? weights.w_subject : weights.w_object;
  if (proto.size() != w.cols()) {
    throw Error(ErrorCode::dimension,
                "prototype length " + std::to_string(proto.size()) +
                    " != expected " + std::to_string(w.cols()));
  }
  Eigen::VectorXd proto_term = w * proto;
  return gated_representation(proto_term, proto_term, visual_feature, weights.fc_entity,
                              weights.m_entity);
}

Eigen::VectorXd predicate_representation(std::string_view predicate,
                                         const Eigen::VectorXd& subject_repr,
                                         const Eigen::VectorXd& object_repr,
                                         const Eigen::VectorXd& union_feature,
                                         const ModelWeights& weights,
                                         const PrototypeTable& prototypes) {
  const Eigen::VectorXd& proto = prototypes.predicate(predicate);
  if (proto.size() != weights.w_predicate.cols()) {
    throw Error(ErrorCode::dimension,
                "predicate prototype length " + std::to_string(proto.size()) +
                    " != expected " + std::to_string(weights.w_predicate.cols()));
  }
  Eigen::VectorXd proto_term = weights.w_predicate * proto;
  Eigen::VectorXd fused = fuse(subject_repr, object_repr);
  return gated_representation(proto_term, fused, union_feature, weights.fc_predicate,
                              weights.m_predicate);
}

std::vector<std::pair<std::string, double>> score_predicates(
    const Eigen::VectorXd& subject_repr, const Eigen::VectorXd& object_repr,
    const Eigen::VectorXd& union_feature, const ModelWeights& weights,
    const PrototypeTable& prototypes) {
  if (prototypes.predicate_prototypes.empty()) {
    throw Error(ErrorCode::config, "predicate vocabulary is empty");
  }
  Eigen::VectorXd fused = fuse(subject_repr, object_repr);
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(prototypes.predicate_prototypes.size());
  for (const auto& [predicate, proto] : prototypes.predicate_prototypes) {
    (void)proto;
    Eigen::VectorXd repr = predicate_representation(predicate, subject_repr, object_repr,
                                                    union_feature, weights, prototypes);
    scored.emplace_back(predicate, cosine_or_zero(fused, repr));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& lhs, const auto& rhs) {
    if (lhs.second != rhs.second) return lhs.second > rhs.second;
    return lhs.first < rhs.first;
  });
  return scored;
}

Eigen::VectorXd pseudo_visual_feature(std::string_view key, int dim, std::uint64_t seed) {
  return seeded_vector(stream_seed(seed, "visual/" + std::string(key)), dim, -1.0, 1.0);
}

std::vector<RelationTriple> infer_relations(const SceneGraph& graph,
                                            const ModelWeights& weights,
                                            const PrototypeTable& prototypes,
                                            double score_threshold,
                                            std::uint64_t seed) {
  std::vector<RelationTriple> inferred;
  std::map<int, Eigen::VectorXd> subject_reprs;
  std::map<int, Eigen::VectorXd> object_reprs;
  for (const auto& object : graph.objects) {
    Eigen::VectorXd feature = pseudo_visual_feature(
        graph.image_id + "#obj#" + std::to_string(object.object_id), weights.dims.d_v,
        seed);
    subject_reprs.emplace(object.object_id,
                          entity_representation(object.category_label, EntityRole::subject,
                                                feature, weights, prototypes));
    object_reprs.emplace(object.object_id,
                         entity_representation(object.category_label, EntityRole::object,
                                               feature, weights, prototypes));
  }
  for (const auto& subject : graph.objects) {
    for (const auto& object : graph.objects) {
      if (subject.object_id == object.object_id) continue;
      Eigen::VectorXd union_feature = pseudo_visual_feature(
          graph.image_id + "#pair#" + std::to_string(subject.object_id) + "#" +
              std::to_string(object.object_id),
          weights.dims.d_v, seed);
      auto ranked = score_predicates(subject_reprs.at(subject.object_id),
                                     object_reprs.at(object.object_id), union_feature,
                                     weights, prototypes);
      const auto& [predicate, score] = ranked.front();
      if (score > score_threshold) {
        inferred.push_back(RelationTriple{subject.object_id, predicate, object.object_id,
                                          std::clamp(score, 0.0, 1.0)});
      }
    }
  }
  return inferred;
}

}  // namespace sgrag
