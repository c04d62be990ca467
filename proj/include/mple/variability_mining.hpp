#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mple/artifact_graph.hpp"
#include "mple/error.hpp"
#include "mple/interchange.hpp"
#include "mple/similarity.hpp"

namespace mple {

enum class CorrespondenceKind { Match, LeftOnly, RightOnly };

struct Correspondence {
  std::optional<NodeId> left;
  std::optional<NodeId> right;
  double similarity = 0.0;
  CorrespondenceKind kind = CorrespondenceKind::Match;
};

struct MatchResult {
  std::vector<Correspondence> correspondences;
  double overall_similarity = 0.0;
};

namespace detail {

inline void one_sided(const ArtifactNode& n, bool left, std::vector<Correspondence>& out) {
  visit_preorder(n, [&](const ArtifactNode& x, int) {
    Correspondence c;
    if (left) {
      c.left = x.id;
      c.kind = CorrespondenceKind::LeftOnly;
    } else {
      c.right = x.id;
      c.kind = CorrespondenceKind::RightOnly;
    }
    out.push_back(c);
  });
}

inline void match_recursive(const ArtifactNode& a, const ArtifactNode& b, double sim, double theta,
                            SimilarityEngine& engine, std::vector<Correspondence>& out) {
  out.push_back({a.id, b.id, sim, CorrespondenceKind::Match});
  const auto pairs = engine.match_children(a.children, b.children, theta);
  std::vector<bool> used_l(a.children.size(), false), used_r(b.children.size(), false);
  auto sorted = pairs;
  std::sort(sorted.begin(), sorted.end(),
            [](const ChildPair& x, const ChildPair& y) { return x.left < y.left; });
  for (const auto& p : sorted) {
    used_l[p.left] = used_r[p.right] = true;
    match_recursive(a.children[p.left], b.children[p.right], p.similarity, theta, engine, out);
  }
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!used_l[i]) one_sided(a.children[i], true, out);
  for (std::size_t j = 0; j < b.children.size(); ++j)
    if (!used_r[j]) one_sided(b.children[j], false, out);
}

}  // namespace detail

/// Top-down matching: the roots always match; children pair up greedily
/// (similarity >= theta) under matched parents only.
inline MatchResult compare_variants(const ArtifactGraph& a, const ArtifactGraph& b, double theta = 0.75,
                                    SimilarityWeights weights = {}) {
  SimilarityEngine engine(weights);
  MatchResult r;
  r.overall_similarity = engine(a.root(), b.root());
  detail::match_recursive(a.root(), b.root(), r.overall_similarity, theta, engine, r.correspondences);
  return r;
}

inline double variant_similarity(const ArtifactGraph& a, const ArtifactGraph& b,
                                 SimilarityWeights weights = {}) {
  return node_similarity(a.root(), b.root(), weights);
}

struct TaxonomyLink {
  std::string variant;
  std::string closest;
  double similarity = 0.0;
};

struct Taxonomy {
  std::vector<std::string> merge_order;
  std::map<std::pair<std::string, std::string>, double> similarity;  // both orientations
  std::vector<TaxonomyLink> links;

  double at(const std::string& a, const std::string& b) const {
    if (a == b) return 1.0;
    return similarity.at({a, b});
  }
};

/// Agglomerative ordering over a precomputed similarity matrix: start from
/// the most similar pair, then keep appending the unplaced variant closest to
/// any placed one. Ties go to the lexicographically smaller id. `similarity`
/// must hold every unordered pair of distinct ids (either orientation).
inline Taxonomy taxonomy_from_matrix(std::vector<std::string> ids,
                                     const std::map<std::pair<std::string, std::string>, double>& similarity) {
  if (ids.empty()) throw PreconditionError("taxonomy mining needs at least one variant");
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 1; i < ids.size(); ++i)
    if (ids[i] == ids[i - 1]) throw PreconditionError("duplicate variant id " + ids[i]);

  Taxonomy t;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      auto it = similarity.find({ids[i], ids[j]});
      if (it == similarity.end()) it = similarity.find({ids[j], ids[i]});
      if (it == similarity.end())
        throw PreconditionError("missing similarity for " + ids[i] + " / " + ids[j]);
      t.similarity[{ids[i], ids[j]}] = it->second;
      t.similarity[{ids[j], ids[i]}] = it->second;
    }
  if (ids.size() == 1) {
    t.merge_order.push_back(ids[0]);
    return t;
  }

  std::size_t bi = 0, bj = 1;
  double best = -1.0;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const double s = t.at(ids[i], ids[j]);
      if (s > best) {
        best = s;
        bi = i;
        bj = j;
      }
    }
  std::vector<bool> placed(ids.size(), false);
  placed[bi] = placed[bj] = true;
  t.merge_order = {ids[bi], ids[bj]};
  t.links.push_back({ids[bj], ids[bi], best});

  while (t.merge_order.size() < ids.size()) {
    std::size_t pick = 0, anchor = 0;
    double pick_sim = -1.0;
    for (std::size_t u = 0; u < ids.size(); ++u) {
      if (placed[u]) continue;
      for (std::size_t p = 0; p < ids.size(); ++p) {
        if (!placed[p]) continue;
        const double s = t.at(ids[u], ids[p]);
        if (s > pick_sim) {
          pick_sim = s;
          pick = u;
          anchor = p;
        }
      }
    }
    placed[pick] = true;
    t.merge_order.push_back(ids[pick]);
    t.links.push_back({ids[pick], ids[anchor], pick_sim});
  }
  return t;
}

inline Taxonomy mine_taxonomy(const std::vector<ArtifactGraph>& variants, SimilarityWeights weights = {}) {
  if (variants.empty()) throw PreconditionError("taxonomy mining needs at least one variant");
  std::vector<std::string> ids;
  std::map<std::pair<std::string, std::string>, double> sims;
  SimilarityEngine engine(weights);
  for (std::size_t i = 0; i < variants.size(); ++i) {
    ids.push_back(variants[i].variant_id());
    for (std::size_t j = i + 1; j < variants.size(); ++j)
      sims[{variants[i].variant_id(), variants[j].variant_id()}] =
          engine(variants[i].root(), variants[j].root());
  }
  return taxonomy_from_matrix(std::move(ids), sims);
}

inline Json taxonomy_to_json(const Taxonomy& t) {
  std::set<std::string> ids(t.merge_order.begin(), t.merge_order.end());
  Json j;
  j["variants"] = Json::array();
  for (const auto& id : ids) j["variants"].push_back(id);
  j["matrix"] = Json::array();
  for (const auto& a : ids) {
    Json row = Json::array();
    for (const auto& b : ids) row.push_back(t.at(a, b));
    j["matrix"].push_back(std::move(row));
  }
  j["merge_order"] = t.merge_order;
  j["links"] = Json::array();
  for (const auto& l : t.links)
    j["links"].push_back(Json{{"variant", l.variant}, {"closest", l.closest}, {"similarity", l.similarity}});
  return j;
}

}  // namespace mple
