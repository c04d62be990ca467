#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mple/artifact_graph.hpp"
#include "mple/canonical_hash.hpp"
#include "mple/digest.hpp"
#include "mple/tokenizer.hpp"

namespace mple {

/// 2*|LCS(a,b)| / (|a|+|b|); 1 when both are empty.
inline double token_similarity(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return 2.0 * static_cast<double>(prev[b.size()]) /
         static_cast<double>(a.size() + b.size());
}

inline double token_similarity(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
  return token_similarity(std::span<const std::string>(a), std::span<const std::string>(b));
}

struct SimilarityWeights {
  double label = 0.3;
  double structure = 0.7;
};

/// Children pairing produced by greedy best-pair matching.
struct ChildPair {
  std::size_t left;
  std::size_t right;
  double similarity;
};

namespace detail {

template <typename T>
std::size_t lcs_length(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline double dice(std::size_t common, std::size_t x, std::size_t y) {
  if (x + y == 0) return 1.0;
  return 2.0 * static_cast<double>(common) / static_cast<double>(x + y);
}

// Size of the multiset intersection of two sorted sequences.
inline std::size_t bag_overlap(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n, ++i, ++j;
    }
  }
  return n;
}

}  // namespace detail

/// Recursive node similarity with an EXACT-digest cache and a memo keyed by
/// the unordered digest pair. Nodes must outlive the engine.
class SimilarityEngine {
 public:
  explicit SimilarityEngine(SimilarityWeights weights = {}) : weights_(weights) {}

  const SimilarityWeights& weights() const { return weights_; }

  const Digest& digest(const ArtifactNode& n) { return info(n).digest; }

  /// Drops cached data for a subtree that is about to be destroyed or moved.
  void forget(const ArtifactNode& n) {
    infos_.erase(&n);
    for (const auto& c : n.children) forget(c);
  }

  /// Cheap bound: node_similarity(a,b) never exceeds this value.
  double upper_bound(const ArtifactNode& a, const ArtifactNode& b) { return bound(a, b, 2); }

  double operator()(const ArtifactNode& a, const ArtifactNode& b) {
    if (a.type != b.type) return 0.0;
    const Info& ia = info(a);
    const Info& ib = info(b);
    if (ia.digest == ib.digest) return 1.0;
    if (a.type == NodeType::Statement) return statement_similarity(ia, ib);
    const auto key = ia.digest < ib.digest ? std::make_pair(ia.digest, ib.digest)
                                           : std::make_pair(ib.digest, ia.digest);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const double sim = compute(a, b, ia, ib);
    memo_.emplace(key, sim);
    return sim;
  }

  double label_similarity(const std::string& a, const std::string& b) const {
    if (a == b) return 1.0;
    return token_similarity(label_tokens(a), label_tokens(b));
  }

  /// Greedy best-pair matching: descending similarity, ties by the smaller
  /// EXACT-digest pair. Only pairs with similarity >= cutoff (and > 0) are
  /// taken.
  std::vector<ChildPair> match_children(const std::vector<ArtifactNode>& left,
                                        const std::vector<ArtifactNode>& right,
                                        double cutoff = 0.0) {
    struct Candidate {
      double sim;
      const Digest* lo;
      const Digest* hi;
      std::size_t i, j;
    };
    std::vector<Candidate> cands;
    cands.reserve(left.size() * right.size());
    for (std::size_t i = 0; i < left.size(); ++i) {
      for (std::size_t j = 0; j < right.size(); ++j) {
        if (left[i].type != right[j].type) continue;
        if (cutoff > 0.0 && upper_bound(left[i], right[j]) < cutoff) continue;
        const double s = (*this)(left[i], right[j]);
        if (s <= 0.0 || s < cutoff) continue;
        const Digest& di = digest(left[i]);
        const Digest& dj = digest(right[j]);
        cands.push_back({s, di < dj ? &di : &dj, di < dj ? &dj : &di, i, j});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
      if (x.sim != y.sim) return x.sim > y.sim;
      if (*x.lo != *y.lo) return *x.lo < *y.lo;
      if (*x.hi != *y.hi) return *x.hi < *y.hi;
      if (x.i != y.i) return x.i < y.i;
      return x.j < y.j;
    });
    std::vector<bool> used_l(left.size(), false), used_r(right.size(), false);
    std::vector<ChildPair> out;
    for (const auto& c : cands) {
      if (used_l[c.i] || used_r[c.j]) continue;
      used_l[c.i] = used_r[c.j] = true;
      out.push_back({c.i, c.j, c.sim});
    }
    return out;
  }

 private:
  struct Info {
    Digest digest;
    std::vector<int> label;   // interned label tokens
    std::vector<int> tokens;  // interned statement tokens
    std::vector<int> bag;     // `tokens`, sorted
    std::array<std::uint32_t, kNodeTypeNames.size()> child_types{};
  };

  struct PairHash {
    std::size_t operator()(const std::pair<Digest, Digest>& p) const noexcept {
      return DigestHash{}(p.first) * 31 + DigestHash{}(p.second);
    }
  };

  int intern(const std::string& s) {
    return interned_.try_emplace(s, static_cast<int>(interned_.size())).first->second;
  }

  const Info& info(const ArtifactNode& n) {
    auto it = infos_.find(&n);
    if (it != infos_.end()) return it->second;
    Info in;
    DigestBuilder b;
    b.byte('E').byte(static_cast<std::uint8_t>(n.type)).text(n.label);
    b.u64(n.tokens.size());
    for (const auto& t : n.tokens) b.text(t);
    b.u64(n.children.size());
    for (const auto& c : n.children) {
      b.digest(info(c).digest);
      ++in.child_types[static_cast<std::size_t>(c.type)];
    }
    in.digest = b.finish();
    for (const auto& t : label_tokens(n.label)) in.label.push_back(intern(t));
    for (const auto& t : n.tokens) in.tokens.push_back(intern(t));
    in.bag = in.tokens;
    std::sort(in.bag.begin(), in.bag.end());
    return infos_.emplace(&n, std::move(in)).first->second;
  }

  static double statement_similarity(const Info& a, const Info& b) {
    if (a.tokens.empty() && b.tokens.empty()) return 1.0;
    if (a.tokens.empty() || b.tokens.empty()) return 0.0;
    return detail::dice(detail::lcs_length(a.tokens, b.tokens), a.tokens.size(), b.tokens.size());
  }

  static double label_sim(const Info& a, const Info& b) {
    if (a.label == b.label) return 1.0;
    if (a.label.empty() || b.label.empty()) return 0.0;
    return detail::dice(detail::lcs_length(a.label, b.label), a.label.size(), b.label.size());
  }

  // Upper bound looking `depth` levels down. Matched child pairs never number
  // more than the same-type pairs, and the greedy sum is at most the sum of
  // per-child best bounds taken from either side.
  double bound(const ArtifactNode& a, const ArtifactNode& b, int depth) {
    constexpr double slack = 1e-9;
    if (a.type != b.type) return 0.0;
    const Info& ia = info(a);
    const Info& ib = info(b);
    if (a.type == NodeType::Statement) {
      if (ia.tokens.empty() && ib.tokens.empty()) return 1.0;
      return detail::dice(detail::bag_overlap(ia.bag, ib.bag), ia.bag.size(), ib.bag.size()) + slack;
    }
    const double label = label_sim(ia, ib);
    if (is_leaf_type(a.type)) {
      const double tokens =
          detail::dice(detail::bag_overlap(ia.bag, ib.bag), ia.bag.size(), ib.bag.size());
      return weights_.label * label + weights_.structure * tokens + slack;
    }
    const auto n = a.children.size(), m = b.children.size();
    if (n + m == 0) return weights_.label * label + weights_.structure + slack;
    std::size_t typed = 0;
    for (std::size_t t = 0; t < ia.child_types.size(); ++t)
      typed += std::min(ia.child_types[t], ib.child_types[t]);
    double sum = static_cast<double>(typed);
    if (depth > 0 && typed > 0 && n * m <= 64) {
      std::vector<double> best_l(n, 0.0), best_r(m, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          if (a.children[i].type != b.children[j].type) continue;
          const double u = std::min(1.0, bound(a.children[i], b.children[j], depth - 1));
          best_l[i] = std::max(best_l[i], u);
          best_r[j] = std::max(best_r[j], u);
        }
      double sl = 0.0, sr = 0.0;
      for (double x : best_l) sl += x;
      for (double x : best_r) sr += x;
      sum = std::min({sum, sl, sr});
    }
    return weights_.label * label +
           weights_.structure * 2.0 * sum / static_cast<double>(n + m) + slack;
  }

  double compute(const ArtifactNode& a, const ArtifactNode& b, const Info& ia, const Info& ib) {
    if (is_leaf_type(a.type)) {
      double tokens = 1.0;
      if (!ia.tokens.empty() || !ib.tokens.empty())
        tokens = ia.tokens.empty() || ib.tokens.empty()
                     ? 0.0
                     : detail::dice(detail::lcs_length(ia.tokens, ib.tokens), ia.tokens.size(),
                                    ib.tokens.size());
      return weights_.label * label_sim(ia, ib) + weights_.structure * tokens;
    }
    const double label = label_sim(ia, ib);
    double child = 1.0;
    if (!a.children.empty() || !b.children.empty()) {
      double sum = 0.0;
      for (const auto& p : match_children(a.children, b.children)) sum += p.similarity;
      child = 2.0 * sum / static_cast<double>(a.children.size() + b.children.size());
    }
    return weights_.label * label + weights_.structure * child;
  }

  SimilarityWeights weights_;
  std::unordered_map<std::string, int> interned_;
  std::unordered_map<const ArtifactNode*, Info> infos_;
  std::unordered_map<std::pair<Digest, Digest>, double, PairHash> memo_;
};

/// 0 for differing types; LCS similarity for statements; otherwise
/// label*label_sim + structure*child_sim over greedily matched children.
inline double node_similarity(const ArtifactNode& a, const ArtifactNode& b,
                              SimilarityWeights weights = {}) {
  SimilarityEngine engine(weights);
  return engine(a, b);
}

}  // namespace mple
