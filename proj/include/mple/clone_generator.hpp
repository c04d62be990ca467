#pragma once

// Synthetic benchmark generator: a seed tree, clone-and-own variants derived
// from it by mutation, and clones injected into each variant, with ground
// truth for all of it.
//
// Node ids serve as stable uids while a variant is being edited; fresh nodes
// get uids above every existing one. Final graphs are renumbered in pre-order
// and the truth is remapped accordingly.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mple/artifact_graph.hpp"
#include "mple/canonical_hash.hpp"
#include "mple/clone_detection.hpp"
#include "mple/error.hpp"
#include "mple/interchange.hpp"
#include "mple/similarity.hpp"
#include "mple/tokenizer.hpp"

namespace mple {

/// Deterministic generator; the engine's output sequence is fixed by the
/// standard, and no library distributions are used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(next() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < p; }

 private:
  std::mt19937_64 engine_;
};

struct GeneratorConfig {
  std::size_t variant_count = 1;
  std::map<CloneType, std::size_t> clones_per_variant;
  std::size_t type3_max_edits = 2;
  double variant_mutation_rate = 0.2;
  std::uint64_t rng_seed = 1;
  std::vector<NodeType> granularities{NodeType::Class, NodeType::Method, NodeType::Block};
  std::size_t min_tokens = 8;

  void validate() const {
    if (variant_count < 1) throw PreconditionError("variant_count must be at least 1");
    if (!(variant_mutation_rate >= 0.0 && variant_mutation_rate <= 1.0))
      throw PreconditionError("variant_mutation_rate must lie in [0, 1]");
    if (type3_max_edits < 1) throw PreconditionError("type3_max_edits must be at least 1");
    if (granularities.empty()) throw PreconditionError("generator needs at least one granularity");
    for (auto g : granularities)
      if (g != NodeType::Class && g != NodeType::Method && g != NodeType::Block)
        throw PreconditionError("clone granularity must be CLASS, METHOD or BLOCK");
  }
};

struct CloneRecord {
  std::string variant_id;
  NodeType granularity = NodeType::Method;
  CloneType clone_type = CloneType::Type1;
  std::vector<NodeId> members;  // ascending
  std::size_t edit_count = 0;
  NodeId source = 0;  // injection site (the copied host)

  friend bool operator==(const CloneRecord&, const CloneRecord&) = default;
};

struct GenealogyEntry {
  std::string variant_id;
  std::string parent_variant_id;
  std::vector<std::string> mutations;

  friend bool operator==(const GenealogyEntry&, const GenealogyEntry&) = default;
};

struct GroundTruth {
  std::vector<CloneRecord> clone_records;
  std::vector<GenealogyEntry> genealogy;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct Benchmark {
  std::vector<ArtifactGraph> variants;
  GroundTruth truth;
};

struct Mutation {
  enum class Kind { Delete, DuplicateRename, ModifyStatement };
  Kind kind = Kind::Delete;
  NodeId target = 0;
};

namespace detail {

inline constexpr std::array<std::string_view, 14> kOnsets = {"b", "c", "d", "f", "g", "h", "k",
                                                             "l", "m", "n", "p", "r", "s", "t"};
inline constexpr std::array<std::string_view, 5> kVowels = {"a", "e", "i", "o", "u"};
inline constexpr std::array<std::string_view, 5> kTypes = {"int", "long", "double", "boolean", "char"};

/// Unique pronounceable identifiers; never start with 'z', which is
/// reserved for names minted by edits.
class NameSource {
 public:
  explicit NameSource(Rng& rng) : rng_(&rng) {}

  std::string fresh(bool capital = false) {
    for (;;) {
      std::string s;
      const auto syll = rng_->between(2, 3);
      for (std::size_t i = 0; i < syll; ++i) {
        s += kOnsets[rng_->below(kOnsets.size())];
        s += kVowels[rng_->below(kVowels.size())];
      }
      if (capital) s[0] = static_cast<char>(s[0] - 'a' + 'A');
      if (is_keyword(s)) continue;
      if (used_.insert(s).second) return s;
    }
  }

 private:
  static bool is_keyword(const std::string& s) {
    return std::find(kJavaKeywords.begin(), kJavaKeywords.end(), s) != kJavaKeywords.end();
  }
  Rng* rng_;
  std::unordered_set<std::string> used_;
};

inline std::string number(Rng& rng) { return std::to_string(rng.between(1, 999)); }

inline std::vector<std::string> random_statement(Rng& rng, NameSource& names) {
  const auto t = [&] { return std::string(kTypes[rng.below(kTypes.size())]); };
  const auto id = [&] { return names.fresh(); };
  switch (rng.below(12)) {
    case 0: return {t(), id(), "=", id(), "+", number(rng), ";"};
    case 1: return {id(), ".", id(), "(", id(), ",", number(rng), ")", ";"};
    case 2: return {"return", id(), "*", id(), ";"};
    case 3: return {id(), "=", id(), "(", id(), ")", "-", number(rng), ";"};
    case 4: return {id(), "+=", number(rng), ";"};
    case 5: return {names.fresh(true), id(), "=", "new", names.fresh(true), "(", ")", ";"};
    case 6: return {id(), "[", id(), "]", "=", id(), ";"};
    case 7: return {id(), "(", ")", ";"};
    case 8: return {id(), "=", id(), "?", id(), ":", number(rng), ";"};
    case 9: return {"throw", "new", names.fresh(true), "(", "\"" + id() + "\"", ")", ";"};
    case 10: return {t(), id(), "=", id(), ".", id(), "(", ")", ".", id(), ";"};
    default: return {id(), "++", ";"};
  }
}

inline std::string random_block_label(Rng& rng, NameSource& names) {
  switch (rng.below(5)) {
    case 0: return "if ( " + names.fresh() + " > " + number(rng) + " )";
    case 1: return "while ( " + names.fresh() + " < " + names.fresh() + " )";
    case 2: {
      const auto i = names.fresh();
      return "for ( int " + i + " = 0 ; " + i + " < " + number(rng) + " ; " + i + " ++ )";
    }
    case 3: return "synchronized ( " + names.fresh() + " )";
    default: return "if ( " + names.fresh() + " . " + names.fresh() + " ( ) )";
  }
}

inline ArtifactNode statement_node(std::vector<std::string> tokens) {
  return ArtifactNode{0, NodeType::Statement, "", std::move(tokens), {}, {}};
}

inline ArtifactNode random_block(Rng& rng, NameSource& names, std::string label, int depth) {
  ArtifactNode b{0, NodeType::Block, std::move(label), {}, {}, {}};
  const auto stmts = rng.between(2, depth == 0 ? 5 : 4);
  std::size_t nested = depth < 2 ? rng.below(depth == 0 ? 3 : 2) : 0;
  for (std::size_t i = 0; i < stmts; ++i) {
    b.children.push_back(statement_node(random_statement(rng, names)));
    if (nested > 0 && rng.chance(0.4)) {
      b.children.push_back(random_block(rng, names, random_block_label(rng, names), depth + 1));
      --nested;
    }
  }
  return b;
}

inline ArtifactNode random_method(Rng& rng, NameSource& names) {
  std::string label = names.fresh() + "(";
  const auto params = rng.below(3);
  for (std::size_t i = 0; i < params; ++i) {
    if (i) label += ", ";
    label += std::string(kTypes[rng.below(kTypes.size())]) + " " + names.fresh();
  }
  label += ")";
  ArtifactNode m{0, NodeType::Method, label, {}, {}, {}};
  m.attributes["modifiers"] = rng.chance(0.5) ? "public" : "private";
  m.attributes["returns"] = rng.chance(0.5) ? "void" : std::string(kTypes[rng.below(kTypes.size())]);
  m.children.push_back(random_block(rng, names, "", 0));
  return m;
}

// Candidates at every clone granularity, for the similarity screen.
inline void collect_screen_nodes(const ArtifactNode& n, std::vector<const ArtifactNode*>& out) {
  visit_preorder(n, [&](const ArtifactNode& x, int) {
    if (x.type == NodeType::Class || x.type == NodeType::Method || x.type == NodeType::Block) out.push_back(&x);
  });
}

}  // namespace detail

struct SeedOptions {
  std::size_t target_nodes = 500;
  double max_similarity = 0.6;  // screen against accidental clones
  std::size_t min_tokens = 8;
  std::uint64_t rng_seed = 7;
};

/// Random Java-like system with no pair of same-typed candidates (token mass
/// >= min_tokens) at similarity >= max_similarity.
inline ArtifactGraph synthetic_seed(const SeedOptions& opts = {}) {
  Rng rng(opts.rng_seed);
  detail::NameSource names(rng);
  ArtifactNode root{0, NodeType::System, "", {}, {}, {}};
  std::deque<ArtifactNode> accepted;  // stable copies of accepted methods
  std::vector<const ArtifactNode*> screen;
  std::size_t count = 1;
  SimilarityEngine engine;

  auto admissible = [&](const ArtifactNode& cand) {
    std::vector<const ArtifactNode*> mine;
    detail::collect_screen_nodes(cand, mine);
    for (std::size_t i = 0; i < mine.size(); ++i) {
      if (token_mass(*mine[i]) < opts.min_tokens) continue;
      for (std::size_t j = 0; j < i; ++j)
        if (mine[j]->type == mine[i]->type && token_mass(*mine[j]) >= opts.min_tokens &&
            engine.upper_bound(*mine[i], *mine[j]) >= opts.max_similarity &&
            engine(*mine[i], *mine[j]) >= opts.max_similarity)
          return false;
      for (const auto* other : screen)
        if (other->type == mine[i]->type && token_mass(*other) >= opts.min_tokens &&
            engine.upper_bound(*mine[i], *other) >= opts.max_similarity &&
            engine(*mine[i], *other) >= opts.max_similarity)
          return false;
    }
    return true;
  };

  while (count < opts.target_nodes) {
    ArtifactNode pkg{0, NodeType::Package, "org." + names.fresh() + "." + names.fresh(), {}, {}, {}};
    const auto classes = rng.between(3, 5);
    for (std::size_t c = 0; c < classes && count < opts.target_nodes; ++c) {
      ArtifactNode cls{0, NodeType::Class, names.fresh(true), {}, {}, {}};
      cls.attributes["kind"] = "class";
      cls.attributes["modifiers"] = "public";
      const auto methods = rng.between(2, 5);
      for (std::size_t m = 0; m < methods; ++m) {
        for (int attempt = 0; attempt < 50; ++attempt) {
          auto method = detail::random_method(rng, names);
          const bool ok = admissible(method);
          engine.forget(method);
          if (!ok) continue;
          accepted.push_back(method);
          detail::collect_screen_nodes(accepted.back(), screen);
          cls.children.push_back(std::move(method));
          break;
        }
      }
      if (cls.children.empty()) continue;
      count += count_nodes(cls);
      pkg.children.push_back(std::move(cls));
    }
    ++count;
    root.children.push_back(std::move(pkg));
  }
  return ArtifactGraph("seed", std::move(root));
}

namespace detail {

struct WorkRecord {
  NodeType granularity;
  CloneType clone_type;
  std::vector<NodeId> uids;
  std::size_t edit_count;
  NodeId source;
};

struct WorkVariant {
  std::string id;
  ArtifactNode root;
  std::vector<WorkRecord> records;
};

struct Loc {
  ArtifactNode* node;
  ArtifactNode* parent;
  std::size_t index;
};

inline std::unordered_map<NodeId, Loc> index_tree(ArtifactNode& root) {
  std::unordered_map<NodeId, Loc> idx;
  std::function<void(ArtifactNode&, ArtifactNode*, std::size_t)> rec = [&](ArtifactNode& n, ArtifactNode* p,
                                                                           std::size_t i) {
    idx[n.id] = {&n, p, i};
    for (std::size_t k = 0; k < n.children.size(); ++k) rec(n.children[k], &n, k);
  };
  rec(root, nullptr, 0);
  return idx;
}

// Nodes that a new edit must not touch: clone members, their descendants
// and their ancestors.
inline std::unordered_set<NodeId> blocked_nodes(ArtifactNode& root, const std::vector<WorkRecord>& records) {
  std::unordered_set<NodeId> members;
  for (const auto& r : records) members.insert(r.uids.begin(), r.uids.end());
  std::unordered_set<NodeId> blocked;
  std::function<bool(const ArtifactNode&, bool)> rec = [&](const ArtifactNode& n, bool inside) {
    const bool here = inside || members.count(n.id) > 0;
    bool below = false;
    for (const auto& c : n.children) below = rec(c, here) || below;
    if (here || below) blocked.insert(n.id);
    return below || members.count(n.id) > 0;
  };
  rec(root, false);
  return blocked;
}

class Editor {
 public:
  Editor(Rng& rng, NodeId next_uid) : rng_(&rng), names_(rng), next_uid_(next_uid) {}

  NodeId fresh_uid() { return next_uid_++; }

  ArtifactNode copy_fresh(const ArtifactNode& n) {
    ArtifactNode c = n;
    visit_preorder(c, [&](ArtifactNode& x, int) { x.id = fresh_uid(); });
    return c;
  }

  std::string minted(const std::string& prefix) { return prefix + std::to_string(++minted_); }

  ArtifactNode new_statement() {
    auto s = statement_node(random_statement(*rng_, names_));
    s.id = fresh_uid();
    return s;
  }

  Rng& rng() { return *rng_; }

 private:
  Rng* rng_;
  NameSource names_;
  NodeId next_uid_;
  std::size_t minted_ = 0;
};

inline std::string rename_label_head(const std::string& label, const std::string& fresh) {
  const auto paren = label.find('(');
  return paren == std::string::npos ? fresh : fresh + label.substr(paren);
}

// Consistent identifier renaming plus literal replacement over a subtree.
inline void rename_subtree(ArtifactNode& root, Editor& ed) {
  std::map<std::string, std::string> ids;
  auto map_token = [&](const std::string& tok) -> std::string {
    switch (classify_token(tok)) {
      case TokenClass::Identifier: {
        auto it = ids.find(tok);
        if (it == ids.end()) it = ids.emplace(tok, ed.minted("zr")).first;
        return it->second;
      }
      case TokenClass::Literal:
        if (!tok.empty() && tok.front() == '"') return "\"" + ed.minted("zs") + "\"";
        if (tok == "true") return "false";
        if (tok == "false") return "true";
        if (!tok.empty() && std::isdigit(static_cast<unsigned char>(tok.front())))
          return std::to_string(1000 + ed.rng().below(9000));
        return tok;
      default:
        return tok;
    }
  };
  visit_preorder(root, [&](ArtifactNode& n, int) {
    std::string label;
    std::size_t at = 0;
    for (const auto& t : split_label(n.label)) {
      label += n.label.substr(at, t.offset - at);
      label += map_token(t.text);
      at = t.offset + t.text.size();
    }
    label += n.label.substr(std::min(at, n.label.size()));
    n.label = label;
    for (auto& t : n.tokens) t = map_token(t);
  });
}

inline std::vector<ArtifactNode*> statement_blocks(ArtifactNode& root, std::size_t min_statements) {
  std::vector<ArtifactNode*> out;
  visit_preorder(root, [&](ArtifactNode& n, int) {
    if (n.type != NodeType::Block) return;
    const auto k = std::count_if(n.children.begin(), n.children.end(),
                                 [](const ArtifactNode& c) { return c.type == NodeType::Statement; });
    if (static_cast<std::size_t>(k) >= min_statements) out.push_back(&n);
  });
  return out;
}

inline std::vector<std::size_t> statement_positions(const ArtifactNode& block) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < block.children.size(); ++i)
    if (block.children[i].type == NodeType::Statement) out.push_back(i);
  return out;
}

// One statement-level edit inside `root`; returns false if none applies.
inline bool near_miss_edit(ArtifactNode& root, Editor& ed) {
  const auto kind = ed.rng().below(3);
  if (kind == 1) {
    auto blocks = statement_blocks(root, 3);
    if (!blocks.empty()) {
      auto* b = blocks[ed.rng().below(blocks.size())];
      const auto pos = statement_positions(*b);
      b->children.erase(b->children.begin() + static_cast<long>(pos[ed.rng().below(pos.size())]));
      return true;
    }
  }
  if (kind == 2) {
    auto blocks = statement_blocks(root, 2);
    std::vector<std::pair<ArtifactNode*, std::size_t>> swaps;
    for (auto* b : blocks) {
      const auto pos = statement_positions(*b);
      for (std::size_t i = 0; i + 1 < pos.size(); ++i)
        if (!content_equal(b->children[pos[i]], b->children[pos[i + 1]])) swaps.push_back({b, i});
    }
    if (!swaps.empty()) {
      auto [b, i] = swaps[ed.rng().below(swaps.size())];
      const auto pos = statement_positions(*b);
      std::swap(b->children[pos[i]], b->children[pos[i + 1]]);
      return true;
    }
  }
  auto blocks = statement_blocks(root, 1);
  if (blocks.empty()) return false;
  auto* b = blocks[ed.rng().below(blocks.size())];
  const auto at = ed.rng().below(b->children.size() + 1);
  b->children.insert(b->children.begin() + static_cast<long>(at), ed.new_statement());
  return true;
}

inline std::vector<NodeId> hosts(ArtifactNode& root, NodeType gran, CloneType type, std::size_t min_tokens,
                                 const std::unordered_set<NodeId>& blocked) {
  std::vector<NodeId> out;
  std::function<void(ArtifactNode&, ArtifactNode*)> rec = [&](ArtifactNode& n, ArtifactNode* parent) {
    if (n.type == gran && !blocked.count(n.id) && token_mass(n) >= min_tokens) {
      bool ok = gran != NodeType::Block || (parent && parent->type == NodeType::Block);
      if (ok && type == CloneType::Type3) ok = !statement_blocks(n, 2).empty();
      if (ok) out.push_back(n.id);
    }
    for (auto& c : n.children) rec(c, &n);
  };
  rec(root, nullptr);
  return out;
}

inline CloneType observed_type(const ArtifactNode& a, const ArtifactNode& b) {
  if (exact_digest(a) == exact_digest(b)) return CloneType::Type1;
  if (abstracted_digest(a) == abstracted_digest(b)) return CloneType::Type2;
  return CloneType::Type3;
}

// Copies host `uid` next to itself as a clone of the given type.
inline WorkRecord inject(WorkVariant& v, NodeId uid, CloneType type, std::size_t max_edits, Editor& ed) {
  auto idx = index_tree(v.root);
  auto it = idx.find(uid);
  if (it == idx.end() || !it->second.parent) throw LookupError("no injectable node " + std::to_string(uid));
  const ArtifactNode& src = *it->second.node;
  if (src.type != NodeType::Class && src.type != NodeType::Method && src.type != NodeType::Block)
    throw PreconditionError("clone source must be a CLASS, METHOD or BLOCK, got " + describe(src));
  ArtifactNode copy = ed.copy_fresh(src);
  std::size_t edits = 0;
  if (type == CloneType::Type2) {
    rename_subtree(copy, ed);
    if (exact_digest(copy) == exact_digest(src))
      throw CapacityError("clone source " + describe(src) + " has nothing to rename");
  } else if (type == CloneType::Type3) {
    bool done = false;
    for (int attempt = 0; attempt < 20 && !done; ++attempt) {
      ArtifactNode trial = ed.copy_fresh(src);
      const auto want = ed.rng().between(1, max_edits);
      std::size_t made = 0;
      while (made < want && near_miss_edit(trial, ed)) ++made;
      if (made > 0 && observed_type(src, trial) == CloneType::Type3) {
        copy = std::move(trial);
        edits = made;
        done = true;
      }
    }
    if (!done) throw CapacityError("clone source " + describe(src) + " admits no near-miss edit");
  }
  const NodeType gran = src.type;  // src dangles once the parent grows
  auto* parent = it->second.parent;
  const auto pos = it->second.index;
  const NodeId copy_uid = copy.id;
  parent->children.insert(parent->children.begin() + static_cast<long>(pos) + 1, std::move(copy));
  WorkRecord r{gran, type, {uid, copy_uid}, edits, uid};
  std::sort(r.uids.begin(), r.uids.end());
  return r;
}

inline std::string mutate(WorkVariant& v, const Mutation& m, Editor& ed) {
  auto idx = index_tree(v.root);
  auto it = idx.find(m.target);
  if (it == idx.end()) throw LookupError("mutation target " + std::to_string(m.target) + " does not exist");
  auto& loc = it->second;
  const std::string what = describe(*loc.node);
  switch (m.kind) {
    case Mutation::Kind::Delete: {
      if (!loc.parent) throw PreconditionError("cannot delete the root");
      loc.parent->children.erase(loc.parent->children.begin() + static_cast<long>(loc.index));
      return "delete " + what;
    }
    case Mutation::Kind::DuplicateRename: {
      if (!loc.parent) throw PreconditionError("cannot duplicate the root");
      ArtifactNode copy = ed.copy_fresh(*loc.node);
      std::string fresh = ed.minted("zd");
      if (copy.type == NodeType::Class) fresh[0] = 'Z';
      copy.label = rename_label_head(copy.label, fresh);
      const NodeId src = loc.node->id, dup = copy.id;
      const auto type = observed_type(*loc.node, copy);
      const auto gran = loc.node->type;
      loc.parent->children.insert(loc.parent->children.begin() + static_cast<long>(loc.index) + 1,
                                  std::move(copy));
      WorkRecord r{gran, type, {src, dup}, 0, src};
      std::sort(r.uids.begin(), r.uids.end());
      v.records.push_back(r);
      return "duplicate-rename " + what + " as " + fresh;
    }
    case Mutation::Kind::ModifyStatement: {
      auto& n = *loc.node;
      if (n.type != NodeType::Statement) throw PreconditionError("modify needs a STATEMENT, got " + what);
      std::vector<std::size_t> spots;
      for (std::size_t i = 0; i < n.tokens.size(); ++i)
        if (classify_token(n.tokens[i]) == TokenClass::Identifier ||
            classify_token(n.tokens[i]) == TokenClass::Literal)
          spots.push_back(i);
      if (spots.empty()) {
        n.tokens.insert(n.tokens.begin(), ed.minted("zm"));
      } else {
        auto& tok = n.tokens[spots[ed.rng().below(spots.size())]];
        tok = classify_token(tok) == TokenClass::Identifier ? ed.minted("zm")
                                                            : std::to_string(1000 + ed.rng().below(9000));
      }
      return "modify " + what;
    }
  }
  return {};
}

// Random variant-level mutations that leave recorded clones intact.
inline std::vector<std::string> random_mutations(WorkVariant& v, double rate, std::size_t min_tokens,
                                                 Editor& ed) {
  std::size_t methods = 0;
  visit_preorder(v.root, [&](const ArtifactNode& n, int) { methods += n.type == NodeType::Method; });
  const auto count = static_cast<std::size_t>(rate * static_cast<double>(methods) + 0.5);
  std::vector<std::string> log;
  for (std::size_t k = 0; k < count; ++k) {
    const auto blocked = blocked_nodes(v.root, v.records);
    const auto kind = static_cast<Mutation::Kind>(ed.rng().below(3));
    std::vector<NodeId> cands;
    visit_preorder(v.root, [&](const ArtifactNode& n, int) {
      if (blocked.count(n.id)) return;
      switch (kind) {
        case Mutation::Kind::Delete:
          if (n.type == NodeType::Method || n.type == NodeType::Statement) cands.push_back(n.id);
          break;
        case Mutation::Kind::DuplicateRename:
          if ((n.type == NodeType::Method || n.type == NodeType::Class) && token_mass(n) >= min_tokens)
            cands.push_back(n.id);
          break;
        case Mutation::Kind::ModifyStatement:
          if (n.type == NodeType::Statement) cands.push_back(n.id);
          break;
      }
    });
    if (cands.empty()) continue;
    log.push_back(mutate(v, {kind, cands[ed.rng().below(cands.size())]}, ed));
  }
  return log;
}

inline NodeId max_uid(const ArtifactNode& root) {
  NodeId m = 0;
  visit_preorder(root, [&](const ArtifactNode& n, int) { m = std::max(m, n.id); });
  return m;
}

inline std::pair<ArtifactGraph, std::vector<CloneRecord>> finalize(WorkVariant v) {
  const auto mapping = renumber_preorder(v.root);
  std::vector<CloneRecord> out;
  for (const auto& r : v.records) {
    CloneRecord c{v.id, r.granularity, r.clone_type, {}, r.edit_count, mapping.at(r.source)};
    for (auto u : r.uids) c.members.push_back(mapping.at(u));
    std::sort(c.members.begin(), c.members.end());
    out.push_back(std::move(c));
  }
  return {ArtifactGraph(v.id, std::move(v.root)), std::move(out)};
}

inline void sort_records(std::vector<CloneRecord>& rs) {
  std::sort(rs.begin(), rs.end(), [](const CloneRecord& a, const CloneRecord& b) {
    if (a.variant_id != b.variant_id) return a.variant_id < b.variant_id;
    if (a.granularity != b.granularity) return granularity_rank(a.granularity) < granularity_rank(b.granularity);
    return a.members < b.members;
  });
}

}  // namespace detail

/// Applies the listed mutations (targets are ids of `graph`) and returns a
/// new variant.
inline ArtifactGraph mutate_variant(const ArtifactGraph& graph, const std::vector<Mutation>& mutations,
                                    const std::string& new_variant_id, Rng& rng) {
  detail::WorkVariant v{new_variant_id, graph.root(), {}};
  detail::Editor ed(rng, detail::max_uid(v.root) + 1);
  for (const auto& m : mutations) detail::mutate(v, m, ed);
  return detail::finalize(std::move(v)).first;
}

/// Copies `source_id` to a fresh sibling position as a clone of `type`. The
/// record's member ids refer to the returned graph.
inline std::pair<ArtifactGraph, CloneRecord> inject_clone(const ArtifactGraph& graph, NodeId source_id,
                                                          CloneType type, Rng& rng,
                                                          std::size_t type3_max_edits = 2) {
  detail::WorkVariant v{graph.variant_id(), graph.root(), {}};
  detail::Editor ed(rng, detail::max_uid(v.root) + 1);
  v.records.push_back(detail::inject(v, source_id, type, type3_max_edits, ed));
  auto [g, recs] = detail::finalize(std::move(v));
  return {std::move(g), recs.front()};
}

inline Benchmark generate_benchmark(const ArtifactGraph& seed, const GeneratorConfig& config) {
  config.validate();
  {
    bool has_host = false;
    for (const auto* n : seed.nodes())
      if (n->type == NodeType::Method && token_mass(*n) >= config.min_tokens) has_host = true;
    if (!has_host)
      throw CapacityError("seed has no METHOD with at least " + std::to_string(config.min_tokens) + " tokens");
  }
  Rng rng(config.rng_seed);
  detail::Editor ed(rng, detail::max_uid(seed.root()) + 1);
  std::vector<detail::WorkVariant> work;
  GroundTruth truth;
  work.push_back({"v1", seed.root(), {}});
  for (std::size_t k = 1; k < config.variant_count; ++k) {
    const auto parent = rng.below(work.size());
    detail::WorkVariant v{"v" + std::to_string(k + 1), work[parent].root, work[parent].records};
    auto log = detail::random_mutations(v, config.variant_mutation_rate, config.min_tokens, ed);
    truth.genealogy.push_back({v.id, work[parent].id, std::move(log)});
    work.push_back(std::move(v));
  }

  for (auto& v : work) {
    std::size_t turn = 0;
    for (const auto& [type, count] : config.clones_per_variant) {
      for (std::size_t i = 0; i < count; ++i) {
        bool placed = false;
        for (std::size_t g = 0; g < config.granularities.size() && !placed; ++g) {
          const auto gran = config.granularities[(turn + g) % config.granularities.size()];
          const auto blocked = detail::blocked_nodes(v.root, v.records);
          const auto cands = detail::hosts(v.root, gran, type, config.min_tokens, blocked);
          if (cands.empty()) continue;
          v.records.push_back(
              detail::inject(v, cands[rng.below(cands.size())], type, config.type3_max_edits, ed));
          placed = true;
        }
        if (!placed)
          throw CapacityError("variant " + v.id + " can host only " + std::to_string(i) + " of " +
                              std::to_string(count) + " requested " + std::string(to_string(type)) +
                              " clones");
        ++turn;
      }
    }
  }

  Benchmark out;
  for (auto& v : work) {
    auto [g, recs] = detail::finalize(std::move(v));
    out.variants.push_back(std::move(g));
    truth.clone_records.insert(truth.clone_records.end(), recs.begin(), recs.end());
  }
  detail::sort_records(truth.clone_records);
  out.truth = std::move(truth);
  return out;
}

inline Json clone_record_to_json(const CloneRecord& r) {
  Json j;
  j["variant_id"] = r.variant_id;
  j["granularity"] = std::string(to_string(r.granularity));
  j["clone_type"] = std::string(to_string(r.clone_type));
  j["members"] = r.members;
  j["edit_count"] = r.edit_count;
  j["source"] = r.source;
  return j;
}

inline Json truth_to_json(const GroundTruth& t) {
  Json j;
  j["clone_records"] = Json::array();
  for (const auto& r : t.clone_records) j["clone_records"].push_back(clone_record_to_json(r));
  j["genealogy"] = Json::array();
  for (const auto& g : t.genealogy)
    j["genealogy"].push_back(
        Json{{"variant_id", g.variant_id}, {"parent_variant_id", g.parent_variant_id}, {"mutations", g.mutations}});
  return j;
}

inline GroundTruth truth_from_json(const Json& j) {
  GroundTruth t;
  try {
    for (const auto& jr : j.at("clone_records")) {
      CloneRecord r;
      r.variant_id = jr.at("variant_id").get<std::string>();
      const auto g = node_type_from_string(jr.at("granularity").get<std::string>());
      const auto c = clone_type_from_string(jr.at("clone_type").get<std::string>());
      if (!g || !c) throw ParseError("bad clone record", "/clone_records");
      r.granularity = *g;
      r.clone_type = *c;
      r.members = jr.at("members").get<std::vector<NodeId>>();
      r.edit_count = jr.at("edit_count").get<std::size_t>();
      r.source = jr.at("source").get<NodeId>();
      t.clone_records.push_back(std::move(r));
    }
    for (const auto& jg : j.at("genealogy"))
      t.genealogy.push_back({jg.at("variant_id").get<std::string>(), jg.at("parent_variant_id").get<std::string>(),
                             jg.at("mutations").get<std::vector<std::string>>()});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed truth document: ") + e.what(), "");
  }
  return t;
}

inline Json generator_config_to_json(const GeneratorConfig& c) {
  Json j;
  j["variant_count"] = c.variant_count;
  j["clones_per_variant"] = Json::object();
  for (const auto& [t, n] : c.clones_per_variant) j["clones_per_variant"][std::string(to_string(t))] = n;
  j["type3_max_edits"] = c.type3_max_edits;
  j["variant_mutation_rate"] = c.variant_mutation_rate;
  j["rng_seed"] = c.rng_seed;
  j["granularities"] = Json::array();
  for (auto g : c.granularities) j["granularities"].push_back(std::string(to_string(g)));
  j["min_tokens"] = c.min_tokens;
  return j;
}

}  // namespace mple
