#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace partrans {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
};

// A triple as it appears in a file, already permuted to (head, relation, tail).
struct RawTriple {
  std::string head;
  std::string relation;
  std::string tail;

  friend bool operator==(const RawTriple&, const RawTriple&) = default;
};

// Column layout of a triple file. HTR is the layout of the public WN18/FB15k releases.
enum class ColumnOrder { HRT, HTR };

ColumnOrder parse_column_order(const std::string& name);

// Dense label <-> id bijection for one kind of symbol.
class LabelMap {
 public:
  // Returns the id of label, inserting it if unseen.
  std::uint32_t intern(const std::string& label);
  // Throws Error if the label is unknown.
  std::uint32_t id(const std::string& label) const;
  bool has(const std::string& label) const { return index_.count(label) != 0; }
  const std::string& label(std::uint32_t id) const { return labels_.at(id); }
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct Vocabulary {
  LabelMap entities;
  LabelMap relations;
};

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  KnowledgeGraph(Vocabulary vocab, std::vector<Triple> train, std::vector<Triple> valid,
                 std::vector<Triple> test);

  const Vocabulary& vocab() const noexcept { return vocab_; }
  const std::vector<Triple>& train() const noexcept { return train_; }
  const std::vector<Triple>& valid() const noexcept { return valid_; }
  const std::vector<Triple>& test() const noexcept { return test_; }

  std::size_t num_entities() const noexcept { return vocab_.entities.size(); }
  std::size_t num_relations() const noexcept { return vocab_.relations.size(); }
  // Number of training lines, duplicates included.
  std::size_t num_train() const noexcept { return train_.size(); }

  // Membership over train, valid and test.
  bool contains(const Triple& t) const { return known_.count(key(t)) != 0; }

  // Distinct triples across all splits.
  std::size_t num_known() const noexcept { return known_.size(); }

 private:
  std::uint64_t key(const Triple& t) const noexcept {
    return (static_cast<std::uint64_t>(t.head) * num_relations() + t.relation) * num_entities() +
           t.tail;
  }

  Vocabulary vocab_;
  std::vector<Triple> train_, valid_, test_;
  std::unordered_set<std::uint64_t> known_;
};

// Reads a three-column TSV. Blank lines are skipped.
std::vector<RawTriple> load_triples(const std::filesystem::path& path,
                                    ColumnOrder order = ColumnOrder::HTR);

std::vector<RawTriple> parse_triples(std::istream& in, ColumnOrder order = ColumnOrder::HTR);

KnowledgeGraph build_graph(const std::vector<RawTriple>& train, const std::vector<RawTriple>& valid,
                           const std::vector<RawTriple>& test);

// Writes triples back as labels in the given column order.
void write_triples(const std::filesystem::path& path, const KnowledgeGraph& graph,
                   const std::vector<Triple>& triples, ColumnOrder order = ColumnOrder::HTR);

// n distinct triples drawn uniformly from E x R x E; everything lands in train.
// Labels are "e<i>" and "r<j>".
KnowledgeGraph synth_graph(std::size_t num_entities, std::size_t num_relations, std::size_t n,
                           std::uint64_t seed);

// Graph with planted type structure: entities fall into `clusters` groups, and relation j
// links heads of group (j mod clusters) to tails of another fixed group. The first
// n_train distinct triples form the train split, the next n_test the test split.
KnowledgeGraph synth_typed_graph(std::size_t num_entities, std::size_t num_relations,
                                 std::size_t clusters, std::size_t n_train, std::size_t n_test,
                                 std::uint64_t seed);

}  // namespace partrans
