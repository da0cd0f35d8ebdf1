#include "partrans/kgdata.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <string_view>

#include "partrans/error.hpp"

namespace partrans {

ColumnOrder parse_column_order(const std::string& name) {
  if (name == "hrt" || name == "HRT") return ColumnOrder::HRT;
  if (name == "htr" || name == "HTR") return ColumnOrder::HTR;
  throw Error("unknown column order '" + name + "' (expected hrt or htr)");
}

std::uint32_t LabelMap::intern(const std::string& label) {
  auto [it, inserted] = index_.try_emplace(label, static_cast<std::uint32_t>(labels_.size()));
  if (inserted) labels_.push_back(label);
  return it->second;
}

std::uint32_t LabelMap::id(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw Error("unknown label '" + label + "'");
  return it->second;
}

KnowledgeGraph::KnowledgeGraph(Vocabulary vocab, std::vector<Triple> train,
                               std::vector<Triple> valid, std::vector<Triple> test)
    : vocab_(std::move(vocab)),
      train_(std::move(train)),
      valid_(std::move(valid)),
      test_(std::move(test)) {
  const auto ne = num_entities();
  const auto nr = num_relations();
  known_.reserve(train_.size() + valid_.size() + test_.size());
  for (const auto* split : {&train_, &valid_, &test_}) {
    for (const auto& t : *split) {
      if (t.head >= ne || t.tail >= ne || t.relation >= nr)
        throw Error("triple id out of range for vocabulary");
      known_.insert(key(t));
    }
  }
}

std::vector<RawTriple> parse_triples(std::istream& in, ColumnOrder order) {
  std::vector<RawTriple> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string_view> cols;
    std::string_view rest(line);
    for (auto tab = rest.find('\t'); tab != std::string_view::npos; tab = rest.find('\t')) {
      cols.push_back(rest.substr(0, tab));
      rest.remove_prefix(tab + 1);
    }
    cols.push_back(rest);
    if (cols.size() != 3)
      throw FormatError("expected 3 tab-separated fields, got " + std::to_string(cols.size()),
                        lineno);
    for (auto c : cols)
      if (c.empty()) throw FormatError("empty field", lineno);

    if (order == ColumnOrder::HRT)
      out.push_back({std::string(cols[0]), std::string(cols[1]), std::string(cols[2])});
    else
      out.push_back({std::string(cols[0]), std::string(cols[2]), std::string(cols[1])});
  }
  return out;
}

std::vector<RawTriple> load_triples(const std::filesystem::path& path, ColumnOrder order) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_triples(in, order);
}

KnowledgeGraph build_graph(const std::vector<RawTriple>& train, const std::vector<RawTriple>& valid,
                           const std::vector<RawTriple>& test) {
  if (train.empty()) throw Error("training split is empty");

  Vocabulary vocab;
  auto map_split = [&vocab](const std::vector<RawTriple>& raw) {
    std::vector<Triple> out;
    out.reserve(raw.size());
    for (const auto& r : raw) {
      Triple t;
      t.head = vocab.entities.intern(r.head);
      t.relation = vocab.relations.intern(r.relation);
      t.tail = vocab.entities.intern(r.tail);
      out.push_back(t);
    }
    return out;
  };
  auto tr = map_split(train);
  auto va = map_split(valid);
  auto te = map_split(test);
  return KnowledgeGraph(std::move(vocab), std::move(tr), std::move(va), std::move(te));
}

void write_triples(const std::filesystem::path& path, const KnowledgeGraph& graph,
                   const std::vector<Triple>& triples, ColumnOrder order) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const auto& ents = graph.vocab().entities;
  const auto& rels = graph.vocab().relations;
  for (const auto& t : triples) {
    const auto& h = ents.label(t.head);
    const auto& r = rels.label(t.relation);
    const auto& tl = ents.label(t.tail);
    if (order == ColumnOrder::HRT)
      out << h << '\t' << r << '\t' << tl << '\n';
    else
      out << h << '\t' << tl << '\t' << r << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

Vocabulary numbered_vocab(std::size_t ne, std::size_t nr) {
  Vocabulary v;
  for (std::size_t i = 0; i < ne; ++i) v.entities.intern("e" + std::to_string(i));
  for (std::size_t j = 0; j < nr; ++j) v.relations.intern("r" + std::to_string(j));
  return v;
}

}  // namespace

KnowledgeGraph synth_graph(std::size_t ne, std::size_t nr, std::size_t n, std::uint64_t seed) {
  if (ne < 2 || nr < 1 || n < 1) throw Error("synth_graph: need n_e >= 2, n_r >= 1, n >= 1");
  const long double space = static_cast<long double>(ne) * ne * nr;
  if (static_cast<long double>(n) > space)
    throw Error("synth_graph: requested triples exceed n_e * n_e * n_r");

  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, static_cast<std::uint64_t>(space) - 1);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(n);
  std::vector<Triple> train;
  train.reserve(n);

  if (static_cast<long double>(n) * 2 > space) {
    // Dense request: partial Fisher-Yates over the whole space.
    std::vector<std::uint64_t> all(static_cast<std::size_t>(space));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> j(i, all.size() - 1);
      std::swap(all[i], all[j(gen)]);
      seen.insert(all[i]);
    }
    all.resize(n);
    for (auto code : all) {
      Triple t;
      t.tail = static_cast<EntityId>(code % ne);
      t.relation = static_cast<RelationId>((code / ne) % nr);
      t.head = static_cast<EntityId>(code / ne / nr);
      train.push_back(t);
    }
  } else {
    while (train.size() < n) {
      auto code = pick(gen);
      if (!seen.insert(code).second) continue;
      Triple t;
      t.tail = static_cast<EntityId>(code % ne);
      t.relation = static_cast<RelationId>((code / ne) % nr);
      t.head = static_cast<EntityId>(code / ne / nr);
      train.push_back(t);
    }
  }
  return KnowledgeGraph(numbered_vocab(ne, nr), std::move(train), {}, {});
}

KnowledgeGraph synth_typed_graph(std::size_t ne, std::size_t nr, std::size_t clusters,
                                 std::size_t n_train, std::size_t n_test, std::uint64_t seed) {
  if (clusters < 2 || ne < 2 * clusters || nr < 1 || n_train < 1)
    throw Error("synth_typed_graph: need clusters >= 2, n_e >= 2 * clusters, n_r >= 1");

  auto group_begin = [&](std::size_t g) { return g * ne / clusters; };
  auto group_size = [&](std::size_t g) { return group_begin(g + 1) - group_begin(g); };
  std::vector<std::pair<std::size_t, std::size_t>> types(nr);
  std::size_t capacity = 0;
  for (std::size_t j = 0; j < nr; ++j) {
    std::size_t a = j % clusters;
    std::size_t b = (j + 1 + j / clusters) % clusters;
    if (b == a) b = (b + 1) % clusters;
    types[j] = {a, b};
    capacity += group_size(a) * group_size(b);
  }
  const std::size_t n = n_train + n_test;
  if (n > capacity) throw Error("synth_typed_graph: requested triples exceed typed capacity");

  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick_rel(0, nr - 1);
  std::unordered_set<std::uint64_t> seen;
  std::vector<Triple> all;
  all.reserve(n);
  while (all.size() < n) {
    auto r = pick_rel(gen);
    auto [a, b] = types[r];
    std::uniform_int_distribution<std::size_t> ph(0, group_size(a) - 1);
    std::uniform_int_distribution<std::size_t> pt(0, group_size(b) - 1);
    Triple t;
    t.head = static_cast<EntityId>(group_begin(a) + ph(gen));
    t.relation = static_cast<RelationId>(r);
    t.tail = static_cast<EntityId>(group_begin(b) + pt(gen));
    std::uint64_t code = (static_cast<std::uint64_t>(t.head) * nr + t.relation) * ne + t.tail;
    if (seen.insert(code).second) all.push_back(t);
  }
  std::vector<Triple> train(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<Triple> test(all.begin() + static_cast<std::ptrdiff_t>(n_train), all.end());
  return KnowledgeGraph(numbered_vocab(ne, nr), std::move(train), {}, std::move(test));
}

}  // namespace partrans
