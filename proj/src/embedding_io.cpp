#include "partrans/embedding_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "partrans/error.hpp"

namespace partrans {

namespace {

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
T parse_number(std::string_view tok, const std::string& what, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw FormatError("bad " + what + " '" + std::string(tok) + "'", line);
  return v;
}

}  // namespace

void write_matrix(const std::filesystem::path& path, const std::vector<std::string>& labels,
                  const Matrix& m) {
  if (labels.size() != m.rows()) throw Error("label count does not match matrix rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << labels[i];
    for (double x : m.row(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

LabeledMatrix read_matrix(const std::filesystem::path& path, std::size_t expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header", 1);
  auto head = split_spaces(line);
  if (head.size() != 2) throw FormatError(path.string() + ": header must be '<count> <d>'", 1);
  const auto rows = parse_number<std::size_t>(head[0], "row count", 1);
  const auto cols = parse_number<std::size_t>(head[1], "dimension", 1);
  if (expected_dim != 0 && cols != expected_dim)
    throw FormatError(path.string() + ": dimension " + std::to_string(cols) + ", expected " +
                          std::to_string(expected_dim),
                      1);

  LabeledMatrix out;
  out.values = Matrix(rows, cols);
  out.labels.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t lineno = i + 2;
    if (!std::getline(in, line))
      throw FormatError(path.string() + ": expected " + std::to_string(rows) + " rows", lineno);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto toks = split_spaces(line);
    if (toks.size() < cols + 1)
      throw FormatError(path.string() + ": row has fewer than " + std::to_string(cols) +
                            " values plus a label",
                        lineno);
    // Values are the last `cols` tokens; anything before them is the label.
    const std::size_t first_value = toks.size() - cols;
    auto label_end = toks[first_value - 1].data() + toks[first_value - 1].size();
    out.labels.emplace_back(toks[0].data(), static_cast<std::size_t>(label_end - toks[0].data()));
    for (std::size_t k = 0; k < cols; ++k)
      out.values.at(i, k) = parse_number<double>(toks[first_value + k], "value", lineno);
  }
  while (std::getline(in, line))
    if (!split_spaces(line).empty())
      throw FormatError(path.string() + ": more rows than the header declares");
  return out;
}

void save_embeddings(const EmbeddingStore& store, const Vocabulary& vocab,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_matrix(dir / kEntityFile, vocab.entities.labels(), store.entities);
  write_matrix(dir / kRelationFile, vocab.relations.labels(), store.relations);
  if (store.has_hyperplanes())
    write_matrix(dir / kHyperplaneFile, vocab.relations.labels(), store.hyperplanes);
}

LoadedEmbeddings load_embeddings(const std::filesystem::path& dir, std::size_t expected_dim) {
  LoadedEmbeddings out;
  auto ents = read_matrix(dir / kEntityFile, expected_dim);
  auto rels = read_matrix(dir / kRelationFile, ents.values.cols());
  out.store.entities = std::move(ents.values);
  out.store.relations = std::move(rels.values);
  out.entity_labels = std::move(ents.labels);
  out.relation_labels = std::move(rels.labels);
  if (std::filesystem::exists(dir / kHyperplaneFile)) {
    auto hyp = read_matrix(dir / kHyperplaneFile, out.store.entities.cols());
    if (hyp.labels != out.relation_labels)
      throw FormatError("hyperplane labels do not match relation labels");
    out.store.hyperplanes = std::move(hyp.values);
  }
  return out;
}

EmbeddingStore load_embeddings_for(const std::filesystem::path& dir, const Vocabulary& vocab,
                                   std::size_t expected_dim) {
  auto loaded = load_embeddings(dir, expected_dim);
  const auto d = loaded.store.dim();

  auto reorder = [d](const Matrix& src, const std::vector<std::string>& labels,
                     const LabelMap& target, const char* kind) {
    std::unordered_map<std::string, std::size_t> at;
    for (std::size_t i = 0; i < labels.size(); ++i) at.emplace(labels[i], i);
    Matrix out(target.size(), d);
    for (std::size_t id = 0; id < target.size(); ++id) {
      auto it = at.find(target.label(static_cast<std::uint32_t>(id)));
      if (it == at.end())
        throw FormatError(std::string("no embedding for ") + kind + " '" +
                          target.label(static_cast<std::uint32_t>(id)) + "'");
      auto src_row = src.row(it->second);
      std::copy(src_row.begin(), src_row.end(), out.row(id).begin());
    }
    return out;
  };

  EmbeddingStore store;
  store.entities = reorder(loaded.store.entities, loaded.entity_labels, vocab.entities, "entity");
  store.relations =
      reorder(loaded.store.relations, loaded.relation_labels, vocab.relations, "relation");
  if (loaded.store.has_hyperplanes())
    store.hyperplanes =
        reorder(loaded.store.hyperplanes, loaded.relation_labels, vocab.relations, "relation");
  return store;
}

}  // namespace partrans
