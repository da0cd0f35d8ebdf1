#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "partrans/kgdata.hpp"
#include "partrans/store.hpp"

namespace partrans {

// One embedding table on disk: "<count> <d>" then "<label> <v_1> ... <v_d>" per row,
// values in shortest round-trip form.
struct LabeledMatrix {
  std::vector<std::string> labels;
  Matrix values;
};

void write_matrix(const std::filesystem::path& path, const std::vector<std::string>& labels,
                  const Matrix& m);
// expected_dim == 0 accepts any width. Throws FormatError on shape or number errors.
LabeledMatrix read_matrix(const std::filesystem::path& path, std::size_t expected_dim = 0);

// File names inside an embedding directory.
inline constexpr const char* kEntityFile = "entities.vec";
inline constexpr const char* kRelationFile = "relations.vec";
inline constexpr const char* kHyperplaneFile = "hyperplanes.vec";

// Writes entities.vec, relations.vec and, for TransH, hyperplanes.vec into dir.
void save_embeddings(const EmbeddingStore& store, const Vocabulary& vocab,
                     const std::filesystem::path& dir);

struct LoadedEmbeddings {
  EmbeddingStore store;
  std::vector<std::string> entity_labels;
  std::vector<std::string> relation_labels;
};

LoadedEmbeddings load_embeddings(const std::filesystem::path& dir, std::size_t expected_dim = 0);

// Rows reordered to the graph's vocabulary ids. Every graph label must be present.
EmbeddingStore load_embeddings_for(const std::filesystem::path& dir, const Vocabulary& vocab,
                                   std::size_t expected_dim = 0);

}  // namespace partrans
