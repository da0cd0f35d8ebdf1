#pragma once

#include <span>
#include <string>
#include <vector>

namespace partrans {

enum class Similarity { L1, L2 };
enum class ModelType { TransE, TransH };

struct ModelKind {
  ModelType type = ModelType::TransE;
  Similarity sim = Similarity::L1;
};

Similarity parse_similarity(const std::string& name);
ModelType parse_model_type(const std::string& name);
std::string to_string(Similarity s);
std::string to_string(ModelType m);

using ConstVec = std::span<const double>;
using MutVec = std::span<double>;

// ||h + r - t||, either L1 or L2.
double score_transe(ConstVec h, ConstVec r, ConstVec t, Similarity sim);

// e - (w.e) w. w must be unit length within 1e-6.
std::vector<double> project_hyperplane(ConstVec e, ConstVec w);

// ||h_perp + r - t_perp|| with h and t projected onto the hyperplane with normal w.
double score_transh(ConstVec h, ConstVec r, ConstVec t, ConstVec w, Similarity sim);

// The dissimilarity the hinge is built on: sum |x| for L1, sum x^2 for L2. The L2 form
// is the squared norm, which is what the factor-2 gradient differentiates. Ranking by
// energy and by score gives the same order.
double energy_transe(ConstVec h, ConstVec r, ConstVec t, Similarity sim);
double energy_transh(ConstVec h, ConstVec r, ConstVec t, ConstVec w, Similarity sim);

std::vector<double> normalize(ConstVec v);
// Scales v to unit L2 norm; leaves a zero vector untouched and returns false.
bool normalize_in_place(MutVec v) noexcept;

// Parameters touched by one SGD step: positive (h, r, t), corrupted (h', r', t'), and the
// relation's hyperplane normal for TransH (empty for TransE).
struct SampleVectors {
  ConstVec h, r, t;
  ConstVec h_neg, r_neg, t_neg;
  ConstVec w;
};

// Additive parameter deltas, already scaled by -rate. All zero when the hinge is inactive.
struct GradientBundle {
  std::vector<double> d_h, d_t, d_r;
  std::vector<double> d_hneg, d_tneg, d_rneg;
  std::vector<double> d_wr;  // TransH only
  bool active = false;
  double hinge = 0.0;  // max(0, E(pos) + M - E(neg))

  void reset(std::size_t dim, bool with_hyperplane);
};

// Hinge-loss gradients. Both throw Error on nonpositive rate or mismatched lengths;
// grad_transh also on a non-unit w.
GradientBundle grad_transe(const SampleVectors& s, Similarity sim, double margin, double rate);
GradientBundle grad_transh(const SampleVectors& s, Similarity sim, double margin, double rate);

// Unchecked variants writing into a reused bundle, for the training loop.
namespace kernel {
void grad_transe(const SampleVectors& s, Similarity sim, double margin, double rate,
                 GradientBundle& out) noexcept;
void grad_transh(const SampleVectors& s, Similarity sim, double margin, double rate,
                 GradientBundle& out) noexcept;
double energy_transe(ConstVec h, ConstVec r, ConstVec t, Similarity sim) noexcept;
double energy_transh(ConstVec h, ConstVec r, ConstVec t, ConstVec w, Similarity sim) noexcept;
}  // namespace kernel

}  // namespace partrans
