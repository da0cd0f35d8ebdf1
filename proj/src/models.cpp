#include "partrans/models.hpp"

#include <algorithm>
#include <cmath>

#include "partrans/error.hpp"

namespace partrans {

Similarity parse_similarity(const std::string& name) {
  if (name == "l1" || name == "L1") return Similarity::L1;
  if (name == "l2" || name == "L2") return Similarity::L2;
  throw Error("unknown similarity '" + name + "' (expected l1 or l2)");
}

ModelType parse_model_type(const std::string& name) {
  if (name == "transe" || name == "TransE") return ModelType::TransE;
  if (name == "transh" || name == "TransH") return ModelType::TransH;
  throw Error("unknown model '" + name + "' (expected transe or transh)");
}

std::string to_string(Similarity s) { return s == Similarity::L1 ? "l1" : "l2"; }
std::string to_string(ModelType m) { return m == ModelType::TransE ? "transe" : "transh"; }

namespace {

constexpr double kUnitTolerance = 1e-6;

inline double sign(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline double dot(ConstVec a, ConstVec b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void require_same_length(std::initializer_list<ConstVec> vs) {
  auto d = vs.begin()->size();
  for (auto v : vs)
    if (v.size() != d) throw Error("vector length mismatch");
}

void require_unit(ConstVec w) {
  double n = std::sqrt(dot(w, w));
  if (std::abs(n - 1.0) > kUnitTolerance)
    throw Error("hyperplane normal is not unit length (norm " + std::to_string(n) + ")");
}

void require_sample(const SampleVectors& s, bool with_w) {
  if (with_w)
    require_same_length({s.h, s.r, s.t, s.h_neg, s.r_neg, s.t_neg, s.w});
  else
    require_same_length({s.h, s.r, s.t, s.h_neg, s.r_neg, s.t_neg});
}

void require_rate(double rate) {
  if (!(rate > 0.0)) throw Error("learning rate must be positive");
}

}  // namespace

double score_transe(ConstVec h, ConstVec r, ConstVec t, Similarity sim) {
  require_same_length({h, r, t});
  double e = kernel::energy_transe(h, r, t, sim);
  return sim == Similarity::L2 ? std::sqrt(e) : e;
}

std::vector<double> project_hyperplane(ConstVec e, ConstVec w) {
  require_same_length({e, w});
  require_unit(w);
  const double we = dot(w, e);
  std::vector<double> out(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) out[k] = e[k] - we * w[k];
  return out;
}

double score_transh(ConstVec h, ConstVec r, ConstVec t, ConstVec w, Similarity sim) {
  require_same_length({h, r, t, w});
  require_unit(w);
  double e = kernel::energy_transh(h, r, t, w, sim);
  return sim == Similarity::L2 ? std::sqrt(e) : e;
}

double energy_transe(ConstVec h, ConstVec r, ConstVec t, Similarity sim) {
  require_same_length({h, r, t});
  return kernel::energy_transe(h, r, t, sim);
}

double energy_transh(ConstVec h, ConstVec r, ConstVec t, ConstVec w, Similarity sim) {
  require_same_length({h, r, t, w});
  require_unit(w);
  return kernel::energy_transh(h, r, t, w, sim);
}

std::vector<double> normalize(ConstVec v) {
  std::vector<double> out(v.begin(), v.end());
  if (!normalize_in_place(out)) throw Error("cannot normalize a zero vector");
  return out;
}

bool normalize_in_place(MutVec v) noexcept {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (!(n > 0.0)) return false;
  for (double& x : v) x /= n;
  return true;
}

void GradientBundle::reset(std::size_t dim, bool with_hyperplane) {
  for (auto* v : {&d_h, &d_t, &d_r, &d_hneg, &d_tneg, &d_rneg}) v->assign(dim, 0.0);
  d_wr.assign(with_hyperplane ? dim : 0, 0.0);
  active = false;
  hinge = 0.0;
}

GradientBundle grad_transe(const SampleVectors& s, Similarity sim, double margin, double rate) {
  require_sample(s, false);
  require_rate(rate);
  GradientBundle out;
  kernel::grad_transe(s, sim, margin, rate, out);
  return out;
}

GradientBundle grad_transh(const SampleVectors& s, Similarity sim, double margin, double rate) {
  require_sample(s, true);
  require_rate(rate);
  require_unit(s.w);
  GradientBundle out;
  kernel::grad_transh(s, sim, margin, rate, out);
  return out;
}

namespace kernel {

double energy_transe(ConstVec h, ConstVec r, ConstVec t, Similarity sim) noexcept {
  double s = 0.0;
  if (sim == Similarity::L1) {
    for (std::size_t k = 0; k < h.size(); ++k) s += std::abs(h[k] + r[k] - t[k]);
  } else {
    for (std::size_t k = 0; k < h.size(); ++k) {
      double x = h[k] + r[k] - t[k];
      s += x * x;
    }
  }
  return s;
}

double energy_transh(ConstVec h, ConstVec r, ConstVec t, ConstVec w, Similarity sim) noexcept {
  const double wh = dot(w, h);
  const double wt = dot(w, t);
  double s = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    double x = (h[k] - wh * w[k]) + r[k] - (t[k] - wt * w[k]);
    s += sim == Similarity::L1 ? std::abs(x) : x * x;
  }
  return s;
}

void grad_transe(const SampleVectors& s, Similarity sim, double margin, double rate,
                 GradientBundle& out) noexcept {
  const std::size_t d = s.h.size();
  const double pos = kernel::energy_transe(s.h, s.r, s.t, sim);
  const double neg = kernel::energy_transe(s.h_neg, s.r_neg, s.t_neg, sim);
  const double hinge = pos + margin - neg;

  out.d_h.resize(d);
  out.d_t.resize(d);
  out.d_r.resize(d);
  out.d_hneg.resize(d);
  out.d_tneg.resize(d);
  out.d_rneg.resize(d);
  out.d_wr.clear();

  if (!(hinge > 0.0)) {
    for (auto* v : {&out.d_h, &out.d_t, &out.d_r, &out.d_hneg, &out.d_tneg, &out.d_rneg})
      std::fill(v->begin(), v->end(), 0.0);
    out.active = false;
    out.hinge = 0.0;
    return;
  }
  out.active = true;
  out.hinge = hinge;

  // Each dimension k depends only on dimension k of the inputs.
  for (std::size_t k = 0; k < d; ++k) {
    double x = s.h[k] + s.r[k] - s.t[k];
    double g = sim == Similarity::L2 ? 2.0 * x : sign(x);
    out.d_h[k] = -rate * g;
    out.d_r[k] = -rate * g;
    out.d_t[k] = rate * g;

    double xn = s.h_neg[k] + s.r_neg[k] - s.t_neg[k];
    double gn = sim == Similarity::L2 ? 2.0 * xn : sign(xn);
    out.d_hneg[k] = rate * gn;
    out.d_rneg[k] = rate * gn;
    out.d_tneg[k] = -rate * gn;
  }
}

namespace {

// Gradient of E(h, r, t; w) = ||(h - t) - (w.(h - t)) w + r|| (energy form) with respect
// to h, r and w. The t-gradient is the negated h-gradient.
struct TransHPartials {
  double wg = 0.0;  // w . dE/de
  double wu = 0.0;  // w . (h - t)
};

inline TransHPartials transh_partials(ConstVec h, ConstVec r, ConstVec t, ConstVec w,
                                      Similarity sim, std::vector<double>& g) noexcept {
  const std::size_t d = h.size();
  TransHPartials p;
  const double wh = dot(w, h);
  const double wt = dot(w, t);
  p.wu = wh - wt;
  g.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    // Same expression as energy_transh, so the signs agree with the energy.
    double e = (h[k] - wh * w[k]) + r[k] - (t[k] - wt * w[k]);
    g[k] = sim == Similarity::L2 ? 2.0 * e : sign(e);
    p.wg += w[k] * g[k];
  }
  return p;
}

thread_local std::vector<double> g_pos_scratch, g_neg_scratch;

}  // namespace

void grad_transh(const SampleVectors& s, Similarity sim, double margin, double rate,
                 GradientBundle& out) noexcept {
  const std::size_t d = s.h.size();
  const double pos = kernel::energy_transh(s.h, s.r, s.t, s.w, sim);
  const double neg = kernel::energy_transh(s.h_neg, s.r_neg, s.t_neg, s.w, sim);
  const double hinge = pos + margin - neg;

  for (auto* v : {&out.d_h, &out.d_t, &out.d_r, &out.d_hneg, &out.d_tneg, &out.d_rneg, &out.d_wr})
    v->resize(d);

  if (!(hinge > 0.0)) {
    for (auto* v :
         {&out.d_h, &out.d_t, &out.d_r, &out.d_hneg, &out.d_tneg, &out.d_rneg, &out.d_wr})
      std::fill(v->begin(), v->end(), 0.0);
    out.active = false;
    out.hinge = 0.0;
    return;
  }
  out.active = true;
  out.hinge = hinge;

  auto& gp = g_pos_scratch;
  auto& gn = g_neg_scratch;
  const auto pp = transh_partials(s.h, s.r, s.t, s.w, sim, gp);
  const auto pn = transh_partials(s.h_neg, s.r_neg, s.t_neg, s.w, sim, gn);

  for (std::size_t k = 0; k < d; ++k) {
    // dE/dh = (I - w w^T) g; reduces to g when w.r = 0, the TransH orthogonality constraint.
    double gh = gp[k] - pp.wg * s.w[k];
    out.d_h[k] = -rate * gh;
    out.d_t[k] = rate * gh;
    out.d_r[k] = -rate * gp[k];

    double ghn = gn[k] - pn.wg * s.w[k];
    out.d_hneg[k] = rate * ghn;
    out.d_tneg[k] = -rate * ghn;
    out.d_rneg[k] = rate * gn[k];

    // dE/dw = -[(w.g)(h - t) + (w.(h - t)) g]
    double gw_pos = -(pp.wg * (s.h[k] - s.t[k]) + pp.wu * gp[k]);
    double gw_neg = -(pn.wg * (s.h_neg[k] - s.t_neg[k]) + pn.wu * gn[k]);
    out.d_wr[k] = -rate * (gw_pos - gw_neg);
  }
}

}  // namespace kernel
}  // namespace partrans
