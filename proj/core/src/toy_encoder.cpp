#include "omniflow/toy_encoder.hpp"

#include <array>
#include <cmath>
#include <random>
#include <string>

#include "omniflow/equirect_warp.hpp"
#include "omniflow/error.hpp"

namespace omniflow {

namespace {

constexpr double kGradientEpsilon = 1e-3;

using Plane = std::vector<double>;

double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

int wrap_index(int i, int n) {
  const int m = i % n;
  return m < 0 ? m + n : m;
}

// Bilinear stencil with the warp boundary rules (wrap columns, clamp rows).
struct Stencil {
  std::array<std::size_t, 4> index;
  std::array<double, 4> weight;
};

Stencil bilinear_stencil(double col, double row, int width, int height) {
  const double fx0 = std::floor(col);
  const double fy0 = std::floor(row);
  const double tx = col - fx0;
  const double ty = row - fy0;
  const int x0 = wrap_index(static_cast<int>(fx0), width);
  const int x1 = wrap_index(x0 + 1, width);
  const int y0 = std::clamp(static_cast<int>(fy0), 0, height - 1);
  const int y1 = std::clamp(static_cast<int>(fy0) + 1, 0, height - 1);
  auto at = [width](int x, int y) { return static_cast<std::size_t>(y) * width + x; };
  return {{at(x0, y0), at(x1, y0), at(x0, y1), at(x1, y1)},
          {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty}};
}

void require_toy_shape(const Image& a, const Image& b) {
  require_equirect(a.width(), a.height());
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ShapeError("toy encoder frames must share dimensions");
  }
  if (a.height() % ToyEncoder::kPooledHeight != 0 || a.width() % ToyEncoder::kPooledWidth != 0) {
    throw ShapeError("toy encoder needs height divisible by 8 and width by 16");
  }
}

// A value and its derivatives with respect to (step, damping).
struct Dual3Field {
  std::vector<Vec3> value, d_step, d_damping;
};

struct StreamState {
  int width = 0;
  int height = 0;
  std::vector<Plane> u, v;            // per iteration
  std::vector<Plane> u_step, v_step;  // d/d step
  std::vector<Plane> u_damp, v_damp;  // d/d damping
  std::vector<double> z, z_step, z_damp;
};

// Normal-flow drive of the toy head; independent of the trainable scalars.
void flow_drive(const Image& i0, const Image& i1, Plane& cu, Plane& cv) {
  const int w = i0.width(), h = i0.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  cu.assign(n, 0.0);
  cv.assign(n, 0.0);
  Plane diff(n);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      diff[static_cast<std::size_t>(y) * w + x] =
          static_cast<double>(i1.at(x, y)) - static_cast<double>(i0.at(x, y));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int bx = x & ~1, by = y & ~1;
      const double block = 0.25 * (diff[static_cast<std::size_t>(by) * w + bx] +
                                   diff[static_cast<std::size_t>(by) * w + bx + 1] +
                                   diff[static_cast<std::size_t>(by + 1) * w + bx] +
                                   diff[static_cast<std::size_t>(by + 1) * w + bx + 1]);
      const double gx = 0.5 * (static_cast<double>(i0.at((x + 1) % w, y)) -
                               static_cast<double>(i0.at((x + w - 1) % w, y)));
      const int ya = std::max(y - 1, 0), yb = std::min(y + 1, h - 1);
      const double gy = (static_cast<double>(i0.at(x, yb)) - static_cast<double>(i0.at(x, ya))) /
                        static_cast<double>(yb - ya);
      const double den = gx * gx + gy * gy + kGradientEpsilon;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      cu[i] = -block * gx / den;
      cv[i] = -block * gy / den;
    }
  }
}

StreamState run_stream(const ToyEncoder& enc, const FlowHeadParams& params, const Image& gray0,
                       const Image& gray1, const Rotation3& r) {
  const int w = gray0.width(), h = gray0.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  StreamState s;
  s.width = w;
  s.height = h;

  // R: rotate the frame pair.
  Image x0 = gray0, x1 = gray1;
  if (!r.is_identity()) {
    const WarpMap map = build_warp_map(r, w, h);
    x0 = warp_image(gray0, map, Interp::bilinear);
    x1 = warp_image(gray1, map, Interp::bilinear);
  }

  // E: damped refinement with forward-mode tangents.
  Plane cu, cv;
  flow_drive(x0, x1, cu, cv);
  const double a = params.step, b = params.damping;
  const double keep = 1.0 - a * b;
  Plane u(n, 0.0), v(n, 0.0), ua(n, 0.0), va(n, 0.0), ub(n, 0.0), vb(n, 0.0);
  for (int k = 0; k < ToyEncoder::kIterations; ++k) {
    Plane nu(n), nv(n), nua(n), nva(n), nub(n), nvb(n);
    for (std::size_t i = 0; i < n; ++i) {
      nu[i] = keep * u[i] + a * cu[i];
      nv[i] = keep * v[i] + a * cv[i];
      nua[i] = keep * ua[i] - b * u[i] + cu[i];
      nva[i] = keep * va[i] - b * v[i] + cv[i];
      nub[i] = keep * ub[i] - a * u[i];
      nvb[i] = keep * vb[i] - a * v[i];
    }
    u = std::move(nu);
    v = std::move(nv);
    ua = std::move(nua);
    va = std::move(nva);
    ub = std::move(nub);
    vb = std::move(nvb);
    s.u.push_back(u);
    s.v.push_back(v);
    s.u_step.push_back(ua);
    s.v_step.push_back(va);
    s.u_damp.push_back(ub);
    s.v_damp.push_back(vb);
  }

  // Theta: lift the final flow to sphere motion.
  Dual3Field m;
  m.value.resize(n);
  m.d_step.resize(n);
  m.d_damping.resize(n);
  const double dcol = kTwoPi / w, drow = kPi / h;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double ec = x + u[i], er = y + v[i];
      const Vec3 end = lift_pixel(ec, er, w, h);
      m.value[i] = end - lift_pixel(x, y, w, h);
      const double phi = (ec + 0.5) * dcol - kPi;
      const double colat = (er + 0.5) * drow;
      const Vec3 j_col{-std::sin(colat) * std::sin(phi) * dcol,
                       std::sin(colat) * std::cos(phi) * dcol, 0.0};
      const Vec3 j_row{std::cos(colat) * std::cos(phi) * drow,
                       std::cos(colat) * std::sin(phi) * drow, -std::sin(colat) * drow};
      m.d_step[i] = ua[i] * j_col + va[i] * j_row;
      m.d_damping[i] = ub[i] * j_col + vb[i] * j_row;
    }
  }

  // R': resample onto the unrotated grid and rotate the vectors back.
  if (!r.is_identity()) {
    const Rotation3 back = r.inverse();
    const WarpMap map = build_warp_map(back, w, h);
    Dual3Field out;
    out.value.resize(n);
    out.d_step.resize(n);
    out.d_damping.resize(n);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        const Stencil st = bilinear_stencil(map.src_col(x, y), map.src_row(x, y), w, h);
        Vec3 val, ds, dd;
        for (int k = 0; k < 4; ++k) {
          val = val + st.weight[k] * m.value[st.index[k]];
          ds = ds + st.weight[k] * m.d_step[st.index[k]];
          dd = dd + st.weight[k] * m.d_damping[st.index[k]];
        }
        out.value[i] = back.apply(val);
        out.d_step[i] = back.apply(ds);
        out.d_damping[i] = back.apply(dd);
      }
    }
    m = std::move(out);
  }

  // P: block pooling to 8x16 cells, then the fixed projection.
  const int bh = h / ToyEncoder::kPooledHeight, bw = w / ToyEncoder::kPooledWidth;
  const double inv_block = 1.0 / (static_cast<double>(bh) * bw);
  constexpr int cells = ToyEncoder::kPooledHeight * ToyEncoder::kPooledWidth;
  std::vector<double> feat(ToyEncoder::kFeatures, 0.0), feat_s(feat), feat_d(feat);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const int cell = (y / bh) * ToyEncoder::kPooledWidth + (x / bw);
      const std::array<double, 3> mv{m.value[i].x, m.value[i].y, m.value[i].z};
      const std::array<double, 3> ms{m.d_step[i].x, m.d_step[i].y, m.d_step[i].z};
      const std::array<double, 3> md{m.d_damping[i].x, m.d_damping[i].y, m.d_damping[i].z};
      for (int c = 0; c < 3; ++c) {
        feat[c * cells + cell] += inv_block * mv[c];
        feat_s[c * cells + cell] += inv_block * ms[c];
        feat_d[c * cells + cell] += inv_block * md[c];
      }
    }
  }
  const int d = enc.latent_dim();
  const auto proj = enc.projection();
  s.z.assign(d, 0.0);
  s.z_step.assign(d, 0.0);
  s.z_damp.assign(d, 0.0);
  for (int r_i = 0; r_i < d; ++r_i) {
    for (int f = 0; f < ToyEncoder::kFeatures; ++f) {
      const double pw = proj[static_cast<std::size_t>(r_i) * ToyEncoder::kFeatures + f];
      s.z[r_i] += pw * feat[f];
      s.z_step[r_i] += pw * feat_s[f];
      s.z_damp[r_i] += pw * feat_d[f];
    }
  }
  return s;
}

FlowField to_flow(const Plane& u, const Plane& v, int w, int h) {
  FlowField f(w, h);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.u_plane()[i] = static_cast<float>(u[i]);
    f.v_plane()[i] = static_cast<float>(v[i]);
  }
  return f;
}

struct PredictorPass {
  std::vector<double> hidden;  // tanh activations
  std::vector<double> out;
};

PredictorPass predictor_forward(const Predictor& h, std::span<const double> z) {
  const int d = h.dim;
  PredictorPass pass{std::vector<double>(d), std::vector<double>(d)};
  for (int i = 0; i < d; ++i) {
    double a = h.b1[i];
    for (int j = 0; j < d; ++j) a += h.w1[static_cast<std::size_t>(i) * d + j] * z[j];
    pass.hidden[i] = std::tanh(a);
  }
  for (int i = 0; i < d; ++i) {
    double a = h.b2[i];
    for (int j = 0; j < d; ++j) a += h.w2[static_cast<std::size_t>(i) * d + j] * pass.hidden[j];
    pass.out[i] = a;
  }
  return pass;
}

// Tangent of h(z) along dz.
std::vector<double> predictor_tangent(const Predictor& h, const PredictorPass& pass,
                                      std::span<const double> dz) {
  const int d = h.dim;
  std::vector<double> dh(d), dp(d, 0.0);
  for (int i = 0; i < d; ++i) {
    double a = 0.0;
    for (int j = 0; j < d; ++j) a += h.w1[static_cast<std::size_t>(i) * d + j] * dz[j];
    dh[i] = (1.0 - pass.hidden[i] * pass.hidden[i]) * a;
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) dp[i] += h.w2[static_cast<std::size_t>(i) * d + j] * dh[j];
  return dp;
}

// Accumulates d loss / d predictor weights given d loss / d p.
void predictor_backward(const Predictor& h, const PredictorPass& pass, std::span<const double> z,
                        std::span<const double> grad_p, std::vector<double>& grad) {
  const int d = h.dim;
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  double* g_w1 = grad.data();
  double* g_b1 = g_w1 + dd;
  double* g_w2 = g_b1 + d;
  double* g_b2 = g_w2 + dd;
  std::vector<double> g_hidden(d, 0.0);
  for (int i = 0; i < d; ++i) {
    g_b2[i] += grad_p[i];
    for (int j = 0; j < d; ++j) {
      g_w2[static_cast<std::size_t>(i) * d + j] += grad_p[i] * pass.hidden[j];
      g_hidden[j] += h.w2[static_cast<std::size_t>(i) * d + j] * grad_p[i];
    }
  }
  for (int i = 0; i < d; ++i) {
    const double g_pre = g_hidden[i] * (1.0 - pass.hidden[i] * pass.hidden[i]);
    g_b1[i] += g_pre;
    for (int j = 0; j < d; ++j) g_w1[static_cast<std::size_t>(i) * d + j] += g_pre * z[j];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct FlowLossTerms {
  double value = 0.0;
  double d_step = 0.0;
  double d_damping = 0.0;
};

// Weighted L1 sequence loss in double precision with its parameter tangents.
FlowLossTerms stream_flow_loss(const StreamState& s, const FlowField& target, double gamma) {
  const std::vector<double> w = sequence_weights(s.u.size(), gamma);
  const double terms = 2.0 * static_cast<double>(target.size());
  FlowLossTerms out;
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    double sum = 0.0, ds = 0.0, dd = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
      const double du = s.u[k][i] - target.u_plane()[i];
      const double dv = s.v[k][i] - target.v_plane()[i];
      const double su = (du > 0) - (du < 0);
      const double sv = (dv > 0) - (dv < 0);
      sum += std::abs(du) + std::abs(dv);
      ds += su * s.u_step[k][i] + sv * s.v_step[k][i];
      dd += su * s.u_damp[k][i] + sv * s.v_damp[k][i];
    }
    out.value += w[k] * (sum / terms);
    out.d_step += w[k] * ds / terms;
    out.d_damping += w[k] * dd / terms;
  }
  return out;
}

}  // namespace

Predictor Predictor::random(int dim, std::uint64_t seed) {
  if (dim < 2) throw ArgumentError("predictor dimension must be >= 2");
  std::mt19937_64 gen(splitmix64(seed));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  auto fill = [&](std::vector<double>& v, std::size_t n, double s) {
    v.resize(n);
    for (double& x : v) x = s * (2.0 * unit_uniform(gen) - 1.0);
  };
  Predictor p;
  p.dim = dim;
  const std::size_t dd = static_cast<std::size_t>(dim) * dim;
  fill(p.w1, dd, 2.0 * scale);
  fill(p.b1, dim, 0.1);
  fill(p.w2, dd, 2.0 * scale);
  fill(p.b2, dim, 0.1);
  return p;
}

LatentVector Predictor::apply(const LatentVector& z) const {
  if (static_cast<int>(z.dim()) != dim) throw ArgumentError("predictor input dimension mismatch");
  return LatentVector(predictor_forward(*this, z.values()).out);
}

std::vector<double> Predictor::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto* part : {&w1, &b1, &w2, &b2}) flat.insert(flat.end(), part->begin(), part->end());
  return flat;
}

void Predictor::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw ArgumentError("predictor parameter count mismatch");
  std::size_t k = 0;
  for (auto* part : {&w1, &b1, &w2, &b2})
    for (double& x : *part) x = flat[k++];
}

ToyEncoder::ToyEncoder(int latent_dim, FlowHeadParams params, std::uint64_t projection_seed)
    : dim_(latent_dim), params_(params) {
  if (latent_dim < 2) throw ArgumentError("latent dimension must be >= 2");
  std::mt19937_64 gen(splitmix64(projection_seed));
  const double scale = std::sqrt(3.0 / kFeatures);
  projection_.resize(static_cast<std::size_t>(dim_) * kFeatures);
  for (double& x : projection_) x = scale * (2.0 * unit_uniform(gen) - 1.0);
}

EncoderOutput ToyEncoder::operator()(const Image& first, const Image& second) const {
  require_toy_shape(first, second);
  const StreamState s = run_stream(*this, params_, to_gray(first), to_gray(second), Rotation3{});
  EncoderOutput out;
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    out.flows.push_back(to_flow(s.u[k], s.v[k], s.width, s.height));
  }
  out.latent = LatentVector(s.z);
  return out;
}

Encoder ToyEncoder::as_encoder() const {
  return {kIterations, [enc = *this](const Image& a, const Image& b) { return enc(a, b); }};
}

PipelineResult siamese_pipeline(const ToyEncoder& encoder, const FlowHeadParams& params,
                                const Predictor& predictor, const PipelineInputs& inputs,
                                const AugmentationPair& augmentation, double gamma,
                                const FrozenTargets* frozen) {
  require_toy_shape(inputs.frame0, inputs.frame1);
  if (inputs.gt.width() != inputs.frame0.width() || inputs.gt.height() != inputs.frame0.height()) {
    throw ShapeError("ground-truth flow does not match the frames");
  }
  if (predictor.dim != encoder.latent_dim()) {
    throw ArgumentError("predictor and encoder latent dimensions differ");
  }
  const Image g0 = to_gray(inputs.frame0);
  const Image g1 = to_gray(inputs.frame1);

  struct Stream {
    Rotation3 r;
    StreamState state;
    PredictorPass pass;
    FlowLossTerms flow;
  };
  std::array<Stream, 2> streams{Stream{augmentation.left_rotation(), {}, {}, {}},
                                Stream{augmentation.right_rotation(), {}, {}, {}}};
  for (Stream& s : streams) {
    s.state = run_stream(encoder, params, g0, g1, s.r);
    s.pass = predictor_forward(predictor, s.state.z);
    const FlowField target = warp_flow(
        inputs.gt, build_warp_map(s.r, inputs.gt.width(), inputs.gt.height()), s.r);
    s.flow = stream_flow_loss(s.state, target, gamma);
  }
  Stream& left = streams[0];
  Stream& right = streams[1];

  PipelineResult res;
  res.z_left = LatentVector(left.state.z);
  res.z_right = LatentVector(right.state.z);
  res.p_left = LatentVector(left.pass.out);
  res.p_right = LatentVector(right.pass.out);
  const SimilarityLoss sim =
      frozen ? symmetrized_similarity_loss(res.p_left, frozen->z_right, res.p_right, frozen->z_left)
             : symmetrized_similarity_loss(res.p_left, res.z_right, res.p_right, res.z_left);
  res.similarity = sim.value;
  res.flow = left.flow.value + right.flow.value;
  res.loss = hybrid_loss(res.similarity, res.flow);

  // Flow-head scalars: the similarity term only reaches them through p = h(z).
  const auto dpl_step = predictor_tangent(predictor, left.pass, left.state.z_step);
  const auto dpl_damp = predictor_tangent(predictor, left.pass, left.state.z_damp);
  const auto dpr_step = predictor_tangent(predictor, right.pass, right.state.z_step);
  const auto dpr_damp = predictor_tangent(predictor, right.pass, right.state.z_damp);
  res.grad.step = dot(sim.grad_p_left, dpl_step) + dot(sim.grad_p_right, dpr_step) +
                  left.flow.d_step + right.flow.d_step;
  res.grad.damping = dot(sim.grad_p_left, dpl_damp) + dot(sim.grad_p_right, dpr_damp) +
                     left.flow.d_damping + right.flow.d_damping;

  res.grad.predictor.assign(predictor.parameter_count(), 0.0);
  predictor_backward(predictor, left.pass, left.state.z, sim.grad_p_left, res.grad.predictor);
  predictor_backward(predictor, right.pass, right.state.z, sim.grad_p_right, res.grad.predictor);
  return res;
}

}  // namespace omniflow
