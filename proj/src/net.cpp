#include "mipseg/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "mipseg/parallel.hpp"
#include "mipseg/volume_io.hpp"

namespace mipseg {

namespace detail {

struct Tensor {
  int c = 0, d0 = 0, d1 = 0, d2 = 0;
  std::vector<double> v, g;

  std::size_t size() const { return std::size_t(c) * d0 * d1 * d2; }
  std::size_t plane() const { return std::size_t(d0) * d1 * d2; }
  void shape(int c_, int d0_, int d1_, int d2_) {
    c = c_;
    d0 = d0_;
    d1 = d1_;
    d2 = d2_;
    v.assign(size(), 0.0);
    g.clear();
  }
};

enum class Op : std::uint8_t {
  kInput,
  kConv,
  kRelu,
  kPool,
  kUpsample,
  kConcat,
  kAdd,
  kLogistic
};

struct NodeDef {
  Op op;
  int a = -1, b = -1;  // producer node ids
  int conv = -1;       // ConvSpec index for kConv
};

struct Tape {
  std::vector<NodeDef> defs;
  std::vector<Tensor> t;
  std::vector<std::vector<std::int32_t>> pool_argmax;
  int head = -1;
  bool has_forward = false;
};

}  // namespace detail

using detail::NodeDef;
using detail::Op;
using detail::Tape;
using detail::Tensor;

namespace {

void validate_config(const NetConfig& cfg) {
  if (cfg.in_channels != 1)
    throw std::invalid_argument("in_channels must be 1");
  if (cfg.levels != 3)
    throw std::invalid_argument("levels is fixed at 3 (two pooling steps)");
  if (cfg.kernel != 3) throw std::invalid_argument("kernel is fixed at 3");
  if (cfg.base_channels < 1)
    throw std::invalid_argument("base_channels must be >= 1");
  if (cfg.residual_blocks_per_level < 1)
    throw std::invalid_argument("residual_blocks_per_level must be >= 1");
}

// Single source of truth for the architecture: emits conv specs and node
// defs in one fixed order shared by make_layout and the runtime tape.
struct GraphDef {
  std::vector<NodeDef> nodes;
  NetLayout layout;
};

struct GraphBuilder {
  GraphDef def;

  int conv_spec(const std::string& name, int cin, int cout, int k) {
    ConvSpec s;
    s.name = name;
    s.cin = cin;
    s.cout = cout;
    s.kernel = k;
    s.w_offset = def.layout.param_count;
    s.b_offset = s.w_offset + s.weight_count();
    def.layout.param_count = s.b_offset + std::size_t(cout);
    def.layout.convs.push_back(s);
    return int(def.layout.convs.size()) - 1;
  }

  int node(Op op, int a = -1, int b = -1, int conv = -1) {
    def.nodes.push_back({op, a, b, conv});
    return int(def.nodes.size()) - 1;
  }

  int conv(const std::string& name, int x, int cin, int cout, int k) {
    return node(Op::kConv, x, -1, conv_spec(name, cin, cout, k));
  }

  int res_blocks(const std::string& prefix, int x, int c, int count) {
    for (int r = 0; r < count; ++r) {
      std::string base = prefix + "_rb" + std::to_string(r);
      int y = node(Op::kRelu, conv(base + "_a", x, c, c, 3));
      y = conv(base + "_b", y, c, c, 3);
      x = node(Op::kRelu, node(Op::kAdd, y, x));
    }
    return x;
  }
};

GraphDef make_graph(const NetConfig& cfg) {
  validate_config(cfg);
  const int C = cfg.base_channels;
  const int rb = cfg.residual_blocks_per_level;
  GraphBuilder gb;

  int x = gb.node(Op::kInput);
  int e0 = gb.res_blocks("enc0", gb.node(Op::kRelu, gb.conv("enc0_in", x, cfg.in_channels, C, 3)), C, rb);
  int p1 = gb.node(Op::kPool, e0);
  int e1 = gb.res_blocks("enc1", gb.node(Op::kRelu, gb.conv("enc1_in", p1, C, 2 * C, 3)), 2 * C, rb);
  int p2 = gb.node(Op::kPool, e1);
  int e2 = gb.res_blocks("enc2", gb.node(Op::kRelu, gb.conv("enc2_in", p2, 2 * C, 4 * C, 3)), 4 * C, rb);

  int u1 = gb.conv("up1_proj", gb.node(Op::kUpsample, e2), 4 * C, 2 * C, 1);
  int d1 = gb.res_blocks(
      "dec1", gb.node(Op::kRelu, gb.conv("dec1_in", gb.node(Op::kConcat, u1, e1), 4 * C, 2 * C, 3)),
      2 * C, rb);
  int u0 = gb.conv("up0_proj", gb.node(Op::kUpsample, d1), 2 * C, C, 1);
  int d0 = gb.res_blocks(
      "dec0", gb.node(Op::kRelu, gb.conv("dec0_in", gb.node(Op::kConcat, u0, e0), 2 * C, C, 3)),
      C, rb);
  gb.node(Op::kLogistic, gb.conv("head", d0, C, 1, 1));
  return std::move(gb.def);
}

// ---------------------------------------------------------------------------
// conv kernels; zero padding, stride 1, kernel 1 or 3. Summation order per
// output element is fixed, so any thread partition gives bitwise-identical
// results. The three taps along the contiguous axis are fused into one
// stencil pass per line.

// acc[kk] += wm*line[kk-1] + w0*line[kk] + wp*line[kk+1], zero-padded.
inline void stencil_accumulate(double* acc, const double* line, int n, double wm,
                               double w0, double wp) {
  if (n == 1) {
    acc[0] += w0 * line[0];
    return;
  }
  acc[0] += w0 * line[0] + wp * line[1];
  for (int kk = 1; kk < n - 1; ++kk)
    acc[kk] += wm * line[kk - 1] + w0 * line[kk] + wp * line[kk + 1];
  acc[n - 1] += wm * line[n - 2] + w0 * line[n - 1];
}

void conv_forward(const Tensor& in, Tensor& out, const double* W, const double* B,
                  int k) {
  const int cin = in.c, d0 = in.d0, d1 = in.d1, d2 = in.d2;
  if (k == 1) {
    parallel_for(std::int64_t(out.c), [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t co = lo; co < hi; ++co) {
        double* dst = out.v.data() + std::size_t(co) * out.plane();
        std::fill(dst, dst + out.plane(), B[co]);
        for (int ci = 0; ci < cin; ++ci) {
          const double w = W[std::size_t(co) * cin + ci];
          const double* src = in.v.data() + std::size_t(ci) * in.plane();
          for (std::size_t p = 0; p < in.plane(); ++p) dst[p] += w * src[p];
        }
      }
    });
    return;
  }
  parallel_for(std::int64_t(out.c) * d0, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<double> acc(static_cast<std::size_t>(d2));
    for (std::int64_t task = lo; task < hi; ++task) {
      const int co = int(task / d0), i = int(task % d0);
      const double* wco = W + std::size_t(co) * cin * 27;
      for (int j = 0; j < d1; ++j) {
        std::fill(acc.begin(), acc.end(), B[co]);
        for (int ci = 0; ci < cin; ++ci) {
          const double* wci = wco + std::size_t(ci) * 27;
          const double* plane = in.v.data() + std::size_t(ci) * in.plane();
          for (int a = 0; a < 3; ++a) {
            const int ii = i + a - 1;
            if (ii < 0 || ii >= d0) continue;
            for (int b = 0; b < 3; ++b) {
              const int jj = j + b - 1;
              if (jj < 0 || jj >= d1) continue;
              const double* line = plane + (std::size_t(ii) * d1 + jj) * d2;
              const double* wrow = wci + (std::size_t(a) * 3 + b) * 3;
              stencil_accumulate(acc.data(), line, d2, wrow[0], wrow[1], wrow[2]);
            }
          }
        }
        std::copy(acc.begin(), acc.end(),
                  out.v.data() + (std::size_t(co) * d0 + i) * d1 * std::size_t(d2) +
                      std::size_t(j) * d2);
      }
    }
  });
}

void conv_backward_input(Tensor& in, const Tensor& out, const double* W, int k) {
  const int cin = in.c, cout = out.c, d0 = in.d0, d1 = in.d1, d2 = in.d2;
  if (k == 1) {
    parallel_for(std::int64_t(cin), [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t ci = lo; ci < hi; ++ci) {
        double* dst = in.g.data() + std::size_t(ci) * in.plane();
        for (int co = 0; co < cout; ++co) {
          const double w = W[std::size_t(co) * cin + ci];
          const double* src = out.g.data() + std::size_t(co) * out.plane();
          for (std::size_t p = 0; p < in.plane(); ++p) dst[p] += w * src[p];
        }
      }
    });
    return;
  }
  parallel_for(std::int64_t(cin) * d0, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<double> acc(static_cast<std::size_t>(d2));
    for (std::int64_t task = lo; task < hi; ++task) {
      const int ci = int(task / d0), i = int(task % d0);
      for (int j = 0; j < d1; ++j) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int co = 0; co < cout; ++co) {
          const double* wci = W + (std::size_t(co) * cin + ci) * 27;
          const double* plane = out.g.data() + std::size_t(co) * out.plane();
          for (int a = 0; a < 3; ++a) {
            const int ii = i - (a - 1);
            if (ii < 0 || ii >= d0) continue;
            for (int b = 0; b < 3; ++b) {
              const int jj = j - (b - 1);
              if (jj < 0 || jj >= d1) continue;
              const double* line = plane + (std::size_t(ii) * d1 + jj) * d2;
              const double* wrow = wci + (std::size_t(a) * 3 + b) * 3;
              // correlation with the flipped kernel along the line
              stencil_accumulate(acc.data(), line, d2, wrow[2], wrow[1], wrow[0]);
            }
          }
        }
        double* dst = in.g.data() + (std::size_t(ci) * d0 + i) * d1 * std::size_t(d2) +
                      std::size_t(j) * d2;
        for (int kk = 0; kk < d2; ++kk) dst[kk] += acc[std::size_t(kk)];
      }
    }
  });
}

// s[c] += sum_kk gline[kk] * iline[kk + c - 1] for the three line taps.
inline void stencil_dots(const double* gline, const double* iline, int n,
                         double* s) {
  if (n == 1) {
    s[1] += gline[0] * iline[0];
    return;
  }
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  s1 += gline[0] * iline[0];
  s2 += gline[0] * iline[1];
  for (int kk = 1; kk < n - 1; ++kk) {
    s0 += gline[kk] * iline[kk - 1];
    s1 += gline[kk] * iline[kk];
    s2 += gline[kk] * iline[kk + 1];
  }
  s0 += gline[n - 1] * iline[n - 2];
  s1 += gline[n - 1] * iline[n - 1];
  s[0] += s0;
  s[1] += s1;
  s[2] += s2;
}

void conv_backward_params(const Tensor& in, const Tensor& out, double* gW,
                          double* gB, int k) {
  const int cin = in.c, d0 = in.d0, d1 = in.d1, d2 = in.d2;
  parallel_for(out.c, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t co = lo; co < hi; ++co) {
      const double* gplane = out.g.data() + std::size_t(co) * out.plane();
      double bsum = 0.0;
      for (std::size_t p = 0; p < out.plane(); ++p) bsum += gplane[p];
      gB[co] += bsum;
      if (k == 1) {
        for (int ci = 0; ci < cin; ++ci) {
          const double* iplane = in.v.data() + std::size_t(ci) * in.plane();
          double s = 0.0;
          for (std::size_t p = 0; p < in.plane(); ++p) s += gplane[p] * iplane[p];
          gW[std::size_t(co) * cin + ci] += s;
        }
        continue;
      }
      for (int ci = 0; ci < cin; ++ci) {
        const double* iplane = in.v.data() + std::size_t(ci) * in.plane();
        double* gw = gW + (std::size_t(co) * cin + ci) * 27;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            double wacc[3] = {0, 0, 0};
            for (int i = 0; i < d0; ++i) {
              const int ii = i + a - 1;
              if (ii < 0 || ii >= d0) continue;
              for (int j = 0; j < d1; ++j) {
                const int jj = j + b - 1;
                if (jj < 0 || jj >= d1) continue;
                const double* gline = gplane + (std::size_t(i) * d1 + j) * d2;
                const double* iline = iplane + (std::size_t(ii) * d1 + jj) * d2;
                stencil_dots(gline, iline, d2, wacc);
              }
            }
            double* dst = gw + (std::size_t(a) * 3 + b) * 3;
            dst[0] += wacc[0];
            dst[1] += wacc[1];
            dst[2] += wacc[2];
          }
      }
    }
  });
}

// ---------------------------------------------------------------------------

void pool_forward(const Tensor& in, Tensor& out, std::vector<std::int32_t>& argmax) {
  const int c = in.c, d0 = out.d0, d1 = out.d1, d2 = out.d2;
  argmax.assign(out.size(), 0);
  std::size_t o = 0;
  for (int ch = 0; ch < c; ++ch) {
    const double* plane = in.v.data() + std::size_t(ch) * in.plane();
    for (int i = 0; i < d0; ++i)
      for (int j = 0; j < d1; ++j)
        for (int kk = 0; kk < d2; ++kk, ++o) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t bidx = 0;
          for (int di = 0; di < 2; ++di)
            for (int dj = 0; dj < 2; ++dj)
              for (int dk = 0; dk < 2; ++dk) {
                std::size_t idx = (std::size_t(2 * i + di) * in.d1 + (2 * j + dj)) *
                                      in.d2 +
                                  (2 * kk + dk);
                if (plane[idx] > best) {
                  best = plane[idx];
                  bidx = idx;
                }
              }
          out.v[o] = best;
          argmax[o] = std::int32_t(std::size_t(ch) * in.plane() + bidx);
        }
  }
}

void upsample_forward(const Tensor& in, Tensor& out) {
  for (int ch = 0; ch < in.c; ++ch) {
    const double* src = in.v.data() + std::size_t(ch) * in.plane();
    double* dst = out.v.data() + std::size_t(ch) * out.plane();
    for (int i = 0; i < out.d0; ++i)
      for (int j = 0; j < out.d1; ++j) {
        const double* sline = src + (std::size_t(i / 2) * in.d1 + j / 2) * in.d2;
        double* dline = dst + (std::size_t(i) * out.d1 + j) * out.d2;
        for (int kk = 0; kk < out.d2; ++kk) dline[kk] = sline[kk / 2];
      }
  }
}

void upsample_backward(Tensor& in, const Tensor& out) {
  for (int ch = 0; ch < in.c; ++ch) {
    const double* src = out.g.data() + std::size_t(ch) * out.plane();
    double* dst = in.g.data() + std::size_t(ch) * in.plane();
    for (int i = 0; i < in.d0; ++i)
      for (int j = 0; j < in.d1; ++j)
        for (int kk = 0; kk < in.d2; ++kk) {
          double s = 0.0;
          for (int di = 0; di < 2; ++di)
            for (int dj = 0; dj < 2; ++dj)
              for (int dk = 0; dk < 2; ++dk)
                s += src[(std::size_t(2 * i + di) * out.d1 + (2 * j + dj)) * out.d2 +
                         (2 * kk + dk)];
          dst[(std::size_t(i) * in.d1 + j) * in.d2 + kk] += s;
        }
  }
}

void ensure_grad(Tensor& t) {
  if (t.g.size() != t.size()) t.g.assign(t.size(), 0.0);
}

}  // namespace

NetLayout make_layout(const NetConfig& cfg) { return make_graph(cfg).layout; }

NetState init_state(const NetConfig& cfg, Rng& rng) {
  NetLayout layout = make_layout(cfg);
  NetState st;
  st.params.assign(layout.param_count, 0.0);
  st.adam_m.assign(layout.param_count, 0.0);
  st.adam_v.assign(layout.param_count, 0.0);
  for (const auto& c : layout.convs) {
    double fan_in = double(c.cin) * c.kernel * c.kernel * c.kernel;
    double half_width = std::sqrt(6.0 / fan_in);
    for (std::size_t w = 0; w < c.weight_count(); ++w)
      st.params[c.w_offset + w] = rng.uniform(-half_width, half_width);
    // biases stay zero
  }
  return st;
}

Network::Network(const NetConfig& cfg) : cfg_(cfg), tape_(new Tape) {
  GraphDef def = make_graph(cfg);
  layout_ = std::move(def.layout);
  tape_->defs = std::move(def.nodes);
  tape_->t.resize(tape_->defs.size());
  tape_->pool_argmax.resize(tape_->defs.size());
  tape_->head = int(tape_->defs.size()) - 1;
}

Network::~Network() = default;
Network::Network(Network&&) noexcept = default;
Network& Network::operator=(Network&&) noexcept = default;

ScalarVolume Network::forward(const NetState& state, const ScalarVolume& input) {
  check_dims(input.dims);
  if (input.dims.d0 % 4 || input.dims.d1 % 4 || input.dims.d2 % 4)
    throw std::invalid_argument("dims not divisible by 4");
  if (state.params.size() != layout_.param_count)
    throw std::invalid_argument("parameter vector does not match layout");
  if (std::int64_t(input.dims.voxels()) * 4 * cfg_.base_channels >
      std::numeric_limits<std::int32_t>::max())
    throw std::invalid_argument("volume too large");

  auto& defs = tape_->defs;
  auto& t = tape_->t;
  const double* P = state.params.data();

  for (std::size_t n = 0; n < defs.size(); ++n) {
    const NodeDef& nd = defs[n];
    switch (nd.op) {
      case Op::kInput: {
        t[n].shape(1, input.dims.d0, input.dims.d1, input.dims.d2);
        std::copy(input.data.begin(), input.data.end(), t[n].v.begin());
        break;
      }
      case Op::kConv: {
        const Tensor& a = t[std::size_t(nd.a)];
        const ConvSpec& cs = layout_.convs[std::size_t(nd.conv)];
        t[n].shape(cs.cout, a.d0, a.d1, a.d2);
        conv_forward(a, t[n], P + cs.w_offset, P + cs.b_offset, cs.kernel);
        break;
      }
      case Op::kRelu: {
        const Tensor& a = t[std::size_t(nd.a)];
        t[n].shape(a.c, a.d0, a.d1, a.d2);
        for (std::size_t p = 0; p < a.v.size(); ++p)
          t[n].v[p] = a.v[p] > 0.0 ? a.v[p] : 0.0;
        break;
      }
      case Op::kPool: {
        const Tensor& a = t[std::size_t(nd.a)];
        t[n].shape(a.c, a.d0 / 2, a.d1 / 2, a.d2 / 2);
        pool_forward(a, t[n], tape_->pool_argmax[n]);
        break;
      }
      case Op::kUpsample: {
        const Tensor& a = t[std::size_t(nd.a)];
        t[n].shape(a.c, a.d0 * 2, a.d1 * 2, a.d2 * 2);
        upsample_forward(a, t[n]);
        break;
      }
      case Op::kConcat: {
        const Tensor& a = t[std::size_t(nd.a)];
        const Tensor& b = t[std::size_t(nd.b)];
        t[n].shape(a.c + b.c, a.d0, a.d1, a.d2);
        std::copy(a.v.begin(), a.v.end(), t[n].v.begin());
        std::copy(b.v.begin(), b.v.end(), t[n].v.begin() + std::ptrdiff_t(a.v.size()));
        break;
      }
      case Op::kAdd: {
        const Tensor& a = t[std::size_t(nd.a)];
        const Tensor& b = t[std::size_t(nd.b)];
        t[n].shape(a.c, a.d0, a.d1, a.d2);
        for (std::size_t p = 0; p < a.v.size(); ++p) t[n].v[p] = a.v[p] + b.v[p];
        break;
      }
      case Op::kLogistic: {
        const Tensor& a = t[std::size_t(nd.a)];
        t[n].shape(a.c, a.d0, a.d1, a.d2);
        for (std::size_t p = 0; p < a.v.size(); ++p)
          t[n].v[p] = 1.0 / (1.0 + std::exp(-a.v[p]));
        break;
      }
    }
  }
  tape_->has_forward = true;

  const Tensor& head = t[std::size_t(tape_->head)];
  ScalarVolume out;
  out.dims = input.dims;
  out.data = head.v;
  return out;
}

std::vector<double> Network::backward(const NetState& state,
                                      const ScalarVolume& loss_grad) {
  if (!tape_->has_forward)
    throw std::logic_error("backward without a prior forward");
  auto& defs = tape_->defs;
  auto& t = tape_->t;
  Tensor& head = t[std::size_t(tape_->head)];
  if (loss_grad.dims.d0 != head.d0 || loss_grad.dims.d1 != head.d1 ||
      loss_grad.dims.d2 != head.d2)
    throw std::invalid_argument("loss gradient dims mismatch");
  const double* P = state.params.data();

  std::vector<double> grads(layout_.param_count, 0.0);
  for (auto& tensor : t) tensor.g.clear();
  ensure_grad(head);
  std::copy(loss_grad.data.begin(), loss_grad.data.end(), head.g.begin());

  for (std::size_t n = defs.size(); n-- > 0;) {
    const NodeDef& nd = defs[n];
    if (nd.op == Op::kInput) continue;
    Tensor& out = t[n];
    if (out.g.size() != out.size()) continue;  // no consumer reached it
    Tensor& a = t[std::size_t(nd.a)];
    const bool a_needs = defs[std::size_t(nd.a)].op != Op::kInput;
    switch (nd.op) {
      case Op::kConv: {
        const ConvSpec& cs = layout_.convs[std::size_t(nd.conv)];
        conv_backward_params(a, out, grads.data() + cs.w_offset,
                             grads.data() + cs.b_offset, cs.kernel);
        if (a_needs) {
          ensure_grad(a);
          conv_backward_input(a, out, P + cs.w_offset, cs.kernel);
        }
        break;
      }
      case Op::kRelu: {
        if (!a_needs) break;
        ensure_grad(a);
        for (std::size_t p = 0; p < a.v.size(); ++p)
          if (a.v[p] > 0.0) a.g[p] += out.g[p];
        break;
      }
      case Op::kPool: {
        ensure_grad(a);
        const auto& amax = tape_->pool_argmax[n];
        for (std::size_t p = 0; p < out.size(); ++p)
          a.g[std::size_t(amax[p])] += out.g[p];
        break;
      }
      case Op::kUpsample: {
        ensure_grad(a);
        upsample_backward(a, out);
        break;
      }
      case Op::kConcat: {
        Tensor& b = t[std::size_t(nd.b)];
        ensure_grad(a);
        ensure_grad(b);
        for (std::size_t p = 0; p < a.size(); ++p) a.g[p] += out.g[p];
        for (std::size_t p = 0; p < b.size(); ++p) b.g[p] += out.g[a.size() + p];
        break;
      }
      case Op::kAdd: {
        Tensor& b = t[std::size_t(nd.b)];
        ensure_grad(a);
        ensure_grad(b);
        for (std::size_t p = 0; p < out.size(); ++p) {
          a.g[p] += out.g[p];
          b.g[p] += out.g[p];
        }
        break;
      }
      case Op::kLogistic: {
        ensure_grad(a);
        for (std::size_t p = 0; p < out.size(); ++p) {
          double y = out.v[p];
          a.g[p] += out.g[p] * y * (1.0 - y);
        }
        break;
      }
      case Op::kInput:
        break;
    }
  }
  return grads;
}

ScalarVolume net_forward(const NetState& state, const NetConfig& cfg,
                         const ScalarVolume& input) {
  Network net(cfg);
  return net.forward(state, input);
}

std::vector<double> net_backward(const NetState& state, const NetConfig& cfg,
                                 const ScalarVolume& input,
                                 const ScalarVolume& loss_grad) {
  Network net(cfg);
  net.forward(state, input);
  return net.backward(state, loss_grad);
}

// ---------------------------------------------------------------------------
// NET1 serialization

namespace {

constexpr char kNetMagic[4] = {'N', 'E', 'T', '1'};

void put_u32(std::ofstream& f, std::uint32_t v) {
  f.write(reinterpret_cast<const char*>(&v), 4);
}

void put_u64(std::ofstream& f, std::uint64_t v) {
  f.write(reinterpret_cast<const char*>(&v), 8);
}

void put_f32_vec(std::ofstream& f, const std::vector<double>& v) {
  std::vector<float> raw(v.size());
  std::transform(v.begin(), v.end(), raw.begin(),
                 [](double x) { return float(x); });
  f.write(reinterpret_cast<const char*>(raw.data()),
          std::streamsize(raw.size() * 4));
}

std::uint32_t get_u32(std::ifstream& f) {
  std::uint32_t v;
  f.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

std::uint64_t get_u64(std::ifstream& f) {
  std::uint64_t v;
  f.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

void get_f32_vec(std::ifstream& f, std::vector<double>& v, std::size_t n) {
  std::vector<float> raw(n);
  f.read(reinterpret_cast<char*>(raw.data()), std::streamsize(n * 4));
  v.resize(n);
  std::transform(raw.begin(), raw.end(), v.begin(),
                 [](float x) { return double(x); });
}

}  // namespace

void save_net(const std::filesystem::path& path, const NetConfig& cfg,
              const NetState& state) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f.write(kNetMagic, 4);
  put_u32(f, std::uint32_t(cfg.in_channels));
  put_u32(f, std::uint32_t(cfg.base_channels));
  put_u32(f, std::uint32_t(cfg.levels));
  put_u32(f, std::uint32_t(cfg.kernel));
  put_u32(f, std::uint32_t(cfg.residual_blocks_per_level));
  put_u64(f, state.params.size());
  put_f32_vec(f, state.params);
  put_f32_vec(f, state.adam_m);
  put_f32_vec(f, state.adam_v);
  put_u64(f, std::uint64_t(state.step_count));
  if (!f) throw IoError("write failed: " + path.string());
}

std::pair<NetConfig, NetState> load_net(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kNetMagic, 4) != 0) throw IoError("bad magic");
  NetConfig cfg;
  cfg.in_channels = int(get_u32(f));
  cfg.base_channels = int(get_u32(f));
  cfg.levels = int(get_u32(f));
  cfg.kernel = int(get_u32(f));
  cfg.residual_blocks_per_level = int(get_u32(f));
  if (!f) throw IoError("truncated payload");
  validate_config(cfg);
  std::uint64_t count = get_u64(f);
  if (count != make_layout(cfg).param_count)
    throw IoError("parameter count does not match config");
  NetState st;
  get_f32_vec(f, st.params, std::size_t(count));
  get_f32_vec(f, st.adam_m, std::size_t(count));
  get_f32_vec(f, st.adam_v, std::size_t(count));
  st.step_count = std::int64_t(get_u64(f));
  if (!f) throw IoError("truncated payload");
  return {cfg, st};
}

}  // namespace mipseg
